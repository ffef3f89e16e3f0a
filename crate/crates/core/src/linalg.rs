//! Exact rational scalars, dense matrices and the rank / kernel / affine-dimension
//! primitives everything else is built on. No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `num_rational` keeps values reduced with a positive
/// denominator, which is exactly the canonical form we need.
pub type Rat = num_rational::BigRational;

/// Integer as a `Rat`.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a `Rat`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse the text syntax shared by all file formats: `p/q` or `p`, optional
/// leading minus (ASCII `-` or U+2212), no whitespace inside the number.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.replace('\u{2212}', "-");
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(Error::Parse(format!("invalid rational {s:?}")));
    }
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    let denom: BigInt = match denom {
        Some(d) => d
            .parse()
            .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?,
        None => BigInt::one(),
    };
    if denom <= BigInt::zero() {
        return Err(Error::Parse(format!(
            "invalid rational {s:?}: denominator must be positive"
        )));
    }
    Ok(Rat::new(numer, denom))
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x).collect()
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Panics on ragged input; `cols` disambiguates the zero-row case.
    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        RatMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: Vec<Rat>) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rat]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "mul_vec length mismatch");
        self.row_iter().map(|r| dot(r, v)).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }
}

/// Exact rank via fraction-free (Bareiss) elimination on the integer-scaled matrix.
pub fn rank(m: &RatMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    // Scale each row to integers; row scaling preserves rank.
    let mut a: Vec<Vec<BigInt>> = m
        .row_iter()
        .map(|row| {
            let mut l = BigInt::one();
            for x in row {
                l = l.lcm(x.denom());
            }
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let (nr, nc) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut pivot_row = 0;
    for col in 0..nc {
        if pivot_row == nr {
            break;
        }
        let Some(p) = (pivot_row..nr).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(pivot_row, p);
        for r in pivot_row + 1..nr {
            for c in col + 1..nc {
                let num = &a[pivot_row][col] * &a[r][c] - &a[r][col] * &a[pivot_row][c];
                // Exact by the Bareiss identity.
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[pivot_row][col].clone();
        pivot_row += 1;
    }
    pivot_row
}

/// `dim aff{points}`: rank of the matrix with rows `p_i - p_0`.
pub fn affine_dim(points: &[Vec<Rat>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyPointSet);
    };
    let cols = first.len();
    let rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| {
            assert_eq!(p.len(), cols, "affine_dim: point length mismatch");
            p.iter().zip(first).map(|(a, b)| a - b).collect()
        })
        .collect();
    Ok(rank(&RatMatrix::from_rows(rows, cols)))
}

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let (nr, nc) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nc {
        if row == nr {
            break;
        }
        let Some(p) = (row..nr).find(|&r| !m.get(r, col).is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..nc {
                let tmp = m.get(p, c).clone();
                m.set(p, c, m.get(row, c).clone());
                m.set(row, c, tmp);
            }
        }
        let inv = m.get(row, col).clone();
        for c in col..nc {
            let v = m.get(row, c) / &inv;
            m.set(row, c, v);
        }
        for r in 0..nr {
            if r != row && !m.get(r, col).is_zero() {
                let f = m.get(r, col).clone();
                for c in col..nc {
                    let v = m.get(r, c) - &f * m.get(row, c);
                    m.set(r, c, v);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the right null space; `M v = 0` exactly for every returned `v`.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let nc = m.cols();
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let pivot_set: Vec<bool> = {
        let mut s = vec![false; nc];
        for &p in &pivots {
            s[p] = true;
        }
        s
    };
    let mut basis = Vec::new();
    for free in 0..nc {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); nc];
        v[free] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(i, free).clone();
        }
        debug_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        basis.push(v);
    }
    basis
}

/// One exact solution of `A x = b`, or `None` when inconsistent.
/// Free variables are set to zero; `unique` is true when the solution is unique.
pub fn solve_linear(a: &RatMatrix, b: &[Rat]) -> Option<(Vec<Rat>, bool)> {
    assert_eq!(a.rows(), b.len(), "solve_linear: rhs length mismatch");
    let nc = a.cols();
    let mut aug = RatMatrix::zeros(a.rows(), nc + 1);
    for r in 0..a.rows() {
        for c in 0..nc {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, nc, b[r].clone());
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&nc) {
        return None; // a pivot in the rhs column: inconsistent
    }
    let mut x = vec![Rat::zero(); nc];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug.get(i, nc).clone();
    }
    Some((x, pivots.len() == nc))
}

/// Incrementally maintained row space, used where many small rank updates are
/// needed (threshold search). Rows are kept in reduced echelon form.
#[derive(Clone, Debug, Default)]
pub struct RowBasis {
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; insert the remainder if nonzero.
    /// Returns true when the rank grew.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].clone();
        for x in v.iter_mut() {
            *x /= &inv;
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut probe = self.clone();
        !probe.insert(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(vals: &[i64]) -> Vec<Rat> {
        vals.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(rank(&RatMatrix::identity(2)), 2);
        assert_eq!(rank(&RatMatrix::zeros(3, 3)), 0);
    }

    #[test]
    fn rank_hand_eliminated() {
        // rows (1,1,0),(0,1,1),(1,0,3): r3-r1 = (0,-1,3), +r2 = (0,0,4) != 0, so rank 3.
        let m = RatMatrix::from_int_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 3]]);
        assert_eq!(rank(&m), 3);
    }

    #[test]
    fn affine_dim_cases() {
        assert_eq!(affine_dim(&[rv(&[5, 7])]).unwrap(), 0);
        assert_eq!(
            affine_dim(&[rv(&[0, 0]), rv(&[1, 0]), rv(&[2, 0])]).unwrap(),
            1
        );
        let cube: Vec<Vec<Rat>> = (0..8)
            .map(|i| rv(&[i & 1, (i >> 1) & 1, (i >> 2) & 1]))
            .collect();
        assert_eq!(affine_dim(&cube).unwrap(), 3);
        assert!(matches!(affine_dim(&[]), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn kernel_cases() {
        assert!(kernel_basis(&RatMatrix::identity(3)).is_empty());
        let m = RatMatrix::from_int_rows(&[&[1, -1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // (1,1) up to scaling
        assert_eq!(&k[0][0], &k[0][1]);
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn kernel_l1_k3_construction() {
        // Columns: the four cube vertices with first coordinate -1, the vertex
        // (1,1,1), and the edge (1,-1,-1),(-1,-1,-1). A strictly positive kernel
        // vector exists; (1/12,1/12,1/12,1/12,1/3,1/6,1/6) solves it by hand.
        let cols: Vec<Vec<i64>> = vec![
            vec![-1, 1, 1],
            vec![-1, -1, 1],
            vec![-1, -1, -1],
            vec![-1, 1, -1],
            vec![1, 1, 1],
            vec![1, -1, -1],
            vec![-1, -1, -1],
        ];
        let rows: Vec<Vec<Rat>> = (0..3)
            .map(|r| cols.iter().map(|c| rat(c[r])).collect())
            .collect();
        let m = RatMatrix::from_rows(rows, 7);
        let basis = kernel_basis(&m);
        assert_eq!(rank(&m) + basis.len(), 7);
        for v in &basis {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        let hand: Vec<Rat> = vec![
            ratio(1, 12),
            ratio(1, 12),
            ratio(1, 12),
            ratio(1, 12),
            ratio(1, 3),
            ratio(1, 6),
            ratio(1, 6),
        ];
        assert!(m.mul_vec(&hand).iter().all(Zero::is_zero));
        // The hand vector lies in the span of the returned basis.
        let mut span = RowBasis::new();
        for v in &basis {
            span.insert(v);
        }
        assert!(span.contains(&hand));
    }

    #[test]
    fn parse_rat_syntax() {
        assert_eq!(parse_rat("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rat("-7").unwrap(), rat(-7));
        assert_eq!(parse_rat("\u{2212}1/2").unwrap(), ratio(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1/-2").is_err());
        assert!(parse_rat("1 /2").is_err());
        assert!(parse_rat("").is_err());
    }

    #[test]
    fn solve_linear_unique_and_singular() {
        let a = RatMatrix::from_int_rows(&[&[2, 0], &[0, 4]]);
        let (x, unique) = solve_linear(&a, &rv(&[6, 8])).unwrap();
        assert!(unique);
        assert_eq!(x, rv(&[3, 2]));
        let s = RatMatrix::from_int_rows(&[&[1, 1], &[2, 2]]);
        assert!(solve_linear(&s, &rv(&[1, 3])).is_none());
        let (_, unique) = solve_linear(&s, &rv(&[1, 2])).unwrap();
        assert!(!unique);
    }

    proptest! {
        #[test]
        fn rank_plus_nullity(entries in proptest::collection::vec(-5i64..=5, 12)) {
            let m = RatMatrix::from_rows(
                entries.chunks(4).map(|c| c.iter().map(|&x| rat(x)).collect()).collect(),
                4,
            );
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), 4);
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn affine_dim_translation_invariant(
            pts in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 1..6),
            t in proptest::collection::vec(-4i64..=4, 3),
        ) {
            let pts: Vec<Vec<Rat>> = pts.iter().map(|p| rv(p)).collect();
            let shifted: Vec<Vec<Rat>> = pts
                .iter()
                .map(|p| p.iter().zip(&t).map(|(a, &b)| a + rat(b)).collect())
                .collect();
            prop_assert_eq!(affine_dim(&pts).unwrap(), affine_dim(&shifted).unwrap());
        }

        #[test]
        fn canonical_form_roundtrip(n in -40i64..=40, d in 1i64..=12, k in 1i64..=9) {
            prop_assert_eq!(Rat::new(BigInt::from(n * k), BigInt::from(d * k)), ratio(n, d));
        }
    }
}
