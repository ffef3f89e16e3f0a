//! H-representation polyhedra `A x <= b` over exact rationals.

use num_traits::{One, Zero};

use crate::linalg::{dot, solve_linear, Rat, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolyhedron {
    pub a: RatMatrix,
    pub b: Vec<Rat>,
}

impl HPolyhedron {
    pub fn new(a: RatMatrix, b: Vec<Rat>) -> Self {
        assert_eq!(a.rows(), b.len(), "HPolyhedron: rhs length mismatch");
        HPolyhedron { a, b }
    }

    /// All of R^dim (no constraints).
    pub fn full_space(dim: usize) -> Self {
        HPolyhedron::new(RatMatrix::zeros(0, dim), Vec::new())
    }

    /// The canonical empty representation `0·x <= -1`.
    pub fn empty(dim: usize) -> Self {
        HPolyhedron::new(RatMatrix::zeros(1, dim), vec![-Rat::one()])
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn row(&self, i: usize) -> (&[Rat], &Rat) {
        (self.a.row(i), &self.b[i])
    }

    pub fn push_row(&mut self, coef: Vec<Rat>, rhs: Rat) {
        self.a.push_row(coef);
        self.b.push(rhs);
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        assert_eq!(x.len(), self.dim(), "contains: point length mismatch");
        self.a
            .row_iter()
            .zip(&self.b)
            .all(|(row, rhs)| dot(row, x) <= *rhs)
    }

    /// Indices of constraints tight at `x`.
    pub fn active_rows(&self, x: &[Rat]) -> Vec<usize> {
        self.a
            .row_iter()
            .zip(&self.b)
            .enumerate()
            .filter(|(_, (row, rhs))| dot(row, x) == **rhs)
            .map(|(i, _)| i)
            .collect()
    }
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        left: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if left == 0 {
            f(cur);
            return;
        }
        for i in start..=n.saturating_sub(left) {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Brute-force vertex enumeration: every d-subset of rows is solved exactly and
/// the solution kept when it is unique and feasible. Exponential; this exists
/// only to back the projection and Fréchet-set oracles, not as a conversion
/// feature. The caller must pass a bounded polyhedron for the output to be a
/// complete V-representation.
pub fn enumerate_vertices(p: &HPolyhedron) -> Vec<Vec<Rat>> {
    let d = p.dim();
    let m = p.rows();
    assert!(
        binomial(m, d) <= 5_000_000,
        "vertex enumeration too large: C({m},{d})"
    );
    let mut seen = std::collections::BTreeSet::new();
    for_each_combination(m, d, &mut |subset| {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| p.a.row(i).to_vec()).collect();
        let rhs: Vec<Rat> = subset.iter().map(|&i| p.b[i].clone()).collect();
        let sys = RatMatrix::from_rows(rows, d);
        if let Some((x, unique)) = solve_linear(&sys, &rhs) {
            if unique && p.contains(&x) {
                seen.insert(x);
            }
        }
    });
    seen.into_iter().collect()
}

/// Support value `max w·x` over an explicit vertex list.
pub fn support_over_vertices(vertices: &[Vec<Rat>], w: &[Rat]) -> Option<Rat> {
    vertices.iter().map(|v| dot(w, v)).max()
}

pub fn is_zero_row(row: &[Rat]) -> bool {
    row.iter().all(Zero::is_zero)
}
