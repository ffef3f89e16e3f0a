//! Polytope norms `||x|| = max_i (A x)_i` with the unit ball `P(A, 1)`, the
//! faces of the polar polytope (the convex hull of the rows of `A`), and the
//! constructions the uniqueness conditions are stated on.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hpoly::HPolyhedron;
use crate::linalg::{affine_dim, dot, kernel_basis, rank, rat, Rat, RatMatrix};
use crate::lp::{self, LinearProgram, LpStatus};

/// Scale guard for face enumeration and threshold search.
pub const FACE_ENUMERATION_GUARD: usize = 24;

/// A face of the polar ball, identified by the sorted row indices of the polar
/// vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolarFace {
    pub vertex_indices: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeNorm {
    k: usize,
    a: RatMatrix,
    name: Option<String>,
}

impl PolytopeNorm {
    /// Validates the full ball contract: no duplicate rows, central symmetry,
    /// full rank, bounded ball, and every row an actual vertex of the polar.
    pub fn new(a: RatMatrix, name: Option<String>) -> Result<Self> {
        let k = a.cols();
        let r = a.rows();
        if k == 0 || r == 0 {
            return Err(Error::InvalidNorm("empty vertex matrix".into()));
        }
        let mut seen = BTreeSet::new();
        for row in a.row_iter() {
            if !seen.insert(row.to_vec()) {
                return Err(Error::InvalidNorm("duplicate rows".into()));
            }
        }
        for row in a.row_iter() {
            if !seen.contains(&crate::linalg::neg(row)) {
                return Err(Error::InvalidNorm(
                    "not centrally symmetric: a row is missing its negation".into(),
                ));
            }
        }
        if rank(&a) != k {
            return Err(Error::InvalidNorm(
                "rows do not span: ball is unbounded".into(),
            ));
        }
        let norm = PolytopeNorm { k, a, name };
        // Boundedness certificate: the support of the ball is finite in every
        // signed basis direction. Implied by symmetry + rank, but cheap to attest.
        let ball = norm.ball_hrep();
        for j in 0..k {
            for sign in [1i64, -1] {
                let mut obj = vec![Rat::zero(); k];
                obj[j] = rat(-sign);
                let out = lp::solve(&LinearProgram {
                    objective: obj,
                    constraints: ball.clone(),
                    equalities: None,
                })?;
                if out.status != LpStatus::Optimal {
                    return Err(Error::InvalidNorm("ball is unbounded".into()));
                }
            }
        }
        for i in 0..r {
            if norm.row_in_hull_of_others(i)? {
                return Err(Error::InvalidNorm(format!(
                    "row {i} is not a vertex of the polar"
                )));
            }
        }
        Ok(norm)
    }

    fn row_in_hull_of_others(&self, i: usize) -> Result<bool> {
        let r = self.a.rows();
        // Feasibility of sum_j lambda_j v_j = v_i, sum lambda = 1, lambda >= 0 (j != i).
        let vars = r - 1;
        let mut eq_a = RatMatrix::zeros(0, vars);
        let mut eq_b = Vec::new();
        for c in 0..self.k {
            let mut row = Vec::with_capacity(vars);
            for j in 0..r {
                if j != i {
                    row.push(self.a.get(j, c).clone());
                }
            }
            eq_a.push_row(row);
            eq_b.push(self.a.get(i, c).clone());
        }
        eq_a.push_row(vec![Rat::one(); vars]);
        eq_b.push(Rat::one());
        let out = lp::solve(&LinearProgram {
            objective: vec![Rat::zero(); vars],
            constraints: crate::project::nonneg_rows(vars),
            equalities: Some(HPolyhedron::new(eq_a, eq_b)),
        })?;
        Ok(out.status == LpStatus::Optimal)
    }

    /// l-infinity ball: rows `e_1, -e_1, ..., e_k, -e_k` (the polar is the
    /// cross-polytope).
    pub fn linf(k: usize) -> Self {
        assert!(k >= 1);
        let mut a = RatMatrix::zeros(0, k);
        for i in 0..k {
            for sign in [1i64, -1] {
                let mut row = vec![Rat::zero(); k];
                row[i] = rat(sign);
                a.push_row(row);
            }
        }
        PolytopeNorm::new(a, Some(format!("linf:{k}"))).expect("builtin linf is valid")
    }

    /// l1 ball: rows are all sign vectors in binary-reflected Gray-code order
    /// (the polar is the hypercube).
    pub fn l1(k: usize) -> Self {
        assert!((1..=16).contains(&k));
        let mut a = RatMatrix::zeros(0, k);
        for i in 0..(1usize << k) {
            let g = i ^ (i >> 1);
            let row: Vec<Rat> = (0..k)
                .map(|j| if g >> j & 1 == 0 { rat(1) } else { rat(-1) })
                .collect();
            a.push_row(row);
        }
        PolytopeNorm::new(a, Some(format!("l1:{k}"))).expect("builtin l1 is valid")
    }

    /// Builtin lookup for the shorthand names `linf:<k>` and `l1:<k>`.
    pub fn builtin(spec: &str) -> Option<Result<Self>> {
        let (name, k) = spec.split_once(':')?;
        let k: usize = k.parse().ok()?;
        match name {
            "linf" => Some(if k >= 1 {
                Ok(Self::linf(k))
            } else {
                Err(Error::InvalidNorm("k must be >= 1".into()))
            }),
            "l1" => Some(if (1..=16).contains(&k) {
                Ok(Self::l1(k))
            } else {
                Err(Error::InvalidNorm("l1 supports 1 <= k <= 16".into()))
            }),
            _ => None,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    pub fn vertex(&self, i: usize) -> &[Rat] {
        self.a.row(i)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "custom".into())
    }

    /// The unit ball as `A x <= 1`.
    pub fn ball_hrep(&self) -> HPolyhedron {
        let b = vec![Rat::one(); self.a.rows()];
        HPolyhedron::new(self.a.clone(), b)
    }

    /// `||x|| = max_i a_i . x`. Zero exactly at the origin.
    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.k {
            return Err(Error::DimensionMismatch);
        }
        let v = self
            .a
            .row_iter()
            .map(|row| dot(row, x))
            .max()
            .expect("norm has rows");
        debug_assert!(!v.is_negative());
        Ok(v)
    }

    /// Indices of the rows attaining the norm; errors at the origin where the
    /// active set is undefined.
    pub fn active_constraints(&self, x: &[Rat]) -> Result<Vec<usize>> {
        if x.len() != self.k {
            return Err(Error::DimensionMismatch);
        }
        if x.iter().all(Zero::is_zero) {
            return Err(Error::ActiveSetUndefined);
        }
        let values: Vec<Rat> = self.a.row_iter().map(|row| dot(row, x)).collect();
        let max = values.iter().max().unwrap().clone();
        Ok(values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == max)
            .map(|(i, _)| i)
            .collect())
    }

    /// True iff some hyperplane contains exactly the indexed rows of the polar
    /// and strictly separates every other row, decided by an exact LP that
    /// maximises the minimum strict gap.
    pub fn is_polar_face(&self, s: &[usize]) -> bool {
        assert!(!s.is_empty(), "is_polar_face: empty index set");
        assert!(s.iter().all(|&i| i < self.a.rows()), "index out of range");
        let in_s = {
            let mut v = vec![false; self.a.rows()];
            for &i in s {
                v[i] = true;
            }
            v
        };
        // Variables (c, c0, t): c·v = c0 on S, c·w - c0 + t <= 0 off S, t <= 1.
        let d = self.k + 2;
        let mut ineq_a = RatMatrix::zeros(0, d);
        let mut ineq_b = Vec::new();
        for (i, row) in self.a.row_iter().enumerate() {
            if in_s[i] {
                continue;
            }
            let mut r: Vec<Rat> = row.to_vec();
            r.push(-Rat::one());
            r.push(Rat::one());
            ineq_a.push_row(r);
            ineq_b.push(Rat::zero());
        }
        let mut cap = vec![Rat::zero(); d];
        cap[d - 1] = Rat::one();
        ineq_a.push_row(cap);
        ineq_b.push(Rat::one());
        let mut eq_a = RatMatrix::zeros(0, d);
        let mut eq_b = Vec::new();
        for &i in s {
            let mut r: Vec<Rat> = self.a.row(i).to_vec();
            r.push(-Rat::one());
            r.push(Rat::zero());
            eq_a.push_row(r);
            eq_b.push(Rat::zero());
        }
        let mut obj = vec![Rat::zero(); d];
        obj[d - 1] = -Rat::one();
        let out = lp::solve(&LinearProgram {
            objective: obj,
            constraints: HPolyhedron::new(ineq_a, ineq_b),
            equalities: Some(HPolyhedron::new(eq_a, eq_b)),
        })
        .expect("face test LP is well-formed");
        match out.status {
            LpStatus::Optimal => out.value.unwrap().is_negative(), // max t > 0
            _ => false,
        }
    }

    /// Build a validated `PolarFace` from row indices.
    pub fn polar_face(&self, mut indices: Vec<usize>) -> Result<PolarFace> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() || indices.iter().any(|&i| i >= self.a.rows()) {
            return Err(Error::Parse("invalid face vertex indices".into()));
        }
        if !self.is_polar_face(&indices) {
            return Err(Error::Parse(format!(
                "indices {indices:?} are not a face of the polar"
            )));
        }
        let dim = self.face_dim(&indices);
        Ok(PolarFace {
            vertex_indices: indices,
            dim,
        })
    }

    pub fn face_dim(&self, indices: &[usize]) -> usize {
        let pts: Vec<Vec<Rat>> = indices.iter().map(|&i| self.a.row(i).to_vec()).collect();
        affine_dim(&pts).expect("face has vertices")
    }

    /// All nonempty proper faces of the polar up to `max_dim`, in canonical
    /// order (lexicographic on the sorted vertex-index sets). Guarded at
    /// r <= 24; `enumerate_polar_faces_unguarded` skips the guard.
    pub fn enumerate_polar_faces(&self, max_dim: Option<usize>) -> Result<Vec<PolarFace>> {
        if self.a.rows() > FACE_ENUMERATION_GUARD {
            return Err(Error::FaceEnumerationTooLarge(self.a.rows()));
        }
        Ok(self.enumerate_polar_faces_unguarded(max_dim))
    }

    pub fn enumerate_polar_faces_unguarded(&self, max_dim: Option<usize>) -> Vec<PolarFace> {
        let r = self.a.rows();
        let k = self.k;
        // Facets first: each k-subset spanning a hyperplane whose closed side
        // holds every row. The facet's vertex set is everything on the plane.
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut subset = vec![0usize; k];
        enumerate_k_subsets(r, k, &mut subset, 0, 0, &mut |s| {
            let pts: Vec<Vec<Rat>> = s.iter().map(|&i| self.a.row(i).to_vec()).collect();
            if affine_dim(&pts).unwrap() != k - 1 {
                return;
            }
            let dirs: Vec<Vec<Rat>> = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
                .collect();
            let kern = kernel_basis(&RatMatrix::from_rows(dirs, k));
            debug_assert_eq!(kern.len(), 1);
            let mut c = kern.into_iter().next().unwrap();
            let mut c0 = dot(&c, &pts[0]);
            let mut on_plane = Vec::new();
            let mut side = 0i8;
            for (i, row) in self.a.row_iter().enumerate() {
                let v = dot(&c, row);
                match v.cmp(&c0) {
                    std::cmp::Ordering::Equal => on_plane.push(i),
                    std::cmp::Ordering::Less => {
                        if side > 0 {
                            return;
                        }
                        side = -1;
                    }
                    std::cmp::Ordering::Greater => {
                        if side < 0 {
                            return;
                        }
                        side = 1;
                    }
                }
            }
            if side == 0 {
                return; // all rows on the plane: cannot happen at full rank
            }
            if side < 0 {
                for v in c.iter_mut() {
                    *v = -&*v;
                }
                c0 = -c0;
            }
            let _ = (c, c0);
            facets.insert(on_plane);
        });

        // Every proper face is an intersection of facets: close under intersection.
        let mut faces: BTreeSet<Vec<usize>> = facets.clone();
        let mut frontier: Vec<Vec<usize>> = facets.iter().cloned().collect();
        while let Some(f) = frontier.pop() {
            for g in facets.iter() {
                let inter: Vec<usize> = f
                    .iter()
                    .copied()
                    .filter(|i| g.binary_search(i).is_ok())
                    .collect();
                if !inter.is_empty() && faces.insert(inter.clone()) {
                    frontier.push(inter);
                }
            }
        }

        let mut out: Vec<PolarFace> = faces
            .into_iter()
            .map(|vs| {
                let dim = self.face_dim(&vs);
                PolarFace {
                    vertex_indices: vs,
                    dim,
                }
            })
            .filter(|f| max_dim.is_none_or(|m| f.dim <= m))
            .collect();
        out.sort();
        for f in &out {
            assert!(
                self.is_polar_face(&f.vertex_indices),
                "face certification failed for {:?}",
                f.vertex_indices
            );
        }
        out
    }

    /// Canonical plain-text encoding (the norm file format).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.a.rows(), self.k);
        for row in self.a.row_iter() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parse the norm file format: first significant line `r k`, then `r`
    /// lines of `k` rationals. `#` starts a comment line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = significant_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty norm file".into()))?;
        let mut parts = header.split_whitespace();
        let r: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("norm header must be \"r k\"".into()))?;
        let k: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("norm header must be \"r k\"".into()))?;
        if parts.next().is_some() {
            return Err(Error::Parse("norm header must be \"r k\"".into()));
        }
        let mut a = RatMatrix::zeros(0, k);
        for i in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("norm file ends before row {i}")))?;
            let row = parse_rat_line(line, k)?;
            a.push_row(row);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after norm rows".into()));
        }
        PolytopeNorm::new(a, None)
    }

    /// FNV-1a over the canonical text encoding; stable fingerprint for reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

pub(crate) fn significant_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_rat_line(line: &str, expect: usize) -> Result<Vec<Rat>> {
    let row: Result<Vec<Rat>> = line
        .split_whitespace()
        .map(crate::linalg::parse_rat)
        .collect();
    let row = row?;
    if row.len() != expect {
        return Err(Error::Parse(format!(
            "expected {expect} rationals, got {} in {line:?}",
            row.len()
        )));
    }
    Ok(row)
}

fn enumerate_k_subsets(
    n: usize,
    k: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(buf);
        return;
    }
    for i in start..n {
        if n - i < k - depth {
            break;
        }
        buf[depth] = i;
        enumerate_k_subsets(n, k, buf, depth + 1, i + 1, f);
    }
}

/// Dimension of the Minkowski sum of the faces' affine hulls: the rank of the
/// stacked per-face direction vectors.
pub fn minkowski_dim_of_affine_sum(faces: &[PolarFace], norm: &PolytopeNorm) -> usize {
    assert!(!faces.is_empty(), "minkowski_dim_of_affine_sum: no faces");
    let k = norm.k();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for f in faces {
        let anchor = norm.vertex(f.vertex_indices[0]);
        for &i in &f.vertex_indices[1..] {
            rows.push(
                norm.vertex(i)
                    .iter()
                    .zip(anchor)
                    .map(|(a, b)| a - b)
                    .collect(),
            );
        }
    }
    rank(&RatMatrix::from_rows(rows, k))
}
