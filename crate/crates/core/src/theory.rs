//! The combinatorial uniqueness conditions on polar-face tuples, the mean-set
//! dimension they predict, the facet-extension property, and the search for
//! the smallest sample size admitting a tuple that passes all three.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hpoly::HPolyhedron;
use crate::linalg::{affine_dim, rat, Rat, RatMatrix, RowBasis};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::norm::{minkowski_dim_of_affine_sum, PolarFace, PolytopeNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// `0 in relint conv(union G_i)`: the tuple can occur at all.
    pub possible: bool,
    /// `sum dim G_i = dim sum aff G_i`: the tuple occurs with positive probability.
    pub positive_probability: bool,
    /// `dim conv(union G_i) = k`: the tuple forces a unique mean.
    pub unique: bool,
    /// `k - dim conv(union G_i)`: the mean-set dimension this face type induces.
    pub predicted_fm_dim: usize,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.possible && self.positive_probability && self.unique
    }
}

fn union_vertices(norm: &PolytopeNorm, faces: &[PolarFace]) -> Vec<Vec<Rat>> {
    let mut set = std::collections::BTreeSet::new();
    for f in faces {
        for &i in &f.vertex_indices {
            set.insert(i);
        }
    }
    set.into_iter().map(|i| norm.vertex(i).to_vec()).collect()
}

/// `0 in relint conv(union G_i)`, decided by the positive-kernel LP: maximise
/// `t` subject to `M_G x = 0`, `sum x_j = 1`, `x_j >= t`, where the columns of
/// `M_G` are all vertices of all faces (with multiplicity). True iff the
/// optimum exists and is positive.
pub fn check_possible(norm: &PolytopeNorm, faces: &[PolarFace]) -> bool {
    assert!(!faces.is_empty());
    let k = norm.k();
    let cols: Vec<&[Rat]> = faces
        .iter()
        .flat_map(|f| f.vertex_indices.iter().map(|&i| norm.vertex(i)))
        .collect();
    let m = cols.len();
    // Variables (x_1..x_m, t), minimise -t.
    let mut eq_a = RatMatrix::zeros(0, m + 1);
    let mut eq_b = Vec::new();
    for c in 0..k {
        let mut row: Vec<Rat> = cols.iter().map(|v| v[c].clone()).collect();
        row.push(Rat::zero());
        eq_a.push_row(row);
        eq_b.push(Rat::zero());
    }
    let mut sum_row = vec![Rat::one(); m];
    sum_row.push(Rat::zero());
    eq_a.push_row(sum_row);
    eq_b.push(Rat::one());
    // t - x_j <= 0
    let mut ineq_a = RatMatrix::zeros(0, m + 1);
    let mut ineq_b = Vec::new();
    for j in 0..m {
        let mut row = vec![Rat::zero(); m + 1];
        row[j] = -Rat::one();
        row[m] = Rat::one();
        ineq_a.push_row(row);
        ineq_b.push(Rat::zero());
    }
    let mut obj = vec![Rat::zero(); m + 1];
    obj[m] = -Rat::one();
    let out = lp::solve(&LinearProgram {
        objective: obj,
        constraints: HPolyhedron::new(ineq_a, ineq_b),
        equalities: Some(HPolyhedron::new(eq_a, eq_b)),
    })
    .expect("possible-condition LP is well-formed");
    match out.status {
        LpStatus::Optimal => out.value.unwrap().is_negative(), // max t > 0
        _ => false,
    }
}

/// `sum dim G_i = dim sum aff G_i`.
pub fn check_positive_probability(norm: &PolytopeNorm, faces: &[PolarFace]) -> bool {
    assert!(!faces.is_empty());
    let total: usize = faces.iter().map(|f| f.dim).sum();
    total == minkowski_dim_of_affine_sum(faces, norm)
}

/// `dim conv(union G_i) = k`.
pub fn check_unique(norm: &PolytopeNorm, faces: &[PolarFace]) -> bool {
    assert!(!faces.is_empty());
    affine_dim(&union_vertices(norm, faces)).unwrap() == norm.k()
}

pub fn condition_report(norm: &PolytopeNorm, faces: &[PolarFace]) -> ConditionReport {
    let union_dim = affine_dim(&union_vertices(norm, faces)).unwrap();
    ConditionReport {
        possible: check_possible(norm, faces),
        positive_probability: check_positive_probability(norm, faces),
        unique: union_dim == norm.k(),
        predicted_fm_dim: norm.k() - union_dim,
    }
}

/// Truth of the facet-extension implication: if `faces` passes all three
/// conditions then so does `faces + new_facet`. Precondition: `new_facet` is a
/// polar vertex (a facet of the ball) lying on `faces[0]`.
pub fn check_inductive_extension(
    norm: &PolytopeNorm,
    faces: &[PolarFace],
    new_facet: &PolarFace,
) -> Result<bool> {
    if new_facet.dim != 0
        || new_facet.vertex_indices.len() != 1
        || faces.is_empty()
        || !faces[0]
            .vertex_indices
            .contains(&new_facet.vertex_indices[0])
    {
        return Err(Error::NotFacetExtension);
    }
    if !condition_report(norm, faces).all_pass() {
        return Ok(true); // vacuous
    }
    let mut extended = faces.to_vec();
    extended.push(new_facet.clone());
    Ok(condition_report(norm, &extended).all_pass())
}

/// Per-sample-size record of an exhausted search: every canonical multiset of
/// proper polar faces failed at least one condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub n: usize,
    /// Number of canonical multisets of proper faces at this n.
    pub total: u128,
    /// Tuples whose three conditions were evaluated at a leaf.
    pub examined: u128,
    /// Tuples discharged wholesale by a certified necessary-condition prune
    /// (dimension-budget / direction-deficit, both witnesses that the
    /// positive-probability condition must fail).
    pub pruned: u128,
}

#[derive(Clone, Debug)]
pub struct ThresholdCertificate {
    pub norm_label: String,
    pub norm_fingerprint: u64,
    /// The threshold: smallest n admitting a tuple passing all conditions.
    pub n: usize,
    /// First passing tuple in canonical order.
    pub witness: Vec<PolarFace>,
    pub refutations: Vec<Refutation>,
}

impl fmt::Display for ThresholdCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "norm: {} (fnv64 {:016x})",
            self.norm_label, self.norm_fingerprint
        )?;
        writeln!(f, "N = {}", self.n)?;
        writeln!(f, "witness faces (polar vertex index sets):")?;
        for face in &self.witness {
            writeln!(
                f,
                "  dim {} {{{}}}",
                face.dim,
                join_usize(&face.vertex_indices)
            )?;
        }
        for r in &self.refutations {
            writeln!(
                f,
                "refuted n={}: {} tuples ({} examined, {} pruned)",
                r.n, r.total, r.examined, r.pruned
            )?;
        }
        Ok(())
    }
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multisets of size `slots` over face indices >= `from` out of `count` faces.
fn multisets_from(count: usize, from: usize, slots: usize) -> u128 {
    binomial_u128((count - from) as u128 + slots as u128 - 1, slots as u128)
}

struct SearchState<'a> {
    norm: &'a PolytopeNorm,
    faces: &'a [PolarFace],
    k: usize,
    stack: Vec<usize>,
    /// Direction space of the partial tuple (for the deficit prune).
    dir_basis: Vec<RowBasis>,
    /// Affine span of the union's vertices (anchored at the first vertex seen).
    union_basis: Vec<RowBasis>,
    anchor: Option<Vec<Rat>>,
    /// Per-coordinate (has positive value, has negative value) over the union.
    sign_cover: Vec<(Vec<bool>, Vec<bool>)>,
    sum_dim: usize,
    examined: u128,
    pruned: u128,
    witness: Option<Vec<usize>>,
}

impl<'a> SearchState<'a> {
    fn new(norm: &'a PolytopeNorm, faces: &'a [PolarFace]) -> Self {
        let k = norm.k();
        SearchState {
            norm,
            faces,
            k,
            stack: Vec::new(),
            dir_basis: vec![RowBasis::new()],
            union_basis: vec![RowBasis::new()],
            anchor: None,
            sign_cover: vec![(vec![false; k], vec![false; k])],
            sum_dim: 0,
            examined: 0,
            pruned: 0,
            witness: None,
        }
    }

    /// Push face `fi`; returns None when the partial tuple already violates
    /// the positive-probability condition (deficit or dimension budget), in
    /// which case nothing was pushed.
    fn push(&mut self, fi: usize) -> Option<()> {
        let face = &self.faces[fi];
        if self.sum_dim + face.dim > self.k {
            return None; // budget: sum dim G_i <= dim of a subspace of R^k
        }
        let mut dirs = self.dir_basis.last().unwrap().clone();
        let anchor_row = self.norm.vertex(face.vertex_indices[0]);
        let mut grew = 0usize;
        for &vi in &face.vertex_indices[1..] {
            let dir: Vec<Rat> = self
                .norm
                .vertex(vi)
                .iter()
                .zip(anchor_row)
                .map(|(a, b)| a - b)
                .collect();
            if dirs.insert(&dir) {
                grew += 1;
            }
        }
        if grew != face.dim {
            return None; // deficit > 0 and it can never recover
        }
        let mut union = self.union_basis.last().unwrap().clone();
        let mut cover = self.sign_cover.last().unwrap().clone();
        let anchor = match &self.anchor {
            Some(a) => a.clone(),
            None => self.norm.vertex(face.vertex_indices[0]).to_vec(),
        };
        for &vi in &face.vertex_indices {
            let v = self.norm.vertex(vi);
            let rel: Vec<Rat> = v.iter().zip(&anchor).map(|(a, b)| a - b).collect();
            union.insert(&rel);
            for c in 0..self.k {
                if v[c].is_positive() {
                    cover.0[c] = true;
                } else if v[c].is_negative() {
                    cover.1[c] = true;
                }
            }
        }
        if self.anchor.is_none() {
            self.anchor = Some(anchor);
        }
        self.sum_dim += face.dim;
        self.stack.push(fi);
        self.dir_basis.push(dirs);
        self.union_basis.push(union);
        self.sign_cover.push(cover);
        Some(())
    }

    fn pop(&mut self) {
        let fi = self.stack.pop().unwrap();
        self.sum_dim -= self.faces[fi].dim;
        self.dir_basis.pop();
        self.union_basis.pop();
        self.sign_cover.pop();
        if self.stack.is_empty() {
            self.anchor = None;
        }
    }

    /// Evaluate the full tuple at a leaf. The tuple reaches here only with the
    /// positive-probability condition already exact (deficit zero).
    fn leaf(&mut self) -> bool {
        self.examined += 1;
        // union dim: affine rank of the union plus one anchor point.
        let union_dim = self.union_basis.last().unwrap().rank();
        if union_dim != self.k {
            return false; // uniqueness condition fails
        }
        // Necessary sign cover for 0 in the interior: every coordinate needs
        // vertices on both sides (the union is full-dimensional here).
        let cover = self.sign_cover.last().unwrap();
        if (0..self.k).any(|c| !cover.0[c] || !cover.1[c]) {
            return false;
        }
        let tuple: Vec<PolarFace> = self.stack.iter().map(|&i| self.faces[i].clone()).collect();
        check_possible(self.norm, &tuple)
    }

    fn dfs(&mut self, from: usize, slots: usize) -> bool {
        if slots == 0 {
            if self.leaf() {
                self.witness = Some(self.stack.clone());
                return true;
            }
            return false;
        }
        for fi in from..self.faces.len() {
            match self.push(fi) {
                Some(()) => {
                    if self.dfs(fi, slots - 1) {
                        return true;
                    }
                    self.pop();
                }
                None => {
                    // everything extending this prefix with indices >= fi fails
                    self.pruned += multisets_from(self.faces.len(), fi, slots - 1);
                }
            }
        }
        false
    }
}

/// Smallest n such that some multiset of n proper polar faces passes all three
/// conditions, with an exhaustive per-n refutation record below it.
pub fn threshold_search(norm: &PolytopeNorm, n_max: usize) -> Result<ThresholdCertificate> {
    let faces = norm.enumerate_polar_faces(None)?;
    let mut refutations = Vec::new();
    for n in 2..=n_max {
        let mut state = SearchState::new(norm, &faces);
        let found = state.dfs(0, n);
        let total = multisets_from(faces.len(), 0, n);
        if found {
            let witness = state
                .witness
                .unwrap()
                .into_iter()
                .map(|i| faces[i].clone())
                .collect();
            return Ok(ThresholdCertificate {
                norm_label: norm.label(),
                norm_fingerprint: norm.fingerprint(),
                n,
                witness,
                refutations,
            });
        }
        assert_eq!(
            state.examined + state.pruned,
            total,
            "refutation accounting mismatch at n = {n}"
        );
        refutations.push(Refutation {
            n,
            total,
            examined: state.examined,
            pruned: state.pruned,
        });
    }
    Err(Error::ThresholdNotFound { n_max, refutations })
}

/// Exact membership of `rows[i]` in the convex hull of the other rows.
fn in_hull_of_others(rows: &[Vec<Rat>], i: usize, k: usize) -> bool {
    let vars = rows.len() - 1;
    let mut eq_a = RatMatrix::zeros(0, vars);
    let mut eq_b = Vec::new();
    for c in 0..k {
        let mut row = Vec::with_capacity(vars);
        for (j, other) in rows.iter().enumerate() {
            if j != i {
                row.push(other[c].clone());
            }
        }
        eq_a.push_row(row);
        eq_b.push(rows[i][c].clone());
    }
    eq_a.push_row(vec![Rat::one(); vars]);
    eq_b.push(Rat::one());
    let out = lp::solve(&LinearProgram {
        objective: vec![Rat::zero(); vars],
        constraints: crate::project::nonneg_rows(vars),
        equalities: Some(HPolyhedron::new(eq_a, eq_b)),
    })
    .expect("hull membership LP is well-formed");
    out.status == LpStatus::Optimal
}

/// Random centrally symmetric polytope norm on R^k with at most `max_pairs`
/// vertex pairs, for randomized upper-bound checks: draw small-integer
/// vertex pairs, prune non-vertex pairs, resample on rank collapse.
pub fn random_symmetric_norm(
    k: usize,
    max_pairs: usize,
    rng: &mut crate::rng::SplitMix64,
) -> PolytopeNorm {
    assert!(max_pairs >= k);
    'resample: loop {
        let pairs = k + rng.next_range((max_pairs - k + 1) as u64) as usize;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut tries = 0;
        while rows.len() < 2 * pairs {
            tries += 1;
            if tries > 200 {
                continue 'resample;
            }
            let v: Vec<Rat> = (0..k).map(|_| rat(rng.next_i64_in(-4, 4))).collect();
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            let nv = crate::linalg::neg(&v);
            if rows.contains(&v) || rows.contains(&nv) {
                continue;
            }
            rows.push(v);
            rows.push(nv);
        }
        loop {
            if crate::linalg::rank(&RatMatrix::from_rows(rows.clone(), k)) != k {
                continue 'resample;
            }
            match (0..rows.len()).find(|&i| in_hull_of_others(&rows, i, k)) {
                None => {
                    return PolytopeNorm::new(RatMatrix::from_rows(rows, k), None)
                        .expect("vertex-pruned symmetric matrix is a valid norm");
                }
                Some(i) => {
                    // Interior rows come in symmetric pairs; drop both.
                    let nv = crate::linalg::neg(&rows[i]);
                    let at = rows.iter().position(|r| *r == nv).unwrap();
                    rows.remove(i.max(at));
                    rows.remove(i.min(at));
                    if rows.len() < 2 * k {
                        continue 'resample;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn faces_of(norm: &PolytopeNorm, sets: &[&[usize]]) -> Vec<PolarFace> {
        sets.iter()
            .map(|s| norm.polar_face(s.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn possible_condition_examples() {
        let linf3 = PolytopeNorm::linf(3);
        // single nonzero vertex: hull misses 0
        assert!(!check_possible(&linf3, &faces_of(&linf3, &[&[0]])));
        // opposite vertices: midpoint is 0
        assert!(check_possible(&linf3, &faces_of(&linf3, &[&[0], &[1]])));
        // l1 k=3 construction: facet x1=-1, vertex (1,1,1), edge {(±1,-1,-1)}
        let l1_3 = PolytopeNorm::l1(3);
        let tuple = faces_of(&l1_3, &[&[1, 2, 5, 6], &[0], &[4, 5]]);
        assert!(check_possible(&l1_3, &tuple));
    }

    #[test]
    fn positive_probability_examples() {
        let linf3 = PolytopeNorm::linf(3);
        // all faces vertices: 0 = 0
        assert!(check_positive_probability(
            &linf3,
            &faces_of(&linf3, &[&[0], &[2], &[5]])
        ));
        // cyclic edges in k=3: 3 = 3
        let cyc = faces_of(&linf3, &[&[0, 3], &[2, 5], &[4, 1]]);
        assert!(check_positive_probability(&linf3, &cyc));
        // k=2: conv(e1,-e2), conv(e2,-e1) share the direction e1+e2: 2 != 1
        let linf2 = PolytopeNorm::linf(2);
        let pair = faces_of(&linf2, &[&[0, 3], &[2, 1]]);
        assert!(!check_positive_probability(&linf2, &pair));
    }

    #[test]
    fn unique_condition_examples() {
        let linf2 = PolytopeNorm::linf(2);
        // G1={e1}, G2={-e1}: affine hull is the x-axis
        assert!(!check_unique(&linf2, &faces_of(&linf2, &[&[0], &[1]])));
        // G = ({-e1},{-e2},conv{e1,e2})
        assert!(check_unique(
            &linf2,
            &faces_of(&linf2, &[&[1], &[3], &[0, 2]])
        ));
        let l1_3 = PolytopeNorm::l1(3);
        assert!(check_unique(
            &l1_3,
            &faces_of(&l1_3, &[&[1, 2, 5, 6], &[0], &[4, 5]])
        ));
    }

    #[test]
    fn report_examples() {
        let linf3 = PolytopeNorm::linf(3);
        let cyc = faces_of(&linf3, &[&[0, 3], &[2, 5], &[4, 1]]);
        let r = condition_report(&linf3, &cyc);
        assert_eq!(
            r,
            ConditionReport {
                possible: true,
                positive_probability: true,
                unique: true,
                predicted_fm_dim: 0,
            }
        );
        // two opposite polar vertices: the generic 2-sample face type
        let pair = faces_of(&linf3, &[&[0], &[1]]);
        let r = condition_report(&linf3, &pair);
        assert!(r.possible && r.positive_probability && !r.unique);
        assert_eq!(r.predicted_fm_dim, 2);
        let l1_3 = PolytopeNorm::l1(3);
        let tuple = faces_of(&l1_3, &[&[1, 2, 5, 6], &[0], &[4, 5]]);
        let r = condition_report(&l1_3, &tuple);
        assert!(r.all_pass());
        assert_eq!(r.predicted_fm_dim, 0);
    }

    #[test]
    fn inductive_extension_examples() {
        let linf3 = PolytopeNorm::linf(3);
        let cyc = faces_of(&linf3, &[&[0, 3], &[2, 5], &[4, 1]]);
        let facet = linf3.polar_face(vec![0]).unwrap();
        assert!(check_inductive_extension(&linf3, &cyc, &facet).unwrap());
        // failing tuple: vacuously true
        let failing = faces_of(&linf3, &[&[0], &[0]]);
        let same = linf3.polar_face(vec![0]).unwrap();
        assert!(check_inductive_extension(&linf3, &failing, &same).unwrap());
        // wrong precondition: not a vertex of faces[0]
        let off = linf3.polar_face(vec![2]).unwrap();
        assert!(matches!(
            check_inductive_extension(&linf3, &cyc, &off),
            Err(Error::NotFacetExtension)
        ));
        // l1 k=3: extend by the facet vertex (-1,1,1) of G1
        let l1_3 = PolytopeNorm::l1(3);
        let tuple = faces_of(&l1_3, &[&[1, 2, 5, 6], &[0], &[4, 5]]);
        let ext = l1_3.polar_face(vec![1]).unwrap();
        assert!(check_inductive_extension(&l1_3, &tuple, &ext).unwrap());
    }

    #[test]
    fn threshold_small_norms() {
        let c = threshold_search(&PolytopeNorm::linf(2), 4).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.refutations.len(), 1);
        assert_eq!(c.refutations[0].n, 2);
        let r = condition_report(&PolytopeNorm::linf(2), &c.witness);
        assert!(r.all_pass());

        let c = threshold_search(&PolytopeNorm::l1(2), 3).unwrap();
        assert_eq!(c.n, 3);
    }

    #[test]
    fn threshold_not_found_carries_refutations() {
        let err = threshold_search(&PolytopeNorm::linf(3), 2).unwrap_err();
        match err {
            Error::ThresholdNotFound { n_max, refutations } => {
                assert_eq!(n_max, 2);
                assert_eq!(refutations.len(), 1);
                assert!(refutations[0].total > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn certificate_display_is_stable() {
        let c = threshold_search(&PolytopeNorm::linf(2), 3).unwrap();
        let text = c.to_string();
        assert!(text.contains("N = 3"));
        assert!(text.contains("refuted n=2"));
    }
}
