//! Exact rational linear programming: two-phase primal simplex with Bland's
//! rule, plus a dual-form fast path for the many small bounded solves the
//! projection and Frank-Wolfe machinery issues.
//!
//! Every optimal solve is re-verified against the original data: the returned
//! point must satisfy the constraints exactly and the dual multipliers read off
//! the final tableau must prove the objective value (weak duality, exact).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hpoly::HPolyhedron;
use crate::linalg::{dot, kernel_basis, neg, Rat, RatMatrix};

#[derive(Clone, Debug)]
pub struct LinearProgram {
    /// Minimise `objective · x`.
    pub objective: Vec<Rat>,
    /// `A x <= b`.
    pub constraints: HPolyhedron,
    /// Optional extra system `E x = f`, handled internally as opposing inequalities.
    pub equalities: Option<HPolyhedron>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub point: Option<Vec<Rat>>,
    pub value: Option<Rat>,
    /// Certificate ray when unbounded: feasible direction with negative objective.
    pub ray: Option<Vec<Rat>>,
}

impl LpOutcome {
    fn optimal(point: Vec<Rat>, value: Rat) -> Self {
        LpOutcome {
            status: LpStatus::Optimal,
            point: Some(point),
            value: Some(value),
            ray: None,
        }
    }

    fn infeasible() -> Self {
        LpOutcome {
            status: LpStatus::Infeasible,
            point: None,
            value: None,
            ray: None,
        }
    }

    fn unbounded(ray: Vec<Rat>) -> Self {
        LpOutcome {
            status: LpStatus::Unbounded,
            point: None,
            value: None,
            ray: Some(ray),
        }
    }
}

// ---------------------------------------------------------------------------
// Standard-form core: min c·z  s.t.  M z = b, z >= 0.
// ---------------------------------------------------------------------------

enum StdOutcome {
    Optimal {
        z: Vec<Rat>,
        value: Rat,
        /// Simplex multipliers w.r.t. the original rows; rows dropped as
        /// redundant in phase 1 get multiplier zero.
        multipliers: Vec<Rat>,
    },
    Infeasible,
    Unbounded {
        ray: Vec<Rat>,
    },
}

struct Tableau {
    width: usize,        // structural + artificial + rhs columns
    rows: Vec<Vec<Rat>>, // m x width
    basis: Vec<usize>,
    orig_row: Vec<usize>, // original row index per tableau row (rows get dropped)
    row_negated: Vec<bool>,
    cost: Vec<Rat>, // reduced-cost row, length width; last entry = -objective
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let f = self.cost[c].clone();
        if !f.is_zero() {
            for (x, y) in self.cost.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland: entering = smallest-index allowed column with negative reduced
    /// cost; leaving = smallest ratio, ties by smallest basic variable index.
    /// Returns Ok(()) at optimality, Err(col) when `col` proves unboundedness.
    fn run(&mut self, allowed_cols: usize) -> std::result::Result<(), usize> {
        loop {
            let Some(enter) = (0..allowed_cols).find(|&j| self.cost[j].is_negative()) else {
                return Ok(());
            };
            let rhs = self.width - 1;
            let mut leave: Option<usize> = None;
            let mut best: Option<Rat> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if a.is_positive() {
                    let ratio = &self.rows[i][rhs] / a;
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            ratio < *b
                                || (ratio == *b && self.basis[i] < self.basis[leave.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            match leave {
                Some(r) => self.pivot(r, enter),
                None => return Err(enter),
            }
        }
    }

    fn set_costs(&mut self, c: &[Rat]) {
        // reduced costs r_j = c_j - sum_i c_basis(i) * tab[i][j]
        let mut cost = vec![Rat::zero(); self.width];
        cost[..c.len()].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = if b < c.len() {
                c[b].clone()
            } else {
                Rat::zero()
            };
            if cb.is_zero() {
                continue;
            }
            for (x, y) in cost.iter_mut().zip(&self.rows[i]) {
                if !y.is_zero() {
                    *x -= &cb * y;
                }
            }
        }
        self.cost = cost;
    }
}

/// Two-phase simplex on `min c·z, M z = b, z >= 0`. Deterministic (Bland).
fn solve_standard(m: &RatMatrix, b: &[Rat], c: &[Rat]) -> StdOutcome {
    let nrows = m.rows();
    let n = m.cols();
    assert_eq!(b.len(), nrows);
    assert_eq!(c.len(), n);

    let width = n + nrows + 1;
    let mut rows = Vec::with_capacity(nrows);
    let mut row_negated = vec![false; nrows];
    for i in 0..nrows {
        let negate = b[i].is_negative();
        row_negated[i] = negate;
        let mut row = vec![Rat::zero(); width];
        for j in 0..n {
            let v = m.get(i, j);
            row[j] = if negate { -v } else { v.clone() };
        }
        row[n + i] = Rat::one();
        row[width - 1] = if negate { -&b[i] } else { b[i].clone() };
        rows.push(row);
    }
    let mut tab = Tableau {
        width,
        rows,
        basis: (0..nrows).map(|i| n + i).collect(),
        orig_row: (0..nrows).collect(),
        row_negated,
        cost: Vec::new(),
    };

    // Phase 1: minimise the artificial sum. Artificials never re-enter, so the
    // allowed entering set is the structural block and Bland terminates; a
    // feasible point carries zero weight on every artificial column, which
    // keeps the optimality conclusion valid under the restriction.
    {
        let mut cost = vec![Rat::zero(); width];
        for row in &tab.rows {
            // basis is all-artificial with cost 1
            for (x, y) in cost.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= y;
                }
            }
        }
        tab.cost = cost;
    }
    if tab.run(n).is_err() {
        unreachable!("phase 1 objective is bounded below");
    }
    let p1_obj = -tab.cost[width - 1].clone();
    if p1_obj.is_positive() {
        return StdOutcome::Infeasible;
    }
    debug_assert!(p1_obj.is_zero());

    // Drive artificials out of the basis; rows that cannot pivot are redundant.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    debug_assert!(tab.rows[i][width - 1].is_zero());
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    tab.orig_row.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2.
    tab.set_costs(c);
    if let Err(enter) = tab.run(n) {
        let mut ray = vec![Rat::zero(); n];
        ray[enter] = Rat::one();
        for (i, &bv) in tab.basis.iter().enumerate() {
            debug_assert!(bv < n);
            ray[bv] = -tab.rows[i][enter].clone();
        }
        debug_assert!(m.mul_vec(&ray).iter().all(Zero::is_zero));
        debug_assert!(dot(c, &ray).is_negative());
        return StdOutcome::Unbounded { ray };
    }

    let mut z = vec![Rat::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        z[bv] = tab.rows[i][width - 1].clone();
        debug_assert!(!z[bv].is_negative());
    }
    let value = dot(c, &z);

    // Multipliers from the artificial reduced costs, mapped back through row
    // negation; dropped rows get zero.
    let mut multipliers = vec![Rat::zero(); nrows];
    for &orig in &tab.orig_row {
        let w = -tab.cost[n + orig].clone();
        multipliers[orig] = if tab.row_negated[orig] { -w } else { w };
    }

    // Exact verification against the original data: primal feasibility,
    // dual feasibility and matching objective values.
    for i in 0..nrows {
        assert_eq!(dot(m.row(i), &z), b[i], "simplex: M z != b on row {i}");
    }
    let mut dual_value = Rat::zero();
    for i in 0..nrows {
        if !multipliers[i].is_zero() {
            dual_value += &multipliers[i] * &b[i];
        }
    }
    assert_eq!(dual_value, value, "simplex: weak duality value mismatch");
    for j in 0..n {
        let mut wa = Rat::zero();
        for i in 0..nrows {
            if !multipliers[i].is_zero() {
                let v = m.get(i, j);
                if !v.is_zero() {
                    wa += &multipliers[i] * v;
                }
            }
        }
        assert!(c[j] >= wa, "simplex: dual infeasibility at column {j}");
    }

    StdOutcome::Optimal {
        z,
        value,
        multipliers,
    }
}

// ---------------------------------------------------------------------------
// General inequality-form solve.
// ---------------------------------------------------------------------------

/// Collect the inequality rows of an LP with equalities expanded into pairs.
fn expanded_rows(lp: &LinearProgram) -> (RatMatrix, Vec<Rat>) {
    let d = lp.objective.len();
    let mut a = RatMatrix::zeros(0, d);
    let mut b = Vec::new();
    for i in 0..lp.constraints.rows() {
        a.push_row(lp.constraints.a.row(i).to_vec());
        b.push(lp.constraints.b[i].clone());
    }
    if let Some(eq) = &lp.equalities {
        for i in 0..eq.rows() {
            a.push_row(eq.a.row(i).to_vec());
            b.push(eq.b[i].clone());
            a.push_row(neg(eq.a.row(i)));
            b.push(-&eq.b[i]);
        }
    }
    (a, b)
}

/// Exact optimum of `min objective·x` over `A x <= b` (plus equalities).
/// Optimal points are basic feasible solutions: a vertex whenever the
/// feasible region is pointed.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let d = lp.objective.len();
    if lp.constraints.dim() != d {
        return Err(Error::DimensionMismatch);
    }
    if let Some(eq) = &lp.equalities {
        if eq.dim() != d {
            return Err(Error::DimensionMismatch);
        }
    }
    let (a, b) = expanded_rows(lp);
    let m = a.rows();

    // Standard form: x = x+ - x-, slack per row.
    let n_std = 2 * d + m;
    let mut std_m = RatMatrix::zeros(0, n_std);
    for i in 0..m {
        let mut row = vec![Rat::zero(); n_std];
        for j in 0..d {
            row[j] = a.get(i, j).clone();
            row[d + j] = -a.get(i, j);
        }
        row[2 * d + i] = Rat::one();
        std_m.push_row(row);
    }
    let mut c_std = vec![Rat::zero(); n_std];
    for j in 0..d {
        c_std[j] = lp.objective[j].clone();
        c_std[d + j] = -&lp.objective[j];
    }

    match solve_standard(&std_m, &b, &c_std) {
        StdOutcome::Infeasible => Ok(LpOutcome::infeasible()),
        StdOutcome::Unbounded { ray } => {
            let ray_x: Vec<Rat> = (0..d).map(|j| &ray[j] - &ray[d + j]).collect();
            debug_assert!(a.mul_vec(&ray_x).iter().all(|v| !v.is_positive()));
            Ok(LpOutcome::unbounded(ray_x))
        }
        StdOutcome::Optimal { z, value, .. } => {
            let x: Vec<Rat> = (0..d).map(|j| &z[j] - &z[d + j]).collect();
            let x = purify_to_vertex(&a, &b, x, &lp.objective);
            debug_assert_eq!(dot(&lp.objective, &x), value);
            Ok(LpOutcome::optimal(x, value))
        }
    }
}

/// Move within the optimal face until the active constraints have full rank.
/// Ends at a vertex whenever the polyhedron is pointed; otherwise stops when a
/// full line through the point stays feasible.
pub(crate) fn purify_to_vertex(a: &RatMatrix, b: &[Rat], mut x: Vec<Rat>, c: &[Rat]) -> Vec<Rat> {
    let d = x.len();
    loop {
        let active: Vec<usize> = (0..a.rows())
            .filter(|&i| dot(a.row(i), &x) == b[i])
            .collect();
        let act_m = RatMatrix::from_rows(active.iter().map(|&i| a.row(i).to_vec()).collect(), d);
        let kern = kernel_basis(&act_m);
        let Some(w) = kern.into_iter().next() else {
            return x;
        };
        // Optimality keeps the objective constant along the active-set kernel.
        assert!(
            dot(c, &w).is_zero(),
            "purify: objective drifts on optimal face"
        );
        let step = |dir: &[Rat]| -> Option<Rat> {
            let mut best: Option<Rat> = None;
            for i in 0..a.rows() {
                let aw = dot(a.row(i), dir);
                if aw.is_positive() {
                    let t = (&b[i] - dot(a.row(i), &x)) / aw;
                    if best.as_ref().is_none_or(|cur| t < *cur) {
                        best = Some(t);
                    }
                }
            }
            best
        };
        if let Some(t) = step(&w) {
            for (xi, wi) in x.iter_mut().zip(&w) {
                *xi += &t * wi;
            }
        } else if let Some(t) = step(&neg(&w)) {
            for (xi, wi) in x.iter_mut().zip(&w) {
                *xi -= &t * wi;
            }
        } else {
            // The polyhedron contains a full line: not pointed.
            return x;
        }
    }
}

// ---------------------------------------------------------------------------
// Dual-form fast path.
// ---------------------------------------------------------------------------

pub(crate) enum FastLp {
    Optimal {
        point: Vec<Rat>,
        value: Rat,
    },
    /// The dual was infeasible: the primal is unbounded or infeasible.
    NoDual,
    /// The dual was unbounded: the primal is infeasible.
    PrimalInfeasible,
}

/// `min c·x` over `A x <= b`, solved through the dual
/// `min b·mu, A^T mu = -c, mu >= 0`, whose tableau has only `dim` rows.
/// The optimal primal point is recovered exactly from the simplex multipliers
/// and is primal-feasible by the verified dual optimality conditions.
pub(crate) fn minimize_fast(a: &RatMatrix, b: &[Rat], c: &[Rat]) -> FastLp {
    debug_assert_eq!(a.rows(), b.len());
    debug_assert_eq!(a.cols(), c.len());
    let at = a.transpose();
    let neg_c = neg(c);
    match solve_standard(&at, &neg_c, b) {
        StdOutcome::Infeasible => FastLp::NoDual,
        StdOutcome::Unbounded { .. } => FastLp::PrimalInfeasible,
        StdOutcome::Optimal {
            value, multipliers, ..
        } => {
            let point = multipliers;
            debug_assert!((0..a.rows()).all(|i| dot(a.row(i), &point) <= b[i]));
            debug_assert_eq!(dot(c, &point), -&value);
            FastLp::Optimal {
                point,
                value: -value,
            }
        }
    }
}

/// Fast-path minimisation that additionally purifies the optimum to a vertex.
pub(crate) fn minimize_fast_vertex(a: &RatMatrix, b: &[Rat], c: &[Rat]) -> FastLp {
    match minimize_fast(a, b, c) {
        FastLp::Optimal { point, value } => {
            let point = purify_to_vertex(a, b, point, c);
            debug_assert_eq!(dot(c, &point), value);
            FastLp::Optimal { point, value }
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Relative-interior machinery.
// ---------------------------------------------------------------------------

/// Exactly the constraint indices satisfied with equality by every point of `P`,
/// decided per row by minimising `a_i·x` over `P`.
pub fn implicit_equalities(p: &HPolyhedron) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut known_feasible = false;
    for i in 0..p.rows() {
        let c = p.a.row(i).to_vec();
        if !known_feasible {
            let lp = LinearProgram {
                objective: c.clone(),
                constraints: p.clone(),
                equalities: None,
            };
            let outcome = solve(&lp)?;
            match outcome.status {
                LpStatus::Infeasible => return Err(Error::EmptyPolyhedron),
                LpStatus::Unbounded => {}
                LpStatus::Optimal => {
                    if outcome.value.unwrap() == p.b[i] {
                        out.push(i);
                    }
                }
            }
            known_feasible = true;
            continue;
        }
        match minimize_fast(&p.a, &p.b, &c) {
            FastLp::Optimal { value, .. } => {
                if value == p.b[i] {
                    out.push(i);
                }
            }
            // Feasibility is established, so no dual means the minimum is
            // unbounded below and the row is not implicit.
            FastLp::NoDual => {}
            FastLp::PrimalInfeasible => unreachable!("feasibility already established"),
        }
    }
    Ok(out)
}

/// A relative-interior point of `P` with the slack certifying it: solves
/// `max t` with `a_i·x + t <= b_i` on the non-implicit rows and the implicit
/// rows held as equalities. Unbounded slack (possible for unbounded `P`) is
/// capped at 1; the slack value is exact either way and positive unless `P`
/// is a single point (or, more generally, an affine set).
pub fn max_slack_point(p: &HPolyhedron) -> Result<(Vec<Rat>, Rat)> {
    let d = p.dim();
    let implicit = implicit_equalities(p)?;
    let is_implicit = {
        let mut v = vec![false; p.rows()];
        for &i in &implicit {
            v[i] = true;
        }
        v
    };

    if implicit.len() == p.rows() {
        // P is an affine set; its relative interior is P itself and the slack
        // over zero non-implicit rows is 0 by convention (a single point in
        // every bounded case).
        let feasibility = LinearProgram {
            objective: vec![Rat::zero(); d],
            constraints: p.clone(),
            equalities: None,
        };
        let out = solve(&feasibility)?;
        debug_assert_eq!(out.status, LpStatus::Optimal);
        return Ok((out.point.unwrap(), Rat::zero()));
    }

    let build = |cap: bool| -> LinearProgram {
        // variables (x, t), minimise -t
        let mut a = RatMatrix::zeros(0, d + 1);
        let mut b = Vec::new();
        for i in 0..p.rows() {
            if is_implicit[i] {
                continue;
            }
            let mut row = p.a.row(i).to_vec();
            row.push(Rat::one());
            a.push_row(row);
            b.push(p.b[i].clone());
        }
        if cap {
            let mut row = vec![Rat::zero(); d + 1];
            row[d] = Rat::one();
            a.push_row(row);
            b.push(Rat::one());
        }
        let mut eq_a = RatMatrix::zeros(0, d + 1);
        let mut eq_b = Vec::new();
        for &i in &implicit {
            let mut row = p.a.row(i).to_vec();
            row.push(Rat::zero());
            eq_a.push_row(row);
            eq_b.push(p.b[i].clone());
        }
        let mut obj = vec![Rat::zero(); d + 1];
        obj[d] = -Rat::one();
        LinearProgram {
            objective: obj,
            constraints: HPolyhedron::new(a, b),
            equalities: Some(HPolyhedron::new(eq_a, eq_b)),
        }
    };

    let mut outcome = solve(&build(false))?;
    if outcome.status == LpStatus::Unbounded {
        outcome = solve(&build(true))?;
    }
    match outcome.status {
        LpStatus::Infeasible => Err(Error::EmptyPolyhedron),
        LpStatus::Unbounded => unreachable!("slack capped at 1"),
        LpStatus::Optimal => {
            let mut point = outcome.point.unwrap();
            let slack = point.pop().unwrap();
            debug_assert!(!slack.is_negative());
            debug_assert!((0..p.rows()).all(|i| {
                let lhs = dot(p.a.row(i), &point);
                if is_implicit[i] {
                    lhs == p.b[i]
                } else {
                    lhs < p.b[i] || slack.is_zero()
                }
            }));
            Ok((point, slack))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn hp(rows: &[&[i64]], b: &[i64]) -> HPolyhedron {
        HPolyhedron::new(
            RatMatrix::from_int_rows(rows),
            b.iter().map(|&x| rat(x)).collect(),
        )
    }

    #[test]
    fn min_over_unit_interval() {
        // min x over {0 <= x <= 1}
        let lp = LinearProgram {
            objective: vec![rat(1)],
            constraints: hp(&[&[-1], &[1]], &[0, 1]),
            equalities: None,
        };
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.point.unwrap(), vec![rat(0)]);
        assert_eq!(out.value.unwrap(), rat(0));
    }

    #[test]
    fn unbounded_below() {
        // min x over {x <= 1}
        let lp = LinearProgram {
            objective: vec![rat(1)],
            constraints: hp(&[&[1]], &[1]),
            equalities: None,
        };
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        let ray = out.ray.unwrap();
        assert!(ray[0].is_negative());
    }

    #[test]
    fn infeasible_system() {
        let lp = LinearProgram {
            objective: vec![rat(0)],
            constraints: hp(&[&[1], &[-1]], &[0, -1]),
            equalities: None,
        };
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn dimension_mismatch() {
        let lp = LinearProgram {
            objective: vec![rat(1), rat(2)],
            constraints: hp(&[&[1]], &[1]),
            equalities: None,
        };
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch)));
    }

    #[test]
    fn equalities_respected() {
        // min y s.t. x + y = 2, y >= x, both within [-10, 10]
        let lp = LinearProgram {
            objective: vec![rat(0), rat(1)],
            constraints: hp(
                &[&[1, -1], &[1, 0], &[-1, 0], &[0, 1], &[0, -1]],
                &[0, 10, 10, 10, 10],
            ),
            equalities: Some(hp(&[&[1, 1]], &[2])),
        };
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.point.unwrap(), vec![rat(1), rat(1)]);
    }

    #[test]
    fn fast_path_matches_full_solver() {
        let a = RatMatrix::from_int_rows(&[&[1, 1], &[-1, 0], &[0, -1], &[1, 0], &[0, 1]]);
        let b: Vec<Rat> = [2, 0, 0, 5, 5].iter().map(|&x| rat(x)).collect();
        let c = vec![rat(-1), rat(-2)];
        let FastLp::Optimal { point, value } = minimize_fast_vertex(&a, &b, &c) else {
            panic!("expected optimal");
        };
        assert_eq!(dot(&c, &point), value);
        let full = solve(&LinearProgram {
            objective: c,
            constraints: HPolyhedron::new(a, b),
            equalities: None,
        })
        .unwrap();
        assert_eq!(full.value.unwrap(), value);
    }

    #[test]
    fn max_slack_unit_square() {
        let s = hp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, 1, 1, 1]);
        let (point, slack) = max_slack_point(&s).unwrap();
        assert_eq!(slack, rat(1));
        assert_eq!(point, vec![rat(0), rat(0)]);
    }

    #[test]
    fn max_slack_segment_fixes_implicit_equality() {
        // {(1, t) : 0 <= t <= 1}
        let s = hp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, -1, 1, 0]);
        let (point, slack) = max_slack_point(&s).unwrap();
        assert_eq!(slack, ratio(1, 2));
        assert_eq!(point, vec![rat(1), ratio(1, 2)]);
    }

    #[test]
    fn max_slack_single_point() {
        let s = hp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[2, -2, 0, 0]);
        let (point, slack) = max_slack_point(&s).unwrap();
        assert_eq!(slack, rat(0));
        assert_eq!(point, vec![rat(2), rat(0)]);
    }

    #[test]
    fn implicit_equalities_cases() {
        let forced = hp(&[&[1], &[-1]], &[1, -1]);
        assert_eq!(implicit_equalities(&forced).unwrap(), vec![0, 1]);
        let square = hp(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[1, 1, 1, 1]);
        assert!(implicit_equalities(&square).unwrap().is_empty());
        let empty = hp(&[&[1], &[-1]], &[0, -1]);
        assert!(matches!(
            implicit_equalities(&empty),
            Err(Error::EmptyPolyhedron)
        ));
    }

    #[test]
    fn deterministic_outcomes() {
        let lp = LinearProgram {
            objective: vec![rat(1), rat(1)],
            constraints: hp(&[&[-1, -1], &[-1, 0], &[0, -1]], &[-2, 0, 0]),
            equalities: None,
        };
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a.point, b.point);
        assert_eq!(a.value, b.value);
    }
}
