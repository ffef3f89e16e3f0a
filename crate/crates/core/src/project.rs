//! Fourier-Motzkin elimination. Projection blow-up is controlled by exact
//! syntactic reduction (same-normal domination) after every pairing step plus
//! LP-certified redundancy elimination, so every drop is individually sound:
//! dominated rows are implied by the row that replaces them, and LP-removed
//! rows carry a Farkas certificate.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::hpoly::{is_zero_row, HPolyhedron};
use crate::linalg::{Rat, RatMatrix};
use crate::lp::{minimize_fast, FastLp};

/// An intermediate system is LP-reduced only when the next pairing step would
/// exceed this many products; the final system is always reduced. Below the
/// budget, same-normal domination alone is cheaper than the pass.
const PAIR_BUDGET: usize = 1500;
/// Unconditional safety reduction threshold for intermediate systems.
const HARD_ROW_CAP: usize = 900;
/// Above this row count the reduction pass runs Clarkson's output-sensitive
/// algorithm (LPs sized by the irredundant core) instead of the naive
/// row-against-the-rest sweep.
const CLARKSON_MIN_ROWS: usize = 64;

#[derive(Clone, Debug)]
struct FmRow {
    coef: Vec<Rat>,
    rhs: Rat,
}

impl FmRow {
    /// Scale so the coefficients are coprime integers. Positive scaling only;
    /// orientation is meaning.
    fn normalize(&mut self) {
        let mut l = BigInt::one();
        for c in &self.coef {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coef
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        if g.is_zero() {
            return; // zero row, caller handles
        }
        for (c, i) in self.coef.iter_mut().zip(ints) {
            *c = Rat::from_integer(i / &g);
        }
        self.rhs = &self.rhs * Rat::new(l, g);
    }
}

/// Same-normal rows collapse to the strongest right-hand side. Trivial rows
/// vanish; a violated trivial row signals an empty projection.
fn dedup_dominate(rows: Vec<FmRow>) -> Result<Vec<FmRow>, ()> {
    let mut kept: Vec<FmRow> = Vec::with_capacity(rows.len());
    let mut index: HashMap<Vec<Rat>, usize> = HashMap::new();
    for row in rows {
        if is_zero_row(&row.coef) {
            if row.rhs.is_negative() {
                return Err(());
            }
            continue;
        }
        match index.get(&row.coef) {
            Some(&at) => {
                if row.rhs < kept[at].rhs {
                    kept[at] = row;
                }
            }
            None => {
                index.insert(row.coef.clone(), kept.len());
                kept.push(row);
            }
        }
    }
    Ok(kept)
}

/// Remove every row implied by the others, certified per row by an exact LP
/// (the implication is the Farkas system over the remaining rows). Returns
/// Err(()) when the system itself turns out infeasible.
fn lp_irredundant(rows: &mut Vec<FmRow>, live: &[usize]) -> Result<(), ()> {
    let mut i = 0;
    while i < rows.len() {
        if rows.len() == 1 {
            break;
        }
        let mut a = RatMatrix::zeros(0, live.len());
        let mut b = Vec::with_capacity(rows.len() - 1);
        for (j, r) in rows.iter().enumerate() {
            if j == i {
                continue;
            }
            a.push_row(live.iter().map(|&c| r.coef[c].clone()).collect());
            b.push(r.rhs.clone());
        }
        let obj: Vec<Rat> = live.iter().map(|&c| -&rows[i].coef[c]).collect();
        match minimize_fast(&a, &b, &obj) {
            FastLp::Optimal { value, .. } => {
                if -value <= rows[i].rhs {
                    rows.remove(i);
                    continue;
                }
            }
            FastLp::NoDual => {} // maximum unbounded over the rest: keep
            FastLp::PrimalInfeasible => return Err(()),
        }
        i += 1;
    }
    Ok(())
}

/// Strictly interior point of the system over the live columns, or None when
/// no interior exists (including infeasibility). Projection intermediates are
/// full-dimensional, so None is only ever hit by degenerate external input.
fn interior_point(rows: &[FmRow], live: &[usize]) -> Option<Vec<Rat>> {
    let d = live.len();
    let mut a = RatMatrix::zeros(0, d + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    for r in rows {
        let mut row: Vec<Rat> = live.iter().map(|&c| r.coef[c].clone()).collect();
        row.push(Rat::one());
        a.push_row(row);
        b.push(r.rhs.clone());
    }
    let mut cap = vec![Rat::zero(); d + 1];
    cap[d] = Rat::one();
    a.push_row(cap);
    b.push(Rat::one());
    let mut obj = vec![Rat::zero(); d + 1];
    obj[d] = -Rat::one();
    match minimize_fast(&a, &b, &obj) {
        FastLp::Optimal { mut point, value } => {
            if (-value).is_positive() {
                point.pop();
                Some(point)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Clarkson-style reduction: rows are dropped only with an implied-by-kept-set
/// certificate, and the kept set grows by ray-shooting from an interior point,
/// so every LP involves only the small kept core. The output may retain a few
/// redundant rows in degenerate cases; callers needing certified irredundance
/// run the naive sweep on the (small) output.
fn clarkson_reduce(rows: &mut Vec<FmRow>, live: &[usize]) -> Result<(), ()> {
    let m = rows.len();
    let Some(z) = interior_point(rows, live) else {
        // No interior: fall back to the certified sweep (handles emptiness).
        return lp_irredundant(rows, live);
    };
    let sub = |r: &FmRow| -> Vec<Rat> { live.iter().map(|&c| r.coef[c].clone()).collect() };
    let subs: Vec<Vec<Rat>> = rows.iter().map(sub).collect();
    let slack_at_z: Vec<Rat> = rows
        .iter()
        .zip(&subs)
        .map(|(r, s)| &r.rhs - crate::linalg::dot(s, &z))
        .collect();
    debug_assert!(slack_at_z.iter().all(Signed::is_positive));

    let mut in_core = vec![false; m];
    let mut dropped = vec![false; m];
    let mut core: Vec<usize> = Vec::new();
    for r in 0..m {
        loop {
            if in_core[r] {
                break;
            }
            let mut a = RatMatrix::zeros(0, live.len());
            let mut b = Vec::with_capacity(core.len() + 1);
            for &j in &core {
                a.push_row(subs[j].clone());
                b.push(rows[j].rhs.clone());
            }
            // Cap the candidate so the test LP is bounded even while the core
            // is small; any optimum above rhs still yields a violating point.
            let mut capped = subs[r].clone();
            a.push_row(std::mem::take(&mut capped));
            b.push(&rows[r].rhs + Rat::one());
            let obj: Vec<Rat> = subs[r].iter().map(|x| -x).collect();
            let x_star = match minimize_fast(&a, &b, &obj) {
                FastLp::Optimal { point, value } => {
                    if -value <= rows[r].rhs {
                        dropped[r] = true;
                        break;
                    }
                    point
                }
                FastLp::NoDual => unreachable!("candidate cap bounds the objective"),
                FastLp::PrimalInfeasible => return Err(()),
            };
            // First constraint crossed from z toward the violating point is
            // irredundant; add it to the core.
            let dir: Vec<Rat> = x_star.iter().zip(&z).map(|(a, b)| a - b).collect();
            let mut hit: Option<(usize, Rat)> = None;
            for j in 0..m {
                if dropped[j] || in_core[j] {
                    continue;
                }
                let adir = crate::linalg::dot(&subs[j], &dir);
                if adir.is_positive() {
                    let t = &slack_at_z[j] / adir;
                    if hit.as_ref().is_none_or(|(_, best)| t < *best) {
                        hit = Some((j, t));
                    }
                }
            }
            let (j_star, _) = hit.expect("violated candidate lies across its own boundary");
            in_core[j_star] = true;
            core.push(j_star);
        }
    }
    core.sort_unstable();
    *rows = core.into_iter().map(|j| rows[j].clone()).collect();
    Ok(())
}

fn reduce_rows(rows: &mut Vec<FmRow>, live: &[usize], certify: bool) -> Result<(), ()> {
    if rows.len() > CLARKSON_MIN_ROWS {
        clarkson_reduce(rows, live)?;
        if certify {
            lp_irredundant(rows, live)?;
        }
        Ok(())
    } else {
        lp_irredundant(rows, live)
    }
}

/// H-representation of the orthogonal projection of `p` onto the coordinates
/// not in `eliminate`. Exact; the returned constraints are irredundant,
/// certified by LP. Variables are eliminated in ascending index order.
pub fn fourier_motzkin(p: &HPolyhedron, eliminate: &[usize]) -> HPolyhedron {
    let mut order = eliminate.to_vec();
    order.sort_unstable();
    order.dedup();
    fourier_motzkin_with_order(p, &order)
}

/// As `fourier_motzkin`, with an explicit elimination order.
pub fn fourier_motzkin_with_order(p: &HPolyhedron, order: &[usize]) -> HPolyhedron {
    let dim = p.dim();
    {
        let mut seen = vec![false; dim];
        for &v in order {
            assert!(v < dim, "fourier_motzkin: eliminate index out of range");
            assert!(!seen[v], "fourier_motzkin: duplicate eliminate index");
            seen[v] = true;
        }
    }
    assert!(
        order.len() < dim,
        "fourier_motzkin: must keep at least one variable"
    );

    let keep: Vec<usize> = (0..dim).filter(|v| !order.contains(v)).collect();
    let project = |rows: &[FmRow]| -> HPolyhedron {
        let mut a = RatMatrix::zeros(0, keep.len());
        let mut b = Vec::with_capacity(rows.len());
        for r in rows {
            a.push_row(keep.iter().map(|&c| r.coef[c].clone()).collect());
            b.push(r.rhs.clone());
        }
        HPolyhedron::new(a, b)
    };

    let mut rows: Vec<FmRow> = (0..p.rows())
        .map(|i| {
            let mut r = FmRow {
                coef: p.a.row(i).to_vec(),
                rhs: p.b[i].clone(),
            };
            r.normalize();
            r
        })
        .collect();
    rows = match dedup_dominate(rows) {
        Ok(r) => r,
        Err(()) => return HPolyhedron::empty(keep.len()),
    };

    let mut live: Vec<usize> = (0..dim).collect();
    for &v in order {
        {
            let pos = rows.iter().filter(|r| r.coef[v].is_positive()).count();
            let neg = rows.iter().filter(|r| r.coef[v].is_negative()).count();
            if (pos * neg > PAIR_BUDGET || rows.len() > HARD_ROW_CAP)
                && reduce_rows(&mut rows, &live, false).is_err()
            {
                return HPolyhedron::empty(keep.len());
            }
        }
        live.retain(|&c| c != v);
        let (mut zero, mut pos, mut neg_rows) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            match r.coef[v].is_zero() {
                true => zero.push(r),
                false if r.coef[v].is_positive() => pos.push(r),
                false => neg_rows.push(r),
            }
        }
        let mut next = zero;
        for pr in &pos {
            for nr in &neg_rows {
                let fp = -&nr.coef[v]; // > 0
                let fn_ = pr.coef[v].clone(); // > 0
                let coef: Vec<Rat> = pr
                    .coef
                    .iter()
                    .zip(&nr.coef)
                    .map(|(x, y)| &fp * x + &fn_ * y)
                    .collect();
                debug_assert!(coef[v].is_zero());
                let rhs = &fp * &pr.rhs + &fn_ * &nr.rhs;
                let mut row = FmRow { coef, rhs };
                row.normalize();
                next.push(row);
            }
        }
        rows = match dedup_dominate(next) {
            Ok(r) => r,
            Err(()) => return HPolyhedron::empty(keep.len()),
        };
    }

    if reduce_rows(&mut rows, &keep, true).is_err() {
        return HPolyhedron::empty(keep.len());
    }
    project(&rows)
}

/// Constraint rows `-x_i <= 0` for callers building orthant-bounded systems.
pub fn nonneg_rows(dim: usize) -> HPolyhedron {
    let mut a = RatMatrix::zeros(0, dim);
    let mut b = Vec::new();
    for i in 0..dim {
        let mut row = vec![Rat::zero(); dim];
        row[i] = -Rat::one();
        a.push_row(row);
        b.push(Rat::zero());
    }
    HPolyhedron::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn hp(rows: &[&[i64]], b: &[i64]) -> HPolyhedron {
        HPolyhedron::new(
            RatMatrix::from_int_rows(rows),
            b.iter().map(|&x| rat(x)).collect(),
        )
    }

    #[test]
    fn eliminate_single_variable() {
        // {x - y <= 0, y <= 1} project out y -> {x <= 1}
        let p = hp(&[&[1, -1], &[0, 1]], &[0, 1]);
        let q = fourier_motzkin(&p, &[1]);
        assert_eq!(q.rows(), 1);
        assert_eq!(q.a.row(0), &[rat(1)][..]);
        assert_eq!(q.b[0], rat(1));
    }

    #[test]
    fn cube_projects_to_square() {
        let p = hp(
            &[
                &[1, 0, 0],
                &[-1, 0, 0],
                &[0, 1, 0],
                &[0, -1, 0],
                &[0, 0, 1],
                &[0, 0, -1],
            ],
            &[1, 1, 1, 1, 1, 1],
        );
        let q = fourier_motzkin(&p, &[2]);
        assert_eq!(q.dim(), 2);
        assert_eq!(q.rows(), 4);
        assert!(q.contains(&[rat(1), rat(1)]));
        assert!(!q.contains(&[rat(2), rat(0)]));
    }

    #[test]
    fn empty_projection_is_representable() {
        let p = hp(&[&[1, 0], &[-1, 0]], &[0, -1]);
        let q = fourier_motzkin(&p, &[0]);
        assert_eq!(q.dim(), 1);
        assert!(!q.contains(&[rat(0)]));
    }

    #[test]
    fn projection_keeps_remaining_order() {
        // {x0 <= 1, x1 <= 2, x2 <= 3}: eliminating x1 keeps (x0, x2).
        let p = hp(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[1, 2, 3]);
        let q = fourier_motzkin(&p, &[1]);
        assert_eq!(q.dim(), 2);
        assert!(q.contains(&[rat(1), rat(3)]));
        assert!(!q.contains(&[rat(1), rat(4)]));
        assert!(!q.contains(&[rat(2), rat(0)]));
    }

    #[test]
    fn redundant_rows_removed() {
        // After eliminating y from {x <= 1, x <= 5, x + y <= 4, y >= -1},
        // only x <= 1 is irredundant.
        let p = hp(&[&[1, 0], &[1, 0], &[1, 1], &[0, -1]], &[1, 5, 4, 1]);
        let q = fourier_motzkin(&p, &[1]);
        assert_eq!(q.rows(), 1);
        assert_eq!(q.b[0], rat(1));
    }
}
