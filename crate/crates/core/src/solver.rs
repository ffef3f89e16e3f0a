//! Exact Fréchet mean set computation: lift the samples to the distance
//! polyhedron Q in R^{k+n}, project out the location variables with
//! Fourier-Motzkin, find the squared-norm minimiser of the projection, and
//! reconstruct the mean set's H-representation. The minimiser runs the plain
//! Frank-Wolfe loop first and falls back to a Wolfe-style minimum-norm-point
//! method whenever the loop cannot produce an exact optimality certificate.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hpoly::HPolyhedron;
use crate::linalg::{dot, rank, solve_linear, Rat, RatMatrix};
use crate::lp::{self, minimize_fast_vertex, FastLp, LinearProgram, LpStatus};
use crate::norm::{PolarFace, PolytopeNorm};
use crate::project::fourier_motzkin;

/// Finite sample of n points in R^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    points: Vec<Vec<Rat>>,
}

impl Sample {
    pub fn new(points: Vec<Vec<Rat>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyPointSet);
        };
        let k = first.len();
        if k == 0 || points.iter().any(|p| p.len() != k) {
            return Err(Error::DimensionMismatch);
        }
        Ok(Sample { points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[Rat] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    /// Sample file format: first significant line `n k`, then n rows of k
    /// rationals; `#` comments.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = crate::norm::significant_lines(text);
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty sample file".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("sample header must be \"n k\"".into()))?;
        let k: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("sample header must be \"n k\"".into()))?;
        if parts.next().is_some() {
            return Err(Error::Parse("sample header must be \"n k\"".into()));
        }
        let mut points = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("sample file ends before point {i}")))?;
            points.push(crate::norm::parse_rat_line(line, k)?);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after sample points".into()));
        }
        Sample::new(points)
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n(), self.k());
        for p in &self.points {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

/// Everything Algorithm-style mean computation produces.
#[derive(Clone, Debug)]
pub struct FmSetResult {
    /// Exact distance from each sample point to the mean set.
    pub distances: Vec<Rat>,
    /// The full system `a·theta >= a·x_i - d_i` over all polar rows and points.
    pub fm_hrep: HPolyhedron,
    pub fm_dim: usize,
    pub unique: bool,
    /// A relative-interior point of the mean set.
    pub witness: Vec<Rat>,
    /// Present iff every distance is positive.
    pub face_type: Option<Vec<PolarFace>>,
    /// True when the plain Frank-Wolfe loop failed to certify and the
    /// Wolfe-style fallback produced the point.
    pub fw_fallback: bool,
}

/// The lifted polyhedron Q in R^{k+n} with variables (theta_1..theta_k,
/// d_1..d_n) and one constraint `a·x_i - a·theta - d_i <= 0` per polar row and
/// sample point (point-major order).
pub fn build_lifted_polyhedron(norm: &PolytopeNorm, sample: &Sample) -> Result<HPolyhedron> {
    let k = norm.k();
    if sample.k() != k {
        return Err(Error::DimensionMismatch);
    }
    let n = sample.n();
    let mut a = RatMatrix::zeros(0, k + n);
    let mut b = Vec::with_capacity(norm.rows() * n);
    for i in 0..n {
        for j in 0..norm.rows() {
            let row_a = norm.vertex(j);
            let mut row = Vec::with_capacity(k + n);
            row.extend(row_a.iter().map(|v| -v));
            row.extend((0..n).map(|t| if t == i { -Rat::one() } else { Rat::zero() }));
            a.push_row(row);
            b.push(-dot(row_a, sample.point(i)));
        }
    }
    Ok(HPolyhedron::new(a, b))
}

const FW_ITERATION_FACTOR: usize = 4;
const WOLFE_MAJOR_CAP: usize = 10_000;

/// Plain Frank-Wolfe iterates suffer cubic per-step denominator growth. Once
/// the iterate is this much bigger than the starting point the loop cannot
/// reach an exact certificate in reasonable time, and the certified fallback
/// takes over early instead of burning the full iteration cap.
fn fw_bit_limit(start_bits: u64) -> u64 {
    8 * start_bits + 1024
}

pub(crate) struct MinNormOutcome {
    pub point: Vec<Rat>,
    pub fallback: bool,
}

fn rat_bits(x: &Rat) -> u64 {
    x.numer().bits() + x.denom().bits()
}

fn vec_bits(v: &[Rat]) -> u64 {
    v.iter().map(rat_bits).sum()
}

/// `argmin ||d||_2^2` over `qp`, certified exactly: the returned point is in
/// `qp` and the vertex oracle gap in its own direction is zero.
pub fn min_norm_point(qp: &HPolyhedron) -> Result<Vec<Rat>> {
    min_norm_point_with_stats(qp).map(|o| o.point)
}

pub(crate) fn min_norm_point_with_stats(qp: &HPolyhedron) -> Result<MinNormOutcome> {
    let n = qp.dim();
    let ones = vec![Rat::one(); n];

    // Initial feasible point: argmin 1·d, as the algorithm prescribes.
    let d0 = match minimize_fast_vertex(&qp.a, &qp.b, &ones) {
        FastLp::Optimal { point, .. } => point,
        // The projection recedes only upward, so 1·d is bounded below on a
        // nonempty qp; both non-optimal answers mean infeasibility.
        FastLp::NoDual | FastLp::PrimalInfeasible => return Err(Error::Infeasible),
    };
    debug_assert!(d0.iter().all(|x| !x.is_negative()));
    let scale: Rat = d0.iter().sum();
    if scale.is_zero() {
        // 1·d = 0 with d >= 0 forces d = 0, which is the global minimiser.
        return Ok(MinNormOutcome {
            point: d0,
            fallback: false,
        });
    }

    // Any minimum-norm point has every coordinate at most ||d0||_1, so a
    // 0 <= d_i <= 2·||d0||_1 box preserves it strictly while making the
    // oracle polytope bounded.
    let mut boxed = qp.clone();
    let two_scale = &scale + &scale;
    for i in 0..n {
        let mut row = vec![Rat::zero(); n];
        row[i] = Rat::one();
        boxed.push_row(row.clone(), two_scale.clone());
        row[i] = -Rat::one();
        boxed.push_row(row, Rat::zero());
    }

    let oracle = |dir: &[Rat]| -> Vec<Rat> {
        match minimize_fast_vertex(&boxed.a, &boxed.b, dir) {
            FastLp::Optimal { point, .. } => point,
            _ => unreachable!("oracle polytope is nonempty and bounded"),
        }
    };

    // Plain Frank-Wolfe with the exact line step, checked for an exact
    // certificate each round.
    let cap = FW_ITERATION_FACTOR * n;
    let bit_limit = fw_bit_limit(vec_bits(&d0));
    let mut d = d0;
    let mut visited: Vec<Vec<Rat>> = Vec::new();
    for _ in 0..cap {
        if vec_bits(&d) > bit_limit {
            break;
        }
        let s = oracle(&d);
        let gap = dot(&d, &d) - dot(&s, &d);
        debug_assert!(!gap.is_negative());
        if gap.is_zero() {
            debug_assert!(qp.contains(&d));
            return Ok(MinNormOutcome {
                point: d,
                fallback: false,
            });
        }
        let diff: Vec<Rat> = s.iter().zip(&d).map(|(a, b)| a - b).collect();
        let denom = dot(&diff, &diff);
        let mut eta = &gap / &denom;
        if eta > Rat::one() {
            eta = Rat::one();
        }
        for (di, df) in d.iter_mut().zip(&diff) {
            *di += &eta * df;
        }
        visited.push(s);
    }

    log::debug!("frank-wolfe loop exhausted without certificate; switching to wolfe fallback");
    let start = visited
        .into_iter()
        .min_by(|a, b| dot(a, a).cmp(&dot(b, b)))
        .unwrap_or_else(|| oracle(&vec![Rat::one(); n]));
    let point = wolfe_min_norm(start, &oracle)?;
    debug_assert!(qp.contains(&point));
    Ok(MinNormOutcome {
        point,
        fallback: true,
    })
}

/// Wolfe's minimum-norm-point method over the vertex oracle. Terminates
/// finitely in exact arithmetic; the major-cycle cap only guards against
/// implementation bugs.
fn wolfe_min_norm(start: Vec<Rat>, oracle: &dyn Fn(&[Rat]) -> Vec<Rat>) -> Result<Vec<Rat>> {
    let mut corral: Vec<Vec<Rat>> = vec![start.clone()];
    let mut coeffs: Vec<Rat> = vec![Rat::one()];
    let mut x = start;
    for _ in 0..WOLFE_MAJOR_CAP {
        let s = oracle(&x);
        if dot(&x, &x) <= dot(&s, &x) {
            return Ok(x);
        }
        debug_assert!(
            !corral.contains(&s),
            "oracle returned a corral vertex with negative gap"
        );
        corral.push(s);
        coeffs.push(Rat::zero());
        loop {
            let (y, alpha) = affine_minimizer(&corral);
            if alpha.iter().all(Signed::is_positive) {
                x = y;
                coeffs = alpha;
                break;
            }
            // Step from x toward y until the first coefficient hits zero.
            let mut theta: Option<Rat> = None;
            for (l, a) in coeffs.iter().zip(&alpha) {
                if !a.is_positive() {
                    let t = l / (l - a);
                    if theta.as_ref().is_none_or(|cur| t < *cur) {
                        theta = Some(t);
                    }
                }
            }
            let theta = theta.expect("some coefficient is nonpositive");
            let one_minus = Rat::one() - &theta;
            for (l, a) in coeffs.iter_mut().zip(&alpha) {
                *l = &*l * &one_minus + a * &theta;
            }
            let mut i = 0;
            while i < coeffs.len() {
                if coeffs[i].is_zero() {
                    coeffs.remove(i);
                    corral.remove(i);
                } else {
                    i += 1;
                }
            }
            debug_assert!(!corral.is_empty());
            if corral.len() == 1 {
                x = corral[0].clone();
                coeffs = vec![Rat::one()];
                break;
            }
        }
    }
    Err(Error::FrankWolfeUncertified)
}

/// Minimiser of `||sum alpha_i v_i||^2` subject to `sum alpha_i = 1` over the
/// affine hull: KKT system on the Gram matrix, solved exactly.
fn affine_minimizer(corral: &[Vec<Rat>]) -> (Vec<Rat>, Vec<Rat>) {
    let p = corral.len();
    let dim = corral[0].len();
    let mut sys = RatMatrix::zeros(0, p + 1);
    let mut rhs = Vec::with_capacity(p + 1);
    for i in 0..p {
        let mut row: Vec<Rat> = (0..p).map(|j| dot(&corral[i], &corral[j])).collect();
        row.push(-Rat::one()); // -mu
        sys.push_row(row);
        rhs.push(Rat::zero());
    }
    let mut last = vec![Rat::one(); p];
    last.push(Rat::zero());
    sys.push_row(last);
    rhs.push(Rat::one());
    let (sol, _) = solve_linear(&sys, &rhs).expect("KKT system of a convex QP is consistent");
    let alpha = sol[..p].to_vec();
    let mut y = vec![Rat::zero(); dim];
    for (a, v) in alpha.iter().zip(corral) {
        if a.is_zero() {
            continue;
        }
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += a * vi;
        }
    }
    (y, alpha)
}

/// Same-normal constraints collapse to their strongest right-hand side; the
/// mean-set system has one rhs per (row, point) pair but only `r` distinct
/// normals, and the interior-point and vertex machinery only need the
/// strongest ones. Defines exactly the same set as the full `fm_hrep`.
pub fn reduced_fm_hrep(norm: &PolytopeNorm, sample: &Sample, d: &[Rat]) -> HPolyhedron {
    let k = norm.k();
    let mut a = RatMatrix::zeros(0, k);
    let mut b = Vec::with_capacity(norm.rows());
    for j in 0..norm.rows() {
        let row = norm.vertex(j);
        let rhs = (0..sample.n())
            .map(|i| &d[i] - dot(row, sample.point(i)))
            .min()
            .unwrap();
        a.push_row(row.iter().map(|v| -v).collect());
        b.push(rhs);
    }
    HPolyhedron::new(a, b)
}

/// Full mean-set pipeline.
pub fn fm_set(norm: &PolytopeNorm, sample: &Sample) -> Result<FmSetResult> {
    fm_set_with_projection(norm, sample).map(|(r, _)| r)
}

/// As `fm_set`, also returning the distance-space projection the minimum-norm
/// step ran on (for callers re-verifying the optimality certificate).
pub fn fm_set_with_projection(
    norm: &PolytopeNorm,
    sample: &Sample,
) -> Result<(FmSetResult, HPolyhedron)> {
    let k = norm.k();
    if sample.k() != k {
        return Err(Error::DimensionMismatch);
    }
    let n = sample.n();

    let lifted = build_lifted_polyhedron(norm, sample)?;
    let theta_vars: Vec<usize> = (0..k).collect();
    let projected = fourier_motzkin(&lifted, &theta_vars);
    let MinNormOutcome {
        point: distances,
        fallback,
    } = min_norm_point_with_stats(&projected)?;

    // H-representation over theta: a·theta >= a·x_i - d_i for every row and point.
    let mut fm_a = RatMatrix::zeros(0, k);
    let mut fm_b = Vec::with_capacity(norm.rows() * n);
    for i in 0..n {
        for j in 0..norm.rows() {
            let row = norm.vertex(j);
            fm_a.push_row(row.iter().map(|v| -v).collect());
            fm_b.push(&distances[i] - dot(row, sample.point(i)));
        }
    }
    let fm_hrep = HPolyhedron::new(fm_a, fm_b);

    let reduced = reduced_fm_hrep(norm, sample, &distances);
    let implicit = lp::implicit_equalities(&reduced)?;
    let fm_dim = k - rank(&RatMatrix::from_rows(
        implicit
            .iter()
            .map(|&i| reduced.a.row(i).to_vec())
            .collect(),
        k,
    ));
    let (witness, _slack) = lp::max_slack_point(&reduced)?;

    for (i, di) in distances.iter().enumerate() {
        let diff: Vec<Rat> = sample
            .point(i)
            .iter()
            .zip(&witness)
            .map(|(a, b)| a - b)
            .collect();
        assert_eq!(
            norm.eval(&diff).unwrap(),
            *di,
            "witness distance mismatch at point {i}"
        );
    }

    let mut result = FmSetResult {
        distances,
        fm_hrep,
        fm_dim,
        unique: fm_dim == 0,
        witness,
        face_type: None,
        fw_fallback: fallback,
    };
    if result.distances.iter().all(Signed::is_positive) {
        result.face_type = Some(face_type_of_sample(norm, sample, &result)?);
    }
    Ok((result, projected))
}

/// The minimal face tuple of the sample around its mean set: for each point,
/// the polar face spanned by the norm's active rows at the witness seen from
/// that point. Defined only when every distance is positive.
pub fn face_type_of_sample(
    norm: &PolytopeNorm,
    sample: &Sample,
    result: &FmSetResult,
) -> Result<Vec<PolarFace>> {
    if result.distances.iter().any(Zero::is_zero) {
        return Err(Error::FaceTypeUndefined);
    }
    let mut faces = Vec::with_capacity(sample.n());
    for i in 0..sample.n() {
        let dir: Vec<Rat> = result
            .witness
            .iter()
            .zip(sample.point(i))
            .map(|(w, x)| w - x)
            .collect();
        let active = norm.active_constraints(&dir)?;
        let dim = norm.face_dim(&active);
        debug_assert!(norm.is_polar_face(&active));
        faces.push(PolarFace {
            vertex_indices: active,
            dim,
        });
    }
    Ok(faces)
}

/// Exact feasibility test for `0 in sum_i d_i·conv(G_i)` (Minkowski sum): the
/// subgradient certificate that the witness really is a sample mean.
pub fn zero_in_weighted_polar_sum(
    norm: &PolytopeNorm,
    faces: &[PolarFace],
    weights: &[Rat],
) -> bool {
    assert_eq!(faces.len(), weights.len());
    let k = norm.k();
    let vars: usize = faces.iter().map(|f| f.vertex_indices.len()).sum();
    // sum_i d_i sum_j lambda_ij v_ij = 0, per-face sum_j lambda_ij = 1, lambda >= 0.
    let mut eq_a = RatMatrix::zeros(0, vars);
    let mut eq_b = Vec::new();
    for c in 0..k {
        let mut row = Vec::with_capacity(vars);
        for (f, w) in faces.iter().zip(weights) {
            for &v in &f.vertex_indices {
                row.push(w * &norm.vertex(v)[c]);
            }
        }
        eq_a.push_row(row);
        eq_b.push(Rat::zero());
    }
    let mut offset = 0;
    for f in faces {
        let mut row = vec![Rat::zero(); vars];
        for t in 0..f.vertex_indices.len() {
            row[offset + t] = Rat::one();
        }
        offset += f.vertex_indices.len();
        eq_a.push_row(row);
        eq_b.push(Rat::one());
    }
    let out = lp::solve(&LinearProgram {
        objective: vec![Rat::zero(); vars],
        constraints: crate::project::nonneg_rows(vars),
        equalities: Some(HPolyhedron::new(eq_a, eq_b)),
    })
    .expect("subgradient feasibility LP is well-formed");
    out.status == LpStatus::Optimal
}

/// Axis-aligned box for the brute-force oracle.
#[derive(Clone, Debug)]
pub struct GridBox {
    pub lo: Vec<Rat>,
    pub hi: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct GridScan {
    /// All grid points attaining the grid minimum.
    pub minimizers: Vec<Vec<Rat>>,
    /// The grid-minimal value of `sum_i ||x_i - theta||^2` (no 1/n factor).
    pub value: Rat,
}

const GRID_GUARD: u128 = 5_000_000;

/// Exhaustive evaluation of the sample Fréchet objective on a rational grid.
/// Entirely independent of the solver pipeline; used to cross-check it.
pub fn brute_force_fm_oracle(
    norm: &PolytopeNorm,
    sample: &Sample,
    bounds: &GridBox,
    step: &Rat,
) -> Result<GridScan> {
    let k = norm.k();
    assert!(step.is_positive(), "grid step must be positive");
    assert_eq!(bounds.lo.len(), k);
    assert_eq!(bounds.hi.len(), k);
    for p in sample.points() {
        for ((x, lo), hi) in p.iter().zip(&bounds.lo).zip(&bounds.hi) {
            assert!(x >= lo && x <= hi, "box must contain the sample hull");
        }
    }
    let mut counts: Vec<u128> = Vec::with_capacity(k);
    let mut total: u128 = 1;
    for j in 0..k {
        let span = (&bounds.hi[j] - &bounds.lo[j]) / step;
        let c = span.floor().to_integer();
        let c: u128 = u128::try_from(c).map_err(|_| Error::GridTooLarge(u128::MAX))? + 1;
        total = total.saturating_mul(c);
        counts.push(c);
    }
    if total > GRID_GUARD {
        return Err(Error::GridTooLarge(total));
    }

    let mut idx = vec![0u128; k];
    let mut best: Option<Rat> = None;
    let mut minimizers: Vec<Vec<Rat>> = Vec::new();
    loop {
        let theta: Vec<Rat> = (0..k)
            .map(|j| &bounds.lo[j] + Rat::from_integer(idx[j].into()) * step)
            .collect();
        let mut value = Rat::zero();
        for p in sample.points() {
            let diff: Vec<Rat> = p.iter().zip(&theta).map(|(a, b)| a - b).collect();
            let d = norm.eval(&diff).unwrap();
            value += &d * &d;
        }
        match &best {
            Some(b) if value > *b => {}
            Some(b) if value == *b => minimizers.push(theta),
            _ => {
                best = Some(value);
                minimizers = vec![theta];
            }
        }
        // odometer
        let mut j = 0;
        loop {
            if j == k {
                let value = best.unwrap();
                return Ok(GridScan { minimizers, value });
            }
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Outcome of the grid-oracle cross-check of a computed mean set.
#[derive(Clone, Debug)]
pub struct OracleReport {
    /// Name of the first violated invariant, or None on a full pass.
    pub violated: Option<&'static str>,
    /// The grid scan hit the exact optimum (containment checked).
    pub grid_hit_optimum: bool,
    pub grid_value: Rat,
    pub exact_value: Rat,
}

/// Cross-checks a mean-set result against the independent grid oracle and the
/// optimality certificates. Invariants, in check order:
/// `grid-value-lower-bound`, `containment` (when the grid attains the exact
/// optimum), `witness-distance`, `equidistance` (over the mean set's
/// vertices), and `subgradient` (when the face type is defined).
pub fn oracle_check(
    norm: &PolytopeNorm,
    sample: &Sample,
    result: &FmSetResult,
    bounds: &GridBox,
    step: &Rat,
) -> Result<OracleReport> {
    let scan = brute_force_fm_oracle(norm, sample, bounds, step)?;
    let exact_value: Rat = result.distances.iter().map(|d| d * d).sum();
    let mut report = OracleReport {
        violated: None,
        grid_hit_optimum: scan.value == exact_value,
        grid_value: scan.value.clone(),
        exact_value: exact_value.clone(),
    };
    if scan.value < exact_value {
        report.violated = Some("grid-value-lower-bound");
        return Ok(report);
    }
    if report.grid_hit_optimum && !scan.minimizers.iter().all(|m| result.fm_hrep.contains(m)) {
        report.violated = Some("containment");
        return Ok(report);
    }
    for (i, d) in result.distances.iter().enumerate() {
        let diff: Vec<Rat> = sample
            .point(i)
            .iter()
            .zip(&result.witness)
            .map(|(a, b)| a - b)
            .collect();
        if norm.eval(&diff)? != *d {
            report.violated = Some("witness-distance");
            return Ok(report);
        }
    }
    let reduced = reduced_fm_hrep(norm, sample, &result.distances);
    for v in crate::hpoly::enumerate_vertices(&reduced) {
        for (i, d) in result.distances.iter().enumerate() {
            let diff: Vec<Rat> = sample.point(i).iter().zip(&v).map(|(a, b)| a - b).collect();
            if norm.eval(&diff)? != *d {
                report.violated = Some("equidistance");
                return Ok(report);
            }
        }
    }
    if let Some(faces) = &result.face_type {
        if !zero_in_weighted_polar_sum(norm, faces, &result.distances) {
            report.violated = Some("subgradient");
            return Ok(report);
        }
    }
    Ok(report)
}
