//! Rationalised-Gaussian sampling, the Monte Carlo uniqueness experiment, and
//! deterministic CSV / SVG emission.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Rat;
use crate::norm::PolytopeNorm;
use crate::rng::{trial_seed, SplitMix64};
use crate::solver::{fm_set, Sample};

/// Which norm an experiment runs under. Builtins take their dimension from
/// the config; a custom matrix is used as given.
#[derive(Clone, Debug)]
pub enum NormSpec {
    Linf,
    L1,
    Custom(PolytopeNorm),
}

impl NormSpec {
    pub fn resolve(&self, k: usize) -> Result<PolytopeNorm> {
        match self {
            NormSpec::Linf => Ok(PolytopeNorm::linf(k)),
            NormSpec::L1 => Ok(PolytopeNorm::l1(k)),
            NormSpec::Custom(n) => {
                if n.k() != k {
                    return Err(Error::DimensionMismatch);
                }
                Ok(n.clone())
            }
        }
    }

    /// Dimension-independent label for result rows, so runs over a k-range
    /// merge under one name.
    pub fn family_label(&self) -> String {
        match self {
            NormSpec::Linf => "linf".into(),
            NormSpec::L1 => "l1".into(),
            NormSpec::Custom(n) => n.label(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub norm: NormSpec,
    pub k: usize,
    /// Inclusive sample-size range.
    pub n_range: (usize, usize),
    pub trials: u64,
    pub seed: u64,
    pub denominator_bits: u32,
    /// Overrides the scale guard (k <= 6, n <= 12).
    pub force: bool,
}

impl ExperimentConfig {
    pub fn new(norm: NormSpec, k: usize, n_range: (usize, usize)) -> Self {
        ExperimentConfig {
            norm,
            k,
            n_range,
            trials: 100,
            seed: 0,
            denominator_bits: 53,
            force: false,
        }
    }
}

/// One (k, n) cell of an experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellResult {
    pub k: usize,
    pub n: usize,
    pub trials: u64,
    pub unique_count: u64,
    /// dim_hist[d] = number of trials whose mean set had dimension d; length k+1.
    pub dim_hist: Vec<u64>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentResult {
    pub norm_label: String,
    /// Sorted by (k, n).
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    /// Merge runs of the same norm family (for example a k-range sweep).
    pub fn merge(mut results: Vec<ExperimentResult>) -> Result<ExperimentResult> {
        let Some(first) = results.first() else {
            return Err(Error::EmptyExperiment);
        };
        let norm_label = first.norm_label.clone();
        if results.iter().any(|r| r.norm_label != norm_label) {
            return Err(Error::Parse(
                "cannot merge results of different norms".into(),
            ));
        }
        let mut cells: Vec<CellResult> = results.drain(..).flat_map(|r| r.cells).collect();
        cells.sort_by_key(|c| (c.k, c.n));
        Ok(ExperimentResult { norm_label, cells })
    }

    pub fn max_k(&self) -> usize {
        self.cells.iter().map(|c| c.k).max().unwrap_or(0)
    }
}

/// Side data that is not part of the reproducible result.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Trials where the plain Frank-Wolfe loop failed to certify and the
    /// fallback produced the point.
    pub fallback_events: u64,
    pub total_trials: u64,
}

/// n i.i.d. standard-normal points in R^k, each coordinate rounded to the
/// nearest multiple of 2^-denominator_bits. Box-Muller over a seeded splitmix64
/// stream; fully determined by (seed, k, n, denominator_bits).
pub fn sample_gaussian_rational(k: usize, n: usize, seed: u64, denominator_bits: u32) -> Sample {
    assert!(k >= 1 && n >= 1);
    assert!(denominator_bits <= 96, "denominator_bits out of range");
    let mut rng = SplitMix64::new(seed);
    let mut pending: Option<f64> = None;
    let mut next_normal = move || -> f64 {
        if let Some(z) = pending.take() {
            return z;
        }
        let u1 = rng.next_f64_open();
        let u2 = rng.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        pending = Some(r * s);
        r * c
    };
    let denom = BigInt::from(1u8) << denominator_bits;
    let scale = 2f64.powi(denominator_bits as i32);
    let points: Vec<Vec<Rat>> = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let z = next_normal();
                    let scaled = (z * scale).round();
                    debug_assert!(scaled.abs() < i128::MAX as f64);
                    Rat::new(BigInt::from(scaled as i128), denom.clone())
                })
                .collect()
        })
        .collect();
    Sample::new(points).expect("generated sample is well-formed")
}

const GUARD_MAX_K: usize = 6;
const GUARD_MAX_N: usize = 12;

/// Runs `trials` independent mean-set computations per n in the range and
/// aggregates the dimension histogram. Per-trial seeds come from
/// `trial_seed(seed, k, n, trial)`, so the outcome is independent of execution
/// order and the trials can run in parallel.
pub fn run_uniqueness_experiment(cfg: &ExperimentConfig) -> Result<(ExperimentResult, RunStats)> {
    if cfg.trials < 1 || cfg.n_range.0 < 2 || cfg.n_range.0 > cfg.n_range.1 {
        return Err(Error::ScaleGuard(
            "trials >= 1 and 2 <= n_from <= n_to required".into(),
        ));
    }
    if !cfg.force && (cfg.k > GUARD_MAX_K || cfg.n_range.1 > GUARD_MAX_N) {
        return Err(Error::ScaleGuard(format!(
            "k <= {GUARD_MAX_K} and n <= {GUARD_MAX_N} unless forced"
        )));
    }
    let norm = cfg.norm.resolve(cfg.k)?;
    let mut cells = Vec::new();
    let mut stats = RunStats::default();
    for n in cfg.n_range.0..=cfg.n_range.1 {
        let start = Instant::now();
        let outcomes: Vec<(usize, bool)> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let s = trial_seed(cfg.seed, cfg.k as u64, n as u64, trial);
                let sample = sample_gaussian_rational(cfg.k, n, s, cfg.denominator_bits);
                let r = fm_set(&norm, &sample).expect("mean set computation failed");
                (r.fm_dim, r.fw_fallback)
            })
            .collect();
        let mut dim_hist = vec![0u64; cfg.k + 1];
        for (dim, fallback) in outcomes {
            dim_hist[dim] += 1;
            if fallback {
                stats.fallback_events += 1;
            }
        }
        stats.total_trials += cfg.trials;
        cells.push(CellResult {
            k: cfg.k,
            n,
            trials: cfg.trials,
            unique_count: dim_hist[0],
            dim_hist,
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok((
        ExperimentResult {
            norm_label: cfg.norm.family_label(),
            cells,
        },
        stats,
    ))
}

/// CSV with columns `norm,k,n,trials,unique_count,dim0..dimK,elapsed_ms`,
/// K = largest k in the result. LF line endings, header always present.
pub fn emit_csv(result: &ExperimentResult) -> String {
    let max_k = result.max_k();
    let mut out = String::from("norm,k,n,trials,unique_count");
    for d in 0..=max_k {
        let _ = write!(out, ",dim{d}");
    }
    out.push_str(",elapsed_ms\n");
    for c in &result.cells {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            result.norm_label, c.k, c.n, c.trials, c.unique_count
        );
        for d in 0..=max_k {
            let v = c.dim_hist.get(d).copied().unwrap_or(0);
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", c.elapsed_ms);
    }
    out
}

/// Inverse of `emit_csv`: `parse_csv(emit_csv(r)) == r`.
pub fn parse_csv(text: &str) -> Result<ExperimentResult> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty csv".into()))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() < 7 || fields[0] != "norm" || *fields.last().unwrap() != "elapsed_ms" {
        return Err(Error::Parse("unexpected csv header".into()));
    }
    let dim_cols = fields.len() - 6;
    let mut norm_label = String::new();
    let mut cells = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != fields.len() {
            return Err(Error::Parse(format!("ragged csv row: {line:?}")));
        }
        let parse = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
        };
        norm_label = cols[0].to_string();
        let k = parse(cols[1])? as usize;
        let n = parse(cols[2])? as usize;
        let trials = parse(cols[3])?;
        let unique_count = parse(cols[4])?;
        let mut dim_hist = Vec::with_capacity(k + 1);
        for (d, col) in cols[5..5 + dim_cols].iter().enumerate() {
            let v = parse(col)?;
            if d <= k {
                dim_hist.push(v);
            } else if v != 0 {
                return Err(Error::Parse(format!(
                    "nonzero histogram entry above k in row: {line:?}"
                )));
            }
        }
        let elapsed_ms = parse(cols[fields.len() - 1])?;
        if dim_hist.first().copied() != Some(unique_count) {
            return Err(Error::Parse("unique_count must equal dim0".into()));
        }
        cells.push(CellResult {
            k,
            n,
            trials,
            unique_count,
            dim_hist,
            elapsed_ms,
        });
    }
    Ok(ExperimentResult { norm_label, cells })
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 440.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Deterministic SVG line plot: proportion of unique means against n, one
/// series per k. Byte-identical output for equal results.
pub fn emit_plot(result: &ExperimentResult) -> Result<String> {
    if result.cells.is_empty() {
        return Err(Error::EmptyExperiment);
    }
    let n_min = result.cells.iter().map(|c| c.n).min().unwrap();
    let n_max = result.cells.iter().map(|c| c.n).max().unwrap();
    let span = (n_max - n_min).max(1) as f64;
    let px =
        |n: usize| -> f64 { MARGIN_L + (n - n_min) as f64 / span * (SVG_W - MARGIN_L - MARGIN_R) };
    let py = |p: f64| -> f64 { SVG_H - MARGIN_B - p * (SVG_H - MARGIN_T - MARGIN_B) };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(
        s,
        "  <rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>"
    );
    // axes
    let _ = writeln!(
        s,
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        MARGIN_L,
        py(0.0),
        SVG_W - MARGIN_R,
        py(0.0)
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        MARGIN_L,
        py(0.0),
        MARGIN_L,
        py(1.0)
    );
    for tick in 0..=4 {
        let p = tick as f64 / 4.0;
        let _ = writeln!(
            s,
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            MARGIN_L - 4.0,
            py(p),
            MARGIN_L,
            py(p)
        );
        let _ = writeln!(
            s,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{:.2}</text>",
            MARGIN_L - 8.0,
            py(p) + 4.0,
            p
        );
    }
    for n in n_min..=n_max {
        let _ = writeln!(
            s,
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            px(n),
            py(0.0),
            px(n),
            py(0.0) + 4.0
        );
        let _ = writeln!(
            s,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{n}</text>",
            px(n),
            py(0.0) + 18.0
        );
    }
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">sample size n</text>",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        SVG_H - 12.0
    );
    let _ = writeln!(
        s,
        "  <text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">proportion unique</text>",
        SVG_H / 2.0,
        SVG_H / 2.0
    );

    let mut ks: Vec<usize> = result.cells.iter().map(|c| c.k).collect();
    ks.sort_unstable();
    ks.dedup();
    for (si, k) in ks.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut pts = String::new();
        for c in result.cells.iter().filter(|c| c.k == *k) {
            let p = c.unique_count as f64 / c.trials as f64;
            let _ = write!(pts, "{:.2},{:.2} ", px(c.n), py(p));
        }
        let _ = writeln!(
            s,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.trim_end()
        );
        let ly = MARGIN_T + 16.0 * si as f64;
        let _ = writeln!(
            s,
            "  <line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            SVG_W - MARGIN_R + 8.0,
            SVG_W - MARGIN_R + 32.0
        );
        let _ = writeln!(
            s,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">k={k}</text>",
            SVG_W - MARGIN_R + 38.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_sampling_deterministic() {
        let a = sample_gaussian_rational(3, 5, 99, 53);
        let b = sample_gaussian_rational(3, 5, 99, 53);
        assert_eq!(a, b);
        // validated once at this fixed seed pair
        let c = sample_gaussian_rational(3, 5, 100, 53);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_mean_is_near_zero() {
        // 10^4 draws per coordinate: |mean| < 0.05 is a 5-sigma bound.
        let s = sample_gaussian_rational(2, 10_000, 7, 53);
        for c in 0..2 {
            let mean: f64 = s
                .points()
                .iter()
                .map(|p| {
                    let num: f64 = p[c].numer().to_string().parse().unwrap();
                    let den: f64 = p[c].denom().to_string().parse().unwrap();
                    num / den
                })
                .sum::<f64>()
                / 10_000.0;
            assert!(mean.abs() < 0.05, "coordinate {c} mean {mean}");
        }
    }

    #[test]
    fn experiment_two_samples_never_unique() {
        let cfg = ExperimentConfig {
            trials: 8,
            seed: 5,
            ..ExperimentConfig::new(NormSpec::Linf, 2, (2, 2))
        };
        let (result, _) = run_uniqueness_experiment(&cfg).unwrap();
        assert_eq!(result.cells.len(), 1);
        assert_eq!(result.cells[0].unique_count, 0);
        let hist_total: u64 = result.cells[0].dim_hist.iter().sum();
        assert_eq!(hist_total, 8);
    }

    #[test]
    fn experiment_guard() {
        let cfg = ExperimentConfig {
            trials: 1,
            ..ExperimentConfig::new(NormSpec::Linf, 9, (2, 2))
        };
        assert!(matches!(
            run_uniqueness_experiment(&cfg),
            Err(Error::ScaleGuard(_))
        ));
    }

    #[test]
    fn csv_roundtrip_and_empty() {
        let r = ExperimentResult {
            norm_label: "linf:2".into(),
            cells: vec![CellResult {
                k: 2,
                n: 3,
                trials: 4,
                unique_count: 2,
                dim_hist: vec![2, 1, 1],
                elapsed_ms: 17,
            }],
        };
        let text = emit_csv(&r);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("norm,k,n,trials,unique_count,dim0,dim1,dim2,elapsed_ms\n"));
        assert_eq!(parse_csv(&text).unwrap(), r);
        let empty = ExperimentResult {
            norm_label: String::new(),
            cells: vec![],
        };
        assert_eq!(emit_csv(&empty).lines().count(), 1);
    }

    #[test]
    fn svg_deterministic() {
        let r = ExperimentResult {
            norm_label: "linf:2".into(),
            cells: vec![
                CellResult {
                    k: 2,
                    n: 2,
                    trials: 10,
                    unique_count: 0,
                    dim_hist: vec![0, 10, 0],
                    elapsed_ms: 1,
                },
                CellResult {
                    k: 2,
                    n: 3,
                    trials: 10,
                    unique_count: 4,
                    dim_hist: vec![4, 6, 0],
                    elapsed_ms: 1,
                },
                CellResult {
                    k: 2,
                    n: 4,
                    trials: 10,
                    unique_count: 8,
                    dim_hist: vec![8, 2, 0],
                    elapsed_ms: 1,
                },
            ],
        };
        let a = emit_plot(&r).unwrap();
        let b = emit_plot(&r).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polyline").count(), 1);
        let empty = ExperimentResult {
            norm_label: String::new(),
            cells: vec![],
        };
        assert!(matches!(emit_plot(&empty), Err(Error::EmptyExperiment)));
    }

    #[test]
    fn svg_two_series_legend() {
        let mk = |k: usize, n: usize, u: u64| CellResult {
            k,
            n,
            trials: 10,
            unique_count: u,
            dim_hist: {
                let mut h = vec![0u64; k + 1];
                h[0] = u;
                h[1] = 10 - u;
                h
            },
            elapsed_ms: 0,
        };
        let r = ExperimentResult {
            norm_label: "linf".into(),
            cells: vec![mk(2, 2, 0), mk(2, 3, 5), mk(3, 2, 0), mk(3, 3, 2)],
        };
        let svg = emit_plot(&r).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        let k2 = svg.find("k=2").unwrap();
        let k3 = svg.find("k=3").unwrap();
        assert!(k2 < k3);
    }
}
