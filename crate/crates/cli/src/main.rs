//! `polymean`: exact Fréchet mean sets under polytope norms, the uniqueness
//! conditions, sample thresholds, Monte Carlo experiments, and the grid-oracle
//! cross-check.
//!
//! Exit codes: 0 success, 1 invariant/oracle/search failure, 2 input error,
//! 3 internal infeasibility.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polymean_core::{
    condition_report, emit_csv, emit_plot, fm_set, oracle_check, parse_rat, rat,
    run_uniqueness_experiment, threshold_search, Error, ExperimentConfig, ExperimentResult,
    FmSetResult, GridBox, NormSpec, PolarFace, PolytopeNorm, Rat, RunStats, Sample,
};

#[derive(Parser)]
#[command(name = "polymean", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Worker threads (default: POLYMEAN_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Fréchet mean set of a sample.
    Fm(FmArgs),
    /// Compute just the face type of a sample around its mean set.
    FaceType(FmArgs),
    /// Evaluate the three uniqueness conditions on a polar face tuple.
    Check(CheckArgs),
    /// Enumerate the proper faces of the polar ball.
    Faces(FacesArgs),
    /// Search for the unique-mean sample threshold N(B).
    Threshold(ThresholdArgs),
    /// Monte Carlo uniqueness experiment over rationalised Gaussian samples.
    Experiment(ExperimentArgs),
    /// Cross-check the solver against the brute-force grid oracle.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct FmArgs {
    /// Norm: "linf:<k>", "l1:<k>", or a norm file path.
    #[arg(long)]
    norm: String,
    /// Sample file ("n k" header, then n rows of k rationals).
    #[arg(long)]
    data: PathBuf,
    /// Machine-readable output.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (default).
    #[arg(long)]
    text: bool,
    /// Add decimal renderings next to exact rationals.
    #[arg(long)]
    approx: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    norm: String,
    /// Face tuple: semicolon-separated faces, each a comma-separated list of
    /// polar vertex row indices, e.g. "0,2;3;1".
    #[arg(long)]
    faces: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FacesArgs {
    #[arg(long)]
    norm: String,
    /// Only faces of dimension <= this.
    #[arg(long)]
    max_dim: Option<usize>,
    /// Skip the r <= 24 enumeration guard.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    norm: String,
    /// Largest sample size to try.
    #[arg(long)]
    n_max: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Plain-text key=value config file; explicit flags override its entries.
    /// Keys: norm, k, n_from, n_to, trials, seed, bits, csv, svg, force.
    #[arg(long)]
    config: Option<PathBuf>,
    /// "linf", "l1" (dimension from --k), or a norm file path.
    #[arg(long)]
    norm: Option<String>,
    /// Dimension or inclusive range, e.g. "3" or "2..4".
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    n_from: Option<usize>,
    #[arg(long)]
    n_to: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dyadic rounding: coordinates land on multiples of 2^-bits.
    #[arg(long)]
    bits: Option<u32>,
    /// Write the CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Skip the scale guard (k <= 6, n <= 12).
    #[arg(long)]
    force: bool,
}

#[derive(Default)]
struct ExperimentSettings {
    norm: Option<String>,
    k: Option<String>,
    n_from: Option<usize>,
    n_to: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    bits: Option<u32>,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    force: bool,
}

fn parse_experiment_config(text: &str) -> Result<ExperimentSettings, Error> {
    let mut s = ExperimentSettings::default();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line is not key=value: {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse(format!("config: bad {what} value {value:?}"));
        match key {
            "norm" => s.norm = Some(value.to_string()),
            "k" => s.k = Some(value.to_string()),
            "n_from" => s.n_from = Some(value.parse().map_err(|_| bad("n_from"))?),
            "n_to" => s.n_to = Some(value.parse().map_err(|_| bad("n_to"))?),
            "trials" => s.trials = Some(value.parse().map_err(|_| bad("trials"))?),
            "seed" => s.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "bits" => s.bits = Some(value.parse().map_err(|_| bad("bits"))?),
            "csv" => s.csv = Some(PathBuf::from(value)),
            "svg" => s.svg = Some(PathBuf::from(value)),
            "force" => s.force = value.parse().map_err(|_| bad("force"))?,
            other => return Err(Error::Parse(format!("config: unknown key {other:?}"))),
        }
    }
    Ok(s)
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    norm: String,
    #[arg(long)]
    data: PathBuf,
    /// Grid step, a positive rational like "1/4".
    #[arg(long)]
    step: String,
    /// Grid box "lo1,lo2,..;hi1,hi2,..". Default: a box certified to contain
    /// the mean set and the sample.
    #[arg(long, allow_hyphen_values = true)]
    r#box: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("POLYMEAN_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Fm(a) => cmd_fm(a, false),
        Command::FaceType(a) => cmd_fm(a, true),
        Command::Check(a) => cmd_check(a),
        Command::Faces(a) => cmd_faces(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Infeasible | Error::EmptyPolyhedron | Error::FrankWolfeUncertified => 3,
        Error::ThresholdNotFound { .. } => 1,
        _ => 2,
    }
}

fn load_norm(spec: &str) -> Result<PolytopeNorm, Error> {
    if let Some(builtin) = PolytopeNorm::builtin(spec) {
        return builtin;
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Parse(format!("cannot read norm file {spec:?}: {e}")))?;
    PolytopeNorm::from_text(&text)
}

fn load_sample(path: &PathBuf) -> Result<Sample, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read sample file {path:?}: {e}")))?;
    Sample::from_text(&text)
}

fn rat_str(x: &Rat, approx: bool) -> String {
    if approx {
        let num: f64 = x.numer().to_string().parse().unwrap_or(f64::NAN);
        let den: f64 = x.denom().to_string().parse().unwrap_or(f64::NAN);
        format!("{x} ({:.6})", num / den)
    } else {
        x.to_string()
    }
}

fn vec_str(v: &[Rat], approx: bool) -> String {
    let parts: Vec<String> = v.iter().map(|x| rat_str(x, approx)).collect();
    format!("({})", parts.join(", "))
}

fn face_str(f: &PolarFace) -> String {
    let idx: Vec<String> = f.vertex_indices.iter().map(|i| i.to_string()).collect();
    format!("dim {} {{{}}}", f.dim, idx.join(", "))
}

fn json_rat(x: &Rat) -> serde_json::Value {
    serde_json::Value::String(x.to_string())
}

fn json_vec(v: &[Rat]) -> serde_json::Value {
    serde_json::Value::Array(v.iter().map(json_rat).collect())
}

fn fm_json(norm: &PolytopeNorm, r: &FmSetResult) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..r.fm_hrep.rows())
        .map(|i| json_vec(r.fm_hrep.a.row(i)))
        .collect();
    serde_json::json!({
        "norm": norm.label(),
        "distances": json_vec(&r.distances),
        "fm_hrep": { "rows": rows, "rhs": json_vec(&r.fm_hrep.b) },
        "fm_dim": r.fm_dim,
        "unique": r.unique,
        "witness": json_vec(&r.witness),
        "face_type": r.face_type.as_ref().map(|faces| {
            faces.iter().map(|f| serde_json::json!({
                "vertex_indices": f.vertex_indices,
                "dim": f.dim,
            })).collect::<Vec<_>>()
        }),
        "fw_fallback": r.fw_fallback,
    })
}

fn cmd_fm(args: FmArgs, face_type_only: bool) -> Result<ExitCode, Error> {
    let norm = load_norm(&args.norm)?;
    let sample = load_sample(&args.data)?;
    let r = fm_set(&norm, &sample)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&fm_json(&norm, &r)).unwrap()
        );
        return Ok(ExitCode::SUCCESS);
    }
    if face_type_only {
        match &r.face_type {
            Some(faces) => {
                println!("face type (polar vertex index sets):");
                for f in faces {
                    println!("  {}", face_str(f));
                }
            }
            None => println!("face type: undefined (a data point is a Fréchet mean)"),
        }
        return Ok(ExitCode::SUCCESS);
    }
    println!("norm: {}", norm.label());
    println!("distances:");
    for (i, d) in r.distances.iter().enumerate() {
        println!("  d{} = {}", i + 1, rat_str(d, args.approx));
    }
    println!("mean set H-representation (a·theta <= b):");
    for i in 0..r.fm_hrep.rows() {
        println!(
            "  {} <= {}",
            vec_str(r.fm_hrep.a.row(i), false),
            rat_str(&r.fm_hrep.b[i], args.approx)
        );
    }
    println!("dimension: {}", r.fm_dim);
    println!("unique: {}", r.unique);
    println!("witness: {}", vec_str(&r.witness, args.approx));
    match &r.face_type {
        Some(faces) => {
            println!("face type:");
            for f in faces {
                println!("  {}", face_str(f));
            }
        }
        None => println!("face type: undefined (a data point is a Fréchet mean)"),
    }
    if r.fw_fallback {
        println!("note: frank-wolfe fallback produced the certified minimum-norm point");
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_face_list(norm: &PolytopeNorm, spec: &str) -> Result<Vec<PolarFace>, Error> {
    spec.split(';')
        .map(|group| {
            let indices: Result<Vec<usize>, Error> = group
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad face index {t:?}")))
                })
                .collect();
            norm.polar_face(indices?)
        })
        .collect()
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, Error> {
    let norm = load_norm(&args.norm)?;
    let faces = parse_face_list(&norm, &args.faces)?;
    let report = condition_report(&norm, &faces);
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "norm": norm.label(),
                "faces": faces.iter().map(|f| f.vertex_indices.clone()).collect::<Vec<_>>(),
                "possible": report.possible,
                "positive_probability": report.positive_probability,
                "unique": report.unique,
                "predicted_fm_dim": report.predicted_fm_dim,
            }))
            .unwrap()
        );
    } else {
        println!("norm: {}", norm.label());
        for f in &faces {
            println!("face: {}", face_str(f));
        }
        println!(
            "possible (0 in relint conv of the union): {}",
            report.possible
        );
        println!(
            "positive probability (dimensions add up): {}",
            report.positive_probability
        );
        println!("unique (union spans the space): {}", report.unique);
        println!("predicted mean-set dimension: {}", report.predicted_fm_dim);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_faces(args: FacesArgs) -> Result<ExitCode, Error> {
    let norm = load_norm(&args.norm)?;
    let faces = if args.force {
        norm.enumerate_polar_faces_unguarded(args.max_dim)
    } else {
        norm.enumerate_polar_faces(args.max_dim)?
    };
    println!(
        "norm: {} ({} polar vertices, {} proper faces listed)",
        norm.label(),
        norm.rows(),
        faces.len()
    );
    for f in &faces {
        println!("{}", face_str(f));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: ThresholdArgs) -> Result<ExitCode, Error> {
    let norm = load_norm(&args.norm)?;
    match threshold_search(&norm, args.n_max) {
        Ok(cert) => {
            print!("{cert}");
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::ThresholdNotFound { n_max, refutations }) => {
            eprintln!("no witness tuple up to n_max = {n_max}");
            for r in &refutations {
                eprintln!(
                    "refuted n={}: {} tuples ({} examined, {} pruned)",
                    r.n, r.total, r.examined, r.pruned
                );
            }
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e),
    }
}

fn parse_k_range(spec: &str) -> Result<(usize, usize), Error> {
    let parse = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad k value {t:?}")))
    };
    match spec.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let k = parse(spec)?;
            Ok((k, k))
        }
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode, Error> {
    let mut s = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read config {path:?}: {e}")))?;
            parse_experiment_config(&text)?
        }
        None => ExperimentSettings::default(),
    };
    // Explicit flags override the config file.
    s.norm = args.norm.or(s.norm);
    s.k = args.k.or(s.k);
    s.n_from = args.n_from.or(s.n_from);
    s.n_to = args.n_to.or(s.n_to);
    s.trials = args.trials.or(s.trials);
    s.seed = args.seed.or(s.seed);
    s.bits = args.bits.or(s.bits);
    s.csv = args.csv.or(s.csv);
    s.svg = args.svg.or(s.svg);
    s.force = args.force || s.force;

    let missing = |what: &str| Error::Parse(format!("missing required setting {what:?}"));
    let norm_name = s.norm.ok_or_else(|| missing("norm"))?;
    let (k_from, k_to) = parse_k_range(&s.k.ok_or_else(|| missing("k"))?)?;
    let n_from = s.n_from.ok_or_else(|| missing("n_from"))?;
    let n_to = s.n_to.ok_or_else(|| missing("n_to"))?;
    if k_from < 1 || k_from > k_to {
        return Err(Error::Parse("k range must satisfy 1 <= from <= to".into()));
    }
    let spec_for = |_k: usize| -> Result<NormSpec, Error> {
        match norm_name.as_str() {
            "linf" => Ok(NormSpec::Linf),
            "l1" => Ok(NormSpec::L1),
            path => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read norm file {path:?}: {e}")))?;
                Ok(NormSpec::Custom(PolytopeNorm::from_text(&text)?))
            }
        }
    };
    let mut results: Vec<ExperimentResult> = Vec::new();
    let mut stats = RunStats::default();
    for k in k_from..=k_to {
        let cfg = ExperimentConfig {
            norm: spec_for(k)?,
            k,
            n_range: (n_from, n_to),
            trials: s.trials.unwrap_or(100),
            seed: s.seed.unwrap_or(0),
            denominator_bits: s.bits.unwrap_or(53),
            force: s.force,
        };
        let (r, st) = run_uniqueness_experiment(&cfg)?;
        results.push(r);
        stats.fallback_events += st.fallback_events;
        stats.total_trials += st.total_trials;
    }
    let merged = ExperimentResult::merge(results)?;
    let csv = emit_csv(&merged);
    match &s.csv {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| Error::Parse(format!("cannot write {path:?}: {e}")))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &s.svg {
        let svg = emit_plot(&merged)?;
        std::fs::write(path, svg)
            .map_err(|e| Error::Parse(format!("cannot write {path:?}: {e}")))?;
    }
    let mut summary = String::new();
    let _ = write!(
        summary,
        "ran {} trials; frank-wolfe fallback in {} ({:.1}%)",
        stats.total_trials,
        stats.fallback_events,
        100.0 * stats.fallback_events as f64 / stats.total_trials.max(1) as f64
    );
    eprintln!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn parse_box(spec: &str, k: usize) -> Result<GridBox, Error> {
    let (lo, hi) = spec
        .split_once(';')
        .ok_or_else(|| Error::Parse("box must be \"lo1,..;hi1,..\"".into()))?;
    let parse_side = |side: &str| -> Result<Vec<Rat>, Error> {
        let v: Result<Vec<Rat>, Error> = side.split(',').map(|t| parse_rat(t.trim())).collect();
        let v = v?;
        if v.len() != k {
            return Err(Error::Parse(format!("box side needs {k} coordinates")));
        }
        Ok(v)
    };
    Ok(GridBox {
        lo: parse_side(lo)?,
        hi: parse_side(hi)?,
    })
}

/// Box certified to contain both the sample hull and the mean set: the mean
/// set lies in `x_1 + d_1·B`, and the ball's coordinate extent comes from the
/// per-axis support values.
fn default_box(norm: &PolytopeNorm, sample: &Sample, r: &FmSetResult) -> Result<GridBox, Error> {
    use polymean_core::{solve, LinearProgram, LpStatus};
    let k = norm.k();
    let ball = norm.ball_hrep();
    let mut ext = Vec::with_capacity(k);
    for j in 0..k {
        let mut obj = vec![rat(0); k];
        obj[j] = rat(-1);
        let out = solve(&LinearProgram {
            objective: obj,
            constraints: ball.clone(),
            equalities: None,
        })?;
        debug_assert_eq!(out.status, LpStatus::Optimal);
        ext.push(-out.value.unwrap());
    }
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for j in 0..k {
        let reach = &r.distances[0] * &ext[j];
        let mut l = &sample.point(0)[j] - &reach;
        let mut h = &sample.point(0)[j] + &reach;
        for p in sample.points() {
            if p[j] < l {
                l = p[j].clone();
            }
            if p[j] > h {
                h = p[j].clone();
            }
        }
        lo.push(l);
        hi.push(h);
    }
    Ok(GridBox { lo, hi })
}

fn cmd_oracle_check(args: OracleArgs) -> Result<ExitCode, Error> {
    let norm = load_norm(&args.norm)?;
    let sample = load_sample(&args.data)?;
    let step = parse_rat(&args.step)?;
    if step <= rat(0) {
        return Err(Error::Parse("step must be positive".into()));
    }
    let r = fm_set(&norm, &sample)?;
    let bounds = match &args.r#box {
        Some(spec) => parse_box(spec, norm.k())?,
        None => default_box(&norm, &sample, &r)?,
    };
    let report = oracle_check(&norm, &sample, &r, &bounds, &step)?;
    match report.violated {
        None => {
            println!(
                "pass (grid value {}, exact optimum {}, grid {} the optimum)",
                report.grid_value,
                report.exact_value,
                if report.grid_hit_optimum {
                    "attains"
                } else {
                    "stays above"
                }
            );
            Ok(ExitCode::SUCCESS)
        }
        Some(name) => {
            eprintln!("oracle check failed: invariant {name:?} violated");
            eprintln!(
                "grid value {}, exact optimum {}",
                report.grid_value, report.exact_value
            );
            Ok(ExitCode::from(1))
        }
    }
}
