//! Exact computation of Fréchet mean sets under polytope norms, the
//! combinatorial conditions for means to be unique with positive probability,
//! unique-mean sample thresholds, and the Monte Carlo uniqueness experiments.
//!
//! All geometry runs over arbitrary-precision rationals; there is no floating
//! point in any predicate. The only approximate arithmetic in the crate is the
//! Box-Muller draw inside the experiment sampler, whose output is immediately
//! rounded to exact dyadic rationals.

// Dense matrix and tableau code indexes rows and columns directly throughout.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod hpoly;
pub mod linalg;
pub mod lp;
pub mod norm;
pub mod project;
pub mod rng;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use experiment::{
    emit_csv, emit_plot, parse_csv, run_uniqueness_experiment, sample_gaussian_rational,
    CellResult, ExperimentConfig, ExperimentResult, NormSpec, RunStats,
};
pub use hpoly::HPolyhedron;
pub use linalg::{affine_dim, kernel_basis, parse_rat, rank, rat, ratio, Rat, RatMatrix};
pub use lp::{implicit_equalities, max_slack_point, solve, LinearProgram, LpOutcome, LpStatus};
pub use norm::{minkowski_dim_of_affine_sum, PolarFace, PolytopeNorm};
pub use project::{fourier_motzkin, fourier_motzkin_with_order};
pub use solver::{
    brute_force_fm_oracle, build_lifted_polyhedron, face_type_of_sample, fm_set,
    fm_set_with_projection, min_norm_point, oracle_check, reduced_fm_hrep,
    zero_in_weighted_polar_sum, FmSetResult, GridBox, GridScan, OracleReport, Sample,
};
pub use theory::{
    check_inductive_extension, check_positive_probability, check_possible, check_unique,
    condition_report, random_symmetric_norm, threshold_search, ConditionReport, Refutation,
    ThresholdCertificate,
};
