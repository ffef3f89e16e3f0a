use thiserror::Error;

/// Errors surfaced by the library. Internal invariant violations panic instead;
/// everything here is reachable from user input or documented preconditions.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("empty point set")]
    EmptyPointSet,
    #[error("empty polyhedron")]
    EmptyPolyhedron,
    #[error("active set undefined at origin")]
    ActiveSetUndefined,
    #[error("face enumeration too large (r = {0}, guard is 24)")]
    FaceEnumerationTooLarge(usize),
    #[error("infeasible")]
    Infeasible,
    #[error("frank-wolfe did not certify; increase cap")]
    FrankWolfeUncertified,
    #[error("face type undefined: data point is a Fréchet mean")]
    FaceTypeUndefined,
    #[error("not a facet extension")]
    NotFacetExtension,
    #[error("grid size guard exceeded ({0} points)")]
    GridTooLarge(u128),
    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),
    #[error("no witness tuple up to n_max = {n_max}; refuted n = 2..={n_max}")]
    ThresholdNotFound {
        n_max: usize,
        refutations: Vec<crate::theory::Refutation>,
    },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty experiment result")]
    EmptyExperiment,
}

pub type Result<T> = std::result::Result<T, Error>;
