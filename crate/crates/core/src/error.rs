use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree counts violate the tree constraint: sum N_i = {vertices} but 1 + sum i*N_i = {rhs}")]
    ConstraintViolation { vertices: u64, rhs: u64 },
    #[error("degree sequence has no vertices")]
    Empty,
    #[error("theta is not normalized: sigma^2 + sum beta^2 = {0}")]
    NotNormalized(f64),
    #[error("need at least {needed} entries, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("path is not a Lukasiewicz excursion: {0}")]
    NotExcursion(String),
    #[error("edge weights are not distinct")]
    DuplicateWeights,
    #[error("degree sequence does not match the tree")]
    DegreeMismatch,
    #[error("degree sequence too large for enumeration: V = {0} > 14")]
    TooLarge(u64),
    #[error("path is not a bridge: endpoints {0} and {1}")]
    NotABridge(f64, f64),
    #[error("split family is not laminar")]
    NotLaminar,
    #[error("chords cross: ({0}, {1}) and ({2}, {3})")]
    CrossingChords(f64, f64, f64, f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("infeasible construction: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
