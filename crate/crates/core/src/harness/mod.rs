//! Statistical tests, degree-sequence builders and experiment drivers.

pub mod builders;
pub mod experiment;
pub mod stats;

pub use builders::{build_degree_sequence, BuilderKind};
pub use experiment::{
    continuum_statistics, discrete_statistics, run_experiment, DsSource, ExperimentConfig,
    ExperimentKind, ExperimentReport, ThetaSpec,
};
pub use stats::{chi_square_uniform, kolmogorov_q, ks_two_sample, ChiSquareResult, KsResult};
