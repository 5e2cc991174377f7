//! Entropies, excess entropy, LMC statistical complexity, Gaussian neural
//! complexity, delay embedding and the largest Lyapunov exponent.

mod embed;
mod entropy;
mod lyapunov;
mod neural;
mod report;
mod symbolize;

use thiserror::Error;

pub use embed::{delay_embed, Embedding};
pub use entropy::{
    block_entropy, excess_entropy, excess_from_blocks, lmc_complexity, lmc_from_probabilities, shannon_entropy,
    BlockEntropies, ExcessEntropy,
};
pub use lyapunov::{lyapunov_max, LyapunovConfig, LyapunovEstimate, MIN_LYAPUNOV_SAMPLES, SEPARATION_FLOOR};
pub use neural::{covariance, neural_complexity, NeuralComplexity, NeuralOptions, COVARIANCE_JITTER};
pub use report::{analyze, AnalysisSettings, ComplexityReport};
pub use symbolize::{symbolize, Binning, SymbolizedSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexityError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("signal of {len} samples is too short; need {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("no neighbours outside the Theiler window")]
    NoNeighbors,
    #[error("covariance is not positive definite after regularization")]
    SingularCovariance,
}
