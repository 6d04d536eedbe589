use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("space must have at least one element")]
    EmptySpace,

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("negative weight at index {index}")]
    NegativeWeight { index: usize },

    #[error("all weights are zero")]
    ZeroMass,

    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("values sum to {sum}, not 0")]
    NotZeroSum { sum: f64 },

    #[error("distribution is not a uniform empirical distribution")]
    NotEmpirical,

    #[error("index {index} does not name an atom with positive mass")]
    BadIndex { index: usize },

    #[error("edge ({u}, {v}) is invalid: {reason}")]
    BadEdge { u: usize, v: usize, reason: &'static str },

    #[error("graph is not connected on the support of the base distribution")]
    Disconnected,

    #[error("linear solve failed: relative residual {residual:e}")]
    SolverFailure { residual: f64 },

    #[error("space mismatch: {context}")]
    SpaceMismatch { context: String },

    #[error("negative risk entry at ({w}, {x})")]
    NegativeRisk { w: usize, x: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("beta must be finite and non-negative, got {beta}")]
    InvalidBeta { beta: f64 },

    #[error("a graph Laplacian is required for {context}")]
    MissingLaplacian { context: &'static str },

    #[error("step {h} leaves the probability simplex")]
    StepTooLarge { h: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
