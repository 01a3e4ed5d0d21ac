use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate control and target coincide on qubit {0}")]
    ControlIsTarget(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("register of {0} qubits exceeds the supported maximum")]
    TooManyQubits(usize),

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("cannot normalize an all-zero vector")]
    ZeroNorm,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("non-finite energy at iteration {iteration}")]
    NonFiniteEnergy { iteration: usize },

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("extrapolation needs at least {needed} distinct points above the validity floor, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("duplicate T1 value {0} in extrapolation input")]
    DuplicateT1(f64),

    #[error("degenerate spectrum: E1 == E0")]
    DegenerateGap,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
