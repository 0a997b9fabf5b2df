use thiserror::Error;

/// Errors produced by the simulator, the analysis routines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid register width {width}: must be between 1 and {limit}")]
    InvalidWidth { width: usize, limit: usize },

    #[error("qubit {qubit} out of range for a {width}-qubit register")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("duplicate qubit {0} in operand list")]
    DuplicateQubit(usize),

    #[error("empty qubit list")]
    EmptyQubitList,

    #[error("width mismatch: expected {expected} qubits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("measurement branch has probability {probability:e}, below the 1e-12 cutoff")]
    ZeroProbabilityBranch { probability: f64 },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("state is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("embedding violates topology {topology}: {pairs:?}")]
    Embedding {
        topology: String,
        pairs: Vec<(usize, usize)>,
    },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("incomplete outcome record: expected {expected} bits, got {actual}")]
    IncompleteOutcomes { expected: usize, actual: usize },

    #[error("tomography error: {0}")]
    Tomography(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("topology file: {0}")]
    TopologyFile(String),

    #[error("{path}: {message}")]
    File { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
