use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: self-loop on vertex `{label}`")]
    SelfLoop { line: usize, label: String },

    #[error("line {line}: malformed line `{text}`")]
    MalformedLine { line: usize, text: String },

    #[error("vertex index {index} out of range for graph on {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("cycle of odd length {0} has no -1 eigenvector")]
    OddCycle(usize),

    #[error("cycle {0:?} is not a cycle of the permutation")]
    ForeignCycle(Vec<usize>),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("automorphism certificate has no 2-cycle")]
    NoTwoCycle,

    #[error("certificate does not verify as an automorphism")]
    UnverifiedCertificate,

    #[error("leader is connected to no follower")]
    LeaderDisconnected,

    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),

    #[error("follower count {0} exceeds the Kalman rank limit of {1}")]
    TooLargeForKalman(usize, usize),

    #[error("time step {dt} violates the stability bound dt < {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("control input has {actual} samples, expected 1 or {expected}")]
    ControlLength { expected: usize, actual: usize },

    #[error("empty probability grid")]
    EmptyGrid,

    #[error("dataset `{name}` failed validation: {reason}")]
    DatasetValidation { name: String, reason: String },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
