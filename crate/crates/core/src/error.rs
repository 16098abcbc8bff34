use thiserror::Error;

/// Errors produced anywhere in the benchmark pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: {n} qubits exceeds the limit of {limit}")]
    Capacity {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("gate {kind} is not a Clifford and cannot carry a Pauli frame")]
    NonClifford { kind: String },

    #[error("gate {kind} is not in the native gate set; transpile the circuit first (full-stack mode)")]
    NotNative { kind: String },

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unsupported gate `{name}` at {line}:{col}")]
    UnsupportedGate {
        name: String,
        line: usize,
        col: usize,
    },

    #[error("structure error at {line}:{col}: {msg}")]
    Structure { line: usize, col: usize, msg: String },

    #[error("schema error at `{path}`: {msg}")]
    Schema { path: String, msg: String },

    #[error("shot table is empty")]
    EmptyShots,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("coupling graph is disconnected")]
    DisconnectedGraph,

    #[error("shape ({w}, {d}) does not fit a circuit of width {width} and depth {depth}")]
    ImpossibleShape {
        w: usize,
        d: usize,
        width: usize,
        depth: usize,
    },

    #[error("missing data for {} circuit(s): {}", .0.len(), .0.join(", "))]
    MissingData(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
