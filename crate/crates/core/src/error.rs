use thiserror::Error;

/// Errors produced anywhere in the synthesis and simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("partitioning failed: {0}")]
    Partition(String),
    #[error("synthesis failed: {0}")]
    Synthesis(String),
    #[error("linear embedding unavailable: no simple path through {0} qubits found")]
    LinearEmbeddingUnavailable(usize),
    #[error("invalid circuit: {}", .0.join("; "))]
    InvalidCircuit(Vec<String>),
    #[error("classical bit c{0} read before it was written")]
    UnassignedBit(usize),
    #[error("simulation error: {0}")]
    Simulation(String),
    #[error("config error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("config field `{field}`: {msg}")]
    ConfigValidation { field: String, msg: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            msg: err.to_string(),
        }
    }
}
