use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0} is empty")]
    EmptyInput(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("node {0} is isolated; local homophily is undefined")]
    IsolatedNode(usize),

    #[error("node {0} has no valid class label")]
    MissingLabel(usize),

    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("node table has {table} rows but graph has {graph} nodes")]
    LengthMismatch { table: usize, graph: usize },

    #[error("only {available} classes remain, {requested} requested")]
    NotEnoughClasses { requested: usize, available: usize },

    #[error("bin count must be positive (got {0})")]
    ZeroBins(usize),

    #[error("histograms have different bin counts: {0} vs {1}")]
    BinMismatch(usize, usize),

    #[error("ratio {0} outside [0, 1]")]
    RatioOutOfRange(f64),

    #[error("histogram has no mass")]
    EmptyHistogram,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("sensitive group {0} is empty on the evaluated subset")]
    EmptyGroup(u32),

    #[error("metric records are not comparable: {0}")]
    IdentityMismatch(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("edit log replay failed at seq {seq}: {message}")]
    Replay { seq: u64, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
