use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("vertex id out of range: {id} (n = {n})")]
    VertexOutOfRange { id: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid community partition: {0}")]
    Partition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget {k} exceeds vertex count {n}")]
    BudgetTooLarge { k: usize, n: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("community/graph mismatch: partition covers {partition} vertices, graph has {graph}")]
    GraphMismatch { partition: usize, graph: usize },

    #[error("exact enumeration needs {arcs} relevant arcs, limit is {limit}")]
    EnumerationLimit { arcs: usize, limit: usize },

    #[error("exhaustive search over C({n}, {k}) seed sets exceeds limit {limit}")]
    CombinatorialLimit { n: usize, k: usize, limit: u128 },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File { path: path.into(), source }
    }

    /// True for errors caused by reading or writing files, as opposed to bad input values.
    pub fn is_file_error(&self) -> bool {
        matches!(self, Error::File { .. } | Error::Io(_))
    }
}
