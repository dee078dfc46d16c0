use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: String },

    #[error("vertex {vertex} out of range for graph of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },

    #[error("unknown vertex name {0:?}")]
    UnknownVertex(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix of {rows}x{cols} exceeds the {max} dimension cap")]
    DimensionTooLarge {
        rows: usize,
        cols: usize,
        max: usize,
    },

    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),

    #[error("set is not {q}-modular: deg({u}) = {deg_u} and deg({v}) = {deg_v} differ mod {q}")]
    NotModular {
        q: u64,
        u: usize,
        deg_u: usize,
        v: usize,
        deg_v: usize,
    },

    #[error("{what}: vertex {vertex} is not a member")]
    NotSubset { what: &'static str, vertex: usize },

    #[error("sets overlap at vertex {0}")]
    Overlap(usize),

    #[error("{0}")]
    InvalidProblem(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("certificate does not verify")]
    UnverifiedCertificate,

    #[error("graph of order {order} exceeds the brute-force cap of {max}")]
    GraphTooLarge { order: usize, max: usize },

    #[error("{count} available traces exceed the brute-force cap of {max}")]
    TooManyTraces { count: usize, max: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown {kind} {name:?}; registered: {known}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that contradict a proven identity rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
