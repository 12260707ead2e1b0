use thiserror::Error;

/// Library error. Every variant carries a stable upper-case code (see
/// [`Error::code`]) that the CLI emits in JSON error documents and maps to
/// an exit status: 2 for `LIMIT`, 3 for internal assertions
/// (`DIVISIBILITY`, `OVERFLOW`), 1 for everything else.
#[derive(Debug, Error)]
pub enum Error {
    /// A pairing pair joins two half-edges of the same vertex.
    #[error("LOOP: pairing ({0}, {1}) joins two half-edges of the same vertex")]
    Loop(usize, usize),
    /// A half-edge identifier is missing, repeated, or out of range.
    #[error("DANGLING: {0}")]
    Dangling(String),
    /// Trivalent diagrams have an even number of vertices (3V = 2E).
    #[error("ODD_VERTEX_COUNT: {0} vertices")]
    OddVertexCount(usize),
    /// Requested degree exceeds the configured enumeration bound.
    #[error("LIMIT: degree {requested} exceeds the configured bound {bound}")]
    Limit { requested: usize, bound: usize },
    /// A formal sum mixes degrees or misses the target grading.
    #[error("DEGREE_MISMATCH: {0}")]
    DegreeMismatch(String),
    /// A triple-form key is not strictly increasing.
    #[error("BAD_TRIPLE: {0}")]
    BadTriple(String),
    /// An index is outside its declared range.
    #[error("INDEX_RANGE: {0}")]
    IndexRange(String),
    /// A linking entry pairs a component with itself.
    #[error("SELF_LINK: linking entry within component {0}")]
    SelfLink(usize),
    /// Component count does not match the diagram's vertex count.
    #[error("ARITY: diagram needs {expected} surgery components, got {got}")]
    Arity { expected: usize, got: usize },
    /// |Aut_V| failed to divide a contraction value. This cannot happen for
    /// correct inputs and signals an implementation bug.
    #[error("DIVISIBILITY: {0}")]
    Divisibility(String),
    /// Exact integer arithmetic left the fixed-width range.
    #[error("OVERFLOW: {0}")]
    Overflow(String),
    /// Malformed input document (structurally readable, semantically bad).
    #[error("PARSE: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code for JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Loop(..) => "LOOP",
            Error::Dangling(_) => "DANGLING",
            Error::OddVertexCount(_) => "ODD_VERTEX_COUNT",
            Error::Limit { .. } => "LIMIT",
            Error::DegreeMismatch(_) => "DEGREE_MISMATCH",
            Error::BadTriple(_) => "BAD_TRIPLE",
            Error::IndexRange(_) => "INDEX_RANGE",
            Error::SelfLink(_) => "SELF_LINK",
            Error::Arity { .. } => "ARITY",
            Error::Divisibility(_) => "DIVISIBILITY",
            Error::Overflow(_) => "OVERFLOW",
            Error::Parse(_) => "PARSE",
        }
    }

    /// Process exit status for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Limit { .. } => 2,
            Error::Divisibility(_) | Error::Overflow(_) => 3,
            _ => 1,
        }
    }
}
