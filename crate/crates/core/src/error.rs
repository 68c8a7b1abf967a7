use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tuple {tuple:?} of predicate `{predicate}` repeats a vertex")]
    NonInjectiveTuple { predicate: String, tuple: Vec<usize> },
    #[error("vertex {vertex} out of range 1..={size}")]
    OutOfRangeVertex { vertex: usize, size: usize },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("tuple of predicate `{predicate}` has length {found}, expected arity {expected}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid language: {0}")]
    InvalidLanguage(String),
    #[error("structures are over different languages")]
    LanguageMismatch,
    #[error("input too large: {what} is {size}, limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for {k} free variables")]
    VariableOutOfRange { index: usize, k: usize },
    #[error("{count} free tuples would force more than 2^20 candidate substitutions")]
    TooManyFreeTuples { count: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("family is not closed under prime substructures: missing {0}")]
    NotPrimeClosed(String),
    #[error("budget of {0} members exhausted")]
    Budget(usize),
    #[error("unsupported density mode: {0}")]
    UnsupportedMode(String),
    #[error("motif has {size} vertices, limit {limit}")]
    MotifTooLarge { size: usize, limit: usize },
    #[error("degenerate source: {0}")]
    DegenerateSource(String),
    #[error("empty mask: {0}")]
    EmptyMask(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("not a graph: {0}")]
    NotAGraph(String),
    #[error("graph6: {0}")]
    Graph6(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
