use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Hard structural errors found while building a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge {index} references unknown vertex `{id}`")]
    DanglingEndpoint { index: usize, id: String },
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("graph violates its standing assumptions: {0}")]
    Invalid(String),
}

/// Lexical or syntactic error in an expression source, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Numerical domain error raised while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message}")]
pub struct EvalError {
    pub message: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
    #[error("vertex function has {found} values, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid operator order: {0}")]
    InvalidOrder(String),
    #[error("unknown coefficient `{0}`")]
    UnknownCoefficient(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("hypothesis constant: {0}")]
    Hypothesis(String),
    #[error("cannot certify (F3) numerically: {0}")]
    NoNegativeEndpoint(String),
    #[error("(F2) margin not certifiable: {0}")]
    BallRadius(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
