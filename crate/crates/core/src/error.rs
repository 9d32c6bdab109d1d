use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid letter `{0}`")]
    InvalidLetter(String),

    #[error("graph file line {line}: {message}")]
    GraphSyntax { line: usize, message: String },

    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),

    #[error("operation requires a nonempty vertex set")]
    EmptyVertexSet,

    #[error("operation is undefined for the identity element")]
    IdentityElement,

    #[error("word is not reduced: {0}")]
    NotReduced(String),

    #[error("tuple arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate arc: {0}")]
    DegenerateArc(String),

    #[error("invalid hyperplane pair: {0}")]
    InvalidPair(String),

    #[error("pair is not decent: {0}")]
    NotDecent(String),

    #[error("z is not in the centralizer: {0}")]
    NotInCentralizer(String),

    #[error("not a visual splitting: {0}")]
    NotVisualSplitting(String),

    #[error("invalid subgroup form: {0}")]
    InvalidSubgroup(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("radius {0} is too small to witness a generating set of the intersection")]
    RadiusTooSmall(usize),

    #[error("ball of radius {radius} has {size} elements, above the cap {cap}; use sampling")]
    BallCapExceeded {
        radius: usize,
        size: usize,
        cap: usize,
    },

    #[error("automorphism kind mismatch: requested {requested}, computed {computed}")]
    KindMismatch { requested: String, computed: String },

    #[error("{0}")]
    Syntax(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Stable machine-readable tag used in JSON error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::InvalidLetter(_) => "invalid_letter",
            Error::GraphSyntax { .. } => "graph_syntax",
            Error::TooManyVertices(_) => "too_many_vertices",
            Error::EmptyVertexSet => "empty_vertex_set",
            Error::IdentityElement => "identity_element",
            Error::NotReduced(_) => "not_reduced",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::OutOfRange(_) => "out_of_range",
            Error::DegenerateArc(_) => "degenerate_arc",
            Error::InvalidPair(_) => "invalid_pair",
            Error::NotDecent(_) => "not_decent",
            Error::NotInCentralizer(_) => "not_in_centralizer",
            Error::NotVisualSplitting(_) => "not_visual_splitting",
            Error::InvalidSubgroup(_) => "invalid_subgroup",
            Error::Precondition(_) => "precondition_failed",
            Error::RadiusTooSmall(_) => "radius_too_small",
            Error::BallCapExceeded { .. } => "ball_cap_exceeded",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::Syntax(_) => "syntax",
            Error::Inconsistent(_) => "inconsistent",
        }
    }
}
