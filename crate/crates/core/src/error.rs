use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}` in variable set")]
    DuplicateVariable(String),

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("operation undefined on the zero ideal")]
    ZeroIdeal,

    #[error(
        "cannot decide whether F_{index} is the unit ideal (non-monomial multivariate generators)"
    )]
    UnitDetectionUnsupported { index: usize },

    #[error("cannot decide principality of a non-monomial multivariate ideal")]
    PrincipalityUnsupported,

    #[error("no column subset of size {size} has a non-zero maximal minor")]
    NoValidColumnSubset { size: usize },

    #[error("entries involve more than one variable: {0:?}")]
    MixedVariables(Vec<String>),

    #[error("entry is not an integer or univariate polynomial")]
    NotEuclidean,

    #[error("diagonal entry {index} is not a monomial")]
    NonMonomialEntry { index: usize },

    #[error("diagonal entry {index} is not divisible by the previous entry")]
    DivisibilityViolation { index: usize },

    #[error("diagonal entry {index} is zero")]
    ZeroDiagonalEntry { index: usize },

    #[error("filtration relation fails for F_{index}")]
    FiltrationRelation { index: usize },

    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,

    #[error("matrix has no rows")]
    EmptyMatrix,

    #[error("blow-up center is empty")]
    EmptyCenter,

    #[error("center variables are not distinct")]
    RepeatedCenterVariable,

    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),

    #[error("vertex `{0}` has children and cannot carry a weight")]
    WeightOnInternalVertex(String),

    #[error("terminal vertex `{0}` must carry a positive weight")]
    NonPositiveTerminalWeight(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex `{0}` is the root")]
    RootVertex(String),

    #[error("tree has no branch vertex")]
    PathTree,

    #[error("vertex `{0}` is not an immediate descendant of the branch vertex")]
    NotBranchChild(String),

    #[error("advancing `{0}` yields a path tree")]
    AdvancesToPathTree(String),

    #[error("blow-up depth budget of {0} exhausted")]
    DepthExhausted(usize),
}

impl Error {
    /// Stable kebab-case name, used by the command line reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax-error",
            Error::UnknownVariable(_) => "unknown-variable",
            Error::DuplicateVariable(_) => "duplicate-variable",
            Error::ZeroPolynomial => "zero-polynomial",
            Error::ZeroIdeal => "zero-ideal",
            Error::UnitDetectionUnsupported { .. } => "unit-detection-unsupported",
            Error::PrincipalityUnsupported => "principality-unsupported",
            Error::NoValidColumnSubset { .. } => "no-valid-column-subset",
            Error::MixedVariables(_) => "mixed-variables",
            Error::NotEuclidean => "not-euclidean",
            Error::NonMonomialEntry { .. } => "non-monomial-entry",
            Error::DivisibilityViolation { .. } => "divisibility-violation",
            Error::ZeroDiagonalEntry { .. } => "zero-diagonal-entry",
            Error::FiltrationRelation { .. } => "filtration-relation",
            Error::RaggedMatrix => "ragged-matrix",
            Error::EmptyMatrix => "empty-matrix",
            Error::EmptyCenter => "empty-center",
            Error::RepeatedCenterVariable => "repeated-center-variable",
            Error::DuplicateLabel(_) => "duplicate-label",
            Error::WeightOnInternalVertex(_) => "weight-on-internal-vertex",
            Error::NonPositiveTerminalWeight(_) => "non-positive-terminal-weight",
            Error::UnknownVertex(_) => "unknown-vertex",
            Error::RootVertex(_) => "root-vertex",
            Error::PathTree => "path-tree",
            Error::NotBranchChild(_) => "not-branch-child",
            Error::AdvancesToPathTree(_) => "advances-to-path-tree",
            Error::DepthExhausted(_) => "depth-exhausted",
        }
    }

    /// Input errors (exit code 2) as opposed to computation errors (exit code 1).
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownVariable(_)
                | Error::DuplicateVariable(_)
                | Error::RaggedMatrix
                | Error::EmptyMatrix
                | Error::DuplicateLabel(_)
                | Error::WeightOnInternalVertex(_)
                | Error::NonPositiveTerminalWeight(_)
        )
    }
}
