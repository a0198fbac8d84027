use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("algebra must have at least one block")]
    EmptyAlgebra,

    #[error("block dimension must be positive (block {0})")]
    InvalidDim(usize),

    #[error("duplicate block label `{0}`")]
    DuplicateLabel(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("family does not commute (residual {0:.3e})")]
    NonCommuting(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    ChoiNotPsd(f64),

    #[error("map is not unital (residual {0:.3e})")]
    NotUnital(f64),

    #[error("map output leaves the memory algebra block structure (residual {0:.3e})")]
    OutputNotInAlgebra(f64),

    #[error("state is not invariant under the transfer operator (residual {0:.3e})")]
    RhoNotInvariant(f64),

    #[error("triple is not minimal: the reachable space does not generate the memory algebra")]
    NotMinimal,

    #[error("standing assumption violated: {0}")]
    Diagnostic(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("peripheral eigenvalue {0} is not a root of unity of bounded order")]
    PeriodNotFound(String),

    #[error("operation requires a factor state")]
    NotFactor,

    #[error("map is not a conditional expectation: {0}")]
    NotConditionalExpectation(String),

    #[error("range of the map is not a *-subalgebra (residual {0:.3e})")]
    RangeNotAlgebra(f64),

    #[error("block {0} carries zero weight")]
    UnreachableBlock(usize),

    #[error("density reconstruction residual {0:.3e} exceeds tolerance")]
    ReconstructionFailed(f64),

    #[error(
        "memory state differs from the one-site restriction of the chain state (residual {0:.3e})"
    )]
    RhoMismatch(f64),

    #[error("window of length {n} exceeds the memory budget ({entries} entries)")]
    WindowTooLarge { n: usize, entries: usize },

    #[error("generated group exceeds the maximal order {0}")]
    GroupTooLarge(usize),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("map is not covariant under the gauge group (residual {0:.3e})")]
    NotCovariant(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier used in reports and exit messages.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyAlgebra => "empty_algebra",
            Error::InvalidDim(_) => "invalid_dim",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NonCommuting(_) => "non_commuting",
            Error::InvalidState(_) => "invalid_state",
            Error::ChoiNotPsd(_) => "choi_not_psd",
            Error::NotUnital(_) => "not_unital",
            Error::OutputNotInAlgebra(_) => "output_not_in_algebra",
            Error::RhoNotInvariant(_) => "rho_not_invariant",
            Error::NotMinimal => "not_minimal",
            Error::Diagnostic(_) => "diagnostic_failure",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::PeriodNotFound(_) => "period_not_found",
            Error::NotFactor => "not_factor",
            Error::NotConditionalExpectation(_) => "not_conditional_expectation",
            Error::RangeNotAlgebra(_) => "range_not_algebra",
            Error::UnreachableBlock(_) => "unreachable_block",
            Error::ReconstructionFailed(_) => "reconstruction_failed",
            Error::RhoMismatch(_) => "rho_mismatch",
            Error::WindowTooLarge { .. } => "window_too_large",
            Error::GroupTooLarge(_) => "group_too_large",
            Error::NotUnitary(_) => "not_unitary",
            Error::NotCovariant(_) => "not_covariant",
            Error::Unsupported(_) => "unsupported",
            Error::Precondition(_) => "precondition_failed",
            Error::Numerical(_) => "numerical_failure",
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
