use thiserror::Error;

/// Every failure the library can report. Precision problems are never
/// papered over: a value that cannot be certified at the working precision
/// surfaces as `InsufficientPrecision` (or a budget/cap variant).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("factorization incomplete: {0}")]
    FactorizationIncomplete(String),
    #[error("polynomial is inseparable")]
    Inseparable,
    #[error("root search stalled on a vanishing derivative")]
    InseparableRootSearch,
    #[error("lattice is not a sublattice")]
    NotSublattice,
    #[error("scan cap exceeded: {0}")]
    CapExceeded(String),
    #[error("unstable kernel: {0}")]
    UnstableKernel(String),
    #[error("determinant indistinguishable from zero: {0}")]
    SingularAtPrecision(String),
    #[error("minimality tests disagree: {0}")]
    InconsistentMinimality(String),
    #[error("identity violated: {0}")]
    RelationViolated(String),
    #[error("corestriction normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("approximation did not converge: {0}")]
    NonConvergence(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::DivisionByZero => "DivisionByZero",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
            Error::NotIrreducible => "NotIrreducible",
            Error::FactorizationIncomplete(_) => "FactorizationIncomplete",
            Error::Inseparable => "Inseparable",
            Error::InseparableRootSearch => "InseparableRootSearch",
            Error::NotSublattice => "NotSublattice",
            Error::CapExceeded(_) => "CapExceeded",
            Error::UnstableKernel(_) => "UnstableKernel",
            Error::SingularAtPrecision(_) => "SingularAtPrecision",
            Error::InconsistentMinimality(_) => "InconsistentMinimality",
            Error::RelationViolated(_) => "RelationViolated",
            Error::NormalizationFailed(_) => "NormalizationFailed",
            Error::NonConvergence(_) => "NonConvergence",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::Precondition(_) => "Precondition",
        }
    }

    /// True for failures caused by the precision model or a resource cap
    /// rather than by bad input.
    pub fn is_precision_like(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision(_)
                | Error::FactorizationIncomplete(_)
                | Error::CapExceeded(_)
                | Error::UnstableKernel(_)
                | Error::SingularAtPrecision(_)
                | Error::BudgetExceeded(_)
                | Error::NonConvergence(_)
                | Error::InseparableRootSearch
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn prec_err(msg: impl Into<String>) -> Error {
    Error::InsufficientPrecision(msg.into())
}
