use thiserror::Error;

/// Errors raised by the transseries kernel.
///
/// Every variant has a stable diagnostic code (see [`Error::code`]) which the
/// command line front end prints and maps to an exit status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be strictly positive: {0}")]
    NonPositiveArgument(String),
    #[error("no exact result in rational mode: {0}")]
    ExactnessUnavailable(String),
    #[error("depth budget exceeded: {0}")]
    DepthBudgetExceeded(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    ZeroDivision,
    #[error("operator is not contracting on {0}")]
    NotContracting(String),
    #[error("iteration did not converge: {0}")]
    NonConvergent(String),
    #[error("composition argument is not positive infinite: {0}")]
    NotPositiveInfinite(String),
    #[error("perturbation is not in Taylor configuration: {0}")]
    NotTaylorConfigured(String),
    #[error("nonzero exponentiality: {0}")]
    ExponentialityNonzero(String),
    #[error("residual is not steep: {0}")]
    NotSteepResidual(String),
    #[error("resonant coefficient equation: {0}")]
    Resonance(String),
    #[error("not conjugate: {0}")]
    NotConjugate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
}

impl Error {
    /// Short machine-readable name of the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveArgument(_) => "NonPositiveArgument",
            Error::ExactnessUnavailable(_) => "ExactnessUnavailable",
            Error::DepthBudgetExceeded(_) => "DepthBudgetExceeded",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::ZeroDivision => "ZeroDivision",
            Error::NotContracting(_) => "NotContracting",
            Error::NonConvergent(_) => "NonConvergent",
            Error::NotPositiveInfinite(_) => "NotPositiveInfinite",
            Error::NotTaylorConfigured(_) => "NotTaylorConfigured",
            Error::ExponentialityNonzero(_) => "ExponentialityNonzero",
            Error::NotSteepResidual(_) => "NotSteepResidual",
            Error::Resonance(_) => "Resonance",
            Error::NotConjugate(_) => "NotConjugate",
            Error::Precondition(_) => "Precondition",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownFunction(_) => "UnknownFunction",
            Error::InvalidContext(_) => "InvalidContext",
        }
    }

    /// True for failures caused by finite budgets (terms, depth, iterations,
    /// precision) rather than by invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::DepthBudgetExceeded(_)
                | Error::PrecisionExhausted(_)
                | Error::NonConvergent(_)
                | Error::ExponentialityNonzero(_)
                | Error::NotContracting(_)
                | Error::Resonance(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
