use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps [`Error::is_input_error`] to exit code 2 and everything else
/// to a failed computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("-{0} is not a fundamental discriminant")]
    InvalidDiscriminant(u64),

    #[error("polynomial is not Weyl invariant (violated generator: {generator})")]
    NotInvariant { generator: &'static str },

    #[error("singular linear system while changing basis")]
    SingularSystem,

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("quadrature did not converge: value {value}, error estimate {estimate:e} above tolerance {tolerance:e}")]
    ConvergenceFailure {
        value: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("rejection envelope violated: density {density} exceeds envelope {envelope}")]
    EnvelopeViolated { density: f64, envelope: f64 },

    #[error("pole of the local factor: {0}")]
    Pole(String),

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("invalid combination: {0}")]
    InvalidCombination(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True when the error stems from bad caller input rather than a failed
    /// numerical or mathematical check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::InvalidDiscriminant(_)
                | Error::UnsupportedRegion(_)
                | Error::InvalidCombination(_)
                | Error::NotInvariant { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
