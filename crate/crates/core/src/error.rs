use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidContext(String),

    #[error("series centers differ")]
    CenterMismatch,

    #[error("series constant term is zero")]
    ZeroConstantTerm,

    #[error("series constant term must be positive for a real logarithm")]
    NonPositiveConstantTerm,

    #[error("quadrature did not reach tolerance {requested:e}: achieved {achieved:e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("computed coefficient {name}[{index}] is not positive")]
    NonPositiveCoefficient { name: &'static str, index: usize },

    /// A series evaluation whose truncation or rounding bound exceeds the tolerance.
    #[error("evaluation at {point} not certified: error bound {bound:e} exceeds tolerance")]
    UncertifiedEvaluation { point: String, bound: f64 },

    #[error("insufficient terms: {0}")]
    InsufficientTerms(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("exact-rational C table limited to n <= {limit}, requested {requested}")]
    ExactModeLimit { limit: usize, requested: usize },

    #[error("point {0} is the pole of the map")]
    Pole(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("cache format: {0}")]
    CacheFormat(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for "cannot compute at this precision or range" failures, as
    /// opposed to a computed result disagreeing with the mathematics.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::QuadratureTolerance { .. }
                | Error::UncertifiedEvaluation { .. }
                | Error::InsufficientTerms(_)
                | Error::Range(_)
                | Error::ExactModeLimit { .. }
                | Error::Pole(_)
                | Error::Degenerate(_)
                | Error::InvalidContext(_)
        )
    }
}
