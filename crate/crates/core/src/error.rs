use thiserror::Error;

/// Errors surfaced by the engine. Verification failures (a twist violating an
/// axiom, a deformation breaking at some order) are *reports*, not errors;
/// only structural misuse and unsolvable requests land here.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("series has no inverse: constant term is not invertible")]
    NonInvertibleSeries,

    #[error("coefficient index {index} exceeds truncation order {order}")]
    CoefficientOutOfRange { index: usize, order: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no generator rule for pair ({a_gen}, {b_gen})")]
    MissingGeneratorRule { a_gen: String, b_gen: String },

    #[error("ambiguous extension: splittings of ({a}, {b}) disagree")]
    AmbiguousExtension { a: String, b: String },

    #[error("non-terminating extension: pair ({a}, {b}) exceeds the degree watermark {watermark}")]
    NonTerminating { a: String, b: String, watermark: u32 },

    #[error("tensor signature mismatch: expected {expected}, got {got}")]
    SignatureMismatch { expected: String, got: String },

    #[error("bidegree mismatch: ({ma},{na}) vs ({mb},{nb})")]
    BidegreeMismatch { ma: usize, na: usize, mb: usize, nb: usize },

    #[error("mismatched factorisations")]
    FactorisationMismatch,

    #[error("degree caps required: {0}")]
    CapsRequired(String),

    #[error("input is not a cocycle")]
    NotACocycle,

    #[error("gauge series is not invertible (constant term must be the identity)")]
    NonInvertibleGauge,

    #[error("order {order} exceeds the deformation's truncation order {max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("deformation fails at order {order}; obstruction/extension requires validity at order {required}")]
    InvalidAtLowerOrder { order: usize, required: usize },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("unsupported for this factorisation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
