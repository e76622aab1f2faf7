use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular curve (zero discriminant)")]
    SingularCurve,
    #[error("curve mismatch: {0}")]
    CurveMismatch(String),
    #[error("point is not a rational 2-torsion point")]
    NotTwoTorsion,
    #[error("insufficient series precision: {0}")]
    InsufficientPrecision(String),
    #[error("the zero function has no valuation")]
    ZeroFunction,
    #[error("indeterminate value 0/0 at the point")]
    Indeterminate,
    #[error("divisor is not supported on the 2-torsion")]
    NotTwoTorsionSupported,
    #[error("complex multiplication by Z[i] needs a model y^2 = x^3 + A4 x with i in the field")]
    NotCmModel,
    #[error("the zero homomorphism has no division polynomial")]
    ZeroIsogeny,
    #[error("isogeny is inseparable over this field: {0}")]
    Inseparable(String),
    #[error("kernel symbol sum is not principal: {0}")]
    NonPrincipal(String),
    #[error("extension required: {0}")]
    ExtensionRequired(String),
    #[error("not a finite integral quadratic identity: {0}")]
    QuadraticIdentity(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
