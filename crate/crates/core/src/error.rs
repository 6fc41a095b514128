use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {modulus:#b} is not an irreducible polynomial of degree {tau}")]
    ReducibleModulus { tau: u32, modulus: u32 },
    #[error("extension degree {0} unsupported (1..=16)")]
    UnsupportedDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("undetermined at precision: {0}")]
    UndeterminedAtPrecision(String),
    #[error("matrix is scalar")]
    ScalarMatrix,
    #[error("matrix is not integral (minimal polynomial not in O[X])")]
    NonIntegral,
    #[error("symmetric product is not scalar")]
    NonScalarProduct,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("window radius {radius} exceeds cap {cap}")]
    WindowCap { radius: u32, cap: u32 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("oracle requires exact (Laurent polynomial) input")]
    InexactInput,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn undetermined(what: impl Into<String>) -> Error {
    Error::UndeterminedAtPrecision(what.into())
}
