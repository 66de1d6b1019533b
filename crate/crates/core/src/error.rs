//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("defining polynomial must have odd degree >= 3, got {0}")]
    BadModelDegree(usize),

    #[error("singular curve: discriminant vanishes")]
    SingularCurve,

    #[error("point is not on the curve")]
    PointNotOnCurve,

    #[error("invalid Mumford divisor: {0}")]
    InvalidDivisor(String),

    #[error("scalar must be nonzero")]
    ZeroScalar,

    #[error("family construction rejected: {0}")]
    BadFamily(String),

    #[error("two-torsion vector rejected: {0}")]
    BadTwoTorsionVector(String),

    #[error("base change rejected: {0}")]
    BadBaseChange(String),

    #[error("specialization at t0 = {t0} rejected: {reason}")]
    BadSpecialization { t0: String, reason: String },

    #[error("height computation rejected: {0}")]
    BadHeightInput(String),

    #[error("doubling budget {budget} exceeded: need {needed} doublings for target error")]
    DoublingBudgetExceeded { budget: u32, needed: u32 },

    #[error("inconsistent fibration data: {0}")]
    BadFibration(String),

    #[error("search rejected: {0}")]
    BadSearch(String),

    #[error("no good primes available: {0}")]
    NoGoodPrimes(String),

    #[error("json: {0}")]
    Json(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
