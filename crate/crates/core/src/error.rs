use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("logarithm needs a unit congruent to 1 mod p")]
    NotPrincipalUnit,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no solution at this level: {0}")]
    NoSolution(String),
    #[error("descent failure: averaged series has components outside the base ring")]
    DescentFailure,
    #[error("nonconvergent: constant term {0} is a (1 - phi)-obstruction")]
    Nonconvergent(String),
    #[error("not in the psi = 0 kernel (agreement {0} digits)")]
    NotPsiKernel(i64),
    #[error("not psi-fixed (agreement {0} digits)")]
    NotPsiFixed(i64),
    #[error("Delta obstruction nonzero at k = {0:?}")]
    DeltaObstruction(Vec<usize>),
    #[error("zero denominator at the requested character")]
    ZeroDenominator,
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("vanishes to order > {0}")]
    VanishingOrder(usize),
    #[error("non-unit constant term")]
    NonUnitConstant,
    #[error("character is not of the required shape: {0}")]
    CharacterShape(String),
    #[error("det(phi) has valuation {found}, expected {expected}")]
    DetValuation { found: i64, expected: i64 },
    #[error("incompatible operands: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
