use thiserror::Error;

/// Errors raised by field arithmetic, polynomial construction and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("m = {0} is outside the supported range 1..=12")]
    UnsupportedM(u32),

    #[error("elements belong to different fields (m = {left} vs m = {right})")]
    CtxMismatch { left: u32, right: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("zero raised to the negative power {0}")]
    NegativePowerOfZero(i128),

    #[error("{0:#x} is not a member of the subgroup of order {1}")]
    NotInSubgroup(u32, u64),

    #[error("denominator vanishes at x = {x:#x}")]
    DenominatorZero { x: u32 },

    #[error("{d} does not divide q - 1 = {q_minus_one}")]
    NotADivisor { d: u64, q_minus_one: u64 },

    #[error("{a} is not invertible modulo {n}")]
    NotInvertible { a: i128, n: i128 },

    #[error("2-adic valuation is undefined for {0}")]
    NonPositive(i128),

    #[error("family {0} is not supported by this operation")]
    UnsupportedFamily(String),

    #[error("side condition violated: {0}")]
    SideCondition(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("constant polynomial has no EA class by degree")]
    ConstantInput,

    #[error("unknown identifier {0:?}")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;
