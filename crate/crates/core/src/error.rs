use thiserror::Error;

use crate::exactnum::ArithError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radix 2 has a = rho = 1 and is not covered by this construction; use a radix of at least 4")]
    RadixTwo,
    #[error("radix {0} is not a power of two")]
    NotPowerOfTwo(u32),
    #[error("radix {0} is outside the supported range 4..=128")]
    RadixOutOfRange(u32),
    #[error("digit bound a = {a} must satisfy {lo} <= a <= {hi} for radix {beta}")]
    DigitOutOfRange { beta: u32, a: u32, lo: u32, hi: u32 },
    #[error("u = {u} is below u_min = {u_min}; no valid table exists")]
    UBelowMinimum { u: u32, u_min: u32 },
    #[error("u = {u} is outside the decision range [{u_min}, {u_max}]")]
    UOutOfRange { u: u32, u_min: u32, u_max: u32 },
    #[error("t = {t} is below t' = {t_prime}; the divisor bound has no solution")]
    TBelowPrime { t: u32, t_prime: u32 },
    #[error("(u, t) = ({u}, {t}) is not a validated parameter pair for this digit set")]
    NotValidated { u: u32, t: u32 },
    #[error("invalid truncation parameters: {0}")]
    InvalidTruncation(String),
    #[error("operand out of range: {0}")]
    OperandOutOfRange(String),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
