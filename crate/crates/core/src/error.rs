use thiserror::Error;

use crate::exact::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a polynomial: sample at r = {r} disagrees with the interpolant (raise the sampled r range)")]
    NotPolynomial { r: i64 },

    #[error("lift {a} is not admissible for sector {sector} (age {age})")]
    NotAdmissible { sector: u32, a: Rational, age: Rational },

    #[error("unstable moduli: 2g - 2 + n = {0} <= 0")]
    Unstable(i64),

    #[error("vertex offset {0} is not an integer")]
    NonIntegralOffset(Rational),

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("exponential of a series with nonzero constant term")]
    NonNilpotentInput,

    #[error("edge exponent is not divisible by (psi_+ + psi_-)")]
    NotDivisible,

    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeOutOfRange { degree: u32, dim: u32 },

    #[error("unbalanced contacts: |mu_0| = {zero}, |mu_inf| = {infinity}")]
    UnbalancedContacts { zero: Rational, infinity: Rational },

    #[error("dimension mismatch: class degree {class} + insertions {insertions} != {dim}")]
    DimensionMismatch { class: u32, insertions: u32, dim: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
