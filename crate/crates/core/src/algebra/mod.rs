//! Exact scalars and exponent groups shared by every other module.

mod exponent;
mod scalar;

pub use exponent::{Exponent, ExponentGroup};
pub use scalar::{is_square_free, Scalar};

use std::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("scalars from different quadratic fields Q(sqrt({0})) and Q(sqrt({1}))")]
    FieldMismatch(u32, u32),
    #[error("radicand {0} is not a square-free integer >= 2")]
    InvalidRadicand(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
    #[error("exponents from different groups {0} and {1}")]
    GroupMismatch(ExponentGroup, ExponentGroup),
    #[error("lexicographic exponent tuples need at least one coordinate")]
    EmptyTuple,
    #[error("exponent arithmetic overflow")]
    Overflow,
    #[error("step exponent must be positive")]
    NonPositiveStep,
}

/// Checked exact comparison of two scalars.
pub fn scalar_cmp(x: &Scalar, y: &Scalar) -> Result<Ordering, AlgebraError> {
    x.try_cmp(y)
}

/// Checked group sum of two exponents.
pub fn exponent_add(g1: &Exponent, g2: &Exponent) -> Result<Exponent, AlgebraError> {
    g1.try_add(g2)
}
