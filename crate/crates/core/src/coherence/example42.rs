//! Two gambles on the positive rationals, split at `√2`, that no pair of
//! positive rational weights can combine into a nonnegative gamble while
//! the weights `(√2, 1)` can.

use serde::Serialize;

use super::CoherenceError;
use crate::algebra::Scalar;

fn alpha() -> Scalar {
    Scalar::sqrt(2).expect("2 is square-free")
}

fn check_state(q: &Scalar) -> Result<(), CoherenceError> {
    if !q.is_rational() || !q.is_positive() {
        return Err(CoherenceError::InvalidState(q.clone()));
    }
    Ok(())
}

/// `∓(q + √2) / (2√2 q)`, negative above `√2` and positive below.
pub fn example42_g1(q: &Scalar) -> Result<Scalar, CoherenceError> {
    check_state(q)?;
    let a = alpha();
    let magnitude = q
        .try_add(&a)?
        .try_div(&Scalar::int(2).try_mul(&a)?.try_mul(q)?)?;
    Ok(if q.try_cmp(&a)?.is_gt() {
        -magnitude
    } else {
        magnitude
    })
}

/// `+1` above `√2`, `−1` below.
pub fn example42_g2(q: &Scalar) -> Result<Scalar, CoherenceError> {
    check_state(q)?;
    Ok(if q.try_cmp(&alpha())?.is_gt() {
        Scalar::one()
    } else {
        -Scalar::one()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Example42Fragment {
    /// Rational weight ratio: `c1·g1 + c2·g2` is negative at `q = c1/c2`.
    Violation { state: Scalar, value: Scalar },
    /// Irrational weight ratio: `c1·g1 + c2·g2` at each supplied state.
    Sampled {
        values: Vec<(Scalar, Scalar)>,
        all_positive: bool,
    },
}

fn combination(c1: &Scalar, c2: &Scalar, q: &Scalar) -> Result<Scalar, CoherenceError> {
    Ok(c1
        .try_mul(&example42_g1(q)?)?
        .try_add(&c2.try_mul(&example42_g2(q)?)?)?)
}

pub fn example42_harness(
    c1: &Scalar,
    c2: &Scalar,
    states: &[Scalar],
) -> Result<Example42Fragment, CoherenceError> {
    if !c1.is_positive() || !c2.is_positive() {
        return Err(CoherenceError::NonPositiveCoefficient);
    }
    let ratio = c1.try_div(c2)?;
    if ratio.is_rational() {
        let value = combination(c1, c2, &ratio)?;
        return Ok(Example42Fragment::Violation {
            state: ratio,
            value,
        });
    }
    let values = states
        .iter()
        .map(|q| Ok((q.clone(), combination(c1, c2, q)?)))
        .collect::<Result<Vec<_>, CoherenceError>>()?;
    let all_positive = values.iter().all(|(_, v)| v.is_positive());
    Ok(Example42Fragment::Sampled {
        values,
        all_positive,
    })
}
