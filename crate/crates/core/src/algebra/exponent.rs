//! Totally ordered Abelian exponent groups: `Z`, `Q`, and `Z^k` under the
//! lexicographic order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Which group an exponent belongs to. `Lex` carries the fixed arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExponentGroup {
    Int,
    Rat,
    Lex(usize),
}

impl ExponentGroup {
    pub fn zero(self) -> Exponent {
        match self {
            ExponentGroup::Int => Exponent::Int(0),
            ExponentGroup::Rat => Exponent::Rat(BigRational::zero()),
            ExponentGroup::Lex(k) => Exponent::Lex(vec![0; k]),
        }
    }
}

impl fmt::Display for ExponentGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentGroup::Int => write!(f, "Z"),
            ExponentGroup::Rat => write!(f, "Q"),
            ExponentGroup::Lex(k) => write!(f, "Z^{k} (lex)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Int(i64),
    Rat(BigRational),
    /// Integer tuple ordered lexicographically, first coordinate most significant.
    Lex(Vec<i64>),
}

impl Exponent {
    pub fn rat(num: i64, den: i64) -> Self {
        Exponent::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Lexicographic tuple exponent; the arity must be at least one.
    pub fn lex(coords: Vec<i64>) -> Result<Self, AlgebraError> {
        if coords.is_empty() {
            return Err(AlgebraError::EmptyTuple);
        }
        Ok(Exponent::Lex(coords))
    }

    pub fn group(&self) -> ExponentGroup {
        match self {
            Exponent::Int(_) => ExponentGroup::Int,
            Exponent::Rat(_) => ExponentGroup::Rat,
            Exponent::Lex(v) => ExponentGroup::Lex(v.len()),
        }
    }

    fn check_same_group(&self, other: &Exponent) -> Result<(), AlgebraError> {
        let (g1, g2) = (self.group(), other.group());
        if g1 == g2 {
            Ok(())
        } else {
            Err(AlgebraError::GroupMismatch(g1, g2))
        }
    }

    pub fn try_add(&self, other: &Exponent) -> Result<Exponent, AlgebraError> {
        self.check_same_group(other)?;
        Ok(match (self, other) {
            (Exponent::Int(x), Exponent::Int(y)) => {
                Exponent::Int(x.checked_add(*y).ok_or(AlgebraError::Overflow)?)
            }
            (Exponent::Rat(x), Exponent::Rat(y)) => Exponent::Rat(x + y),
            (Exponent::Lex(x), Exponent::Lex(y)) => Exponent::Lex(
                x.iter()
                    .zip(y)
                    .map(|(a, b)| a.checked_add(*b).ok_or(AlgebraError::Overflow))
                    .collect::<Result<_, _>>()?,
            ),
            _ => unreachable!("groups checked above"),
        })
    }

    pub fn try_sub(&self, other: &Exponent) -> Result<Exponent, AlgebraError> {
        self.try_add(&-other)
    }

    pub fn try_cmp(&self, other: &Exponent) -> Result<Ordering, AlgebraError> {
        self.check_same_group(other)?;
        Ok(match (self, other) {
            (Exponent::Int(x), Exponent::Int(y)) => x.cmp(y),
            (Exponent::Rat(x), Exponent::Rat(y)) => x.cmp(y),
            (Exponent::Lex(x), Exponent::Lex(y)) => x.cmp(y),
            _ => unreachable!("groups checked above"),
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exponent::Int(x) => *x == 0,
            Exponent::Rat(x) => x.is_zero(),
            Exponent::Lex(v) => v.iter().all(|c| *c == 0),
        }
    }

    pub fn signum(&self) -> Ordering {
        self.cmp(&self.group().zero())
    }

    /// `k · self` for a natural number `k`.
    pub fn scale(&self, k: u64) -> Result<Exponent, AlgebraError> {
        let k_i = i64::try_from(k).map_err(|_| AlgebraError::Overflow)?;
        Ok(match self {
            Exponent::Int(x) => Exponent::Int(x.checked_mul(k_i).ok_or(AlgebraError::Overflow)?),
            Exponent::Rat(x) => Exponent::Rat(x * BigRational::from_integer(BigInt::from(k))),
            Exponent::Lex(v) => Exponent::Lex(
                v.iter()
                    .map(|c| c.checked_mul(k_i).ok_or(AlgebraError::Overflow))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Smallest `k ≥ 0` with `k · self ≥ bound`, for a positive `self`.
    ///
    /// `None` when no multiple reaches the bound, which happens in `Z^k`
    /// when `bound` lies in a higher Archimedean class than `self`.
    pub fn multiples_to_reach(&self, bound: &Exponent) -> Result<Option<u64>, AlgebraError> {
        self.check_same_group(bound)?;
        if self.signum() != Ordering::Greater {
            return Err(AlgebraError::NonPositiveStep);
        }
        if bound.signum() != Ordering::Greater {
            return Ok(Some(0));
        }
        let ceil_div = |num: &BigRational, den: &BigRational| -> Option<u64> {
            (num / den).ceil().to_integer().to_u64()
        };
        Ok(match (self, bound) {
            (Exponent::Int(s), Exponent::Int(b)) => Some(((*b + *s - 1) / *s) as u64),
            (Exponent::Rat(s), Exponent::Rat(b)) => ceil_div(b, s),
            (Exponent::Lex(s), Exponent::Lex(b)) => {
                let lead = s.iter().position(|c| *c != 0).expect("positive step");
                // bound is positive; if its leading coordinate precedes the
                // step's, the bound is infinitely larger than every multiple.
                let b_lead = b.iter().position(|c| *c != 0).expect("positive bound");
                if b_lead < lead {
                    None
                } else if b_lead > lead {
                    Some(1)
                } else {
                    let (sl, bl) = (s[lead], b[lead]);
                    // k·s ≥ b once k·sl > bl, or k·sl = bl and the tail compares.
                    let k = ((bl + sl - 1) / sl) as u64;
                    let ks = self.scale(k)?;
                    if ks >= *bound {
                        Some(k)
                    } else {
                        Some(k + 1)
                    }
                }
            }
            _ => unreachable!("groups checked above"),
        })
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Int(x) => write!(f, "{x}"),
            Exponent::Rat(x) => {
                if x.is_integer() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            Exponent::Lex(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// # Panics
/// On exponents from different groups; see [`Exponent::try_cmp`].
impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("exponent group mismatch")
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        match self {
            Exponent::Int(x) => Exponent::Int(-x),
            Exponent::Rat(x) => Exponent::Rat(-x),
            Exponent::Lex(v) => Exponent::Lex(v.iter().map(|c| -c).collect()),
        }
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        -&self
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        self.try_add(rhs).expect("exponent group mismatch")
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        &self + &rhs
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        self.try_sub(rhs).expect("exponent group mismatch")
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        &self - &rhs
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Int(x) => serializer.serialize_i64(*x),
            Exponent::Rat(_) => serializer.serialize_str(&self.to_string()),
            Exponent::Lex(v) => v.serialize(serializer),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Int(i64),
    Text(String),
    Tuple(Vec<i64>),
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ExponentRepr::deserialize(deserializer)? {
            ExponentRepr::Int(x) => Ok(Exponent::Int(x)),
            ExponentRepr::Text(s) => {
                let (n, d) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let n: BigInt = n.trim().parse().map_err(de::Error::custom)?;
                let d: BigInt = d.trim().parse().map_err(de::Error::custom)?;
                if d.is_zero() {
                    return Err(de::Error::custom("zero denominator in exponent"));
                }
                let r = BigRational::new(n, d);
                Ok(Exponent::Rat(if r.denom().is_negative() { -r } else { r }))
            }
            ExponentRepr::Tuple(v) => Exponent::lex(v).map_err(de::Error::custom),
        }
    }
}
