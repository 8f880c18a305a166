//! Exact ordered-field scalars: rationals and elements `a + b√d` of a real
//! quadratic field.
//!
//! A [`Scalar`] whose irrational part vanishes is always stored as
//! [`Scalar::Rational`], so structural equality is value equality and a
//! rational mixes freely with any quadratic field. Two quadratics with
//! different radicands cannot be combined.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// An exact element of `Q` or of `Q(√d)` for a square-free `d ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    /// `a + b·√d` with `b ≠ 0`.
    Quadratic {
        a: BigRational,
        b: BigRational,
        d: u32,
    },
}

/// Returns true if `d` has no repeated prime factor.
pub fn is_square_free(d: u32) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub(crate) fn check_radicand(d: u32) -> Result<(), AlgebraError> {
    if d >= 2 && is_square_free(d) {
        Ok(())
    } else {
        Err(AlgebraError::InvalidRadicand(d))
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    match r.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

fn rat(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` in lowest terms.
    ///
    /// # Panics
    /// If `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rational(rat(num, den))
    }

    /// `a + b√d`; collapses to a rational when `b = 0`.
    pub fn quadratic(a: BigRational, b: BigRational, d: u32) -> Result<Self, AlgebraError> {
        check_radicand(d)?;
        Ok(Self::quadratic_unchecked(a, b, d))
    }

    pub(crate) fn quadratic_unchecked(a: BigRational, b: BigRational, d: u32) -> Self {
        if b.is_zero() {
            Scalar::Rational(a)
        } else {
            Scalar::Quadratic { a, b, d }
        }
    }

    /// `√d` as an element of `Q(√d)`.
    pub fn sqrt(d: u32) -> Result<Self, AlgebraError> {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    /// Radicand of the quadratic field this value needs, `None` for rationals.
    pub fn radicand(&self) -> Option<u32> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Quadratic { d, .. } => Some(*d),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Quadratic { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    /// Rational and irrational parts `(a, b)` of `a + b√d`.
    pub fn parts(&self) -> (BigRational, BigRational) {
        match self {
            Scalar::Rational(r) => (r.clone(), BigRational::zero()),
            Scalar::Quadratic { a, b, .. } => (a.clone(), b.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Exact sign of the value.
    ///
    /// For `a + b√d` with `a`, `b` of opposite signs the sign follows from
    /// comparing `a²` with `b²d`.
    pub fn signum(&self) -> Ordering {
        match self {
            Scalar::Rational(r) => sign_of(r),
            Scalar::Quadratic { a, b, d } => {
                let sa = a.cmp(&BigRational::zero());
                let sb = b.cmp(&BigRational::zero());
                if sa == Ordering::Equal || sa == sb {
                    return sb;
                }
                let a2 = a * a;
                let b2d = b * b * BigRational::from_integer(BigInt::from(*d));
                // b ≠ 0 and √d is irrational, so a² ≠ b²d here.
                match a2.cmp(&b2d) {
                    Ordering::Greater => sa,
                    _ => sb,
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn common_field(&self, other: &Scalar) -> Result<Option<u32>, AlgebraError> {
        match (self.radicand(), other.radicand()) {
            (Some(d1), Some(d2)) if d1 != d2 => Err(AlgebraError::FieldMismatch(d1, d2)),
            (Some(d), _) | (_, Some(d)) => Ok(Some(d)),
            (None, None) => Ok(None),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        Ok(match (self, other) {
            (Scalar::Rational(x), y) if x.is_zero() => y.clone(),
            (x, Scalar::Rational(y)) if y.is_zero() => x.clone(),
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            _ => {
                let d = self.common_field(other)?.expect("quadratic operand");
                let (a1, b1) = self.parts();
                let (a2, b2) = other.parts();
                Scalar::quadratic_unchecked(a1 + a2, b1 + b2, d)
            }
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        Ok(match (self, other) {
            (Scalar::Rational(x), _) | (_, Scalar::Rational(x)) if x.is_zero() => Scalar::zero(),
            (Scalar::Rational(x), y) if x.is_one() => y.clone(),
            (x, Scalar::Rational(y)) if y.is_one() => x.clone(),
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            _ => {
                let d = self.common_field(other)?.expect("quadratic operand");
                let (a1, b1) = self.parts();
                let (a2, b2) = other.parts();
                let dd = BigRational::from_integer(BigInt::from(d));
                let a = &a1 * &a2 + &b1 * &b2 * dd;
                let b = a1 * b2 + b1 * a2;
                Scalar::quadratic_unchecked(a, b, d)
            }
        })
    }

    /// Multiplicative inverse; `(a + b√d)⁻¹ = (a − b√d)/(a² − b²d)`.
    pub fn recip(&self) -> Result<Scalar, AlgebraError> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    Err(AlgebraError::DivisionByZero)
                } else {
                    Ok(Scalar::Rational(r.recip()))
                }
            }
            Scalar::Quadratic { a, b, d } => {
                let norm = a * a - b * b * BigRational::from_integer(BigInt::from(*d));
                Ok(Scalar::quadratic_unchecked(a / &norm, -(b / &norm), *d))
            }
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.common_field(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn try_cmp(&self, other: &Scalar) -> Result<Ordering, AlgebraError> {
        if let (Scalar::Rational(x), Scalar::Rational(y)) = (self, other) {
            return Ok(x.cmp(y));
        }
        Ok(self.try_sub(other)?.signum())
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Scalar::Quadratic { a, b, d } => {
                let b_abs = b.abs();
                let coeff = if b_abs.is_one() {
                    String::new()
                } else {
                    format!("{}*", fmt_rational(&b_abs))
                };
                if a.is_zero() {
                    let sign = if b.is_negative() { "-" } else { "" };
                    write!(f, "{sign}{coeff}sqrt({d})")
                } else {
                    let sign = if b.is_negative() { "-" } else { "+" };
                    write!(f, "{}{sign}{coeff}sqrt({d})", fmt_rational(a))
                }
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, AlgebraError> {
    let s = s.trim();
    let bad = || AlgebraError::Parse(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim().trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(n, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Parses `"p"`, `"p/q"`, decimals, and quadratic forms such as
/// `"sqrt(2)"`, `"-3*sqrt(5)"`, `"1/2+3/4*sqrt(2)"`.
impl FromStr for Scalar {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = t.find("sqrt(") else {
            return parse_rational(&t).map(Scalar::Rational);
        };
        let bad = || AlgebraError::Parse(s.to_string());
        let rest = &t[pos + 5..];
        let close = rest.find(')').ok_or_else(bad)?;
        if close + 1 != rest.len() {
            return Err(bad());
        }
        let d: u32 = rest[..close].parse().map_err(|_| bad())?;
        let head = &t[..pos];
        let head = head.strip_suffix('*').unwrap_or(head);
        // Split the head into "a" and the signed coefficient of the root.
        let split = head
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (a_str, b_str) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let a = if a_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(a_str)?
        };
        let b = match b_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.trim_start_matches('+'))?,
        };
        Scalar::quadratic(a, b, d)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Text(String),
    Int(i64),
    Quad { a: String, b: String, d: u32 },
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Text(s) => s.parse().map_err(de::Error::custom),
            ScalarRepr::Int(n) => Ok(Scalar::int(n)),
            ScalarRepr::Quad { a, b, d } => {
                let a = parse_rational(&a).map_err(de::Error::custom)?;
                let b = parse_rational(&b).map_err(de::Error::custom)?;
                Scalar::quadratic(a, b, d).map_err(de::Error::custom)
            }
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// # Panics
/// When the operands live in different quadratic fields; use
/// [`Scalar::try_cmp`] for a checked comparison.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(x), Scalar::Rational(y)) => x.cmp(y),
            _ => self.try_cmp(other).expect("scalar field mismatch"),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quadratic { a, b, d } => Scalar::Quadratic { a: -a, b: -b, d },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar field mismatch")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}
