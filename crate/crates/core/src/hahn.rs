//! Finitely supported Hahn series `Σ f_γ ε^γ` over an ordered exponent group.
//!
//! Series are kept in canonical form: exponents strictly increasing, no zero
//! coefficients, the empty term list is `0`. The order is lexicographic: a
//! series is positive iff its leading (least-exponent) coefficient is
//! positive, so `ε` is a positive infinitesimal and `ε⁻¹` is infinite.
//!
//! Field inverses usually have infinite support, so only truncated inverses
//! are exposed ([`HahnSeries::inverse_truncated`]).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, Exponent, ExponentGroup, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HahnError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("inverse of the zero series")]
    DivisionByZero,
    #[error("inverse order {order} must exceed the negated leading exponent {neg_leading}")]
    OrderTooLow {
        order: Exponent,
        neg_leading: Exponent,
    },
    #[error("order {0} is not reachable by finitely many multiples of the series' steps")]
    UnreachableOrder(Exponent),
    #[error("the zero series has no Archimedean class")]
    ZeroClass,
    #[error("expected a vector of dimension {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct HahnSeries {
    terms: Vec<(Exponent, Scalar)>,
}

impl HahnSeries {
    pub fn zero() -> Self {
        HahnSeries { terms: Vec::new() }
    }

    pub fn monomial(coeff: Scalar, exp: Exponent) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            HahnSeries {
                terms: vec![(exp, coeff)],
            }
        }
    }

    /// The scalar `c` embedded as `c·ε⁰`.
    pub fn constant(c: Scalar, group: ExponentGroup) -> Self {
        Self::monomial(c, group.zero())
    }

    pub fn one(group: ExponentGroup) -> Self {
        Self::constant(Scalar::one(), group)
    }

    /// Builds a canonical series from arbitrary terms, merging repeated
    /// exponents and dropping zero coefficients.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Exponent, Scalar)>,
    ) -> Result<Self, HahnError> {
        let mut group: Option<ExponentGroup> = None;
        let mut acc: BTreeMap<Exponent, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            match group {
                None => group = Some(e.group()),
                Some(g) if g != e.group() => {
                    return Err(AlgebraError::GroupMismatch(g, e.group()).into())
                }
                _ => {}
            }
            match acc.get_mut(&e) {
                Some(slot) => *slot = slot.try_add(&c)?,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        Ok(HahnSeries {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn terms(&self) -> &[(Exponent, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn group(&self) -> Option<ExponentGroup> {
        self.terms.first().map(|(e, _)| e.group())
    }

    pub fn leading_exponent(&self) -> Option<&Exponent> {
        self.terms.first().map(|(e, _)| e)
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn support(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.iter().map(|(e, _)| e)
    }

    /// Coefficient at `exp` (zero outside the support).
    pub fn coefficient(&self, exp: &Exponent) -> Scalar {
        self.terms
            .iter()
            .find(|(e, _)| e == exp)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// The scalar value if the support is contained in `{0}`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn signum(&self) -> Ordering {
        self.leading_coefficient()
            .map(Scalar::signum)
            .unwrap_or(Ordering::Equal)
    }

    pub fn abs(&self) -> HahnSeries {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    fn check_groups(&self, other: &HahnSeries) -> Result<(), HahnError> {
        match (self.group(), other.group()) {
            (Some(g1), Some(g2)) if g1 != g2 => Err(AlgebraError::GroupMismatch(g1, g2).into()),
            _ => Ok(()),
        }
    }

    pub fn try_add(&self, other: &HahnSeries) -> Result<HahnSeries, HahnError> {
        self.check_groups(other)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match ea.cmp(eb) {
                Ordering::Less => {
                    out.push((ea.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((eb.clone(), cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = ca.try_add(cb)?;
                    if !c.is_zero() {
                        out.push((ea.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(HahnSeries { terms: out })
    }

    pub fn try_sub(&self, other: &HahnSeries) -> Result<HahnSeries, HahnError> {
        self.try_add(&-other)
    }

    /// Convolution product `Σ_γ Σ_{α+β=γ} f_α g_β ε^γ`.
    pub fn try_mul(&self, other: &HahnSeries) -> Result<HahnSeries, HahnError> {
        self.check_groups(other)?;
        let mut products = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                products.push((ea.try_add(eb)?, ca.try_mul(cb)?));
            }
        }
        Self::from_terms(products)
    }

    pub fn scale(&self, k: &Scalar) -> Result<HahnSeries, HahnError> {
        if k.is_zero() {
            return Ok(Self::zero());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), c.try_mul(k)?)))
            .collect::<Result<_, AlgebraError>>()?;
        Ok(HahnSeries { terms })
    }

    /// Multiplies by `ε^shift`.
    pub fn shift(&self, shift: &Exponent) -> Result<HahnSeries, HahnError> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.try_add(shift)?, c.clone())))
            .collect::<Result<_, AlgebraError>>()?;
        Ok(HahnSeries { terms })
    }

    /// Lexicographic comparison: the sign of `self − other` is the sign of
    /// the coefficient at the least exponent where they differ.
    pub fn try_cmp(&self, other: &HahnSeries) -> Result<Ordering, HahnError> {
        Ok(self.try_sub(other)?.signum())
    }

    /// Cut at `xi`: keeps exactly the terms with exponent `< xi`.
    pub fn truncate(&self, xi: &Exponent) -> Result<HahnSeries, HahnError> {
        if let Some(g) = self.group() {
            if g != xi.group() {
                return Err(AlgebraError::GroupMismatch(g, xi.group()).into());
            }
        }
        Ok(HahnSeries {
            terms: self
                .terms
                .iter()
                .take_while(|(e, _)| e < xi)
                .cloned()
                .collect(),
        })
    }

    /// A truncation `g` of `1/f` with every exponent `< order`.
    ///
    /// Writing `f = a·ε^γ·(1 + u)` with `u` supported on positive exponents,
    /// `1/f = a⁻¹ε^{−γ} Σ_k (−u)^k`; only finitely many powers of `u`
    /// contribute below the cut. The result satisfies
    /// `truncate(f·g, order + γ) = truncate(1, order + γ)`.
    pub fn inverse_truncated(&self, order: &Exponent) -> Result<HahnSeries, HahnError> {
        let (lead_exp, lead_coeff) = match self.terms.first() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(HahnError::DivisionByZero),
        };
        let neg_leading = -&lead_exp;
        if order.try_cmp(&neg_leading)? != Ordering::Greater {
            return Err(HahnError::OrderTooLow {
                order: order.clone(),
                neg_leading,
            });
        }
        let group = lead_exp.group();
        let a_inv = lead_coeff.recip()?;
        // u = f/(a ε^γ) − 1, supported on positive exponents
        let normalized = self.shift(&neg_leading)?.scale(&a_inv)?;
        let u = normalized.try_sub(&Self::one(group))?;
        // exponents of the normalized inverse that survive the cut
        let bound = order.try_add(&lead_exp)?;
        let mut acc = Self::one(group).truncate(&bound)?;
        if let Some(step) = u.leading_exponent() {
            let k_max = step
                .multiples_to_reach(&bound)?
                .ok_or_else(|| HahnError::UnreachableOrder(order.clone()))?;
            let minus_u = -&u;
            let mut power = Self::one(group);
            for _ in 1..=k_max {
                power = power.try_mul(&minus_u)?.truncate(&bound)?;
                if power.is_zero() {
                    break;
                }
                acc = acc.try_add(&power)?;
            }
        }
        acc.scale(&a_inv)?.shift(&neg_leading)?.truncate(order)
    }

    pub fn arch_class(&self) -> Option<ArchClass> {
        self.leading_exponent().map(|e| ArchClass {
            leading_exponent: e.clone(),
        })
    }
}

/// Archimedean class of a nonzero series, tagged by its leading exponent.
/// A larger tag means a smaller order of magnitude.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArchClass {
    pub leading_exponent: Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArchOrdering {
    /// `n|u| < |v|` for every natural `n`.
    UInfinitesimal,
    Equivalent,
    /// `n|v| < |u|` for every natural `n`.
    VInfinitesimal,
}

/// Decides Archimedean comparison of two nonzero series by leading exponents.
pub fn arch_compare(u: &HahnSeries, v: &HahnSeries) -> Result<ArchOrdering, HahnError> {
    let (Some(eu), Some(ev)) = (u.leading_exponent(), v.leading_exponent()) else {
        return Err(HahnError::ZeroClass);
    };
    Ok(match eu.try_cmp(ev)? {
        Ordering::Greater => ArchOrdering::UInfinitesimal,
        Ordering::Equal => ArchOrdering::Equivalent,
        Ordering::Less => ArchOrdering::VInfinitesimal,
    })
}

/// One positive monomial `ε^γ` per Archimedean class present in `set`,
/// sorted from largest magnitude to smallest.
pub fn select_representatives(set: &[HahnSeries]) -> Result<Vec<HahnSeries>, HahnError> {
    let mut exps: Vec<Exponent> = Vec::new();
    for s in set {
        let e = s.leading_exponent().ok_or(HahnError::ZeroClass)?;
        if let Some(first) = exps.first() {
            if first.group() != e.group() {
                return Err(AlgebraError::GroupMismatch(first.group(), e.group()).into());
            }
        }
        exps.push(e.clone());
    }
    exps.sort();
    exps.dedup();
    Ok(exps
        .into_iter()
        .map(|e| HahnSeries::monomial(Scalar::one(), e))
        .collect())
}

/// Order embedding of the lexicographically ordered space of `dim`-tuples
/// into the Laurent series: `v ↦ Σ_i v_i ε^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LexEmbedding {
    dim: usize,
}

impl LexEmbedding {
    pub fn new(dim: usize) -> Self {
        LexEmbedding { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn embed(&self, v: &[Scalar]) -> Result<HahnSeries, HahnError> {
        if v.len() != self.dim {
            return Err(HahnError::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        HahnSeries::from_terms(
            v.iter()
                .enumerate()
                .map(|(i, c)| (Exponent::Int(i as i64), c.clone())),
        )
    }
}

/// Free-function form of [`LexEmbedding::embed`] with `d = v.len()`.
pub fn embed_lex_vectors(v: &[Scalar]) -> HahnSeries {
    LexEmbedding::new(v.len())
        .embed(v)
        .expect("dimension matches by construction")
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let bare = match mag.as_rational() {
                Some(r) => r.is_integer() || e.is_zero(),
                None => self.terms.len() == 1,
            };
            let coeff = if bare {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            if e.is_zero() {
                write!(f, "{coeff}")?;
            } else {
                if mag != Scalar::one() {
                    write!(f, "{coeff}")?;
                }
                match e {
                    Exponent::Int(1) => write!(f, "ε")?,
                    Exponent::Int(n) if *n > 1 => write!(f, "ε^{n}")?,
                    other => write!(f, "ε^({other})")?,
                }
            }
        }
        Ok(())
    }
}

impl Serialize for HahnSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HahnSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<(Exponent, Scalar)>::deserialize(deserializer)?;
        HahnSeries::from_terms(terms).map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for HahnSeries {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// # Panics
/// On mismatched exponent groups or scalar fields; see [`HahnSeries::try_cmp`].
impl Ord for HahnSeries {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("incompatible series")
    }
}

impl Neg for &HahnSeries {
    type Output = HahnSeries;
    fn neg(self) -> HahnSeries {
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for HahnSeries {
    type Output = HahnSeries;
    fn neg(self) -> HahnSeries {
        -&self
    }
}

macro_rules! series_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&HahnSeries> for &HahnSeries {
            type Output = HahnSeries;
            fn $method(self, rhs: &HahnSeries) -> HahnSeries {
                self.$checked(rhs).expect("incompatible series")
            }
        }
        impl $trait<HahnSeries> for HahnSeries {
            type Output = HahnSeries;
            fn $method(self, rhs: HahnSeries) -> HahnSeries {
                (&self).$method(&rhs)
            }
        }
    };
}

series_binop!(Add, add, try_add);
series_binop!(Sub, sub, try_sub);
series_binop!(Mul, mul, try_mul);
