//! Admissible prices for a gamble not yet judged by a coherent system.
//!
//! The lower price of `f` is the largest `μ` with
//! `f − μ ≥ Σ λ_i (f_i − g_i)` for some `λ ≥ 0`, i.e. the most the system
//! already commits the agent to pay for `f`. The upper price is
//! `−lower(−f)`. Prices strictly inside `[lower, upper]` extend the system
//! coherently and prices outside do not; the endpoints are decided by
//! re-running the coherence check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Scalar;
use crate::coherence::{
    decide_coherence, CoherenceError, CoherenceVerdict, Judgment, JudgmentSystem,
};
use crate::gambles::{DominanceRelation, Gamble};
use crate::lp::{LinearSystem, LpOutcome, Relation, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceInterval {
    pub lower: Scalar,
    pub upper: Scalar,
    pub lower_attainable: bool,
    pub upper_attainable: bool,
}

impl PriceInterval {
    /// Where `p` falls relative to the admissible prices.
    pub fn locate(&self, p: &Scalar) -> Result<Option<Side>, CoherenceError> {
        let lo = p.try_cmp(&self.lower)?;
        if lo.is_lt() || (lo.is_eq() && !self.lower_attainable) {
            return Ok(Some(Side::Lower));
        }
        let hi = p.try_cmp(&self.upper)?;
        if hi.is_gt() || (hi.is_eq() && !self.upper_attainable) {
            return Ok(Some(Side::Upper));
        }
        Ok(None)
    }

    pub fn contains(&self, p: &Scalar) -> bool {
        matches!(self.locate(p), Ok(None))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("the system is {0}-incoherent")]
    Incoherent(DominanceRelation),
    #[error("price {price} violates the {side:?} bound {bound} (attainable: {attainable})")]
    Inadmissible {
        price: Scalar,
        side: Side,
        bound: Scalar,
        attainable: bool,
    },
    #[error("extended system failed the coherence re-check")]
    RecheckFailed,
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

/// Name under which `p·1` is adjoined when pricing `name`.
pub fn price_gamble_name(name: &str) -> String {
    format!("price({name})")
}

fn lower_price(sys: &JudgmentSystem, f: &Gamble) -> Result<Scalar, ExtensionError> {
    let n = sys.judgments().len();
    let mut lp = LinearSystem::new();
    let mu = lp.add_variable("mu", false);
    for i in 0..n {
        lp.add_variable(format!("lambda{i}"), true);
    }
    let losses: Vec<Gamble> = (0..n).map(|i| sys.net_loss(i)).collect();
    // Σ λ_i (g_i − f_i)(ω) − μ ≥ −f(ω)
    for w in 0..sys.space().len() {
        let mut row = vec![-Scalar::one()];
        row.extend(losses.iter().map(|d| d.value(w).clone()));
        lp.add_constraint(row, Relation::Ge, -f.value(w).clone())
            .expect("row length");
    }
    let mut obj = vec![Scalar::zero(); n + 1];
    obj[mu] = Scalar::one();
    lp.set_objective(Sense::Maximize, obj).expect("row length");
    match lp.solve() {
        LpOutcome::Feasible { assignment, .. } => Ok(assignment[mu].clone()),
        // μ = min f with λ = 0 is always feasible; unboundedness means the
        // system sure-loses.
        _ => Err(ExtensionError::Incoherent(DominanceRelation::Uniform)),
    }
}

fn with_price(
    sys: &JudgmentSystem,
    name: &str,
    f: &Gamble,
    p: &Scalar,
) -> Result<JudgmentSystem, CoherenceError> {
    let mut ext = sys.clone();
    let price_name = price_gamble_name(name);
    ext.add_gamble(name, f.clone())?;
    ext.add_gamble(price_name.clone(), Gamble::constant(sys.space(), p.clone()))?;
    ext.add_judgment(Judgment::new(name, price_name.as_str()))?;
    ext.add_judgment(Judgment::new(price_name.as_str(), name))?;
    Ok(ext)
}

fn ensure_coherent(sys: &JudgmentSystem, rel: DominanceRelation) -> Result<(), ExtensionError> {
    match decide_coherence(sys, rel)? {
        CoherenceVerdict::Coherent => Ok(()),
        CoherenceVerdict::Incoherent(_) => Err(ExtensionError::Incoherent(rel)),
    }
}

/// Prices at which `f`, adjoined under `name`, may be judged indifferent to
/// a constant without breaking `rel`-coherence.
pub fn admissible_interval(
    sys: &JudgmentSystem,
    name: &str,
    f: &Gamble,
    rel: DominanceRelation,
) -> Result<PriceInterval, ExtensionError> {
    ensure_coherent(sys, rel)?;
    let lower = lower_price(sys, f)?;
    let upper = -lower_price(sys, &f.neg())?;
    let attainable = |p: &Scalar| -> Result<bool, ExtensionError> {
        let ext = with_price(sys, name, f, p)?;
        Ok(decide_coherence(&ext, rel)?.is_coherent())
    };
    let lower_attainable = attainable(&lower)?;
    let upper_attainable = if upper == lower {
        lower_attainable
    } else {
        attainable(&upper)?
    };
    log::debug!("price interval for {name}: [{lower}, {upper}]");
    Ok(PriceInterval {
        lower,
        upper,
        lower_attainable,
        upper_attainable,
    })
}

/// Adjoins `f` and `p·1` with `f ∼ p·1`, rejecting inadmissible prices.
pub fn extend_with_price(
    sys: &JudgmentSystem,
    name: &str,
    f: &Gamble,
    p: &Scalar,
    rel: DominanceRelation,
) -> Result<JudgmentSystem, ExtensionError> {
    let interval = admissible_interval(sys, name, f, rel)?;
    if let Some(side) = interval.locate(p)? {
        let (bound, attainable) = match side {
            Side::Lower => (interval.lower, interval.lower_attainable),
            Side::Upper => (interval.upper, interval.upper_attainable),
        };
        return Err(ExtensionError::Inadmissible {
            price: p.clone(),
            side,
            bound,
            attainable,
        });
    }
    let ext = with_price(sys, name, f, p)?;
    if !decide_coherence(&ext, rel)?.is_coherent() {
        return Err(ExtensionError::RecheckFailed);
    }
    Ok(ext)
}
