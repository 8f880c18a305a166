//! Coherence of comparative expectation systems.
//!
//! A system is incoherent under a dominance relation `⊳` when finitely many
//! of its judgments `f_i ≿ g_i`, taken with positive weights `c_i`, satisfy
//! `Σ c_i g_i ≥ Σ c_i f_i` and either some cited judgment is strict (branch
//! C3) or `Σ c_i g_i ⊳ Σ c_i f_i` (branch C4).
//!
//! All conditions are positively homogeneous in the weights, so each branch
//! is a closed LP over `λ ≥ 0` with `d = Σ λ_i (g_i − f_i)`:
//!
//! | branch            | constraints                           |
//! |-------------------|---------------------------------------|
//! | C4, uniform/simple| `d(ω) ≥ 1` for every state            |
//! | C4, weak          | `d ≥ 0`, `d(ω*) ≥ 1` for one state ω* |
//! | C3                | `d ≥ 0`, `λ_k ≥ 1` for one strict `k` |
//!
//! The system is incoherent iff one of these LPs is feasible. Each LP
//! minimizes `Σ λ_i`, so witnesses are as small as the LP allows.

mod cs2;
mod example42;
mod system;

pub use cs2::{check_cs2, Cs2Report, InvarianceViolation};
pub use example42::{example42_g1, example42_g2, example42_harness, Example42Fragment};
pub use system::{Judgment, JudgmentSystem};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Scalar};
use crate::gambles::{dominates, DominanceRelation, Gamble, GambleError};
use crate::lp::{LinearSystem, LpOutcome, Relation, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoherenceError {
    #[error("unknown gamble {0:?}")]
    UnknownGamble(String),
    #[error("a gamble named {0:?} already exists")]
    NameCollision(String),
    #[error("coefficients must be positive")]
    NonPositiveCoefficient,
    #[error("states must be positive rationals, got {0}")]
    InvalidState(Scalar),
    #[error(transparent)]
    Gamble(#[from] GambleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    C3,
    C4,
}

/// Weights on judgments demonstrating incoherence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncoherenceWitness {
    /// `(judgment index, c_i)` with every `c_i > 0`.
    pub terms: Vec<(usize, Scalar)>,
    pub branch: Branch,
    /// For C4 under weak dominance: the state where the net loss is positive.
    pub strict_state: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoherenceVerdict {
    Coherent,
    Incoherent(IncoherenceWitness),
}

impl CoherenceVerdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, CoherenceVerdict::Coherent)
    }

    pub fn witness(&self) -> Option<&IncoherenceWitness> {
        match self {
            CoherenceVerdict::Coherent => None,
            CoherenceVerdict::Incoherent(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum BranchKind {
    Uniform,
    WeakAt(usize),
    StrictJudgment(usize),
}

fn branch_lp(losses: &[Gamble], n_states: usize, kind: BranchKind) -> LinearSystem {
    let mut lp = LinearSystem::new();
    for i in 0..losses.len() {
        lp.add_variable(format!("lambda{i}"), true);
    }
    for w in 0..n_states {
        let row: Vec<Scalar> = losses.iter().map(|d| d.value(w).clone()).collect();
        let rhs = match kind {
            BranchKind::Uniform => Scalar::one(),
            BranchKind::WeakAt(star) if star == w => Scalar::one(),
            _ => Scalar::zero(),
        };
        lp.add_constraint(row, Relation::Ge, rhs)
            .expect("row length");
    }
    if let BranchKind::StrictJudgment(k) = kind {
        lp.add_sparse(&[(k, Scalar::one())], Relation::Ge, Scalar::one())
            .expect("index in range");
    }
    lp.set_objective(Sense::Minimize, vec![Scalar::one(); losses.len()])
        .expect("row length");
    lp
}

fn witness_from(
    assignment: &[Scalar],
    branch: Branch,
    strict_state: Option<usize>,
) -> IncoherenceWitness {
    IncoherenceWitness {
        terms: assignment
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .map(|(i, c)| (i, c.clone()))
            .collect(),
        branch,
        strict_state,
    }
}

/// Decides `rel`-coherence exactly, returning a checkable witness when the
/// system is incoherent.
pub fn decide_coherence(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
) -> Result<CoherenceVerdict, CoherenceError> {
    let n = sys.judgments().len();
    if n == 0 {
        return Ok(CoherenceVerdict::Coherent);
    }
    let losses: Vec<Gamble> = (0..n).map(|i| sys.net_loss(i)).collect();
    let n_states = sys.space().len();

    let mut attempts: Vec<(BranchKind, Branch, Option<usize>)> = Vec::new();
    match rel {
        DominanceRelation::Uniform | DominanceRelation::Simple => {
            attempts.push((BranchKind::Uniform, Branch::C4, None));
        }
        DominanceRelation::Weak => {
            for w in 0..n_states {
                attempts.push((BranchKind::WeakAt(w), Branch::C4, Some(w)));
            }
        }
    }
    for k in (0..n).filter(|&k| sys.is_strict(k)) {
        attempts.push((BranchKind::StrictJudgment(k), Branch::C3, None));
    }

    for (kind, branch, state) in attempts {
        let lp = branch_lp(&losses, n_states, kind);
        if let LpOutcome::Feasible { assignment, .. } = lp.solve() {
            let witness = witness_from(&assignment, branch, state);
            debug_assert!(verify_witness(sys, rel, &witness).is_ok());
            return Ok(CoherenceVerdict::Incoherent(witness));
        }
    }
    Ok(CoherenceVerdict::Coherent)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessFailure {
    #[error("witness cites no judgments")]
    Empty,
    #[error("judgment index {0} out of range")]
    BadIndex(usize),
    #[error("coefficient for judgment {0} is not positive")]
    NonPositive(usize),
    #[error("weighted net loss is negative at state {0}")]
    NotDominated(usize),
    #[error("no cited judgment is strict")]
    NoStrictJudgment,
    #[error("weighted net loss does not {0}-dominate zero")]
    NotStrictlyDominated(DominanceRelation),
    #[error("weighted net loss is not positive at the cited state")]
    BadStrictState,
    #[error(transparent)]
    Gamble(#[from] GambleError),
}

/// Re-verifies an incoherence witness by exact arithmetic.
pub fn verify_witness(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    w: &IncoherenceWitness,
) -> Result<(), WitnessFailure> {
    if w.terms.is_empty() {
        return Err(WitnessFailure::Empty);
    }
    let mut net = Gamble::zero(sys.space());
    for (i, c) in &w.terms {
        if *i >= sys.judgments().len() {
            return Err(WitnessFailure::BadIndex(*i));
        }
        if !c.is_positive() {
            return Err(WitnessFailure::NonPositive(*i));
        }
        net = Gamble::combine(&Scalar::one(), &net, c, &sys.net_loss(*i))?;
    }
    if let Some(bad) = net.values().iter().position(Scalar::is_negative) {
        return Err(WitnessFailure::NotDominated(bad));
    }
    match w.branch {
        Branch::C3 => {
            if !w.terms.iter().any(|(i, _)| sys.is_strict(*i)) {
                return Err(WitnessFailure::NoStrictJudgment);
            }
        }
        Branch::C4 => {
            if !dominates(&net, &Gamble::zero(sys.space()), rel)? {
                return Err(WitnessFailure::NotStrictlyDominated(rel));
            }
            if let Some(s) = w.strict_state {
                if !net.values().get(s).is_some_and(Scalar::is_positive) {
                    return Err(WitnessFailure::BadStrictState);
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WitnessTermJson<'a> {
    judgment: usize,
    c: &'a Scalar,
}

/// JSON form `{"coherent", "branch", "witness", "strict_state"}`.
pub fn verdict_json(sys: &JudgmentSystem, verdict: &CoherenceVerdict) -> serde_json::Value {
    match verdict {
        CoherenceVerdict::Coherent => serde_json::json!({ "coherent": true }),
        CoherenceVerdict::Incoherent(w) => {
            let terms: Vec<WitnessTermJson> = w
                .terms
                .iter()
                .map(|(i, c)| WitnessTermJson { judgment: *i, c })
                .collect();
            let mut v = serde_json::json!({
                "coherent": false,
                "branch": w.branch,
                "witness": terms,
            });
            if let Some(s) = w.strict_state {
                v["strict_state"] = serde_json::json!(sys.space().name(s));
            }
            v
        }
    }
}
