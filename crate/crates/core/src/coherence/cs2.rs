use serde::Serialize;

use super::{decide_coherence, CoherenceVerdict, JudgmentSystem};
use crate::algebra::Scalar;
use crate::gambles::{dominates, DominanceRelation, Gamble};

/// `α·better + h ≿ α·worse + h` should hold but does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceViolation {
    pub better: String,
    pub worse: String,
    pub scale: Scalar,
    /// `None` means the zero shift.
    pub shift: Option<String>,
    pub shifted_better: String,
    pub shifted_worse: String,
}

/// Outcome of checking a system against the characterization of coherence
/// as an ordered linear preorder whose strict part respects dominance.
///
/// Checks run over the named gambles only: a combination is tested when
/// both sides are themselves named in the system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cs2Report {
    pub relation: DominanceRelation,
    pub complete: bool,
    /// `(f, g, h)` with `f ≿ g`, `g ≿ h`, but not `f ≿ h`.
    pub transitivity: Vec<(String, String, String)>,
    pub invariance: Vec<InvarianceViolation>,
    /// `(f, g)` with `f ⊳ g` but not `f ≻ g`.
    pub respect: Vec<(String, String)>,
    pub coherent: bool,
    /// False when the system is complete, some check failed, and yet the
    /// decision procedure reports coherence.
    pub consistent: bool,
}

impl Cs2Report {
    pub fn passes(&self) -> bool {
        self.transitivity.is_empty() && self.invariance.is_empty() && self.respect.is_empty()
    }
}

const SCALES: [(i64, i64); 3] = [(1, 2), (2, 1), (3, 1)];

fn find_named<'a>(sys: &'a JudgmentSystem, g: &Gamble) -> Option<&'a str> {
    sys.gambles()
        .iter()
        .find(|(_, v)| v.values() == g.values())
        .map(|(k, _)| k.as_str())
}

pub fn check_cs2(sys: &JudgmentSystem, rel: DominanceRelation) -> Cs2Report {
    let names: Vec<&str> = sys.gambles().keys().map(String::as_str).collect();

    let mut transitivity = Vec::new();
    for &f in &names {
        for &g in &names {
            if !sys.prefers(f, g) {
                continue;
            }
            for &h in &names {
                if sys.prefers(g, h) && !sys.prefers(f, h) {
                    transitivity.push((f.to_string(), g.to_string(), h.to_string()));
                }
            }
        }
    }

    let zero = Gamble::zero(sys.space());
    let mut shifts: Vec<(Option<&str>, &Gamble)> = vec![(None, &zero)];
    shifts.extend(names.iter().map(|&n| (Some(n), &sys.gambles()[n])));

    let mut invariance = Vec::new();
    for j in sys.judgments() {
        let f = &sys.gambles()[&j.better];
        let g = &sys.gambles()[&j.worse];
        for (num, den) in SCALES {
            let a = Scalar::ratio(num, den);
            for (shift, h) in &shifts {
                let (Ok(fa), Ok(ga)) = (
                    Gamble::combine(&a, f, &Scalar::one(), h),
                    Gamble::combine(&a, g, &Scalar::one(), h),
                ) else {
                    continue;
                };
                let (Some(fa_name), Some(ga_name)) = (find_named(sys, &fa), find_named(sys, &ga))
                else {
                    continue;
                };
                if !sys.prefers(fa_name, ga_name) {
                    invariance.push(InvarianceViolation {
                        better: j.better.clone(),
                        worse: j.worse.clone(),
                        scale: a.clone(),
                        shift: shift.map(str::to_string),
                        shifted_better: fa_name.to_string(),
                        shifted_worse: ga_name.to_string(),
                    });
                }
            }
        }
    }

    let mut respect = Vec::new();
    for &f in &names {
        for &g in &names {
            let dominated = dominates(&sys.gambles()[f], &sys.gambles()[g], rel).unwrap_or(false);
            if dominated && !sys.strictly_prefers(f, g) {
                respect.push((f.to_string(), g.to_string()));
            }
        }
    }

    let coherent = matches!(decide_coherence(sys, rel), Ok(CoherenceVerdict::Coherent));
    let complete = sys.is_complete();
    let failed = !(transitivity.is_empty() && invariance.is_empty() && respect.is_empty());
    Cs2Report {
        relation: rel,
        complete,
        transitivity,
        invariance,
        respect,
        coherent,
        consistent: !(complete && failed && coherent),
    }
}
