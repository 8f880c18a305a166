use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::CoherenceError;
use crate::gambles::{Gamble, StateSpace};

/// `better ≿ worse`: the agent gives up `worse` to receive `better`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Judgment {
    pub better: String,
    pub worse: String,
}

impl Judgment {
    pub fn new(better: impl Into<String>, worse: impl Into<String>) -> Self {
        Judgment {
            better: better.into(),
            worse: worse.into(),
        }
    }

    pub fn reversed(&self) -> Judgment {
        Judgment {
            better: self.worse.clone(),
            worse: self.better.clone(),
        }
    }
}

/// A finite comparative expectation system: named gambles on one state space
/// and a list of weak-preference judgments between them.
///
/// Repeated judgments are collapsed on construction. A judgment is strict
/// when its reverse is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentSystem {
    space: Arc<StateSpace>,
    gambles: IndexMap<String, Gamble>,
    judgments: Vec<Judgment>,
}

impl JudgmentSystem {
    pub fn new(
        space: Arc<StateSpace>,
        gambles: IndexMap<String, Gamble>,
        judgments: impl IntoIterator<Item = Judgment>,
    ) -> Result<Self, CoherenceError> {
        for g in gambles.values() {
            if g.space() != &space {
                return Err(crate::gambles::GambleError::SpaceMismatch.into());
            }
        }
        let mut sys = JudgmentSystem {
            space,
            gambles,
            judgments: Vec::new(),
        };
        for j in judgments {
            sys.add_judgment(j)?;
        }
        Ok(sys)
    }

    pub fn empty(space: Arc<StateSpace>) -> Self {
        JudgmentSystem {
            space,
            gambles: IndexMap::new(),
            judgments: Vec::new(),
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn gambles(&self) -> &IndexMap<String, Gamble> {
        &self.gambles
    }

    pub fn judgments(&self) -> &[Judgment] {
        &self.judgments
    }

    pub fn gamble(&self, name: &str) -> Result<&Gamble, CoherenceError> {
        self.gambles
            .get(name)
            .ok_or_else(|| CoherenceError::UnknownGamble(name.to_string()))
    }

    pub fn add_gamble(&mut self, name: impl Into<String>, g: Gamble) -> Result<(), CoherenceError> {
        let name = name.into();
        if self.gambles.contains_key(&name) {
            return Err(CoherenceError::NameCollision(name));
        }
        if g.space() != &self.space {
            return Err(crate::gambles::GambleError::SpaceMismatch.into());
        }
        self.gambles.insert(name, g);
        Ok(())
    }

    /// Adds a judgment unless it is already present. Returns its index.
    pub fn add_judgment(&mut self, j: Judgment) -> Result<usize, CoherenceError> {
        self.gamble(&j.better)?;
        self.gamble(&j.worse)?;
        if let Some(i) = self.judgments.iter().position(|k| *k == j) {
            return Ok(i);
        }
        self.judgments.push(j);
        Ok(self.judgments.len() - 1)
    }

    /// Adds `a ≿ b` and `b ≿ a`.
    pub fn add_indifference(&mut self, a: &str, b: &str) -> Result<(), CoherenceError> {
        self.add_judgment(Judgment::new(a, b))?;
        self.add_judgment(Judgment::new(b, a))?;
        Ok(())
    }

    /// Whether `better ≿ worse` holds, counting every gamble as weakly
    /// preferred to itself.
    pub fn prefers(&self, better: &str, worse: &str) -> bool {
        better == worse
            || self
                .judgments
                .iter()
                .any(|j| j.better == better && j.worse == worse)
    }

    /// `better ≻ worse`: judged, and the reverse is not.
    pub fn strictly_prefers(&self, better: &str, worse: &str) -> bool {
        self.prefers(better, worse) && !self.prefers(worse, better)
    }

    pub fn is_strict(&self, idx: usize) -> bool {
        let j = &self.judgments[idx];
        self.strictly_prefers(&j.better, &j.worse)
    }

    /// Every pair of distinct gambles is comparable.
    pub fn is_complete(&self) -> bool {
        let names: Vec<&String> = self.gambles.keys().collect();
        names.iter().enumerate().all(|(i, a)| {
            names[i + 1..]
                .iter()
                .all(|b| self.prefers(a, b) || self.prefers(b, a))
        })
    }

    /// `worse − better` for judgment `idx`: the net of honoring the exchange
    /// `better ≿ worse` once, read from the side of the dominance test.
    pub fn net_loss(&self, idx: usize) -> Gamble {
        let j = &self.judgments[idx];
        let f = &self.gambles[&j.better];
        let g = &self.gambles[&j.worse];
        g.try_sub(f).expect("gambles share the system's space")
    }

    pub fn with_judgments(&self, keep: impl Fn(usize, &Judgment) -> bool) -> JudgmentSystem {
        JudgmentSystem {
            space: Arc::clone(&self.space),
            gambles: self.gambles.clone(),
            judgments: self
                .judgments
                .iter()
                .enumerate()
                .filter(|(i, j)| keep(*i, j))
                .map(|(_, j)| j.clone())
                .collect(),
        }
    }
}
