//! Finite state spaces, gambles, and the pointwise dominance relations.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GambleError {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("no value given for state {0:?}")]
    MissingValue(String),
    #[error("gamble has {actual} values but the state space has {expected} states")]
    WrongLength { expected: usize, actual: usize },
    #[error("gambles live on different state spaces")]
    SpaceMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    states: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
    ) -> Result<Arc<StateSpace>, GambleError> {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(GambleError::EmptySpace);
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(GambleError::DuplicateState(s.clone()));
            }
        }
        Ok(Arc::new(StateSpace { states }))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.states
    }

    pub fn name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GambleError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| GambleError::UnknownState(name.to_string()))
    }
}

/// A real-valued function on a finite state space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gamble {
    space: Arc<StateSpace>,
    values: Vec<Scalar>,
}

fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Gamble {
    pub fn new(space: &Arc<StateSpace>, values: Vec<Scalar>) -> Result<Gamble, GambleError> {
        if values.len() != space.len() {
            return Err(GambleError::WrongLength {
                expected: space.len(),
                actual: values.len(),
            });
        }
        Ok(Gamble {
            space: Arc::clone(space),
            values,
        })
    }

    /// Builds a gamble from `(state, value)` pairs covering every state.
    pub fn from_pairs<'a>(
        space: &Arc<StateSpace>,
        pairs: impl IntoIterator<Item = (&'a str, Scalar)>,
    ) -> Result<Gamble, GambleError> {
        let mut values: Vec<Option<Scalar>> = vec![None; space.len()];
        for (name, v) in pairs {
            values[space.index_of(name)?] = Some(v);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| GambleError::MissingValue(space.name(i).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Gamble::new(space, values)
    }

    pub fn constant(space: &Arc<StateSpace>, c: Scalar) -> Gamble {
        Gamble {
            space: Arc::clone(space),
            values: vec![c; space.len()],
        }
    }

    pub fn zero(space: &Arc<StateSpace>) -> Gamble {
        Self::constant(space, Scalar::zero())
    }

    /// The sure gamble `1 = 1_Ω`.
    pub fn one(space: &Arc<StateSpace>) -> Gamble {
        Self::constant(space, Scalar::one())
    }

    /// Indicator of the event made of the named states.
    pub fn indicator<S: AsRef<str>>(
        space: &Arc<StateSpace>,
        event: &[S],
    ) -> Result<Gamble, GambleError> {
        let mut values = vec![Scalar::zero(); space.len()];
        for s in event {
            values[space.index_of(s.as_ref())?] = Scalar::one();
        }
        Ok(Gamble {
            space: Arc::clone(space),
            values,
        })
    }

    /// Indicator of a single state by index.
    pub fn point(space: &Arc<StateSpace>, i: usize) -> Gamble {
        let mut values = vec![Scalar::zero(); space.len()];
        values[i] = Scalar::one();
        Gamble {
            space: Arc::clone(space),
            values,
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Scalar {
        &self.values[i]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn min_value(&self) -> Scalar {
        self.values
            .iter()
            .cloned()
            .reduce(Scalar::min)
            .expect("nonempty space")
    }

    pub fn max_value(&self) -> Scalar {
        self.values
            .iter()
            .cloned()
            .reduce(Scalar::max)
            .expect("nonempty space")
    }

    fn check_space(&self, other: &Gamble) -> Result<(), GambleError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(GambleError::SpaceMismatch)
        }
    }

    /// Pointwise `c1·f + c2·g`.
    pub fn combine(
        c1: &Scalar,
        f: &Gamble,
        c2: &Scalar,
        g: &Gamble,
    ) -> Result<Gamble, GambleError> {
        f.check_space(g)?;
        let values = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(x, y)| c1.try_mul(x)?.try_add(&c2.try_mul(y)?))
            .collect::<Result<_, _>>()?;
        Ok(Gamble {
            space: Arc::clone(&f.space),
            values,
        })
    }

    pub fn try_add(&self, other: &Gamble) -> Result<Gamble, GambleError> {
        Self::combine(&Scalar::one(), self, &Scalar::one(), other)
    }

    pub fn try_sub(&self, other: &Gamble) -> Result<Gamble, GambleError> {
        Self::combine(&Scalar::one(), self, &Scalar::int(-1), other)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Gamble, GambleError> {
        let values = self
            .values
            .iter()
            .map(|x| c.try_mul(x))
            .collect::<Result<_, _>>()?;
        Ok(Gamble {
            space: Arc::clone(&self.space),
            values,
        })
    }

    pub fn neg(&self) -> Gamble {
        Gamble {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for Gamble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}↦{}", self.space.name(i), v)?;
        }
        write!(f, ")")
    }
}

/// The strict dominance relations usable as the coherence parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominanceRelation {
    /// `g < f`: `g ≤ f` everywhere and `g < f` somewhere.
    Weak,
    /// `g ≪ f`: `g + c ≤ f` for some positive constant `c`.
    Uniform,
    /// `g ⋖ f`: `g < f` everywhere.
    Simple,
}

impl DominanceRelation {
    pub const ALL: [DominanceRelation; 3] = [
        DominanceRelation::Weak,
        DominanceRelation::Uniform,
        DominanceRelation::Simple,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DominanceRelation::Weak => "weak",
            DominanceRelation::Uniform => "uniform",
            DominanceRelation::Simple => "simple",
        }
    }
}

impl fmt::Display for DominanceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DominanceRelation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weak" => Ok(DominanceRelation::Weak),
            "uniform" => Ok(DominanceRelation::Uniform),
            "simple" => Ok(DominanceRelation::Simple),
            other => Err(format!(
                "unknown relation {other:?} (expected weak, uniform or simple)"
            )),
        }
    }
}

/// Any of the four dominance relations, including plain `≤`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dominance {
    Pointwise,
    Strict(DominanceRelation),
}

impl From<DominanceRelation> for Dominance {
    fn from(rel: DominanceRelation) -> Self {
        Dominance::Strict(rel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DominanceWitness {
    /// Largest `c` with `g + c ≤ f`, i.e. `min_ω (f − g)(ω)`.
    Slack(Scalar),
    /// A state where `g(ω) < f(ω)`.
    State(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceOutcome {
    pub holds: bool,
    pub witness: Option<DominanceWitness>,
}

/// Decides whether `f` dominates `g` under `rel`.
pub fn dominance_check(
    f: &Gamble,
    g: &Gamble,
    rel: impl Into<Dominance>,
) -> Result<DominanceOutcome, GambleError> {
    let diff = f.try_sub(g)?;
    let slack = diff.min_value();
    let out = match rel.into() {
        Dominance::Pointwise => DominanceOutcome {
            holds: !slack.is_negative(),
            witness: None,
        },
        Dominance::Strict(DominanceRelation::Weak) => {
            let strict = diff.values().iter().position(Scalar::is_positive);
            match strict {
                Some(i) if !slack.is_negative() => DominanceOutcome {
                    holds: true,
                    witness: Some(DominanceWitness::State(i)),
                },
                _ => DominanceOutcome {
                    holds: false,
                    witness: None,
                },
            }
        }
        // On a finite space uniform and simple dominance coincide.
        Dominance::Strict(DominanceRelation::Uniform | DominanceRelation::Simple) => {
            if slack.is_positive() {
                DominanceOutcome {
                    holds: true,
                    witness: Some(DominanceWitness::Slack(slack)),
                }
            } else {
                DominanceOutcome {
                    holds: false,
                    witness: None,
                }
            }
        }
    };
    Ok(out)
}

/// Convenience wrapper returning only the verdict.
pub fn dominates(f: &Gamble, g: &Gamble, rel: impl Into<Dominance>) -> Result<bool, GambleError> {
    dominance_check(f, g, rel).map(|o| o.holds)
}
