//! JSON documents describing a judgment system and an optional query.
//!
//! ```json
//! {
//!   "field": "quadratic:2",
//!   "states": ["a", "b"],
//!   "gambles": {
//!     "E": {"indicator": ["a"]},
//!     "one": {"constant": "1"},
//!     "f": {"a": "1/2", "b": "-sqrt(2)"}
//!   },
//!   "judgments": [["E", "one"]],
//!   "indifferences": [],
//!   "query": {"relation": "weak", "name": "g", "gamble": {"indicator": ["b"]}, "price": "1/3"}
//! }
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{is_square_free, Scalar};
use crate::coherence::{CoherenceError, Judgment, JudgmentSystem};
use crate::gambles::{DominanceRelation, Gamble, GambleError, StateSpace};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown field {0:?}; expected \"rational\" or \"quadratic:d\"")]
    Field(String),
    #[error("value {value} in {context} lies outside the field {field}")]
    OutsideField {
        value: Scalar,
        context: String,
        field: FieldTag,
    },
    #[error("gamble {name:?}: {source}")]
    Gamble { name: String, source: GambleError },
    #[error("document has no query section")]
    MissingQuery,
    #[error("query has no {0}")]
    MissingQueryPart(&'static str),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

/// The scalar field every value of a document must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldTag {
    #[default]
    Rational,
    Quadratic(u32),
}

impl FieldTag {
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s.radicand()) {
            (_, None) => true,
            (FieldTag::Quadratic(d), Some(r)) => *d == r,
            (FieldTag::Rational, Some(_)) => false,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "rational"),
            FieldTag::Quadratic(d) => write!(f, "quadratic:{d}"),
        }
    }
}

impl FromStr for FieldTag {
    type Err = DocumentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "rational" {
            return Ok(FieldTag::Rational);
        }
        s.strip_prefix("quadratic:")
            .and_then(|d| d.parse::<u32>().ok())
            .filter(|&d| is_square_free(d))
            .map(FieldTag::Quadratic)
            .ok_or_else(|| DocumentError::Field(s.to_string()))
    }
}

impl Serialize for FieldTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GambleSpec {
    Indicator { indicator: Vec<String> },
    Constant { constant: Scalar },
    Values(IndexMap<String, Scalar>),
}

impl GambleSpec {
    pub fn build(&self, space: &Arc<StateSpace>) -> Result<Gamble, GambleError> {
        match self {
            GambleSpec::Indicator { indicator } => Gamble::indicator(space, indicator),
            GambleSpec::Constant { constant } => Ok(Gamble::constant(space, constant.clone())),
            GambleSpec::Values(map) => {
                Gamble::from_pairs(space, map.iter().map(|(k, v)| (k.as_str(), v.clone())))
            }
        }
    }

    fn scalars(&self) -> Vec<&Scalar> {
        match self {
            GambleSpec::Indicator { .. } => Vec::new(),
            GambleSpec::Constant { constant } => vec![constant],
            GambleSpec::Values(map) => map.values().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<DominanceRelation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamble: Option<GambleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub price: Option<Scalar>,
}

/// Coefficients and states for the two-gamble construction split at `√2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessSpec {
    pub c1: Scalar,
    pub c2: Scalar,
    #[serde(default)]
    pub states: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default)]
    pub field: FieldTag,
    #[serde(default)]
    pub states: Vec<String>,
    #[serde(default)]
    pub gambles: IndexMap<String, GambleSpec>,
    #[serde(default)]
    pub judgments: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub indifferences: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Query>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harness: Vec<HarnessSpec>,
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: SystemDocument = serde_json::from_str(text)?;
        doc.check_field()?;
        Ok(doc)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    fn check_field(&self) -> Result<(), DocumentError> {
        let outside = |value: &Scalar, context: String| DocumentError::OutsideField {
            value: value.clone(),
            context,
            field: self.field,
        };
        for (name, spec) in &self.gambles {
            for v in spec.scalars() {
                if !self.field.contains(v) {
                    return Err(outside(v, format!("gamble {name:?}")));
                }
            }
        }
        if let Some(q) = &self.query {
            let scalars = q
                .gamble
                .iter()
                .flat_map(GambleSpec::scalars)
                .chain(q.price.as_ref());
            for v in scalars {
                if !self.field.contains(v) {
                    return Err(outside(v, "query".into()));
                }
            }
        }
        for h in &self.harness {
            for v in [&h.c1, &h.c2].into_iter().chain(&h.states) {
                if !self.field.contains(v) {
                    return Err(outside(v, "harness".into()));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<Arc<StateSpace>, DocumentError> {
        StateSpace::new(self.states.iter().cloned()).map_err(|source| DocumentError::Gamble {
            name: String::new(),
            source,
        })
    }

    pub fn system(&self) -> Result<JudgmentSystem, DocumentError> {
        let space = self.space()?;
        let mut gambles = IndexMap::new();
        for (name, spec) in &self.gambles {
            let g = spec.build(&space).map_err(|source| DocumentError::Gamble {
                name: name.clone(),
                source,
            })?;
            gambles.insert(name.clone(), g);
        }
        let mut sys = JudgmentSystem::new(
            space,
            gambles,
            self.judgments
                .iter()
                .map(|(b, w)| Judgment::new(b.as_str(), w.as_str())),
        )?;
        for (a, b) in &self.indifferences {
            sys.add_indifference(a, b)?;
        }
        Ok(sys)
    }

    /// Relation named in the query section, if any.
    pub fn relation(&self) -> Option<DominanceRelation> {
        self.query.as_ref().and_then(|q| q.relation)
    }

    /// The query gamble and its name (default `"query"`).
    pub fn query_gamble(&self, space: &Arc<StateSpace>) -> Result<(String, Gamble), DocumentError> {
        let q = self.query.as_ref().ok_or(DocumentError::MissingQuery)?;
        let spec = q
            .gamble
            .as_ref()
            .ok_or(DocumentError::MissingQueryPart("gamble"))?;
        let name = q.name.clone().unwrap_or_else(|| "query".to_string());
        let g = spec.build(space).map_err(|source| DocumentError::Gamble {
            name: name.clone(),
            source,
        })?;
        Ok((name, g))
    }

    /// Canonical document for a system: every gamble spelled out state by
    /// state and every judgment listed explicitly.
    pub fn from_system(sys: &JudgmentSystem, field: FieldTag) -> Self {
        let names = sys.space().names();
        SystemDocument {
            field,
            states: names.to_vec(),
            gambles: sys
                .gambles()
                .iter()
                .map(|(k, g)| {
                    let values = names
                        .iter()
                        .cloned()
                        .zip(g.values().iter().cloned())
                        .collect();
                    (k.clone(), GambleSpec::Values(values))
                })
                .collect(),
            judgments: sys
                .judgments()
                .iter()
                .map(|j| (j.better.clone(), j.worse.clone()))
                .collect(),
            indifferences: Vec::new(),
            query: None,
            harness: Vec::new(),
        }
    }
}
