//! Series-valued expectations representing coherent systems.
//!
//! An expectation is a stack of level functionals `p_0, …, p_{k−1}` on the
//! states, read as `E(f) = Σ_j (p_j · f) ε^j` in the Laurent field with
//! integer exponents. Level 0 has mass 1 and every later level mass 0, so
//! `E(1) = 1`. Each state's column `(p_0(ω), p_1(ω), …)` is lexicographically
//! nonnegative, which makes `E` monotone.
//!
//! [`represent`] builds such an expectation level by level with exact LPs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Exponent, Scalar};
use crate::coherence::{decide_coherence, CoherenceError, JudgmentSystem};
use crate::gambles::{dominates, DominanceRelation, Gamble, GambleError, StateSpace};
use crate::hahn::HahnSeries;
use crate::lp::{LinearSystem, LpOutcome, Relation, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentationError {
    #[error("the system is {0}-incoherent")]
    Incoherent(DominanceRelation),
    #[error("level {level} settles none of the strict judgments {blocked:?}")]
    Stalled { level: usize, blocked: Vec<usize> },
    #[error("level {level} gives no weight to any of the states {blocked:?}")]
    ZeroStates { level: usize, blocked: Vec<String> },
    #[error("invalid levels: {0}")]
    InvalidLevels(String),
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("classes do not partition the states")]
    NotAPartition,
    #[error(transparent)]
    Gamble(#[from] GambleError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexExpectation {
    space: Arc<StateSpace>,
    levels: Vec<Vec<Scalar>>,
}

impl LexExpectation {
    /// Validates mass and per-state lexicographic nonnegativity.
    pub fn new(
        space: &Arc<StateSpace>,
        levels: Vec<Vec<Scalar>>,
    ) -> Result<Self, RepresentationError> {
        let e = Self::new_unchecked(space, levels);
        e.check_invariants()?;
        Ok(e)
    }

    pub fn new_unchecked(space: &Arc<StateSpace>, levels: Vec<Vec<Scalar>>) -> Self {
        LexExpectation {
            space: Arc::clone(space),
            levels,
        }
    }

    pub fn check_invariants(&self) -> Result<(), RepresentationError> {
        let bad = |m: String| Err(RepresentationError::InvalidLevels(m));
        if self.levels.is_empty() {
            return bad("no levels".into());
        }
        for (j, p) in self.levels.iter().enumerate() {
            if p.len() != self.space.len() {
                return bad(format!("level {j} has {} entries", p.len()));
            }
            let mass: Scalar = p.iter().sum();
            let want = if j == 0 {
                Scalar::one()
            } else {
                Scalar::zero()
            };
            if mass != want {
                return bad(format!("level {j} has mass {mass}"));
            }
        }
        for w in 0..self.space.len() {
            if let Some(first) = self.column(w).find(|c| !c.is_zero()) {
                if first.is_negative() {
                    return bad(format!(
                        "state {} is lexicographically negative",
                        self.space.name(w)
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn levels(&self) -> &[Vec<Scalar>] {
        &self.levels
    }

    fn column(&self, w: usize) -> impl Iterator<Item = &Scalar> {
        self.levels.iter().map(move |p| &p[w])
    }

    /// Whether every level of `state` is zero.
    pub fn is_null_state(&self, w: usize) -> bool {
        self.column(w).all(Scalar::is_zero)
    }

    pub fn evaluate(&self, f: &Gamble) -> Result<HahnSeries, RepresentationError> {
        if f.space() != &self.space {
            return Err(GambleError::SpaceMismatch.into());
        }
        let terms = self
            .levels
            .iter()
            .enumerate()
            .map(|(j, p)| (Exponent::Int(j as i64), dot(p, f)));
        Ok(HahnSeries::from_terms(terms).expect("single field and group"))
    }
}

fn dot(p: &[Scalar], g: &Gamble) -> Scalar {
    p.iter()
        .zip(g.values())
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .map(|(a, b)| a * b)
        .sum()
}

struct Pairs {
    /// `better − worse` of judgments whose reverse is also judged.
    indifferent: Vec<Gamble>,
    /// `(judgment index, better − worse)` of strict judgments.
    strict: Vec<(usize, Gamble)>,
}

fn pairs(sys: &JudgmentSystem) -> Pairs {
    let mut indifferent = Vec::new();
    let mut strict = Vec::new();
    for k in 0..sys.judgments().len() {
        let gain = sys.net_loss(k).neg();
        if sys.is_strict(k) {
            strict.push((k, gain));
        } else {
            indifferent.push(gain);
        }
    }
    Pairs {
        indifferent,
        strict,
    }
}

fn normalize(p: Vec<Scalar>) -> Vec<Scalar> {
    let mass: Scalar = p.iter().sum();
    p.iter().map(|x| x / &mass).collect()
}

fn uniform(n: usize) -> Vec<Scalar> {
    vec![Scalar::ratio(1, n as i64); n]
}

fn fits(pairs: &Pairs, p: &[Scalar]) -> bool {
    pairs.indifferent.iter().all(|d| dot(p, d).is_zero())
        && pairs.strict.iter().all(|(_, d)| dot(p, d).is_positive())
}

/// A single real-valued level representing the system, if one exists.
fn single_level(pairs: &Pairs, n: usize, rel: DominanceRelation) -> Option<Vec<Scalar>> {
    let u = uniform(n);
    if fits(pairs, &u) {
        return Some(u);
    }
    let mut lp = LinearSystem::new();
    for w in 0..n {
        lp.add_variable(format!("p{w}"), true);
    }
    let ones = vec![Scalar::one(); n];
    if rel == DominanceRelation::Weak {
        for w in 0..n {
            lp.add_sparse(&[(w, Scalar::one())], Relation::Ge, Scalar::one())
                .ok()?;
        }
    } else {
        lp.add_constraint(ones.clone(), Relation::Ge, Scalar::one())
            .ok()?;
    }
    for d in &pairs.indifferent {
        lp.add_constraint(d.values().to_vec(), Relation::Eq, Scalar::zero())
            .ok()?;
    }
    for (_, d) in &pairs.strict {
        lp.add_constraint(d.values().to_vec(), Relation::Ge, Scalar::one())
            .ok()?;
    }
    lp.set_objective(Sense::Minimize, ones).ok()?;
    match lp.solve() {
        LpOutcome::Feasible { assignment, .. } => Some(normalize(assignment)),
        _ => None,
    }
}

/// One layered level: maximizes the number of targets made strictly positive
/// via slacks capped at 1. Returns the level and the indices of targets it
/// settles.
fn layer(
    n: usize,
    nonneg: &BTreeSet<usize>,
    first: bool,
    indifferent: &[Gamble],
    guarded: &[Vec<Scalar>],
    targets: &[Vec<Scalar>],
) -> Option<(Vec<Scalar>, Vec<usize>)> {
    let mut lp = LinearSystem::new();
    for w in 0..n {
        lp.add_variable(format!("p{w}"), nonneg.contains(&w));
    }
    for t in 0..targets.len() {
        lp.add_variable(format!("s{t}"), true);
    }
    let width = n + targets.len();
    let pad = |row: &[Scalar]| {
        let mut r = row.to_vec();
        r.resize(width, Scalar::zero());
        r
    };
    let ones = pad(&vec![Scalar::one(); n]);
    if first {
        lp.add_constraint(ones, Relation::Ge, Scalar::one()).ok()?;
    } else {
        lp.add_constraint(ones, Relation::Eq, Scalar::zero()).ok()?;
    }
    for d in indifferent {
        lp.add_constraint(pad(d.values()), Relation::Eq, Scalar::zero())
            .ok()?;
    }
    for g in guarded {
        lp.add_constraint(pad(g), Relation::Ge, Scalar::zero())
            .ok()?;
    }
    for (t, row) in targets.iter().enumerate() {
        let mut r = pad(row);
        r[n + t] = -Scalar::one();
        lp.add_constraint(r, Relation::Ge, Scalar::zero()).ok()?;
        lp.add_sparse(&[(n + t, -Scalar::one())], Relation::Ge, -Scalar::one())
            .ok()?;
    }
    let mut obj = vec![Scalar::zero(); width];
    for t in 0..targets.len() {
        obj[n + t] = Scalar::one();
    }
    lp.set_objective(Sense::Maximize, obj).ok()?;
    let LpOutcome::Feasible { assignment, .. } = lp.solve() else {
        return None;
    };
    let p = assignment[..n].to_vec();
    let settled: Vec<usize> = targets
        .iter()
        .enumerate()
        .filter(|(_, row)| {
            row.iter()
                .zip(&p)
                .map(|(a, b)| a * b)
                .sum::<Scalar>()
                .is_positive()
        })
        .map(|(t, _)| t)
        .collect();
    Some((p, settled))
}

/// Builds an expectation representing a `rel`-coherent system: indifferent
/// pairs get equal series, strict pairs lexicographically ordered series.
/// Under weak dominance every state also gets lexicographically positive
/// weight.
///
/// A one-level (real-valued) expectation is returned whenever one exists,
/// which for finite coherent systems is always the case. Use
/// [`represent_layered`] for the stratified construction.
pub fn represent(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
) -> Result<LexExpectation, RepresentationError> {
    if !decide_coherence(sys, rel)?.is_coherent() {
        return Err(RepresentationError::Incoherent(rel));
    }
    if let Some(p) = single_level(&pairs(sys), sys.space().len(), rel) {
        return LexExpectation::new(sys.space(), vec![p]);
    }
    layered(sys, rel)
}

/// Stratified construction: each level settles as many remaining strict
/// judgments as possible, then (under weak dominance) further levels give
/// weight to states that still have none.
pub fn represent_layered(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
) -> Result<LexExpectation, RepresentationError> {
    if !decide_coherence(sys, rel)?.is_coherent() {
        return Err(RepresentationError::Incoherent(rel));
    }
    layered(sys, rel)
}

fn layered(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
) -> Result<LexExpectation, RepresentationError> {
    let space = sys.space();
    let n = space.len();
    let pairs = pairs(sys);
    if fits(&pairs, &uniform(n)) {
        return LexExpectation::new(space, vec![uniform(n)]);
    }
    let mut levels: Vec<Vec<Scalar>> = Vec::new();
    let mut unsettled: Vec<(usize, Gamble)> = pairs.strict.clone();
    let mut zero_states: BTreeSet<usize> = (0..n).collect();
    let update_zero = |zero: &mut BTreeSet<usize>, p: &[Scalar]| {
        zero.retain(|&w| p[w].is_zero());
    };

    while !unsettled.is_empty() {
        let level = levels.len();
        let targets: Vec<Vec<Scalar>> =
            unsettled.iter().map(|(_, d)| d.values().to_vec()).collect();
        let stalled = || RepresentationError::Stalled {
            level,
            blocked: unsettled.iter().map(|(k, _)| *k).collect(),
        };
        let (p, settled) = layer(
            n,
            &zero_states,
            level == 0,
            &pairs.indifferent,
            &targets,
            &targets,
        )
        .ok_or_else(stalled)?;
        if settled.is_empty() {
            return Err(stalled());
        }
        let p = if level == 0 { normalize(p) } else { p };
        log::debug!("level {level} settles {} strict judgments", settled.len());
        update_zero(&mut zero_states, &p);
        let settled: BTreeSet<usize> = settled.into_iter().collect();
        unsettled = unsettled
            .into_iter()
            .enumerate()
            .filter(|(t, _)| !settled.contains(t))
            .map(|(_, u)| u)
            .collect();
        levels.push(p);
    }
    if levels.is_empty() {
        // No strict judgments: level 0 only has to respect indifferences.
        let (p, _) = layer(n, &zero_states, true, &pairs.indifferent, &[], &[])
            .ok_or(RepresentationError::Incoherent(rel))?;
        let p = normalize(p);
        update_zero(&mut zero_states, &p);
        levels.push(p);
    }

    if rel == DominanceRelation::Weak {
        while !zero_states.is_empty() {
            let level = levels.len();
            let targets: Vec<Vec<Scalar>> = zero_states
                .iter()
                .map(|&w| {
                    let mut e = vec![Scalar::zero(); n];
                    e[w] = Scalar::one();
                    e
                })
                .collect();
            let blocked = || RepresentationError::ZeroStates {
                level,
                blocked: zero_states
                    .iter()
                    .map(|&w| space.name(w).to_string())
                    .collect(),
            };
            let (p, settled) = layer(n, &zero_states, false, &pairs.indifferent, &[], &targets)
                .ok_or_else(blocked)?;
            if settled.is_empty() {
                return Err(blocked());
            }
            log::debug!(
                "level {level} gives weight to {} null states",
                settled.len()
            );
            update_zero(&mut zero_states, &p);
            levels.push(p);
        }
    }
    LexExpectation::new(space, levels)
}

/// Closed-form expectation whose singleton values follow the ordered classes
/// `C_1 ≻ C_2 ≻ …`: level 0 is uniform on `C_1` and level `j` is
/// `1_{C_{j+1}} − (|C_{j+1}| / |C_1|)·1_{C_1}`.
pub fn elementary_probability<S: AsRef<str>>(
    space: &Arc<StateSpace>,
    classes: &[Vec<S>],
) -> Result<LexExpectation, RepresentationError> {
    let n = space.len();
    let mut seen = vec![false; n];
    let mut idx: Vec<Vec<usize>> = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(RepresentationError::EmptyClass(c));
        }
        let mut members = Vec::new();
        for s in class {
            let w = space.index_of(s.as_ref())?;
            if std::mem::replace(&mut seen[w], true) {
                return Err(RepresentationError::NotAPartition);
            }
            members.push(w);
        }
        idx.push(members);
    }
    if idx.is_empty() || seen.iter().any(|s| !s) {
        return Err(RepresentationError::NotAPartition);
    }
    let top = &idx[0];
    let top_len = top.len() as i64;
    let mut levels = Vec::with_capacity(idx.len());
    let mut p0 = vec![Scalar::zero(); n];
    for &w in top {
        p0[w] = Scalar::ratio(1, top_len);
    }
    levels.push(p0);
    for class in &idx[1..] {
        let mut p = vec![Scalar::zero(); n];
        let share = Scalar::ratio(class.len() as i64, top_len);
        for &w in top {
            p[w] = -share.clone();
        }
        for &w in class {
            p[w] = Scalar::one();
        }
        levels.push(p);
    }
    LexExpectation::new(space, levels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub invariants: Option<String>,
    pub normalization: bool,
    pub linearity: Vec<String>,
    pub monotonicity: Vec<String>,
    pub increase: Vec<String>,
    pub contract: Vec<String>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.invariants.is_none()
            && self.normalization
            && self.linearity.is_empty()
            && self.monotonicity.is_empty()
            && self.increase.is_empty()
            && self.contract.is_empty()
    }
}

const SEED: u64 = 0x5eed;

fn random_gamble(space: &Arc<StateSpace>, rng: &mut StdRng, lo: i64, hi: i64) -> Gamble {
    let values = (0..space.len())
        .map(|_| Scalar::ratio(rng.gen_range(lo..=hi), rng.gen_range(1..=3)))
        .collect();
    Gamble::new(space, values).expect("length matches")
}

/// Checks normalization, linearity, monotonicity, strict increase under
/// `rel`, and the representation contract on every judged pair.
pub fn verify_axioms(
    e: &LexExpectation,
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    samples: usize,
) -> AxiomReport {
    verify_axioms_seeded(e, sys, rel, samples, SEED)
}

pub fn verify_axioms_seeded(
    e: &LexExpectation,
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    let space = e.space();
    let mut rng = StdRng::seed_from_u64(seed);
    let ev = |f: &Gamble| e.evaluate(f).expect("same space");
    let cmp = |a: &HahnSeries, b: &HahnSeries| a.try_cmp(b).expect("one field");

    let normalization =
        ev(&Gamble::one(space)) == HahnSeries::one(crate::algebra::ExponentGroup::Int);

    let mut linearity = Vec::new();
    for _ in 0..samples {
        let f = random_gamble(space, &mut rng, -4, 4);
        let g = random_gamble(space, &mut rng, -4, 4);
        let r = Scalar::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4));
        let s = Scalar::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4));
        let lhs = ev(&Gamble::combine(&r, &f, &s, &g).expect("same space"));
        let rhs = &ev(&f).scale(&r).expect("one field") + &ev(&g).scale(&s).expect("one field");
        if lhs != rhs {
            linearity.push(format!("E({r}·{f} + {s}·{g}) = {lhs}, expected {rhs}"));
        }
    }

    let mut monotonicity = Vec::new();
    let mut increase = Vec::new();
    let mut dominating: Vec<(Gamble, Gamble)> = Vec::new();
    for _ in 0..samples {
        let g = random_gamble(space, &mut rng, -4, 4);
        let bump = random_gamble(space, &mut rng, 0, 3);
        let f = g.try_add(&bump).expect("same space");
        dominating.push((f, g));
    }
    for w in 0..space.len() {
        let g = random_gamble(space, &mut rng, -4, 4);
        let f = g.try_add(&Gamble::point(space, w)).expect("same space");
        dominating.push((f, g));
    }
    for (f, g) in &dominating {
        let (ef, eg) = (ev(f), ev(g));
        if cmp(&ef, &eg) == Ordering::Less {
            monotonicity.push(format!("{f} ≥ {g} but E = {ef} < {eg}"));
        }
        let strictly = dominates(f, g, rel).unwrap_or(false);
        if strictly && cmp(&ef, &eg) != Ordering::Greater {
            increase.push(format!("{f} {rel}-dominates {g} but E = {ef} ≤ {eg}"));
        }
    }

    let mut contract = Vec::new();
    for (k, j) in sys.judgments().iter().enumerate() {
        let ef = ev(&sys.gambles()[&j.better]);
        let eg = ev(&sys.gambles()[&j.worse]);
        let ord = cmp(&ef, &eg);
        let ok = if sys.is_strict(k) {
            ord == Ordering::Greater
        } else {
            ord == Ordering::Equal
        };
        if !ok {
            contract.push(format!(
                "judgment {k} ({} ≿ {}): E = {ef} vs {eg}",
                j.better, j.worse
            ));
        }
    }

    AxiomReport {
        invariants: e.check_invariants().err().map(|x| x.to_string()),
        normalization,
        linearity,
        monotonicity,
        increase,
        contract,
    }
}
