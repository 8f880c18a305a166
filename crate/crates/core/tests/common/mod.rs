//! Generators and independent oracles shared by the integration tests and
//! the acceptance runner.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::Arc;

use indexmap::IndexMap;
use lexpect::algebra::{Exponent, Scalar};
use lexpect::coherence::{Judgment, JudgmentSystem};
use lexpect::gambles::{DominanceRelation, Gamble, StateSpace};
use lexpect::hahn::HahnSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ratio(rng: &mut StdRng, lo: i64, hi: i64, max_den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

pub fn positive_ratio(rng: &mut StdRng, max: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(1..=max), rng.gen_range(1..=max))
}

/// Element of `Q(√2)` with small parts.
pub fn sqrt2_scalar(rng: &mut StdRng) -> Scalar {
    let a = ratio(rng, -4, 4, 3);
    let b = ratio(rng, -4, 4, 3);
    &a + &(&b * &Scalar::sqrt(2).unwrap())
}

pub fn space(n: usize) -> Arc<StateSpace> {
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    StateSpace::new(names).unwrap()
}

pub fn integer_gamble(space: &Arc<StateSpace>, rng: &mut StdRng, lo: i64, hi: i64) -> Gamble {
    let values = (0..space.len())
        .map(|_| Scalar::int(rng.gen_range(lo..=hi)))
        .collect();
    Gamble::new(space, values).unwrap()
}

/// Random system with up to `max_states` states, a few named integer
/// gambles and up to `max_judgments` judgments, some of them reversed into
/// indifferences.
pub fn random_system(rng: &mut StdRng, max_states: usize, max_judgments: usize) -> JudgmentSystem {
    let n = rng.gen_range(1..=max_states);
    let sp = space(n);
    let k = rng.gen_range(2..=4);
    let mut gambles = IndexMap::new();
    for i in 0..k {
        gambles.insert(format!("g{i}"), integer_gamble(&sp, rng, -2, 2));
    }
    let names: Vec<String> = gambles.keys().cloned().collect();
    let mut sys = JudgmentSystem::new(sp, gambles, []).unwrap();
    let m = rng.gen_range(0..=max_judgments);
    let mut tries = 0;
    while sys.judgments().len() < m && tries < 50 {
        tries += 1;
        let a = names.choose(rng).unwrap();
        let b = names.choose(rng).unwrap();
        if a == b {
            continue;
        }
        sys.add_judgment(Judgment::new(a.as_str(), b.as_str()))
            .unwrap();
        if sys.judgments().len() < m && rng.gen_bool(0.25) {
            sys.add_judgment(Judgment::new(b.as_str(), a.as_str()))
                .unwrap();
        }
    }
    sys
}

/// System generated from a hidden real expectation `p`: every judgment it
/// contains agrees with `p`, so it is coherent under every relation when
/// `p` is strictly positive.
pub fn system_from_prices(
    rng: &mut StdRng,
    n_states: usize,
    n_gambles: usize,
    n_judgments: usize,
) -> (JudgmentSystem, Vec<Scalar>) {
    let sp = space(n_states);
    let weights: Vec<i64> = (0..n_states).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    let p: Vec<Scalar> = weights.iter().map(|&w| Scalar::ratio(w, total)).collect();
    let mut gambles = IndexMap::new();
    for i in 0..n_gambles {
        gambles.insert(format!("g{i}"), integer_gamble(&sp, rng, -3, 3));
    }
    let value = |g: &Gamble| -> Scalar { g.values().iter().zip(&p).map(|(a, b)| a * b).sum() };
    let names: Vec<String> = gambles.keys().cloned().collect();
    let vals: Vec<Scalar> = names.iter().map(|k| value(&gambles[k])).collect();
    let mut sys = JudgmentSystem::new(sp, gambles, []).unwrap();
    let mut tries = 0;
    while sys.judgments().len() < n_judgments && tries < 50 {
        tries += 1;
        let i = rng.gen_range(0..names.len());
        let j = rng.gen_range(0..names.len());
        if i == j {
            continue;
        }
        match vals[i].cmp(&vals[j]) {
            Ordering::Greater => {
                sys.add_judgment(Judgment::new(names[i].as_str(), names[j].as_str()))
                    .unwrap();
            }
            Ordering::Equal => {
                sys.add_indifference(&names[i], &names[j]).unwrap();
            }
            Ordering::Less => {
                sys.add_judgment(Judgment::new(names[j].as_str(), names[i].as_str()))
                    .unwrap();
            }
        }
    }
    (sys, p)
}

/// Strictness computed from the judgment list alone.
pub fn strict_by_names(sys: &JudgmentSystem, k: usize) -> bool {
    let j = &sys.judgments()[k];
    j.better != j.worse
        && !sys
            .judgments()
            .iter()
            .any(|o| o.better == j.worse && o.worse == j.better)
}

/// Checks the incoherence conditions for weights `lambda` directly from the
/// definitions, without the library's dominance or witness code.
pub fn weights_show_incoherence(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    lambda: &[Scalar],
) -> bool {
    if lambda.iter().all(Scalar::is_zero) || lambda.iter().any(Scalar::is_negative) {
        return false;
    }
    let n = sys.space().len();
    let mut net = vec![Scalar::zero(); n];
    for (k, l) in lambda.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let j = &sys.judgments()[k];
        let f = &sys.gambles()[&j.better];
        let g = &sys.gambles()[&j.worse];
        for (w, slot) in net.iter_mut().enumerate() {
            *slot = &*slot + &(l * &(g.value(w) - f.value(w)));
        }
    }
    if net.iter().any(Scalar::is_negative) {
        return false;
    }
    let c3 = lambda
        .iter()
        .enumerate()
        .any(|(k, l)| l.is_positive() && strict_by_names(sys, k));
    let c4 = match rel {
        DominanceRelation::Weak => net.iter().any(Scalar::is_positive),
        DominanceRelation::Uniform | DominanceRelation::Simple => {
            net.iter().all(Scalar::is_positive)
        }
    };
    c3 || c4
}

/// Searches weights in `{0, …, max}` for an incoherence witness.
pub fn grid_witness(sys: &JudgmentSystem, rel: DominanceRelation, max: i64) -> Option<Vec<Scalar>> {
    let m = sys.judgments().len();
    let base = (max + 1) as usize;
    let total = base.pow(m as u32);
    for code in 1..total {
        let mut c = code;
        let lambda: Vec<Scalar> = (0..m)
            .map(|_| {
                let v = (c % base) as i64;
                c /= base;
                Scalar::int(v)
            })
            .collect();
        if weights_show_incoherence(sys, rel, &lambda) {
            return Some(lambda);
        }
    }
    None
}

/// Sign of `a + b√d` from rational enclosures of `√d`, refined until the
/// enclosure excludes zero.
pub fn sign_by_enclosure(a: &BigRational, b: &BigRational, d: u32) -> Ordering {
    if b.is_zero() {
        return a.cmp(&BigRational::zero());
    }
    let dd = BigRational::from_integer(BigInt::from(d));
    let mut lo = BigRational::zero();
    let mut hi = dd.clone() + BigRational::from_integer(BigInt::from(1));
    loop {
        let (x, y) = if b.is_positive() {
            (a + b * &lo, a + b * &hi)
        } else {
            (a + b * &hi, a + b * &lo)
        };
        if x.is_positive() {
            return Ordering::Greater;
        }
        if y.is_negative() {
            return Ordering::Less;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if &mid * &mid <= dd {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

pub fn int_series(rng: &mut StdRng, max_terms: usize) -> HahnSeries {
    let k = rng.gen_range(0..=max_terms);
    HahnSeries::from_terms(
        (0..k).map(|_| (Exponent::Int(rng.gen_range(-3..=3)), ratio(rng, -4, 4, 3))),
    )
    .unwrap()
}

pub fn rat_series(rng: &mut StdRng, max_terms: usize) -> HahnSeries {
    let k = rng.gen_range(0..=max_terms);
    HahnSeries::from_terms((0..k).map(|_| {
        (
            Exponent::rat(rng.gen_range(-4..=4), rng.gen_range(1..=3)),
            sqrt2_scalar(rng),
        )
    }))
    .unwrap()
}

/// All total preorders on `{0, …, n−1}` as ordered lists of classes.
pub fn ordered_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(rest: &[usize]) -> Vec<Vec<Vec<usize>>> {
        if rest.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let k = rest.len();
        // choose a nonempty first class by bitmask
        for mask in 1u32..(1 << k) {
            let first: Vec<usize> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| rest[i])
                .collect();
            let others: Vec<usize> = (0..k)
                .filter(|i| mask >> i & 1 == 0)
                .map(|i| rest[i])
                .collect();
            for mut tail in go(&others) {
                tail.insert(0, first.clone());
                out.push(tail);
            }
        }
        out
    }
    go(&(0..n).collect::<Vec<_>>())
}

/// Singleton-indicator system realizing the ordered classes: every pair of
/// distinct states is judged according to its classes.
pub fn preorder_system(n: usize, classes: &[Vec<usize>]) -> JudgmentSystem {
    let sp = space(n);
    let mut gambles = IndexMap::new();
    for w in 0..n {
        gambles.insert(sp.name(w).to_string(), Gamble::point(&sp, w));
    }
    let rank = |w: usize| classes.iter().position(|c| c.contains(&w)).unwrap();
    let mut judgments = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && rank(x) <= rank(y) {
                judgments.push(Judgment::new(sp.name(x), sp.name(y)));
            }
        }
    }
    JudgmentSystem::new(sp, gambles, judgments).unwrap()
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

pub fn ring_laws(f: &HahnSeries, g: &HahnSeries, h: &HahnSeries) -> Result<(), String> {
    let one = HahnSeries::one(lexpect::algebra::ExponentGroup::Int);
    ensure(&(f + g) + h == f + &(g + h), "additive associativity")?;
    ensure(f + g == g + f, "additive commutativity")?;
    ensure(f + &HahnSeries::zero() == *f, "additive identity")?;
    ensure((f + &(-f)).is_zero(), "additive inverse")?;
    ensure(&(f * g) * h == f * &(g * h), "multiplicative associativity")?;
    ensure(f * g == g * f, "multiplicative commutativity")?;
    ensure(f * &(g + h) == &(f * g) + &(f * h), "distributivity")?;
    if f.group()
        .is_none_or(|gr| gr == lexpect::algebra::ExponentGroup::Int)
    {
        ensure(f * &one == *f, "multiplicative identity")?;
    }
    Ok(())
}

/// `f ≤ g ⟺ αf + h ≤ αg + h` for a positive scalar `α`, and the same with
/// a positive series multiplier.
pub fn order_laws(
    f: &HahnSeries,
    g: &HahnSeries,
    h: &HahnSeries,
    alpha: &Scalar,
    pos: &HahnSeries,
) -> Result<(), String> {
    let before = f.cmp(g);
    let fa = &f.scale(alpha).unwrap() + h;
    let ga = &g.scale(alpha).unwrap() + h;
    ensure(fa.cmp(&ga) == before, "scalar affine invariance")?;
    if pos.signum() == Ordering::Greater {
        ensure((pos * f).cmp(&(pos * g)) == before, "positive multiplier")?;
    }
    ensure(
        f.cmp(g) == (f - g).signum(),
        "order from sign of difference",
    )?;
    Ok(())
}

pub fn sign_law(f: &HahnSeries) -> Result<(), String> {
    let expected = f
        .leading_coefficient()
        .map_or(Ordering::Equal, |c| c.signum());
    ensure(f.signum() == expected, "sign from leading coefficient")?;
    ensure(
        f.cmp(&HahnSeries::zero()) == expected,
        "comparison with zero",
    )
}

pub fn truncation_laws(
    f: &HahnSeries,
    g: &HahnSeries,
    a: &Scalar,
    b: &Scalar,
    xi: &Exponent,
) -> Result<(), String> {
    let t = |s: &HahnSeries| s.truncate(xi).unwrap();
    let combo = &f.scale(a).unwrap() + &g.scale(b).unwrap();
    ensure(
        t(&combo) == &t(f).scale(a).unwrap() + &t(g).scale(b).unwrap(),
        "truncation linearity",
    )?;
    ensure(t(&t(f)) == t(f), "truncation idempotence")?;
    ensure(
        t(f).support().all(|e| e < xi),
        "truncated support below cut",
    )?;
    ensure(
        f.support().filter(|e| *e < xi).count() == t(f).terms().len(),
        "terms below cut kept",
    )
}

/// Truncated inverse round trip: `trunc(f·g, order + lead(f)) = 1`.
pub fn inverse_law(f: &HahnSeries, order: &Exponent) -> Result<(), String> {
    let Some(lead) = f.leading_exponent().cloned() else {
        return ensure(f.inverse_truncated(order).is_err(), "zero has no inverse");
    };
    if order <= &-lead.clone() {
        return ensure(
            f.inverse_truncated(order).is_err(),
            "order too low is rejected",
        );
    }
    let g = f.inverse_truncated(order).map_err(|e| e.to_string())?;
    let cut = order + &lead;
    let one = HahnSeries::one(lead.group());
    ensure(
        (f * &g).truncate(&cut).unwrap() == one,
        "inverse round trip",
    )?;
    let below = g.support().all(|e| e < order);
    ensure(below, "inverse support below order")
}

/// Level-by-level values of `f`, computed directly from the stored levels.
pub fn level_values(levels: &[Vec<Scalar>], f: &Gamble) -> Vec<Scalar> {
    levels
        .iter()
        .map(|p| p.iter().zip(f.values()).map(|(a, b)| a * b).sum())
        .collect()
}

/// Checks that `levels` orders every judged pair as the system does,
/// comparing level vectors lexicographically.
pub fn contract_holds(levels: &[Vec<Scalar>], sys: &JudgmentSystem) -> Result<(), String> {
    for (k, j) in sys.judgments().iter().enumerate() {
        let a = level_values(levels, &sys.gambles()[&j.better]);
        let b = level_values(levels, &sys.gambles()[&j.worse]);
        let want = if strict_by_names(sys, k) {
            Ordering::Greater
        } else {
            Ordering::Equal
        };
        if a.cmp(&b) != want {
            return Err(format!(
                "judgment {} over {} not represented",
                j.better, j.worse
            ));
        }
    }
    Ok(())
}

/// Random combinations `Σ λ_k (better_k − worse_k)` with `λ ≥ 0` must get a
/// lexicographically nonnegative value, positive when a strict judgment
/// has positive weight.
pub fn span_check(
    levels: &[Vec<Scalar>],
    sys: &JudgmentSystem,
    rng: &mut StdRng,
    count: usize,
) -> Result<(), String> {
    let m = sys.judgments().len();
    if m == 0 {
        return Ok(());
    }
    let zero = vec![Scalar::zero(); levels.len()];
    for _ in 0..count {
        let lambda: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=3)).collect();
        let mut total = zero.clone();
        for (k, l) in lambda.iter().enumerate() {
            let j = &sys.judgments()[k];
            let a = level_values(levels, &sys.gambles()[&j.better]);
            let b = level_values(levels, &sys.gambles()[&j.worse]);
            for i in 0..levels.len() {
                total[i] = &total[i] + &(&Scalar::int(*l) * &(&a[i] - &b[i]));
            }
        }
        let strict = lambda
            .iter()
            .enumerate()
            .any(|(k, l)| *l > 0 && strict_by_names(sys, k));
        let want = if strict {
            Ordering::Greater
        } else {
            Ordering::Equal
        };
        let got = total.cmp(&zero);
        if got != want {
            return Err(format!("combination {lambda:?} gives {got:?}"));
        }
    }
    Ok(())
}
