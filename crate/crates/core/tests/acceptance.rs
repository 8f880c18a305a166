//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::cmp::Ordering;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use lexpect::algebra::{Exponent, ExponentGroup, Scalar};
use lexpect::cli::{run_args, EXIT_INCOHERENT, EXIT_OK};
use lexpect::coherence::{
    decide_coherence, example42_harness, verify_witness, Branch, CoherenceVerdict,
    Example42Fragment, Judgment, JudgmentSystem,
};
use lexpect::document::SystemDocument;
use lexpect::extension::admissible_interval;
use lexpect::gambles::{DominanceRelation, Gamble};
use lexpect::hahn::{embed_lex_vectors, HahnSeries};
use lexpect::representation::{elementary_probability, represent, verify_axioms, LexExpectation};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "examples", name]
        .iter()
        .collect()
}

fn load(name: &str) -> JudgmentSystem {
    SystemDocument::from_path(&example(name))
        .unwrap()
        .system()
        .unwrap()
}

const ALL: [DominanceRelation; 3] = DominanceRelation::ALL;
const WEAK: DominanceRelation = DominanceRelation::Weak;

fn witness_lambda(sys: &JudgmentSystem, verdict: &CoherenceVerdict) -> Option<Vec<Scalar>> {
    let w = verdict.witness()?;
    let mut lambda = vec![Scalar::zero(); sys.judgments().len()];
    for (i, c) in &w.terms {
        lambda[*i] = c.clone();
    }
    Some(lambda)
}

fn incoherent_with(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    branch: Branch,
    weights: &[i64],
) -> Result<(), String> {
    let v = decide_coherence(sys, rel).map_err(|e| e.to_string())?;
    let w = v.witness().ok_or_else(|| format!("coherent under {rel}"))?;
    ensure(w.branch == branch, || {
        format!("branch {:?} under {rel}", w.branch)
    })?;
    let want: Vec<Scalar> = weights.iter().map(|&c| Scalar::int(c)).collect();
    ensure(witness_lambda(sys, &v).unwrap() == want, || {
        format!("weights {:?} under {rel}", w.terms)
    })?;
    ensure(verify_witness(sys, rel, w).is_ok(), || {
        format!("witness fails under {rel}")
    })?;
    ensure(
        common::weights_show_incoherence(sys, rel, &witness_lambda(sys, &v).unwrap()),
        || format!("oracle rejects witness under {rel}"),
    )
}

fn coherent(sys: &JudgmentSystem, rel: DominanceRelation) -> bool {
    decide_coherence(sys, rel).unwrap().is_coherent()
}

fn cli_code(file: &str, rel: DominanceRelation) -> i32 {
    let path = example(file);
    run_args([
        "lexpect",
        "check",
        "--input",
        path.to_str().unwrap(),
        "--relation",
        rel.as_str(),
    ])
    .code
}

fn sure_loss_and_null_events() -> Outcome {
    let sure = load("sure_loss.json");
    let null = load("null_event.json");
    let bets = load("coin_bets.json");
    let fair = load("coin_bets_indifferent.json");
    for rel in ALL {
        incoherent_with(&sure, rel, Branch::C4, &[1])?;
        incoherent_with(&bets, rel, Branch::C3, &[1, 1])?;
        ensure(coherent(&fair, rel), || {
            format!("fair bets incoherent under {rel}")
        })?;
        ensure(cli_code("sure_loss.json", rel) == EXIT_INCOHERENT, || {
            "cli sure loss".into()
        })?;
        ensure(cli_code("coin_bets.json", rel) == EXIT_INCOHERENT, || {
            "cli bets".into()
        })?;
        ensure(
            cli_code("coin_bets_indifferent.json", rel) == EXIT_OK,
            || "cli fair bets".into(),
        )?;
    }
    let v = decide_coherence(&null, WEAK).unwrap();
    let w = v.witness().ok_or("null event weak-coherent")?;
    ensure(verify_witness(&null, WEAK, w).is_ok(), || {
        "null witness".into()
    })?;
    ensure(
        common::weights_show_incoherence(&null, WEAK, &witness_lambda(&null, &v).unwrap()),
        || "null oracle".into(),
    )?;
    for rel in [DominanceRelation::Uniform, DominanceRelation::Simple] {
        ensure(coherent(&null, rel), || {
            format!("null event incoherent under {rel}")
        })?;
        ensure(cli_code("null_event.json", rel) == EXIT_OK, || {
            "cli null".into()
        })?;
    }
    ensure(cli_code("null_event.json", WEAK) == EXIT_INCOHERENT, || {
        "cli null weak".into()
    })?;
    Ok("3 systems x 3 relations, library and cli".into())
}

fn rat(s: &Scalar) -> BigRational {
    s.as_rational().unwrap().clone()
}

/// `c1·g1 + c2·g2` at `q = c1/c2` in closed form: `±c2·(1/2 − (√2/4)·q)`,
/// `+` above `√2` and `−` below.
fn expected_violation(c2: &BigRational, q: &BigRational) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let above = q * q > two;
    let (a, b) = (c2 / &two, -(c2 * q / &four));
    if above {
        (a, b)
    } else {
        (-a, -b)
    }
}

fn irrational_split_harness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..100 {
        let c1 = common::positive_ratio(&mut rng, 30);
        let c2 = common::positive_ratio(&mut rng, 30);
        let frag = example42_harness(&c1, &c2, &[]).map_err(|e| e.to_string())?;
        let Example42Fragment::Violation { state, value } = frag else {
            return Err(format!("no violation for ({c1}, {c2})"));
        };
        let q = &rat(&c1) / &rat(&c2);
        ensure(rat(&state) == q, || {
            format!("state {state} for ({c1}, {c2})")
        })?;
        let (a, b) = expected_violation(&rat(&c2), &q);
        ensure(value.parts() == (a.clone(), b.clone()), || {
            format!("value {value} for ({c1}, {c2})")
        })?;
        ensure(
            common::sign_by_enclosure(&a, &b, 2) == Ordering::Less,
            || format!("nonnegative at ({c1}, {c2})"),
        )?;
    }
    let states: Vec<Scalar> = (0..60)
        .map(|_| common::positive_ratio(&mut rng, 40))
        .collect();
    let frag = example42_harness(&Scalar::sqrt(2).unwrap(), &Scalar::one(), &states)
        .map_err(|e| e.to_string())?;
    let Example42Fragment::Sampled {
        values,
        all_positive,
    } = frag
    else {
        return Err("irrational weights gave a violation".into());
    };
    ensure(all_positive && values.len() == 60, || {
        "sampled positivity".into()
    })?;
    for (q, v) in &values {
        let (a, b) = v.parts();
        ensure(
            common::sign_by_enclosure(&a, &b, 2) == Ordering::Greater,
            || format!("value {v} at {q}"),
        )?;
    }
    Ok("100 rational weight pairs, 60 states for (sqrt(2), 1)".into())
}

fn factorial_truncation() -> Outcome {
    let mut fact = 1i64;
    let mut terms = Vec::new();
    for n in 0..12 {
        if n > 0 {
            fact *= n;
        }
        terms.push((Exponent::Int(n), Scalar::int(fact)));
        let partial = HahnSeries::from_terms(terms.clone()).unwrap();
        let cut = partial.truncate(&Exponent::Int(3)).unwrap();
        let want = HahnSeries::from_terms(
            [0, 1, 2]
                .into_iter()
                .zip([1, 1, 2])
                .map(|(e, c)| (Exponent::Int(e), Scalar::int(c))),
        )
        .unwrap();
        if n >= 2 {
            ensure(cut == want, || format!("got {cut} with {} terms", n + 1))?;
        }
    }
    Ok("1 + ε + 2ε^2 for every partial sum".into())
}

fn hahn_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let n = 1000;
    for i in 0..n {
        let series = |rng: &mut StdRng| {
            if i % 2 == 0 {
                common::int_series(rng, 4)
            } else {
                common::rat_series(rng, 4)
            }
        };
        let (f, g, h, p) = (
            series(&mut rng),
            series(&mut rng),
            series(&mut rng),
            series(&mut rng),
        );
        let alpha = common::positive_ratio(&mut rng, 6);
        let (a, b) = (
            common::ratio(&mut rng, -4, 4, 3),
            common::ratio(&mut rng, -4, 4, 3),
        );
        let xi = if i % 2 == 0 {
            Exponent::Int(rng.gen_range(-3..=3))
        } else {
            Exponent::rat(rng.gen_range(-6..=6), 3)
        };
        let order = if i % 2 == 0 {
            Exponent::Int(rng.gen_range(-2..=6))
        } else {
            Exponent::rat(rng.gen_range(-4..=12), 2)
        };
        common::ring_laws(&f, &g, &h).map_err(|m| format!("case {i}: {m}"))?;
        common::order_laws(&f, &g, &h, &alpha, &p).map_err(|m| format!("case {i}: {m}"))?;
        common::sign_law(&f).map_err(|m| format!("case {i}: {m}"))?;
        common::truncation_laws(&f, &g, &a, &b, &xi).map_err(|m| format!("case {i}: {m}"))?;
        common::inverse_law(&f, &order).map_err(|m| format!("case {i}: {m}"))?;
    }
    Ok(format!("{n} cases per law family"))
}

fn coherence_cross_validation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut coherent_n, mut incoherent_n) = (0, 0);
    for i in 0..300 {
        let sys = common::random_system(&mut rng, 3, 3);
        let mut uniform_incoherent = false;
        for rel in ALL {
            let v = decide_coherence(&sys, rel).map_err(|e| e.to_string())?;
            match &v {
                CoherenceVerdict::Coherent => {
                    coherent_n += 1;
                    ensure(common::grid_witness(&sys, rel, 3).is_none(), || {
                        format!("system {i}: grid witness under {rel}")
                    })?;
                }
                CoherenceVerdict::Incoherent(w) => {
                    incoherent_n += 1;
                    ensure(verify_witness(&sys, rel, w).is_ok(), || {
                        format!("system {i}: witness under {rel}")
                    })?;
                    ensure(
                        common::weights_show_incoherence(
                            &sys,
                            rel,
                            &witness_lambda(&sys, &v).unwrap(),
                        ),
                        || format!("system {i}: oracle under {rel}"),
                    )?;
                    if rel == DominanceRelation::Uniform {
                        uniform_incoherent = true;
                    }
                }
            }
            if rel == WEAK && uniform_incoherent {
                ensure(!v.is_coherent(), || {
                    format!("system {i}: uniform-incoherent but weak-coherent")
                })?;
            }
        }
    }
    Ok(format!(
        "300 systems, {coherent_n} coherent and {incoherent_n} incoherent verdicts"
    ))
}

fn priced(sys: &JudgmentSystem, f: &Gamble, p: &Scalar) -> JudgmentSystem {
    let mut ext = sys.clone();
    ext.add_gamble("target", f.clone()).unwrap();
    ext.add_gamble("target_price", Gamble::constant(sys.space(), p.clone()))
        .unwrap();
    ext.add_judgment(Judgment::new("target", "target_price"))
        .unwrap();
    ext.add_judgment(Judgment::new("target_price", "target"))
        .unwrap();
    ext
}

fn extension_sandwich() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut checks = 0;
    for i in 0..120 {
        let n = rng.gen_range(2..=4);
        let (sys, _) = common::system_from_prices(&mut rng, n, 3, 3);
        let f = common::integer_gamble(sys.space(), &mut rng, -3, 3);
        let rel = ALL[i % 3];
        let iv = admissible_interval(&sys, "target", &f, rel).map_err(|e| e.to_string())?;
        let at = |p: &Scalar| coherent(&priced(&sys, &f, p), rel);
        let width = &iv.upper - &iv.lower;
        let mut interior = Vec::new();
        if width.is_positive() {
            for (n, d) in [(1, 2), (1, 3), (9, 10), (1, 100)] {
                interior.push(&iv.lower + &(&width * &Scalar::ratio(n, d)));
            }
        }
        for p in &interior {
            ensure(at(p), || format!("system {i}: interior price {p} rejected"))?;
        }
        for off in [Scalar::one(), Scalar::ratio(1, 5), Scalar::ratio(1, 1000)] {
            let (lo, hi) = (&iv.lower - &off, &iv.upper + &off);
            ensure(!at(&lo) && !at(&hi), || {
                format!(
                    "system {i}: exterior price accepted near [{}, {}]",
                    iv.lower, iv.upper
                )
            })?;
            checks += 2;
        }
        ensure(
            at(&iv.lower) == iv.lower_attainable && at(&iv.upper) == iv.upper_attainable,
            || format!("system {i}: endpoint flags"),
        )?;
        checks += interior.len() + 2;
    }
    Ok(format!("120 systems, {checks} priced extensions"))
}

fn representation_ok(
    e: &LexExpectation,
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    samples: usize,
) -> Result<(), String> {
    let report = verify_axioms(e, sys, rel, samples);
    ensure(report.passes(), || format!("{report:?}"))?;
    common::contract_holds(e.levels(), sys)
}

fn representation_contract() -> Outcome {
    let mut preorders = 0;
    for n in 1..=5 {
        let sp = common::space(n);
        for classes in common::ordered_partitions(n) {
            let sys = common::preorder_system(n, &classes);
            // Simple and uniform dominance coincide on finite spaces, so the
            // simple output only needs to match the uniform one.
            let simple = represent(&sys, DominanceRelation::Simple)
                .map_err(|e| format!("{classes:?}: {e}"))?;
            for rel in [DominanceRelation::Uniform, WEAK] {
                let e = represent(&sys, rel).map_err(|e| format!("{classes:?}: {e}"))?;
                representation_ok(&e, &sys, rel, 1000)
                    .map_err(|m| format!("{classes:?} {rel}: {m}"))?;
                if rel == DominanceRelation::Uniform {
                    ensure(e == simple, || {
                        format!("{classes:?}: simple differs from uniform")
                    })?;
                }
            }
            let names: Vec<Vec<String>> = classes
                .iter()
                .map(|c| c.iter().map(|w| format!("s{w}")).collect())
                .collect();
            let e = elementary_probability(&sp, &names).map_err(|e| e.to_string())?;
            let rank = |w: usize| classes.iter().position(|c| c.contains(&w)).unwrap();
            let ev = |m: u32| {
                let v = (0..n).map(|w| Scalar::int(i64::from(m >> w & 1))).collect();
                e.evaluate(&Gamble::new(&sp, v).unwrap()).unwrap()
            };
            for x in 0..n {
                for y in 0..n {
                    ensure(ev(1 << x).cmp(&ev(1 << y)) == rank(y).cmp(&rank(x)), || {
                        format!("{classes:?}: singletons")
                    })?;
                }
            }
            for a in 0u32..(1 << n) {
                for b in 0u32..(1 << n) {
                    if a & b == 0 {
                        ensure(ev(a | b) == &ev(a) + &ev(b), || {
                            format!("{classes:?}: additivity")
                        })?;
                    }
                }
            }
            ensure(
                ev((1 << n) - 1) == HahnSeries::one(ExponentGroup::Int),
                || "total mass".into(),
            )?;
            preorders += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(7);
    let mut random = 0;
    while random < 120 {
        let n = rng.gen_range(1..=4);
        let sys = if random % 2 == 0 {
            common::system_from_prices(&mut rng, n, 4, 5).0
        } else {
            common::random_system(&mut rng, 4, 4)
        };
        let rel = ALL[random % 3];
        if !coherent(&sys, rel) {
            continue;
        }
        let e = represent(&sys, rel).map_err(|e| e.to_string())?;
        representation_ok(&e, &sys, rel, 1000)
            .map_err(|m| format!("random system {random}: {m}"))?;
        common::span_check(e.levels(), &sys, &mut rng, 1000)
            .map_err(|m| format!("random system {random}: {m}"))?;
        random += 1;
    }
    Ok(format!(
        "{preorders} preorders verified under uniform and weak, simple output identical, {random} random systems"
    ))
}

fn archimedean_degeneration() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for i in 0..60 {
        let n = rng.gen_range(2..=4);
        let (sys, _) = common::system_from_prices(&mut rng, n, 4, 4);
        let rel = ALL[i % 3];
        let e = represent(&sys, rel).map_err(|e| e.to_string())?;
        ensure(e.levels().len() == 1, || {
            format!("instance {i}: {} levels", e.levels().len())
        })?;
        let gs: Vec<Gamble> = (0..8)
            .map(|_| common::integer_gamble(sys.space(), &mut rng, -3, 3))
            .collect();
        for f in &gs {
            let sf = e.evaluate(f).unwrap();
            ensure(sf.support().all(|x| *x == Exponent::Int(0)), || {
                format!("instance {i}: support of {sf}")
            })?;
            for g in &gs {
                let real = |h: &Gamble| common::level_values(e.levels(), h).remove(0);
                ensure(
                    sf.cmp(&e.evaluate(g).unwrap()) == real(f).cmp(&real(g)),
                    || format!("instance {i}: order"),
                )?;
            }
        }
    }
    Ok("60 instances".into())
}

fn tuples(d: usize) -> Vec<Vec<i64>> {
    (0..d).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (-2..=2).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

fn lex_embedding() -> Outcome {
    let mut pairs = 0usize;
    for d in 1..=4 {
        let ts = tuples(d);
        let sc = |t: &[i64]| -> Vec<Scalar> { t.iter().map(|&x| Scalar::int(x)).collect() };
        let emb: Vec<HahnSeries> = ts.iter().map(|t| embed_lex_vectors(&sc(t))).collect();
        for (i, t) in ts.iter().enumerate() {
            for cut in 0..=d {
                let zeroed: Vec<i64> = t
                    .iter()
                    .enumerate()
                    .map(|(k, &x)| if k < cut { x } else { 0 })
                    .collect();
                ensure(
                    emb[i].truncate(&Exponent::Int(cut as i64)).unwrap()
                        == embed_lex_vectors(&sc(&zeroed)),
                    || format!("truncation of {t:?} at {cut}"),
                )?;
            }
            for (j, u) in ts.iter().enumerate() {
                ensure(emb[i].cmp(&emb[j]) == t.cmp(u), || {
                    format!("order of {t:?} and {u:?}")
                })?;
                let combo: Vec<i64> = t.iter().zip(u).map(|(a, b)| 3 * a - b).collect();
                ensure(
                    embed_lex_vectors(&sc(&combo))
                        == &emb[i].scale(&Scalar::int(3)).unwrap() - &emb[j],
                    || format!("linearity on {t:?}, {u:?}"),
                )?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} ordered pairs"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "sure loss, null event and coin bet verdicts",
            sure_loss_and_null_events,
        ),
        ("irrational split harness", irrational_split_harness),
        ("factorial series truncation", factorial_truncation),
        ("hahn field laws", hahn_suite),
        ("coherence against grid search", coherence_cross_validation),
        ("extension sandwich", extension_sandwich),
        ("representation contract", representation_contract),
        ("archimedean degeneration", archimedean_degeneration),
        ("lexicographic embedding", lex_embedding),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
