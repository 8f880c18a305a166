//! Command line front end. [`run`] returns the exit code and the text for
//! standard output and standard error, so the binary stays a thin wrapper.
//!
//! Exit codes: 0 success or coherent, 1 incoherent or inadmissible,
//! 2 input error, 3 construction or verification failure.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::Scalar;
use crate::coherence::{
    decide_coherence, example42_harness, verdict_json, CoherenceVerdict, Example42Fragment,
    JudgmentSystem,
};
use crate::document::{DocumentError, HarnessSpec, SystemDocument};
use crate::extension::{admissible_interval, extend_with_price, ExtensionError, PriceInterval};
use crate::gambles::DominanceRelation;
use crate::representation::{represent, represent_layered, verify_axioms, LexExpectation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCOHERENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lexpect",
    version,
    about = "Exact coherence checks and series-valued expectations"
)]
pub struct Cli {
    /// Log progress to standard error (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide coherence and print a witness when incoherent.
    Check(Common),
    /// Admissible prices for the query gamble, optionally testing one price.
    Extend {
        #[command(flatten)]
        common: Common,
        /// Price to test; overrides the document's query price.
        #[arg(long)]
        price: Option<Scalar>,
    },
    /// Build and verify a series-valued expectation.
    Represent {
        #[command(flatten)]
        common: Common,
        /// Return a single real-valued level whenever one exists.
        #[arg(long)]
        single_level: bool,
        /// Random samples per axiom check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Evaluate `c1·g1 + c2·g2` for the pair of gambles split at √2.
    #[command(name = "harness-ex42")]
    HarnessEx42 {
        /// Document with a "harness" section.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        c1: Option<Scalar>,
        #[arg(long)]
        c2: Option<Scalar>,
        /// Comma-separated positive rational states.
        #[arg(long, value_delimiter = ',')]
        states: Vec<Scalar>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// System document (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Dominance relation; defaults to the document's query relation, then uniform.
    #[arg(long)]
    pub relation: Option<DominanceRelation>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn err(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses arguments and runs the command. Argument errors map to exit 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::out(code, text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check(c) => with_system(c, |doc, sys, rel| cmd_check(doc, sys, rel, c.json)),
        Command::Extend { common, price } => with_system(common, |doc, sys, rel| {
            cmd_extend(doc, sys, rel, price.as_ref(), common.json)
        }),
        Command::Represent {
            common,
            single_level,
            samples,
        } => with_system(common, |_, sys, rel| {
            cmd_represent(sys, rel, *single_level, *samples, common.json)
        }),
        Command::HarnessEx42 {
            input,
            c1,
            c2,
            states,
            json,
        } => cmd_harness(input.as_ref(), c1.as_ref(), c2.as_ref(), states, *json),
    }
}

fn with_system(
    c: &Common,
    f: impl FnOnce(&SystemDocument, &JudgmentSystem, DominanceRelation) -> Outcome,
) -> Outcome {
    let doc = match SystemDocument::from_path(&c.input) {
        Ok(d) => d,
        Err(e) => return Outcome::err(EXIT_INPUT, e),
    };
    let sys = match doc.system() {
        Ok(s) => s,
        Err(e) => return Outcome::err(EXIT_INPUT, e),
    };
    let rel = c
        .relation
        .or_else(|| doc.relation())
        .unwrap_or(DominanceRelation::Uniform);
    f(&doc, &sys, rel)
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn verdict_text(sys: &JudgmentSystem, rel: DominanceRelation, v: &CoherenceVerdict) -> String {
    let mut s = String::new();
    match v {
        CoherenceVerdict::Coherent => {
            let _ = writeln!(s, "coherent under {rel} dominance");
        }
        CoherenceVerdict::Incoherent(w) => {
            let _ = write!(s, "incoherent under {rel} dominance (branch {:?}", w.branch);
            if let Some(st) = w.strict_state {
                let _ = write!(s, ", strict at state {}", sys.space().name(st));
            }
            let _ = writeln!(s, ")");
            for (i, c) in &w.terms {
                let j = &sys.judgments()[*i];
                let _ = writeln!(s, "  {c} × [{i}] {} ≿ {}", j.better, j.worse);
            }
        }
    }
    s
}

fn cmd_check(
    _doc: &SystemDocument,
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    json: bool,
) -> Outcome {
    let verdict = match decide_coherence(sys, rel) {
        Ok(v) => v,
        Err(e) => return Outcome::err(EXIT_INPUT, e),
    };
    let code = if verdict.is_coherent() {
        EXIT_OK
    } else {
        EXIT_INCOHERENT
    };
    let text = if json {
        let mut v = verdict_json(sys, &verdict);
        v["relation"] = json!(rel);
        to_json(&v)
    } else {
        verdict_text(sys, rel, &verdict)
    };
    Outcome::out(code, text)
}

fn interval_text(name: &str, i: &PriceInterval) -> String {
    format!(
        "{name}: {}{}, {}{}\n",
        if i.lower_attainable { "[" } else { "(" },
        i.lower,
        i.upper,
        if i.upper_attainable { "]" } else { ")" },
    )
}

fn cmd_extend(
    doc: &SystemDocument,
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    price: Option<&Scalar>,
    json: bool,
) -> Outcome {
    let (name, f) = match doc.query_gamble(sys.space()) {
        Ok(q) => q,
        Err(e) => return Outcome::err(EXIT_INPUT, e),
    };
    if let Some(p) = price {
        if !doc.field.contains(p) {
            return Outcome::err(
                EXIT_INPUT,
                format!("price {p} lies outside the field {}", doc.field),
            );
        }
    }
    let price = price.or(doc.query.as_ref().and_then(|q| q.price.as_ref()));
    let interval = match admissible_interval(sys, &name, &f, rel) {
        Ok(i) => i,
        Err(ExtensionError::Incoherent(_)) => {
            let verdict = decide_coherence(sys, rel).expect("names already resolved");
            let text = if json {
                let mut v = verdict_json(sys, &verdict);
                v["relation"] = json!(rel);
                to_json(&v)
            } else {
                verdict_text(sys, rel, &verdict)
            };
            return Outcome {
                code: EXIT_INCOHERENT,
                stdout: text,
                stderr: format!("error: base system is {rel}-incoherent\n"),
            };
        }
        Err(e) => return Outcome::err(EXIT_INPUT, e),
    };

    let mut value = serde_json::to_value(&interval).expect("intervals serialize");
    let mut text = interval_text(&name, &interval);
    let mut code = EXIT_OK;
    if let Some(p) = price {
        value["price"] = json!(p);
        match extend_with_price(sys, &name, &f, p, rel) {
            Ok(ext) => {
                value["admissible"] = json!(true);
                value["judgments"] = json!(ext.judgments().len());
                let _ = writeln!(text, "price {p}: admissible");
            }
            Err(ExtensionError::Inadmissible { side, bound, .. }) => {
                code = EXIT_INCOHERENT;
                value["admissible"] = json!(false);
                value["violated"] = json!(side);
                let _ = writeln!(
                    text,
                    "price {p}: inadmissible, violates the {side:?} bound {bound}"
                );
            }
            Err(e) => return Outcome::err(EXIT_FAILURE, e),
        }
    }
    Outcome::out(code, if json { to_json(&value) } else { text })
}

fn levels_json(e: &LexExpectation) -> Value {
    let names = e.space().names();
    Value::Array(
        e.levels()
            .iter()
            .map(|p| {
                let m: Map<String, Value> = names
                    .iter()
                    .zip(p)
                    .map(|(n, x)| (n.clone(), json!(x)))
                    .collect();
                Value::Object(m)
            })
            .collect(),
    )
}

fn cmd_represent(
    sys: &JudgmentSystem,
    rel: DominanceRelation,
    single_level: bool,
    samples: usize,
    json: bool,
) -> Outcome {
    let built = if single_level {
        represent(sys, rel)
    } else {
        represent_layered(sys, rel)
    };
    let e = match built {
        Ok(e) => e,
        Err(crate::representation::RepresentationError::Incoherent(r)) => {
            return Outcome::err(EXIT_INCOHERENT, format!("system is {r}-incoherent"))
        }
        Err(err) => return Outcome::err(EXIT_FAILURE, err),
    };
    let report = verify_axioms(&e, sys, rel, samples);
    if !report.passes() {
        let detail = serde_json::to_string_pretty(&report).expect("reports serialize");
        return Outcome::err(EXIT_FAILURE, format!("verification failed\n{detail}"));
    }

    let values: Vec<(String, crate::hahn::HahnSeries)> = sys
        .gambles()
        .iter()
        .map(|(k, g)| (k.clone(), e.evaluate(g).expect("same space")))
        .collect();
    if json {
        let vals: Map<String, Value> = values
            .iter()
            .map(|(k, s)| (k.clone(), json!({ "series": s.to_string(), "terms": s })))
            .collect();
        let v = json!({
            "relation": rel,
            "levels": levels_json(&e),
            "values": vals,
            "verified": true,
        });
        return Outcome::out(EXIT_OK, to_json(&v));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{} level(s) under {rel} dominance", e.levels().len());
    for (j, p) in e.levels().iter().enumerate() {
        let cells: Vec<String> = e
            .space()
            .names()
            .iter()
            .zip(p)
            .map(|(n, x)| format!("{n}={x}"))
            .collect();
        let _ = writeln!(s, "  p{j}: {}", cells.join(" "));
    }
    for (k, v) in &values {
        let _ = writeln!(s, "  E({k}) = {v}");
    }
    Outcome::out(EXIT_OK, s)
}

fn default_states() -> Vec<Scalar> {
    [(1, 2), (1, 1), (7, 5), (3, 2), (2, 1), (10, 1)]
        .iter()
        .map(|&(n, d)| Scalar::ratio(n, d))
        .collect()
}

fn cmd_harness(
    input: Option<&PathBuf>,
    c1: Option<&Scalar>,
    c2: Option<&Scalar>,
    states: &[Scalar],
    json: bool,
) -> Outcome {
    let mut specs: Vec<HarnessSpec> = Vec::new();
    if let Some(path) = input {
        match SystemDocument::from_path(path) {
            Ok(doc) if doc.harness.is_empty() => {
                return Outcome::err(
                    EXIT_INPUT,
                    DocumentError::MissingQueryPart("harness section"),
                )
            }
            Ok(doc) => specs.extend(doc.harness),
            Err(e) => return Outcome::err(EXIT_INPUT, e),
        }
    }
    if c1.is_some() || c2.is_some() || specs.is_empty() {
        specs.push(HarnessSpec {
            c1: c1
                .cloned()
                .unwrap_or_else(|| Scalar::sqrt(2).expect("square-free")),
            c2: c2.cloned().unwrap_or_else(Scalar::one),
            states: states.to_vec(),
        });
    }

    let mut results = Vec::new();
    let mut text = String::new();
    for spec in specs {
        let st = if spec.states.is_empty() {
            default_states()
        } else {
            spec.states.clone()
        };
        let fragment = match example42_harness(&spec.c1, &spec.c2, &st) {
            Ok(f) => f,
            Err(e) => return Outcome::err(EXIT_INPUT, e),
        };
        match &fragment {
            Example42Fragment::Violation { state, value } => {
                let _ = writeln!(
                    text,
                    "c1={} c2={}: negative at q={state}: {value}",
                    spec.c1, spec.c2
                );
            }
            Example42Fragment::Sampled {
                values,
                all_positive,
            } => {
                let _ = writeln!(
                    text,
                    "c1={} c2={}: {} states, all positive: {all_positive}",
                    spec.c1,
                    spec.c2,
                    values.len()
                );
                for (q, v) in values {
                    let _ = writeln!(text, "  q={q}: {v}");
                }
            }
        }
        let mut v = serde_json::to_value(&fragment).expect("fragments serialize");
        v["c1"] = json!(spec.c1);
        v["c2"] = json!(spec.c2);
        results.push(v);
    }
    Outcome::out(
        EXIT_OK,
        if json {
            to_json(&Value::Array(results))
        } else {
            text
        },
    )
}
