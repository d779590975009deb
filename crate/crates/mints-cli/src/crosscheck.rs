//! Machine oracle against proof search on the reduction, per instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use mints::encodings::{encode_branching_sigma1_with, encode_bus_sigma1, encode_tiling_delta2_with, tiling_budget};
use mints::models::{bus_accepts, s_solvable, solvable_within, Acceptance, BranchingPuzzle, BusMachine, TilingPuzzle};
use mints::prover::{prove_general, prove_sigma1, ProveResult, Sigma1Judgment};

use crate::{checked, CliError, Model, Outcome, SOFTWARE, UNKNOWN, YES};

/// Coordinate bound of the tiling oracle.
const TILING_BOUND: usize = 6;
const BUS_BUDGET: usize = 10_000;

pub struct Options {
    pub budget: Option<usize>,
    pub s: Option<usize>,
    pub monadic: bool,
}

enum Instance {
    Tiling(TilingPuzzle),
    Branching(BranchingPuzzle),
    Bus(BusMachine),
}

struct Check {
    label: String,
    oracle: String,
    prover: String,
    /// `None` when the oracle itself gave up.
    agree: Option<bool>,
}

fn word(r: &ProveResult) -> &'static str {
    match r {
        ProveResult::Proved(_) => "proved",
        ProveResult::Unprovable => "unprovable",
        ProveResult::Unknown => "unknown",
    }
}

fn tiling(g: &TilingPuzzle, budget: Option<usize>) -> Result<Vec<Check>, CliError> {
    let p = encode_tiling_delta2_with(g, true);
    let oracle = solvable_within(g, TILING_BOUND);
    let b = budget.unwrap_or_else(|| {
        let (m, n) = oracle.unwrap_or((TILING_BOUND, TILING_BOUND));
        tiling_budget(m, n)
    });
    let r = prove_general(&p.env, &p.goal, b);
    checked(&p.env, &p.goal, &r)?;
    let (oracle_word, agree) = match oracle {
        Some((m, n)) => (format!("solvable({m},{n})"), r.is_proved()),
        // A proof of depth b builds fewer than b locations, so the puzzle
        // must then be solvable within bound b.
        None => ("none-within-bound".to_string(), !r.is_proved() || solvable_within(g, b).is_some()),
    };
    Ok(vec![Check { label: format!("budget={b}"), oracle: oracle_word, prover: word(&r).into(), agree: Some(agree) }])
}

fn branching(g: &BranchingPuzzle, opts: &Options) -> Result<Vec<Check>, CliError> {
    let ss: Vec<usize> = match opts.s {
        Some(s) => vec![s],
        None => vec![1, 2, 3],
    };
    let forms: &[bool] = if opts.monadic { &[false, true] } else { &[false] };
    let mut out = Vec::new();
    for s in ss {
        let o = s_solvable(g, s, &[]);
        for &mono in forms {
            let p = encode_branching_sigma1_with(g, s, mono, true);
            let j = Sigma1Judgment::new(p.env, p.goal)?;
            let r = prove_sigma1(&j);
            checked(&j.env, &j.goal, &r)?;
            out.push(Check {
                label: format!("s={s}{}", if mono { " monadic" } else { "" }),
                oracle: if o { "s-solvable" } else { "not-s-solvable" }.into(),
                prover: word(&r).into(),
                agree: Some(o == r.is_proved()),
            });
        }
    }
    Ok(out)
}

fn bus(m: &BusMachine, budget: Option<usize>) -> Result<Vec<Check>, CliError> {
    let a = bus_accepts(m, budget.unwrap_or(BUS_BUDGET));
    let p = encode_bus_sigma1(m);
    let j = Sigma1Judgment::new(p.env, p.goal)?;
    let r = prove_sigma1(&j);
    checked(&j.env, &j.goal, &r)?;
    let (oracle, agree) = match a {
        Acceptance::Accepts => ("accepts", Some(r.is_proved())),
        Acceptance::Rejects => ("rejects", Some(!r.is_proved())),
        Acceptance::Unknown => ("unknown", None),
    };
    Ok(vec![Check { label: String::new(), oracle: oracle.into(), prover: word(&r).into(), agree }])
}

fn instances(model: Model, text: Option<&str>, seed: u64, count: usize) -> Result<Vec<Instance>, CliError> {
    if let Some(t) = text {
        return Ok(vec![match model {
            Model::Tiling => Instance::Tiling(TilingPuzzle::from_json(t)?),
            Model::Branching => Instance::Branching(BranchingPuzzle::from_json(t)?),
            Model::Bus => Instance::Bus(BusMachine::from_json(t)?),
        }]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| match model {
            Model::Tiling => Instance::Tiling(TilingPuzzle::random(&mut rng, 3, 0.1)),
            Model::Branching => Instance::Branching(BranchingPuzzle::random(&mut rng, 3, 0.3)),
            Model::Bus => Instance::Bus(BusMachine::random(&mut rng, 3, 3, 4)),
        })
        .collect())
}

pub fn run(model: Model, text: Option<&str>, seed: u64, count: usize, opts: &Options) -> Result<Outcome, CliError> {
    let insts = instances(model, text, seed, count)?;
    let results: Vec<Result<(String, Vec<Check>), CliError>> = insts
        .par_iter()
        .map(|inst| match inst {
            Instance::Tiling(g) => Ok((g.hash(), tiling(g, opts.budget)?)),
            Instance::Branching(g) => Ok((g.hash(), branching(g, opts)?)),
            Instance::Bus(m) => Ok((m.hash(), bus(m, opts.budget)?)),
        })
        .collect();
    let mut lines = Vec::new();
    let mut rows = Vec::new();
    let (mut disagree, mut unknown) = (0, 0);
    for (i, r) in results.into_iter().enumerate() {
        let (hash, checks) = r?;
        for c in checks {
            let verdict = match c.agree {
                Some(true) => "agree",
                Some(false) => "DISAGREE",
                None => "oracle-unknown",
            };
            disagree += usize::from(c.agree == Some(false));
            unknown += usize::from(c.agree.is_none());
            let label = if c.label.is_empty() { String::new() } else { format!(" {}", c.label) };
            lines.push(format!("#{i} {}{label} oracle={} prover={} {verdict}", &hash[..12], c.oracle, c.prover));
            rows.push(json!({ "index": i, "model_hash": hash, "label": c.label, "oracle": c.oracle, "prover": c.prover, "agree": c.agree }));
        }
    }
    lines.push(format!("{} checks, {disagree} disagreements, {unknown} with unknown oracle", rows.len()));
    let code = if disagree > 0 {
        SOFTWARE
    } else if unknown > 0 {
        UNKNOWN
    } else {
        YES
    };
    let json: Value = json!({ "checks": rows, "disagreements": disagree, "unknown": unknown });
    Ok(Outcome { code, text: lines.join("\n"), json })
}
