//! One line per acceptance criterion. Every criterion runs, then the
//! target exits non-zero if any of them failed. It has no test harness, so
//! the lines show up in plain `cargo test` output.

mod common;

use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::oracles::{grammar_members, least_level, small_judgments};
use common::props::{self, proved_case, proved_judgment, soup_disagreement};
use common::{formula, sigma1_judgment, worked};
use mints::encodings::{encode_branching_sigma1, encode_bus_sigma1, encode_tiling_delta2, tiling_budget};
use mints::hierarchy::{classify, in_class, Side};
use mints::kernel::{elaborate, is_lnf, is_normal, parse_raw_term, typecheck, ProofTerm};
use mints::models::{accepting_run, bus_accepts, s_solvable, solvable_within, Acceptance, BranchingPuzzle, BusMachine, InstrRef, TilingPuzzle};
use mints::prover::{prove_general, prove_sigma1, Sigma1Judgment};
use mints::syntax::parse_formula;

const C1_LIMIT: Duration = Duration::from_secs(1);
const C2_LIMIT: Duration = Duration::from_secs(10);
const C3_LIMIT: Duration = Duration::from_secs(30);
const C4_LIMIT: Duration = Duration::from_secs(5 * 60);
const C5_LIMIT: Duration = Duration::from_secs(10 * 60);
const C6_LIMIT: Duration = Duration::from_secs(10 * 60);
const C7_LIMIT: Duration = Duration::from_secs(10 * 60);
const C8_LIMIT: Duration = Duration::from_secs(10 * 60);

const RANDOM_FORMULAS: usize = 1000;
const BUS_MACHINES: usize = 200;
const BUS_BUDGET: usize = 10_000;
const BRANCHING_PUZZLES: usize = 100;
const TILING_PUZZLES: usize = 100;
const TILING_BOUND: usize = 6;
const RANDOM_JUDGMENTS: u32 = 500;
const KERNEL_CASES: u32 = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let pass = o.pass && took <= limit;
    outcome(pass, format!("{}; {:.2}s (limit {}s)", o.detail, took.as_secs_f64(), limit.as_secs()))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, max_global_rejects: 1_000_000, max_local_rejects: 1_000_000, failure_persistence: None, ..Config::default() })
}

/// Draws `n` values from a deterministic runner.
fn sample<S: Strategy>(s: &S, n: usize) -> Vec<S::Value> {
    let mut r = TestRunner::deterministic();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if let Ok(t) = s.new_tree(&mut r) {
            out.push(t.current());
        }
    }
    out
}

fn golden_term() -> Outcome {
    let phi = worked::whole();
    let env = mints::syntax::Environment::new();
    let raw = parse_raw_term(worked::PRINTED).map_err(|e| e.to_string());
    let t = match raw.and_then(|raw| elaborate(&env, &raw, Some(&phi)).map_err(|e| e.to_string())) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("term does not elaborate: {e}")),
    };
    let typed = typecheck(&env, &t, Some(&phi)).is_ok();
    let lnf = is_lnf(&env, &t, &phi).unwrap_or(false);
    let mut body = &t;
    while let ProofTerm::Abs(_, _, b) = body {
        body = b;
    }
    let under_env = typecheck(&worked::env(), body, None).ok() == Some(mints::syntax::Formula::atom("C", &[]));
    let (x1, x2) = (body.count_head_uses("X1"), body.count_head_uses("X2"));
    let pass = typed && under_env && is_normal(&t) && lnf && x1 == 4 && x2 == 2;
    outcome(pass, format!("typechecks={typed} under env={under_env} normal={} lnf={lnf} X1={x1} X2={x2}", is_normal(&t)))
}

fn levels(text: &str) -> Option<(usize, usize)> {
    let c = classify(&parse_formula(text).ok()?);
    Some((c.pi_level, c.sigma_level))
}

fn classification() -> Outcome {
    // Pi_1, Sigma_2 and Delta_2 as (pi, sigma) levels.
    let fixtures = [
        ("((forall x. P(x)) -> Q) -> Q", (1, 2)),
        ("(forall x. ((forall y. R(y)) -> P(x))) -> Q", (3, 2)),
        ("(forall x. P(x)) -> ((forall y. R(y)) -> Q) -> Q", (2, 2)),
    ];
    let fixed = fixtures.iter().filter(|(f, want)| levels(f) == Some(*want)).count();
    let bad = sample(&formula(6), RANDOM_FORMULAS)
        .par_iter()
        .filter(|f| {
            let max_n = f.depth() + 1;
            let members = grammar_members(f, max_n);
            let c = classify(f);
            least_level(&members, Side::Sigma) != Some(c.sigma_level)
                || least_level(&members, Side::Pi) != Some(c.pi_level)
                || (0..=max_n).any(|n| [Side::Sigma, Side::Pi].into_iter().any(|s| in_class(f, n, s) != members.contains(&(n, s))))
        })
        .count();
    outcome(fixed == 3 && bad == 0, format!("fixtures {fixed}/3, {bad} of {RANDOM_FORMULAS} random formulas disagree"))
}

fn bus_example() -> Outcome {
    let m = match BusMachine::from_json(include_str!("fixtures/ex51.json")) {
        Ok(m) => m,
        Err(e) => return outcome(false, format!("fixture: {e}")),
    };
    let accepts = bus_accepts(&m, BUS_BUDGET) == Acceptance::Accepts;
    let Some(run) = accepting_run(&m, BUS_BUDGET) else { return outcome(false, "no accepting run".into()) };
    let steps = run.steps();
    let mut locals = Vec::new();
    run.walk(&mut |node| {
        if let Some((InstrRef::Global(4), _)) = &node.step {
            locals.push(node.config.locals.len());
        }
    });
    let p = encode_bus_sigma1(&m);
    let checked = Sigma1Judgment::new(p.env.clone(), p.goal.clone())
        .ok()
        .and_then(|j| prove_sigma1(&j).proof().map(|t| typecheck(&p.env, t, Some(&p.goal)).is_ok()))
        .unwrap_or(false);
    let pass = accepts && steps == 31 && locals == [15] && checked;
    outcome(pass, format!("accepts={accepts} steps={steps} locals before I*={locals:?} proof checks={checked}"))
}

fn bus_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let machines: Vec<BusMachine> = (0..BUS_MACHINES).map(|_| BusMachine::random(&mut rng, 3, 3, 4)).collect();
    let results: Vec<Option<bool>> = machines
        .par_iter()
        .map(|m| {
            let want = match bus_accepts(m, BUS_BUDGET) {
                Acceptance::Accepts => true,
                Acceptance::Rejects => false,
                Acceptance::Unknown => return None,
            };
            let p = encode_bus_sigma1(m);
            let got = Sigma1Judgment::new(p.env, p.goal).map(|j| prove_sigma1(&j).is_proved());
            Some(got == Ok(want))
        })
        .collect();
    let unknown = results.iter().filter(|r| r.is_none()).count();
    let bad = results.iter().filter(|r| **r == Some(false)).count();
    outcome(bad == 0, format!("{BUS_MACHINES} machines, {unknown} unknown excluded, {bad} disagreements"))
}

fn branching_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let puzzles: Vec<BranchingPuzzle> = (0..BRANCHING_PUZZLES).map(|_| BranchingPuzzle::random(&mut rng, 3, 0.3)).collect();
    let cases: Vec<(usize, usize, bool)> = (0..BRANCHING_PUZZLES).flat_map(|i| (1..=3).flat_map(move |s| [(i, s, false), (i, s, true)])).collect();
    let results: Vec<(bool, bool)> = cases
        .par_iter()
        .map(|&(i, s, mono)| {
            let g = &puzzles[i];
            let want = s_solvable(g, s, &[]);
            let p = encode_branching_sigma1(g, s, mono);
            let got = Sigma1Judgment::new(p.env, p.goal).map(|j| prove_sigma1(&j).is_proved());
            (want, got == Ok(want))
        })
        .collect();
    let yes = results.iter().filter(|r| r.0).count();
    let bad = results.iter().filter(|r| !r.1).count();
    outcome(bad == 0, format!("{} checks ({yes} solvable), {bad} disagreements", results.len()))
}

fn tiling_one_sided() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut puzzles = Vec::new();
    let mut drawn = 0;
    while puzzles.len() < TILING_PUZZLES {
        let g = TilingPuzzle::random(&mut rng, 3, 0.1);
        drawn += 1;
        if let Some(at) = solvable_within(&g, TILING_BOUND) {
            puzzles.push((g, at));
        }
    }
    let bad = puzzles
        .par_iter()
        .filter(|(g, (m, n))| {
            let p = encode_tiling_delta2(g);
            !prove_general(&p.env, &p.goal, tiling_budget(*m, *n)).is_proved()
        })
        .count();
    let never = TilingPuzzle::new(vec!["E".into(), "OK".into()], 0, 1, |_| 0).expect("two tiles");
    let budget = tiling_budget(TILING_BOUND, TILING_BOUND);
    let oracle_none = solvable_within(&never, TILING_BOUND).is_none();
    let p = encode_tiling_delta2(&never);
    let never_proved = prove_general(&p.env, &p.goal, budget).is_proved();
    let pass = bad == 0 && oracle_none && !never_proved;
    outcome(
        pass,
        format!("{TILING_PUZZLES} solvable of {drawn} drawn, {bad} unproved; never-OK oracle none={oracle_none}, proved at budget {budget}={never_proved}"),
    )
}

fn duality() -> Outcome {
    let family = small_judgments();
    let bad_family = family.par_iter().filter(|j| soup_disagreement(j).is_some()).count();
    let randoms = sample(&sigma1_judgment(), RANDOM_JUDGMENTS as usize);
    let bad_random = randoms.par_iter().filter(|j| soup_disagreement(j).is_some()).count();
    let pass = bad_family == 0 && bad_random == 0;
    outcome(pass, format!("{} exhaustive judgments with {bad_family} disagreements, {RANDOM_JUDGMENTS} random with {bad_random}", family.len()))
}

fn kernel() -> Outcome {
    let mut report = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, r: Result<(), String>| {
        pass &= r.is_ok();
        report.push(match r {
            Ok(()) => format!("{name} ok"),
            Err(e) => format!("{name} FAILED ({e})"),
        });
    };
    let run_case = |f: fn(&(props::Proved, _, _, usize)) -> Result<(), proptest::test_runner::TestCaseError>| {
        runner(KERNEL_CASES).run(&proved_case(), |c| f(&c)).map_err(|e| e.to_string())
    };
    let run_proved = |f: fn(&props::Proved) -> Result<(), proptest::test_runner::TestCaseError>| {
        runner(KERNEL_CASES).run(&proved_judgment(), |p| f(&p)).map_err(|e| e.to_string())
    };
    record("substitution", run_case(props::substitution_lemma));
    record("subject reduction", run_case(props::subject_reduction));
    record("lnf heads", run_proved(props::lnf_heads));
    record("no object abstraction", run_proved(props::no_object_abstraction));
    record("free variables in pool", run_proved(props::free_vars_in_pool));
    outcome(pass, format!("{KERNEL_CASES} cases each: {}", report.join(", ")))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("C1 golden proof term", C1_LIMIT, golden_term),
        ("C2 classification", C2_LIMIT, classification),
        ("C3 bus example", C3_LIMIT, bus_example),
        ("C4 bus equivalence", C4_LIMIT, bus_equivalence),
        ("C5 branching equivalence", C5_LIMIT, branching_equivalence),
        ("C6 tiling one-sided", C6_LIMIT, tiling_one_sided),
        ("C7 prover/refuter duality", C7_LIMIT, duality),
        ("C8 kernel invariants", C8_LIMIT, kernel),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let o = timed(limit, run);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
