//! `mints`: batch front end over the prover, refuter, translation and
//! reductions.
//!
//! Exit codes: 0 affirmative (proved, soup built, solvable, accepted,
//! agreement), 1 negative, 2 unknown or budget exhausted, 64 usage or input
//! error, 70 internal failure or a crosscheck disagreement.

mod crosscheck;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use mints::encodings::{
    encode_branching_sigma1_with, encode_bus_sigma1, encode_tiling_delta2_with, encode_tiling_finite_sig, parse_problem, EncodedProblem,
    ProblemError,
};
use mints::hierarchy::{classify, is_easy};
use mints::kernel::{elaborate, is_lnf, parse_raw_term, typecheck, ProofTerm};
use mints::models::{accepting_run, bus_accepts, s_solvable, solvable_within, Acceptance, BranchingPuzzle, BusMachine, ModelError, TilingGrid, TilingPuzzle};
use mints::monadic::{translate, translate_env, MonadicError, TranslationScheme};
use mints::prover::{prove_general_limited, prove_sigma1, ProveResult, ProverError, Sigma1Judgment};
use mints::refuter::{build_soup, verify_soup, RefuterError, SoupOutcome};
use mints::syntax::{parse_formula, Environment, Formula, SyntaxError};

pub const YES: u8 = 0;
pub const NO: u8 = 1;
pub const UNKNOWN: u8 = 2;
pub const USAGE: u8 = 64;
pub const SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "mints", version, about = "Proof search and refutation for the (forall, ->) fragment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Pi and Sigma levels of a formula.
    Classify {
        /// The formula; read from stdin when absent.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Search for a proof of the goal from the environment.
    Prove {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Use the decision procedure for Sigma_1 judgments.
        #[arg(long)]
        sigma1: bool,
        /// Depth budget of the general search.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Build a refutation soup for a Sigma_1 judgment.
    Refute {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Typecheck a proof term against the goal.
    CheckProof {
        #[command(flatten)]
        problem: ProblemArgs,
        /// The term; read from stdin when absent.
        #[arg(long)]
        term: Option<String>,
    },
    /// Lower every predicate to arity at most one.
    Translate {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Emit the reduction of a machine as a problem.
    Encode {
        model: EncodeModel,
        /// JSON model; stdin when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Solvability bound of a branching puzzle.
        #[arg(long)]
        s: Option<usize>,
        /// Follow with the arity lowering.
        #[arg(long)]
        monadic: bool,
        /// Leave out rule instances mentioning unreachable tiles.
        #[arg(long)]
        prune: bool,
        /// Comma separated tiles seeding row 0 (tiling-fin).
        #[arg(long)]
        row: Option<String>,
    },
    /// Run the machine itself.
    Simulate {
        model: Model,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Coordinate bound (tiling) or configuration budget (bus).
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
    },
    /// Compare the machine with proof search on its reduction.
    Crosscheck {
        model: Model,
        /// JSON model; random instances from --seed when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random instances.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Prover depth budget (tiling) or configuration budget (bus).
        #[arg(long)]
        budget: Option<usize>,
        /// Bound of a branching puzzle; 1, 2 and 3 when absent.
        #[arg(long)]
        s: Option<usize>,
        /// Also check the arity-lowered encoding.
        #[arg(long)]
        monadic: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodeModel {
    Tiling,
    TilingFin,
    Branching,
    Bus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Tiling,
    Branching,
    Bus,
}

/// Where a judgment comes from: `--formula`, `--env` with `--goal`, or a
/// problem file (`--in` or stdin).
#[derive(Args)]
struct ProblemArgs {
    /// Environment file, or the declarations themselves.
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    goal: Option<String>,
    /// Closed formula, proved from the empty environment.
    #[arg(long, conflicts_with_all = ["env", "goal"])]
    formula: Option<String>,
    /// Problem file: declarations, then `|- goal`.
    #[arg(long = "in", conflicts_with_all = ["env", "goal", "formula"])]
    input: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Monadic(#[from] MonadicError),
    #[error(transparent)]
    Refuter(#[from] RefuterError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Internal(_) => SOFTWARE,
            _ => USAGE,
        }
    }
}

/// What a command prints and how it exits.
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: Value,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_stdin() -> Result<String, CliError> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "stdin".into(), source })?;
    Ok(s)
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => read_file(p),
        None => read_stdin(),
    }
}

impl ProblemArgs {
    fn uses_stdin(&self) -> bool {
        self.formula.is_none() && self.goal.is_none() && self.input.is_none()
    }

    fn load(&self) -> Result<(Environment, Formula), CliError> {
        if let Some(f) = &self.formula {
            return Ok((Environment::new(), parse_formula(f)?));
        }
        if let Some(g) = &self.goal {
            let env = match &self.env {
                Some(e) if Path::new(e).is_file() => Environment::parse(&read_file(Path::new(e))?)?,
                Some(e) => Environment::parse(e)?,
                None => Environment::new(),
            };
            return Ok((env, parse_formula(g)?));
        }
        if self.env.is_some() {
            return Err(CliError::Usage("--env needs --goal".into()));
        }
        let p = parse_problem(&read_input(&self.input)?)?;
        Ok((p.env, p.goal))
    }
}

/// Typechecks a proof the prover produced; a failure is a bug.
pub fn checked(env: &Environment, goal: &Formula, r: &ProveResult) -> Result<(), CliError> {
    match r.proof() {
        Some(t) => typecheck(env, t, Some(goal)).map(|_| ()).map_err(|e| CliError::Internal(format!("emitted proof does not typecheck: {e}"))),
        None => Ok(()),
    }
}

fn prove_outcome(r: &ProveResult, stats: Value) -> Outcome {
    let (code, result) = match r {
        ProveResult::Proved(_) => (YES, "proved"),
        ProveResult::Unprovable => (NO, "unprovable"),
        ProveResult::Unknown => (UNKNOWN, "unknown"),
    };
    let text = match r.proof() {
        Some(t) => format!("proved\n{t}"),
        None if code == UNKNOWN => "unknown: budget exhausted".into(),
        None => result.into(),
    };
    let proof = r.proof().map(ProofTerm::to_string);
    Outcome { code, text, json: json!({ "result": result, "proof": proof, "stats": stats }) }
}

fn encoded_json(p: &EncodedProblem) -> Value {
    let env: Vec<Value> = p.env.decls.iter().map(|(n, f)| json!([n.to_string(), f.to_string()])).collect();
    json!({
        "env": env,
        "goal": p.goal.to_string(),
        "provenance": serde_json::to_value(&p.provenance).expect("plain data serializes"),
    })
}

fn tile_row(g: &TilingPuzzle, row: &str) -> Result<Vec<usize>, CliError> {
    row.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| g.tiles.iter().position(|x| x == t).ok_or_else(|| CliError::Usage(format!("unknown tile `{t}` in --row"))))
        .collect()
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Classify { formula } => {
            let text = match formula {
                Some(f) => f,
                None => read_stdin()?,
            };
            let f = parse_formula(&text)?;
            let c = classify(&f);
            let json = json!({
                "formula": f.to_string(),
                "pi_level": c.pi_level,
                "sigma_level": c.sigma_level,
                "delta_level": c.delta_level(),
                "easy": is_easy(&f),
            });
            Ok(Outcome { code: YES, text: c.to_string(), json })
        }
        Command::Prove { problem, sigma1, budget } => {
            let (env, goal) = problem.load()?;
            if sigma1 {
                let j = Sigma1Judgment::new(env, goal)?;
                let r = prove_sigma1(&j);
                checked(&j.env, &j.goal, &r)?;
                Ok(prove_outcome(&r, json!({ "pool": j.pool().vars.iter().map(|v| v.to_string()).collect::<Vec<_>>() })))
            } else {
                let (r, st) = prove_general_limited(&env, &goal, budget, usize::MAX);
                checked(&env, &goal, &r)?;
                let stats = json!({
                    "budget": budget,
                    "atom_goals": st.atom_goals,
                    "iterations": st.iterations,
                    "loop_cuts": st.loop_cuts,
                    "cache_hits": st.cache_hits,
                });
                Ok(prove_outcome(&r, stats))
            }
        }
        Command::Refute { problem } => {
            let (env, goal) = problem.load()?;
            let j = Sigma1Judgment::new(env, goal)?;
            match build_soup(&j)? {
                SoupOutcome::Soup(s) => {
                    if !verify_soup(&s, &j) {
                        return Err(CliError::Internal("built soup fails verification".into()));
                    }
                    let text = s.to_text(&j);
                    let members: Vec<String> = s.judgments.iter().map(|m| m.to_string()).collect();
                    Ok(Outcome { code: YES, text: text.trim_end().into(), json: json!({ "result": "soup", "size": s.len(), "soup": members }) })
                }
                SoupOutcome::Provable => Ok(Outcome { code: NO, text: "provable: no soup exists".into(), json: json!({ "result": "provable" }) }),
            }
        }
        Command::CheckProof { problem, term } => {
            let term = match term {
                Some(t) => t,
                None if problem.uses_stdin() => return Err(CliError::Usage("give the problem or the term by flag; stdin holds only one".into())),
                None => read_stdin()?,
            };
            let (env, goal) = problem.load()?;
            let raw = parse_raw_term(&term)?;
            match elaborate(&env, &raw, Some(&goal)) {
                Ok(t) => {
                    let lnf = is_lnf(&env, &t, &goal).unwrap_or(false);
                    let text = format!("ok\n{}", if lnf { "long normal form" } else { "not in long normal form" });
                    Ok(Outcome { code: YES, text, json: json!({ "result": "ok", "term": t.to_string(), "lnf": lnf }) })
                }
                Err(e) => {
                    let msg = e.to_string();
                    Ok(Outcome { code: NO, text: format!("rejected: {msg}"), json: json!({ "result": "rejected", "error": msg }) })
                }
            }
        }
        Command::Translate { problem } => {
            let (env, goal) = problem.load()?;
            let scheme = TranslationScheme::for_env(&env, Some(&goal), true)?;
            let env2 = translate_env(&env, &scheme)?;
            let goal2 = translate(&goal, &scheme)?;
            let decls: Vec<Value> = env2.decls.iter().map(|(n, f)| json!([n.to_string(), f.to_string()])).collect();
            let json = json!({
                "env": decls,
                "goal": goal2.to_string(),
                "markers": scheme.markers.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "pad": scheme.pad.as_ref().map(|p| p.to_string()),
            });
            Ok(Outcome { code: YES, text: format!("{env2}|- {goal2}"), json })
        }
        Command::Encode { model, input, s, monadic, prune, row } => {
            let text = read_input(&input)?;
            let mut p = match model {
                EncodeModel::Tiling => encode_tiling_delta2_with(&TilingPuzzle::from_json(&text)?, prune),
                EncodeModel::TilingFin => {
                    let g = TilingPuzzle::from_json(&text)?;
                    let seed = tile_row(&g, row.as_deref().unwrap_or(""))?;
                    encode_tiling_finite_sig(&g, &seed)
                }
                EncodeModel::Branching => {
                    let s = s.ok_or_else(|| CliError::Usage("encode branching needs --s".into()))?;
                    if s == 0 {
                        return Err(CliError::Usage("--s must be positive".into()));
                    }
                    encode_branching_sigma1_with(&BranchingPuzzle::from_json(&text)?, s, monadic, prune)
                }
                EncodeModel::Bus => encode_bus_sigma1(&BusMachine::from_json(&text)?),
            };
            if monadic && model != EncodeModel::Branching {
                p = p.to_monadic()?;
            }
            Ok(Outcome { code: YES, text: p.to_text().trim_end().into(), json: encoded_json(&p) })
        }
        Command::Simulate { model, input, budget, s } => simulate(model, &read_input(&input)?, budget, s),
        Command::Crosscheck { model, input, seed, count, budget, s, monadic } => {
            let text = match &input {
                Some(p) => Some(read_file(p)?),
                None => None,
            };
            if text.is_some() && seed.is_some() {
                return Err(CliError::Usage("--in and --seed exclude each other".into()));
            }
            let opts = crosscheck::Options { budget, s, monadic };
            crosscheck::run(model, text.as_deref(), seed.unwrap_or(0), count, &opts)
        }
    }
}

fn simulate(model: Model, text: &str, budget: Option<usize>, s: Option<usize>) -> Result<Outcome, CliError> {
    match model {
        Model::Tiling => {
            let g = TilingPuzzle::from_json(text)?;
            let bound = budget.unwrap_or(6);
            let mut grid = TilingGrid::new(&g);
            let rows: Vec<Vec<String>> = (0..=bound).map(|n| (0..=bound).map(|m| g.tiles[grid.get(m, n)].clone()).collect()).collect();
            let shown: Vec<String> = rows.iter().rev().map(|r| r.join(" ")).collect();
            Ok(match solvable_within(&g, bound) {
                Some((m, n)) => Outcome {
                    code: YES,
                    text: format!("solvable: OK at column {m}, row {n}\n{}", shown.join("\n")),
                    json: json!({ "result": "solvable", "location": [m, n], "rows": rows }),
                },
                None => Outcome {
                    code: UNKNOWN,
                    text: format!("no OK within bound {bound}\n{}", shown.join("\n")),
                    json: json!({ "result": "unknown", "bound": bound, "rows": rows }),
                },
            })
        }
        Model::Branching => {
            let g = BranchingPuzzle::from_json(text)?;
            let s = s.unwrap_or(1);
            let ok = s_solvable(&g, s, &[]);
            let (code, word) = if ok { (YES, "s-solvable") } else { (NO, "not s-solvable") };
            Ok(Outcome { code, text: format!("{word} (s = {s})"), json: json!({ "result": word, "s": s }) })
        }
        Model::Bus => {
            let m = BusMachine::from_json(text)?;
            let budget = budget.unwrap_or(10_000);
            Ok(match bus_accepts(&m, budget) {
                Acceptance::Accepts => {
                    let steps = accepting_run(&m, budget).map(|r| r.steps());
                    let text = match steps {
                        Some(k) => format!("accepts (run of {k} steps)"),
                        None => "accepts".into(),
                    };
                    Outcome { code: YES, text, json: json!({ "result": "accepts", "steps": steps }) }
                }
                Acceptance::Rejects => Outcome { code: NO, text: "rejects".into(), json: json!({ "result": "rejects" }) },
                Acceptance::Unknown => {
                    Outcome { code: UNKNOWN, text: format!("unknown: budget {budget} exhausted"), json: json!({ "result": "unknown", "budget": budget }) }
                }
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(o) => {
            let mut out = io::stdout().lock();
            let _ = if json { writeln!(out, "{}", o.json) } else { writeln!(out, "{}", o.text) };
            ExitCode::from(o.code)
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("mints: {e}");
            ExitCode::from(e.code())
        }
    }
}
