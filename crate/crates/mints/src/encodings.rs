//! The three reductions from machines to provability, emitted as an
//! environment and a goal.
//!
//! Predicate names: `Start` and `Go` are the nullary markers, `Fresh` the
//! unary driver of the tiling encoding, `A`/`B` the bottom row and left
//! column, `H`/`V` horizontal and vertical neighbours, `Left`/`Right` the
//! child markers of the branching encoding. Tile `E` is `E`, tile `OK` is
//! `Ok`, any other tile `t` is `T_t`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{location_count, BranchingPuzzle, BusMachine, Instruction, Switch, SwitchKind, Tile, TilingPuzzle};
use crate::monadic::{translate, translate_env, MonadicError, TranslationScheme};
use crate::syntax::{ident, is_ident, Environment, Formula, Ident, Signature, SyntaxError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub reduction: String,
    pub model_hash: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    /// Predicate name to what it stands for.
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedProblem {
    pub env: Environment,
    pub goal: Formula,
    pub signature: Signature,
    pub provenance: Provenance,
}

impl EncodedProblem {
    fn new(env: Environment, goal: Formula, provenance: Provenance) -> EncodedProblem {
        let signature = Signature::of_formulas(env.formulas().chain([&goal])).expect("encodings use each predicate with one arity");
        EncodedProblem { env, goal, signature, provenance }
    }

    /// `ζ1 -> ... -> ζm -> goal`.
    pub fn assemble(&self) -> Formula {
        Formula::imps(self.env.formulas().cloned().collect::<Vec<_>>(), self.goal.clone())
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string(&self.provenance).expect("plain data serializes")
    }

    /// Provenance header, one declaration per line, then `|- goal`.
    pub fn to_text(&self) -> String {
        format!("# provenance: {}\n{}|- {}\n", self.sidecar_json(), self.env, self.goal)
    }

    /// Arity lowering of the whole problem; every emitted formula is easy,
    /// so provability is preserved.
    pub fn to_monadic(&self) -> Result<EncodedProblem, MonadicError> {
        self.to_monadic_padded(None)
    }

    /// As [`EncodedProblem::to_monadic`], padding with `pad` instead of a
    /// fresh variable. `pad` must not be bound anywhere in the problem.
    pub fn to_monadic_padded(&self, pad: Option<Ident>) -> Result<EncodedProblem, MonadicError> {
        let mut scheme = TranslationScheme::for_env(&self.env, Some(&self.goal), true)?;
        if scheme.pad.is_some() && pad.is_some() {
            scheme.pad = pad;
        }
        let env = translate_env(&self.env, &scheme)?;
        let goal = translate(&self.goal, &scheme)?;
        let mut provenance = self.provenance.clone();
        provenance.params.insert("monadic".into(), true.into());
        for (p, q) in &scheme.atom_map {
            provenance.names.insert(q.to_string(), format!("nullary image of {p}"));
        }
        for (i, m) in scheme.markers.iter().enumerate() {
            provenance.names.insert(m.to_string(), format!("argument marker {}", i + 1));
        }
        if let Some(d) = &scheme.pad {
            provenance.params.insert("pad".into(), d.to_string().into());
        }
        Ok(EncodedProblem::new(env, goal, provenance))
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {0}: expected `|- goal` as the last entry")]
    Goal(usize),
    #[error("bad provenance header: {0}")]
    Provenance(#[from] serde_json::Error),
}

/// A problem in text form: optional `# provenance: {json}` header,
/// declarations, and a final `|- goal` line.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemText {
    pub env: Environment,
    pub goal: Formula,
    pub provenance: Option<Provenance>,
}

pub fn parse_problem(text: &str) -> Result<ProblemText, ProblemError> {
    let mut provenance = None;
    let mut decls = String::new();
    let mut goal = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("# provenance:") {
            provenance = Some(serde_json::from_str(rest.trim())?);
        } else if let Some(g) = t.strip_prefix("|-") {
            if goal.is_some() {
                return Err(ProblemError::Goal(i + 1));
            }
            goal = Some(crate::syntax::parse_formula(g)?);
        } else if !t.is_empty() && !t.starts_with('#') {
            if goal.is_some() {
                return Err(ProblemError::Goal(i + 1));
            }
            decls.push_str(line);
            decls.push('\n');
        }
    }
    let goal = goal.ok_or(ProblemError::Goal(text.lines().count()))?;
    Ok(ProblemText { env: Environment::parse(&decls)?, goal, provenance })
}

fn atom(p: &str, args: &[Ident]) -> Formula {
    Formula::atom(p, &args.iter().map(|a| &**a).collect::<Vec<_>>())
}

fn a0(p: &str) -> Formula {
    Formula::atom(p, &[])
}

fn push(env: &mut Environment, name: String, f: Formula) {
    env.push(ident(&name), f).expect("generated declaration names are distinct");
}

/// Predicate for tile `t`.
pub fn tile_predicate(tiles: &[String], e: Tile, ok: Tile, t: Tile) -> String {
    if t == e {
        "E".into()
    } else if t == ok {
        "Ok".into()
    } else if is_ident(&format!("T_{}", tiles[t])) {
        format!("T_{}", tiles[t])
    } else {
        format!("T{t}")
    }
}

fn tile_names(tiles: &[String], e: Tile, ok: Tile) -> (Vec<String>, BTreeMap<String, String>) {
    let preds: Vec<String> = (0..tiles.len()).map(|t| tile_predicate(tiles, e, ok, t)).collect();
    let names = preds.iter().zip(tiles).map(|(p, t)| (p.clone(), format!("tile {t}"))).collect();
    (preds, names)
}

fn tiling_names(mut names: BTreeMap<String, String>) -> BTreeMap<String, String> {
    for (p, d) in [
        ("Start", "start marker"),
        ("Go", "goal marker"),
        ("Fresh", "driver: a fresh location gets its tile"),
        ("A", "bottom row"),
        ("B", "left column"),
        ("H", "left neighbour of"),
        ("V", "below"),
    ] {
        names.insert(p.into(), d.into());
    }
    names
}

/// Formula (0) for the rule `R(K, L, M, N) = T`.
fn tiling_rule(k: &str, l: &str, m: &str, n: &str, t: &str) -> Formula {
    let v = |s: &str| ident(s);
    let (x, y, z, u, w) = (v("x"), v("y"), v("z"), v("u"), v("v"));
    let body = Formula::imps(
        [
            atom(k, &[y.clone()]),
            atom(l, &[z.clone()]),
            atom(m, &[u.clone()]),
            atom(n, &[w.clone()]),
            atom("V", &[z.clone(), y.clone()]),
            atom("H", &[z.clone(), u.clone()]),
            atom("H", &[u.clone(), w.clone()]),
            Formula::imps([atom(t, &[x.clone()]), atom("H", &[y.clone(), x.clone()]), atom("V", &[u, x.clone()])], a0("Go")),
        ],
        atom("Fresh", &[x]),
    );
    Formula::foralls(&["x", "y", "z", "u", "v"], body)
}

fn tiling_env(g: &TilingPuzzle, init: Formula, seed: &[Tile], prune: bool) -> (Environment, BTreeMap<String, String>) {
    let (preds, names) = tile_names(&g.tiles, g.e, g.ok);
    let mut env = Environment::new();
    push(&mut env, "Init".into(), init);
    push(&mut env, "Win".into(), Formula::forall("x", Formula::imp(Formula::atom("Ok", &["x"]), a0("Go"))));
    push(&mut env, "Next".into(), Formula::imp(Formula::forall("x", Formula::atom("Fresh", &["x"])), a0("Go")));
    let reach = g.reachable_tiles(seed);
    let t = g.tiles.len();
    for k in 0..t {
        for l in 0..t {
            for m in 0..t {
                for n in 0..t {
                    if prune && ![k, l, m, n].iter().all(|&q| reach[q]) {
                        continue;
                    }
                    let out = g.rule(k, l, m, n);
                    push(&mut env, format!("Rule_{k}_{l}_{m}_{n}"), tiling_rule(&preds[k], &preds[l], &preds[m], &preds[n], &preds[out]));
                }
            }
        }
    }
    let edge = |side: &str, rel: &str| {
        let body = Formula::imps(
            [
                Formula::atom("E", &["y"]),
                Formula::atom(side, &["y"]),
                Formula::imps([Formula::atom(rel, &["y", "x"]), Formula::atom("E", &["x"]), Formula::atom(side, &["x"])], a0("Go")),
            ],
            Formula::atom("Fresh", &["x"]),
        );
        Formula::foralls(&["x", "y"], body)
    };
    push(&mut env, "Row".into(), edge("A", "H"));
    push(&mut env, "Column".into(), edge("B", "V"));
    (env, tiling_names(names))
}

/// Formula (1): `(forall x. E(x) -> A(x) -> B(x) -> Go) -> Start`.
fn tiling_init() -> Formula {
    let body = Formula::imps([Formula::atom("E", &["x"]), Formula::atom("A", &["x"]), Formula::atom("B", &["x"])], a0("Go"));
    Formula::imp(Formula::forall("x", body), a0("Start"))
}

pub fn encode_tiling_delta2(g: &TilingPuzzle) -> EncodedProblem {
    encode_tiling_delta2_with(g, false)
}

/// With `prune`, rule instances mentioning a tile that cannot occur in the
/// tiling are left out.
pub fn encode_tiling_delta2_with(g: &TilingPuzzle, prune: bool) -> EncodedProblem {
    let (env, names) = tiling_env(g, tiling_init(), &[], prune);
    let params = BTreeMap::from([("prune".to_string(), prune.into())]);
    let provenance = Provenance { reduction: "tiling-delta2".into(), model_hash: g.hash(), params, names };
    EncodedProblem::new(env, a0("Start"), provenance)
}

/// Depth budget for `prove_general` on the tiling encoding of a puzzle whose
/// first `OK` is at `(m, n)`. Every location costs two nested goals, and the
/// fair search also builds some locations outside `L(m, n)`: on random
/// puzzles the depth needed stays below `3 |L(m, n)|`.
pub fn tiling_budget(m: usize, n: usize) -> usize {
    4 * location_count(m, n) + 8
}

/// Row 0 seeded with `input`: the initial formula becomes
/// `forall x0..xn. E(x0) -> A(x0) -> B(x0) -> A(x1) -> ... -> A(xn) ->
/// T1(x1) -> ... -> Tn(xn) -> H(x0,x1) -> ... -> H(x(n-1),xn) -> Go`
/// followed by `-> Start`.
pub fn encode_tiling_finite_sig(g: &TilingPuzzle, input: &[Tile]) -> EncodedProblem {
    let (preds, _) = tile_names(&g.tiles, g.e, g.ok);
    let xs: Vec<Ident> = (0..=input.len()).map(|i| ident(&format!("x{i}"))).collect();
    let mut prem = vec![atom("E", &xs[..1]), atom("A", &xs[..1]), atom("B", &xs[..1])];
    prem.extend(xs[1..].iter().map(|x| atom("A", &[x.clone()])));
    prem.extend(input.iter().zip(&xs[1..]).map(|(&t, x)| atom(&preds[t], &[x.clone()])));
    prem.extend(xs.windows(2).map(|w| atom("H", w)));
    let init = Formula::imp(Formula::foralls(&xs, Formula::imps(prem, a0("Go"))), a0("Start"));
    let (env, names) = tiling_env(g, init, input, false);
    let seed: Vec<serde_json::Value> = input.iter().map(|&t| g.tiles[t].clone().into()).collect();
    let params = BTreeMap::from([("input".to_string(), seed.into())]);
    let provenance = Provenance { reduction: "tiling-finite-signature".into(), model_hash: g.hash(), params, names };
    EncodedProblem::new(env, a0("Start"), provenance)
}

/// Bits used for coordinates: `n = floor(log2(2s)) + 1`, so `2^n > 2s`.
pub fn branching_bits(s: usize) -> usize {
    let two_s = 2 * s.max(1);
    (usize::BITS - two_s.leading_zeros()) as usize
}

const BIT0: &str = "x0";
const BIT1: &str = "x1";

fn bit(b: usize) -> Ident {
    ident(if b == 0 { BIT0 } else { BIT1 })
}

/// `v` in `k` bits, most significant first.
fn bits(v: usize, k: usize) -> Vec<Ident> {
    (0..k).rev().map(|i| bit((v >> i) & 1)).collect()
}

fn vars(stem: &str, k: usize) -> Vec<Ident> {
    (1..=k).map(|i| ident(&format!("{stem}{i}"))).collect()
}

fn cat(a: &[Ident], b: &[Ident]) -> Vec<Ident> {
    a.iter().chain(b).cloned().collect()
}

/// A family of patterns for a tuple of consecutive numbers: bound prefix
/// variables and, for each member, its full bit string.
struct Pattern {
    vars: Vec<Ident>,
    nums: Vec<Vec<Ident>>,
}

/// `t` and `t + 1`: the last `k` bits are `01...1` and `10...0`.
fn succ_patterns(n: usize, stem: &str) -> Vec<Pattern> {
    (1..=n)
        .map(|k| {
            let z = vars(stem, n - k);
            let lo = (1 << (k - 1)) - 1;
            Pattern { nums: vec![cat(&z, &bits(lo, k)), cat(&z, &bits(lo + 1, k))], vars: z }
        })
        .collect()
}

/// `m`, `m + 1`, `m + 2`: the last `k >= 2` bits of `m` are `01...1x`, so
/// adding 2 never carries past them.
fn triple_patterns(n: usize, stem: &str) -> Vec<Pattern> {
    let mut out = Vec::new();
    for k in 2..=n {
        for x in 0..2 {
            let z = vars(stem, n - k);
            let v = ((1 << (k - 2)) - 1) * 2 + x;
            out.push(Pattern { nums: (0..3).map(|d| cat(&z, &bits(v + d, k))).collect(), vars: z });
        }
    }
    out
}

/// Numbers `<= s` in `n` bits: `s` itself, and for each 1-bit of `s` the
/// numbers agreeing with `s` before it and having 0 there.
fn bound_patterns(s: usize, n: usize, stem: &str) -> Vec<Pattern> {
    let sb = bits(s, n);
    let mut out = vec![Pattern { vars: vec![], nums: vec![sb.clone()] }];
    for i in 0..n {
        if (s >> (n - 1 - i)) & 1 == 1 {
            let z = vars(stem, n - i - 1);
            out.push(Pattern { nums: vec![cat(&cat(&sb[..i], &[bit(0)]), &z)], vars: z });
        }
    }
    out
}

fn quantify(vs: &[Ident], body: Formula) -> Formula {
    Formula::foralls(vs, body)
}

/// Branching puzzle and bound `s` as a Sigma_1 judgment `Γ ⊢ Start` with
/// 2n-ary tile predicates over the bits `x0`, `x1`.
pub fn encode_branching_sigma1(g: &BranchingPuzzle, s: usize, monadic: bool) -> EncodedProblem {
    encode_branching_sigma1_with(g, s, monadic, false)
}

pub fn encode_branching_sigma1_with(g: &BranchingPuzzle, s: usize, monadic: bool, prune: bool) -> EncodedProblem {
    let s = s.max(1);
    let n = branching_bits(s);
    let (preds, names) = tile_names(&g.tiles, g.e, g.ok);
    let tile = |t: Tile, m: &[Ident], tt: &[Ident]| atom(&preds[t], &cat(m, tt));
    let zero = bits(0, n);
    let go = a0("Go");
    let mut env = Environment::new();
    push(&mut env, "Init".into(), Formula::imp(Formula::imp(atom("E", &cat(&zero, &zero)), go.clone()), a0("Start")));
    for (i, mp) in bound_patterns(s, n, "z").iter().enumerate() {
        for (j, tp) in bound_patterns(s, n, "y").iter().enumerate() {
            let body = Formula::imp(atom("Ok", &cat(&mp.nums[0], &tp.nums[0])), go.clone());
            push(&mut env, format!("Win_{i}_{j}"), quantify(&cat(&mp.vars, &tp.vars), body));
        }
    }
    let reach = reachable_branching(g);
    let tsucc = succ_patterns(n, "y");
    let mtrip = triple_patterns(n, "z");
    for ([k, l, m, nn], out) in g.rules() {
        if prune && ![k, l, m, nn].iter().all(|&q| reach[q]) {
            continue;
        }
        for (side, child, res) in [("l", "Left", out[0]), ("r", "Right", out[1])] {
            for (a, mp) in mtrip.iter().enumerate() {
                for (b, tp) in tsucc.iter().enumerate() {
                    let (m0, m1, m2) = (&mp.nums[0], &mp.nums[1], &mp.nums[2]);
                    let (t0, t1) = (&tp.nums[0], &tp.nums[1]);
                    let body = Formula::imps(
                        [
                            tile(k, m0, t1),
                            tile(l, m0, t0),
                            tile(m, m1, t0),
                            tile(nn, m2, t0),
                            atom(child, t1),
                            Formula::imp(tile(res, m1, t1), go.clone()),
                        ],
                        go.clone(),
                    );
                    push(&mut env, format!("Step{side}_{k}_{l}_{m}_{nn}_{a}_{b}"), quantify(&cat(&mp.vars, &tp.vars), body));
                }
            }
        }
    }
    for (a, mp) in succ_patterns(n, "z").iter().enumerate() {
        let body = Formula::imps([tile(g.e, &mp.nums[0], &zero), Formula::imp(tile(g.e, &mp.nums[1], &zero), go.clone())], go.clone());
        push(&mut env, format!("Row_{a}"), quantify(&mp.vars, body));
    }
    for (b, tp) in tsucc.iter().enumerate() {
        let (t0, t1) = (&tp.nums[0], &tp.nums[1]);
        let child = |c: &str| Formula::imps([atom(c, t1), tile(g.e, &zero, t1)], go.clone());
        let body = Formula::imps([tile(g.e, &zero, t0), child("Left"), child("Right")], go.clone());
        push(&mut env, format!("Column_{b}"), quantify(&tp.vars, body));
    }
    let mut names = names;
    for (p, d) in [("Start", "start marker"), ("Go", "goal marker"), ("Left", "row reached by a 0 step"), ("Right", "row reached by a 1 step")] {
        names.insert(p.into(), d.into());
    }
    let params = BTreeMap::from([
        ("s".to_string(), s.into()),
        ("n".to_string(), n.into()),
        ("prune".to_string(), prune.into()),
        ("monadic".to_string(), false.into()),
    ]);
    let provenance = Provenance { reduction: "branching-sigma1".into(), model_hash: g.hash(), params, names };
    let p = EncodedProblem::new(env, a0("Start"), provenance);
    if monadic {
        // x0 is free and never bound here, so it can fill the padding
        // without adding a variable to the pool.
        p.to_monadic_padded(Some(ident("x0"))).expect("the branching encoding is easy")
    } else {
        p
    }
}

fn reachable_branching(g: &BranchingPuzzle) -> Vec<bool> {
    let mut reach = vec![false; g.tiles.len()];
    reach[g.e] = true;
    loop {
        let mut changed = false;
        for (q, out) in g.rules() {
            if q.iter().all(|&x| reach[x]) {
                for o in out {
                    if !reach[o] {
                        reach[o] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Predicate name for each switch set, per instruction and position.
/// Equal sets of the same kind share a predicate `I1`, `I2`, ...
pub fn switch_set_predicates(machine: &BusMachine) -> Vec<Vec<Ident>> {
    let mut seen: HashMap<(SwitchKind, Vec<Switch>), Ident> = HashMap::new();
    machine
        .instructions
        .iter()
        .map(|ins| {
            ins.sets
                .iter()
                .map(|set| {
                    let next = seen.len() + 1;
                    seen.entry((ins.kind, set.clone())).or_insert_with(|| ident(&format!("I{next}"))).clone()
                })
                .collect()
        })
        .collect()
}

/// Bound variable stems, lengthened until they avoid the alphabet.
fn bus_stems(machine: &BusMachine) -> [String; 4] {
    ["x", "y", "z", "u"].map(|s| {
        let mut stem = s.to_string();
        while (1..=machine.m).any(|i| machine.alphabet.contains(&format!("{stem}{i}"))) {
            stem.push('_');
        }
        stem
    })
}

fn psi(ins: &Instruction, preds: &[Ident], stems: &[String; 4], m: usize) -> Formula {
    let [x, y, z, u] = stems.clone().map(|s| vars(&s, m));
    let bus = |v: &[Ident]| atom("Bus", v);
    let sw = |i: usize, cols: &[&Vec<Ident>]| atom(&preds[i], &cols.iter().map(|c| c[i].clone()).collect::<Vec<_>>());
    let (qs, mut prem): (Vec<Ident>, Vec<Formula>) = match ins.kind {
        SwitchKind::Simple => (cat(&x, &y), (0..m).map(|i| sw(i, &[&x, &y])).collect()),
        SwitchKind::Labeled => (cat(&cat(&x, &y), &cat(&z, &u)), (0..m).map(|i| sw(i, &[&x, &y, &z, &u])).collect()),
        SwitchKind::Branching => (cat(&cat(&x, &y), &z), (0..m).map(|i| sw(i, &[&x, &y, &z])).collect()),
    };
    match ins.kind {
        SwitchKind::Simple => prem.push(bus(&y)),
        SwitchKind::Labeled => prem.push(Formula::imp(Formula::imp(bus(&u), bus(&z)), bus(&y))),
        SwitchKind::Branching => {
            prem.push(bus(&z));
            prem.push(bus(&y));
        }
    }
    quantify(&qs, Formula::imps(prem, bus(&x)))
}

/// Bus machine as a Sigma_1 judgment `Γ_M ⊢ Bus(w0)`; the alphabet symbols
/// are the free variables.
pub fn encode_bus_sigma1(machine: &BusMachine) -> EncodedProblem {
    let word = |w: &[usize]| w.iter().map(|&s| ident(&machine.alphabet[s])).collect::<Vec<_>>();
    let preds = switch_set_predicates(machine);
    let stems = bus_stems(machine);
    let mut env = Environment::new();
    push(&mut env, "Final".into(), atom("Bus", &word(&machine.w1)));
    let mut emitted: Vec<&Ident> = Vec::new();
    let mut names = BTreeMap::from([("Bus".to_string(), "bus content".to_string())]);
    for (ins, ps) in machine.instructions.iter().zip(&preds) {
        for (set, p) in ins.sets.iter().zip(ps) {
            if emitted.contains(&p) {
                continue;
            }
            emitted.push(p);
            names.insert(p.to_string(), format!("{:?} switch set", ins.kind).to_lowercase());
            for (j, sw) in set.iter().enumerate() {
                push(&mut env, format!("S{}_{j}", &p[1..]), atom(p, &word(&sw.symbols())));
            }
        }
    }
    for (i, (ins, ps)) in machine.instructions.iter().zip(&preds).enumerate() {
        push(&mut env, format!("Psi{}", i + 1), psi(ins, ps, &stems, machine.m));
    }
    let params = BTreeMap::from([("m".to_string(), machine.m.into())]);
    let provenance = Provenance { reduction: "bus-sigma1".into(), model_hash: machine.hash(), params, names };
    EncodedProblem::new(env, atom("Bus", &word(&machine.w0)), provenance)
}
