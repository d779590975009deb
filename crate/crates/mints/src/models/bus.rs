//! Bus machines: alternating rewriting of a fixed-length word, where labeled
//! steps create local instructions usable later in the run.

use std::collections::{BTreeSet, HashMap, VecDeque};

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, sha256_hex, ModelError};
use crate::syntax::{is_ident, starts_lower};

/// Index into the alphabet.
pub type Sym = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchKind {
    Simple,
    Labeled,
    Branching,
}

impl SwitchKind {
    pub fn arity(self) -> usize {
        match self {
            SwitchKind::Simple => 2,
            SwitchKind::Labeled => 4,
            SwitchKind::Branching => 3,
        }
    }
}

/// `a ↦ b`, `a ↦ b (c ↦ d)` or `a ↦ b × c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Switch {
    Simple(Sym, Sym),
    Labeled(Sym, Sym, Sym, Sym),
    Branching(Sym, Sym, Sym),
}

impl Switch {
    pub fn kind(&self) -> SwitchKind {
        match self {
            Switch::Simple(..) => SwitchKind::Simple,
            Switch::Labeled(..) => SwitchKind::Labeled,
            Switch::Branching(..) => SwitchKind::Branching,
        }
    }

    pub fn source(&self) -> Sym {
        match *self {
            Switch::Simple(a, _) | Switch::Labeled(a, ..) | Switch::Branching(a, ..) => a,
        }
    }

    /// Symbols in argument order.
    pub fn symbols(&self) -> Vec<Sym> {
        match *self {
            Switch::Simple(a, b) => vec![a, b],
            Switch::Labeled(a, b, c, d) => vec![a, b, c, d],
            Switch::Branching(a, b, c) => vec![a, b, c],
        }
    }

    fn from_symbols(s: &[Sym]) -> Option<Switch> {
        match *s {
            [a, b] => Some(Switch::Simple(a, b)),
            [a, b, c, d] => Some(Switch::Labeled(a, b, c, d)),
            [a, b, c] => Some(Switch::Branching(a, b, c)),
            _ => None,
        }
    }
}

/// An m-tuple of switch sets of one kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub kind: SwitchKind,
    pub sets: Vec<Vec<Switch>>,
}

/// A simple instruction with singleton sets, i.e. the rewrite `from ⇒ to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalInstruction {
    pub from: Vec<Sym>,
    pub to: Vec<Sym>,
}

impl LocalInstruction {
    pub fn as_instruction(&self) -> Instruction {
        Instruction { kind: SwitchKind::Simple, sets: self.from.iter().zip(&self.to).map(|(&a, &b)| vec![Switch::Simple(a, b)]).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BusMachine {
    pub alphabet: Vec<String>,
    pub m: usize,
    pub w0: Vec<Sym>,
    pub w1: Vec<Sym>,
    pub instructions: Vec<Instruction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BusConfiguration {
    pub word: Vec<Sym>,
    pub locals: BTreeSet<LocalInstruction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BusMove {
    One(BusConfiguration),
    Two(BusConfiguration, BusConfiguration),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstrRef {
    Global(usize),
    Local(LocalInstruction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Accepts,
    Rejects,
    Unknown,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WordJson {
    Chars(String),
    Symbols(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct InstructionJson {
    kind: SwitchKind,
    sets: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
struct BusJson {
    alphabet: Vec<String>,
    m: usize,
    w0: WordJson,
    w1: WordJson,
    instructions: Vec<InstructionJson>,
}

impl BusMachine {
    /// Validates the machine; switch sets are sorted and deduplicated.
    pub fn new(alphabet: Vec<String>, m: usize, w0: Vec<Sym>, w1: Vec<Sym>, mut instructions: Vec<Instruction>) -> Result<BusMachine, ModelError> {
        if alphabet.is_empty() {
            return invalid("empty alphabet");
        }
        for (i, a) in alphabet.iter().enumerate() {
            if !is_ident(a) || !starts_lower(a) {
                return invalid(format!("alphabet symbol `{a}` must be a lowercase identifier"));
            }
            if alphabet[..i].contains(a) {
                return invalid(format!("duplicate alphabet symbol `{a}`"));
            }
        }
        if m == 0 {
            return invalid("bus length must be positive");
        }
        let k = alphabet.len();
        for w in [&w0, &w1] {
            if w.len() != m || w.iter().any(|&s| s >= k) {
                return invalid("initial and final words must be words of length m");
            }
        }
        for (i, ins) in instructions.iter_mut().enumerate() {
            if ins.sets.len() != m {
                return invalid(format!("instruction {i} has {} sets, expected {m}", ins.sets.len()));
            }
            for set in &mut ins.sets {
                if set.iter().any(|sw| sw.kind() != ins.kind || sw.symbols().iter().any(|&s| s >= k)) {
                    return invalid(format!("instruction {i} mixes switch kinds or uses unknown symbols"));
                }
                set.sort();
                set.dedup();
            }
        }
        Ok(BusMachine { alphabet, m, w0, w1, instructions })
    }

    pub fn from_json(text: &str) -> Result<BusMachine, ModelError> {
        let j: BusJson = serde_json::from_str(text)?;
        let sym = |s: &str| j.alphabet.iter().position(|a| a == s).ok_or_else(|| ModelError::Invalid(format!("unknown symbol `{s}`")));
        let word = |w: &WordJson| -> Result<Vec<Sym>, ModelError> {
            match w {
                WordJson::Chars(s) => s.chars().map(|c| sym(&c.to_string())).collect(),
                WordJson::Symbols(v) => v.iter().map(|s| sym(s)).collect(),
            }
        };
        let mut instructions = Vec::new();
        for ins in &j.instructions {
            let mut sets = Vec::new();
            for set in &ins.sets {
                let mut sws = Vec::new();
                for sw in set {
                    let syms = sw.iter().map(|s| sym(s)).collect::<Result<Vec<_>, _>>()?;
                    let s = Switch::from_symbols(&syms).ok_or_else(|| ModelError::Invalid(format!("switch {sw:?} has {} symbols", sw.len())))?;
                    sws.push(s);
                }
                sets.push(sws);
            }
            instructions.push(Instruction { kind: ins.kind, sets });
        }
        BusMachine::new(j.alphabet.clone(), j.m, word(&j.w0)?, word(&j.w1)?, instructions)
    }

    pub fn to_json(&self) -> String {
        let chars = self.alphabet.iter().all(|a| a.chars().count() == 1);
        let word = |w: &[Sym]| {
            if chars {
                WordJson::Chars(self.word_string(w))
            } else {
                WordJson::Symbols(w.iter().map(|&s| self.alphabet[s].clone()).collect())
            }
        };
        let instructions = self
            .instructions
            .iter()
            .map(|ins| InstructionJson {
                kind: ins.kind,
                sets: ins.sets.iter().map(|set| set.iter().map(|sw| sw.symbols().iter().map(|&s| self.alphabet[s].clone()).collect()).collect()).collect(),
            })
            .collect();
        let j = BusJson { alphabet: self.alphabet.clone(), m: self.m, w0: word(&self.w0), w1: word(&self.w1), instructions };
        serde_json::to_string(&j).expect("plain data serializes")
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }

    /// Symbols concatenated; space-separated when some symbol is longer
    /// than one character.
    pub fn word_string(&self, w: &[Sym]) -> String {
        let sep = if self.alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { " " };
        w.iter().map(|&s| self.alphabet[s].as_str()).join(sep)
    }

    pub fn initial(&self) -> BusConfiguration {
        BusConfiguration { word: self.w0.clone(), locals: BTreeSet::new() }
    }

    pub fn is_final(&self, cfg: &BusConfiguration) -> bool {
        cfg.word == self.w1
    }

    /// Global instructions first, then local ones in their set order.
    pub fn successors(&self, cfg: &BusConfiguration) -> Vec<(InstrRef, BusMove)> {
        let mut out = Vec::new();
        for (i, ins) in self.instructions.iter().enumerate() {
            out.extend(bus_step(cfg, ins).into_iter().map(|mv| (InstrRef::Global(i), mv)));
        }
        for j in &cfg.locals {
            out.extend(bus_step(cfg, &j.as_instruction()).into_iter().map(|mv| (InstrRef::Local(j.clone()), mv)));
        }
        out
    }

    /// Alphabet `a, b, ...` of size 2..=`max_alpha`, bus length
    /// 1..=`max_m`, 1..=`max_instr` instructions with 1 or 2 switches per
    /// set. Half the instructions are simple.
    pub fn random<R: Rng>(rng: &mut R, max_alpha: usize, max_m: usize, max_instr: usize) -> BusMachine {
        let k = rng.gen_range(2..=max_alpha.max(2));
        let alphabet: Vec<String> = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let m = rng.gen_range(1..=max_m.max(1));
        let word = |rng: &mut R| (0..m).map(|_| rng.gen_range(0..k)).collect::<Vec<_>>();
        let w0 = word(rng);
        let w1 = word(rng);
        let count = rng.gen_range(1..=max_instr.max(1));
        let instructions = (0..count)
            .map(|_| {
                let kind = match rng.gen_range(0..4) {
                    0 | 1 => SwitchKind::Simple,
                    2 => SwitchKind::Labeled,
                    _ => SwitchKind::Branching,
                };
                let sets = (0..m)
                    .map(|_| {
                        (0..rng.gen_range(1..=2))
                            .map(|_| {
                                let syms: Vec<Sym> = (0..kind.arity()).map(|_| rng.gen_range(0..k)).collect();
                                Switch::from_symbols(&syms).unwrap()
                            })
                            .collect()
                    })
                    .collect();
                Instruction { kind, sets }
            })
            .collect();
        BusMachine::new(alphabet, m, w0, w1, instructions).unwrap()
    }
}

/// All ways to execute `instr` in `cfg`; empty when it is inapplicable.
pub fn bus_step(cfg: &BusConfiguration, instr: &Instruction) -> Vec<BusMove> {
    let options: Vec<Vec<Switch>> =
        instr.sets.iter().zip(&cfg.word).map(|(set, &a)| set.iter().filter(|sw| sw.source() == a).copied().collect()).collect();
    if options.len() != cfg.word.len() || options.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let with_word = |word: Vec<Sym>, locals: &BTreeSet<LocalInstruction>| BusConfiguration { word, locals: locals.clone() };
    options
        .into_iter()
        .multi_cartesian_product()
        .map(|choice| match instr.kind {
            SwitchKind::Simple => {
                let w = choice.iter().map(|sw| sw.symbols()[1]).collect();
                BusMove::One(with_word(w, &cfg.locals))
            }
            SwitchKind::Labeled => {
                let syms: Vec<Vec<Sym>> = choice.iter().map(Switch::symbols).collect();
                let mut locals = cfg.locals.clone();
                locals.insert(LocalInstruction { from: syms.iter().map(|s| s[2]).collect(), to: syms.iter().map(|s| s[3]).collect() });
                BusMove::One(BusConfiguration { word: syms.iter().map(|s| s[1]).collect(), locals })
            }
            SwitchKind::Branching => {
                let syms: Vec<Vec<Sym>> = choice.iter().map(Switch::symbols).collect();
                BusMove::Two(with_word(syms.iter().map(|s| s[1]).collect(), &cfg.locals), with_word(syms.iter().map(|s| s[2]).collect(), &cfg.locals))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    One(usize),
    Two(usize, usize),
}

/// The configurations reachable from the initial one, breadth first.
/// Final configurations are not expanded.
#[derive(Clone, Debug)]
pub struct ConfigGraph {
    pub configs: Vec<BusConfiguration>,
    pub edges: Vec<Vec<(InstrRef, Target)>>,
    /// False when the budget stopped the exploration.
    pub complete: bool,
}

pub fn explore(machine: &BusMachine, budget: usize) -> ConfigGraph {
    let mut configs = vec![machine.initial()];
    let mut index: HashMap<BusConfiguration, usize> = HashMap::from([(machine.initial(), 0)]);
    let mut edges: Vec<Vec<(InstrRef, Target)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    'outer: while let Some(i) = queue.pop_front() {
        if machine.is_final(&configs[i]) {
            continue;
        }
        for (r, mv) in machine.successors(&configs[i].clone()) {
            let targets = match mv {
                BusMove::One(c) => vec![c],
                BusMove::Two(c, d) => vec![c, d],
            };
            let mut ids = Vec::new();
            for c in targets {
                let id = match index.get(&c) {
                    Some(&id) => id,
                    None => {
                        if configs.len() >= budget {
                            complete = false;
                            break 'outer;
                        }
                        let id = configs.len();
                        index.insert(c.clone(), id);
                        configs.push(c);
                        edges.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                ids.push(id);
            }
            let t = if ids.len() == 1 { Target::One(ids[0]) } else { Target::Two(ids[0], ids[1]) };
            edges[i].push((r, t));
        }
    }
    ConfigGraph { configs, edges, complete }
}

impl ConfigGraph {
    /// Least fixpoint of eventual acceptance by a worklist: for every
    /// accepting configuration, the edge that made it accept. Witness edges
    /// only lead to configurations accepted earlier, so following them
    /// terminates.
    pub fn accepting(&self, machine: &BusMachine) -> Vec<Option<Option<usize>>> {
        let n = self.configs.len();
        let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, es) in self.edges.iter().enumerate() {
            for (e, (_, t)) in es.iter().enumerate() {
                match *t {
                    Target::One(a) => preds[a].push((i, e)),
                    Target::Two(a, b) => {
                        preds[a].push((i, e));
                        if b != a {
                            preds[b].push((i, e));
                        }
                    }
                }
            }
        }
        let mut acc: Vec<Option<Option<usize>>> = vec![None; n];
        let mut queue = VecDeque::new();
        for (i, c) in self.configs.iter().enumerate() {
            if machine.is_final(c) {
                acc[i] = Some(None);
                queue.push_back(i);
            }
        }
        while let Some(j) = queue.pop_front() {
            for &(i, e) in &preds[j] {
                if acc[i].is_some() {
                    continue;
                }
                let done = match self.edges[i][e].1 {
                    Target::One(_) => true,
                    Target::Two(a, b) => acc[a].is_some() && acc[b].is_some(),
                };
                if done {
                    acc[i] = Some(Some(e));
                    queue.push_back(i);
                }
            }
        }
        acc
    }
}

/// Acceptance from the initial configuration, exploring at most `budget`
/// configurations. A partial exploration can still prove acceptance.
pub fn bus_accepts(machine: &BusMachine, budget: usize) -> Acceptance {
    let g = explore(machine, budget.max(1));
    if g.accepting(machine)[0].is_some() {
        Acceptance::Accepts
    } else if g.complete {
        Acceptance::Rejects
    } else {
        Acceptance::Unknown
    }
}

/// An accepting computation: a tree with final leaves.
#[derive(Clone, Debug)]
pub struct RunTree {
    pub config: BusConfiguration,
    pub step: Option<(InstrRef, Vec<RunTree>)>,
}

impl RunTree {
    /// Number of transitions.
    pub fn steps(&self) -> usize {
        match &self.step {
            None => 0,
            Some((_, kids)) => 1 + kids.iter().map(RunTree::steps).sum::<usize>(),
        }
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a RunTree)) {
        f(self);
        if let Some((_, kids)) = &self.step {
            for k in kids {
                k.walk(f);
            }
        }
    }
}

pub fn accepting_run(machine: &BusMachine, budget: usize) -> Option<RunTree> {
    let g = explore(machine, budget.max(1));
    let acc = g.accepting(machine);
    acc[0]?;
    fn build(g: &ConfigGraph, acc: &[Option<Option<usize>>], i: usize) -> RunTree {
        let step = acc[i].unwrap().map(|e| {
            let (r, t) = &g.edges[i][e];
            let kids = match *t {
                Target::One(a) => vec![build(g, acc, a)],
                Target::Two(a, b) => vec![build(g, acc, a), build(g, acc, b)],
            };
            (r.clone(), kids)
        });
        RunTree { config: g.configs[i].clone(), step }
    }
    Some(build(&g, &acc, 0))
}
