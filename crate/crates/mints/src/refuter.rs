//! Refutation soups: sets of Sigma_1 judgments closed under answering every
//! question they induce. A soup containing a judgment certifies that it is
//! not provable.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::prover::spine::{assignments, match_formula, Spine};
use crate::prover::{split_premises, ProverError, Sigma1Judgment, Sigma1Prover, X0};
use crate::syntax::{ident, Atom, Environment, Formula, Ident, SyntaxError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RefuterError {
    #[error(transparent)]
    NotSigma1(#[from] ProverError),
    #[error("block index {index} out of range 1..={blocks}")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("bad soup text at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A declaration whose head instantiates to the goal, with the
/// instantiation of its quantified variables and the instantiated premise
/// blocks `sigma_1[S], ..., sigma_k[S]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Question {
    pub proof_var: Ident,
    pub subst: Vec<(Ident, Ident)>,
    pub blocks: Vec<Formula>,
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.subst.iter().map(|(y, x)| format!("{y}:={x}")).collect();
        write!(f, "({}, [{}])", self.proof_var, s.join(", "))
    }
}

fn extend_env(env: &Environment, fs: &[Formula]) -> Environment {
    let mut out = env.clone();
    let mut used: HashSet<Ident> = env.decls.iter().map(|(n, _)| n.clone()).collect();
    let mut next = 1usize;
    for f in fs {
        if out.formulas().any(|g| g.alpha_eq(f)) {
            continue;
        }
        let name = loop {
            let n = ident(&format!("Y{next}"));
            next += 1;
            if !used.contains(&n) {
                break n;
            }
        };
        used.insert(name.clone());
        out.decls.push((name, f.clone()));
    }
    out
}

/// `env |- t1 -> ... -> a` as `env, t1, ... |- a`.
pub fn normalize(j: &Sigma1Judgment) -> Sigma1Judgment {
    let (prem, a) = split_premises(&j.goal);
    Sigma1Judgment { env: extend_env(&j.env, &prem), goal: Formula::Atom(a) }
}

/// All questions induced by the (normalized) judgment, in environment order
/// and then lexicographically in the pool.
pub fn questions(j: &Sigma1Judgment) -> Vec<Question> {
    let j = normalize(j);
    let Formula::Atom(goal) = &j.goal else { unreachable!() };
    let pool = j.pool().vars;
    let mut out = Vec::new();
    for (name, f) in &j.env.decls {
        let spine = Spine::of(f);
        let mut binding = vec![None; spine.vars.len()];
        if !spine.match_head(goal, &mut binding) {
            continue;
        }
        let unbound: Vec<usize> = (0..binding.len()).filter(|&i| binding[i].is_none()).collect();
        for assign in assignments(unbound.len(), &pool) {
            let mut b = binding.clone();
            for (k, v) in unbound.iter().zip(assign) {
                b[*k] = Some(v);
            }
            let subst = spine.orig.iter().cloned().zip(b.iter().map(|v| v.clone().unwrap())).collect();
            let blocks = spine.premises().map(|(_, p)| spine.instantiate(p, &b)).collect();
            out.push(Question { proof_var: name.clone(), subst, blocks });
        }
    }
    out
}

/// The `index`-th answer (1-based) with the environment of `j` itself.
pub fn answer(q: &Question, j: &Sigma1Judgment, index: usize) -> Result<Sigma1Judgment, RefuterError> {
    if index == 0 || index > q.blocks.len() {
        return Err(RefuterError::IndexOutOfRange { index, blocks: q.blocks.len() });
    }
    let j = normalize(j);
    let (taus, a) = split_premises(&q.blocks[index - 1]);
    Ok(Sigma1Judgment { env: extend_env(&j.env, &taus), goal: Formula::Atom(a) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Soup {
    pub judgments: Vec<Sigma1Judgment>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SoupOutcome {
    Soup(Soup),
    Provable,
}

fn judgment_line(j: &Sigma1Judgment) -> String {
    let parts: Vec<String> = j.env.decls.iter().map(|(n, f)| format!("{n} : {f}")).collect();
    if parts.is_empty() {
        format!("|- {}", j.goal)
    } else {
        format!("{} |- {}", parts.join("; "), j.goal)
    }
}

fn parse_line(line: &str, no: usize) -> Result<Sigma1Judgment, RefuterError> {
    let Some(pos) = line.rfind("|-") else {
        return Err(RefuterError::Format { line: no, msg: "missing |-".into() });
    };
    let env = Environment::parse(&line[..pos])?;
    let goal = crate::syntax::parse_formula(&line[pos + 2..])?;
    Ok(Sigma1Judgment::new(env, goal)?)
}

impl Soup {
    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    /// Header naming the refuted judgment, then one member per line.
    pub fn to_text(&self, j0: &Sigma1Judgment) -> String {
        let mut s = format!("refutes: {}\n", judgment_line(j0));
        for j in &self.judgments {
            s.push_str(&judgment_line(j));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<(Sigma1Judgment, Soup), RefuterError> {
        let mut j0 = None;
        let mut judgments = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("refutes:") {
                j0 = Some(parse_line(rest, i + 1)?);
            } else {
                judgments.push(parse_line(line, i + 1)?);
            }
        }
        let j0 = j0.ok_or(RefuterError::Format { line: 0, msg: "missing refutes: header".into() })?;
        Ok((j0, Soup { judgments }))
    }
}

/// Hypotheses interned up to alpha-equivalence, each with its compiled
/// spine.
#[derive(Default)]
struct Hyps {
    ids: HashMap<Formula, u32>,
    forms: Vec<Formula>,
    spines: Vec<Spine>,
}

impl Hyps {
    fn intern(&mut self, f: &Formula) -> u32 {
        let k = f.alpha_key();
        if let Some(&id) = self.ids.get(&k) {
            return id;
        }
        let id = self.forms.len() as u32;
        self.ids.insert(k, id);
        self.forms.push(f.clone());
        self.spines.push(Spine::of(f));
        id
    }
}

/// Sorted, deduplicated ids of an environment.
fn ids_of(env: &Environment, hyps: &mut Hyps) -> Vec<u32> {
    let mut v: Vec<u32> = env.formulas().map(|f| hyps.intern(f)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// A member under construction: hypotheses beyond the root environment, in
/// the order they were added, and the goal.
#[derive(Clone)]
struct Member {
    extra: Vec<u32>,
    goal: Atom,
}

impl Member {
    fn key(&self) -> (Vec<u32>, Atom) {
        let mut e = self.extra.clone();
        e.sort_unstable();
        (e, self.goal.clone())
    }
}

/// Closes `{j0}` under answers, picking for each unanswered question the
/// lowest block whose answer is unprovable.
pub fn build_soup(j0: &Sigma1Judgment) -> Result<SoupOutcome, RefuterError> {
    let j0 = Sigma1Judgment::new(j0.env.clone(), j0.goal.clone())?;
    let root = normalize(&j0);
    let mut pool = root.pool().vars;
    if !pool.iter().any(|v| &**v == X0) {
        pool.push(ident(X0));
        pool.sort();
    }
    let mut prover = Sigma1Prover::with_pool(&root, pool.clone());
    let mut hyps = Hyps::default();
    let mut base: Vec<u32> = Vec::new();
    for f in root.env.formulas() {
        let id = hyps.intern(f);
        if !base.contains(&id) {
            base.push(id);
        }
    }
    let in_base: HashSet<u32> = base.iter().copied().collect();
    let mut by_pred: HashMap<Ident, Vec<u32>> = HashMap::new();
    for &id in &base {
        by_pred.entry(hyps.spines[id as usize].head.pred.clone()).or_default().push(id);
    }
    let Formula::Atom(goal) = &root.goal else { unreachable!() };
    let first = Member { extra: Vec::new(), goal: goal.clone() };
    let mut keys: HashSet<(Vec<u32>, Atom)> = HashSet::new();
    keys.insert(first.key());
    let mut members = vec![first];
    let mut i = 0;
    while i < members.len() {
        let m = members[i].clone();
        let mut decls: Vec<u32> = by_pred.get(&m.goal.pred).cloned().unwrap_or_default();
        decls.extend(m.extra.iter().copied().filter(|&id| hyps.spines[id as usize].head.pred == m.goal.pred));
        for d in decls {
            let spine = &hyps.spines[d as usize];
            let mut binding = vec![None; spine.vars.len()];
            if !spine.match_head(&m.goal, &mut binding) {
                continue;
            }
            let unbound: Vec<usize> = (0..binding.len()).filter(|&k| binding[k].is_none()).collect();
            for assign in assignments(unbound.len(), &pool) {
                let spine = &hyps.spines[d as usize];
                let mut b = binding.clone();
                for (k, v) in unbound.iter().zip(assign) {
                    b[*k] = Some(v);
                }
                let blocks: Vec<Formula> = spine.premises().map(|(_, p)| spine.instantiate(p, &b)).collect();
                let answers: Vec<Member> = blocks
                    .iter()
                    .map(|block| {
                        let (taus, a) = split_premises(block);
                        let mut extra = m.extra.clone();
                        for t in &taus {
                            let id = hyps.intern(t);
                            if !in_base.contains(&id) && !extra.contains(&id) {
                                extra.push(id);
                            }
                        }
                        Member { extra, goal: a }
                    })
                    .collect();
                if answers.iter().any(|a| keys.contains(&a.key())) {
                    continue;
                }
                let chosen = answers.into_iter().find(|a| {
                    let extra: Vec<Formula> = a.extra.iter().map(|&id| hyps.forms[id as usize].clone()).collect();
                    !prover.provable_with(&extra, &Formula::Atom(a.goal.clone()))
                });
                match chosen {
                    None => return Ok(SoupOutcome::Provable),
                    Some(a) => {
                        keys.insert(a.key());
                        members.push(a);
                    }
                }
            }
        }
        i += 1;
    }
    let judgments = members
        .iter()
        .map(|m| {
            let extra: Vec<Formula> = m.extra.iter().map(|&id| hyps.forms[id as usize].clone()).collect();
            Sigma1Judgment { env: extend_env(&root.env, &extra), goal: Formula::Atom(m.goal.clone()) }
        })
        .collect();
    Ok(SoupOutcome::Soup(Soup { judgments }))
}

/// Checks that the soup contains `j0` (normalized), that every member is a
/// Sigma_1 judgment with an atomic goal not among its hypotheses, and that
/// every induced question has an answer `G', t1[S], ... |- aj[S]` in the soup
/// for some `G'` containing the member's environment.
pub fn verify_soup(s: &Soup, j0: &Sigma1Judgment) -> bool {
    let Ok(j0) = Sigma1Judgment::new(j0.env.clone(), j0.goal.clone()) else { return false };
    let mut hyps = Hyps::default();
    let mut pi1: HashMap<u32, bool> = HashMap::new();
    let root = normalize(&j0);
    let root_key = (ids_of(&root.env, &mut hyps), root.goal.clone());
    let mut members: Vec<(Vec<u32>, Atom)> = Vec::with_capacity(s.len());
    for m in &s.judgments {
        let Formula::Atom(goal) = &m.goal else { return false };
        let ids = ids_of(&m.env, &mut hyps);
        for &id in &ids {
            let ok = *pi1.entry(id).or_insert_with(|| crate::hierarchy::classify(&hyps.forms[id as usize]).pi_level <= 1);
            if !ok || hyps.forms[id as usize].alpha_eq(&m.goal) {
                return false;
            }
        }
        members.push((ids, goal.clone()));
    }
    let exact: HashSet<(Vec<u32>, Formula)> = members.iter().map(|(ids, g)| (ids.clone(), Formula::Atom(g.clone()))).collect();
    if !exact.contains(&root_key) {
        return false;
    }
    let mut by_goal: HashMap<Atom, Vec<HashSet<u32>>> = HashMap::new();
    for (ids, g) in &members {
        by_goal.entry(g.clone()).or_default().push(ids.iter().copied().collect());
    }
    let mut fv: HashMap<u32, Vec<Ident>> = HashMap::new();
    members.iter().all(|(own, goal)| {
        let mut pool: Vec<Ident> = goal.args.clone();
        for &id in own {
            pool.extend(fv.entry(id).or_insert_with(|| hyps.forms[id as usize].free_vars().into_iter().collect()).iter().cloned());
        }
        pool.sort();
        pool.dedup();
        if pool.is_empty() {
            pool.push(ident(X0));
        }
        own.iter().all(|&d| {
            let spine = &hyps.spines[d as usize];
            let mut binding = vec![None; spine.vars.len()];
            if !spine.match_head(goal, &mut binding) {
                return true;
            }
            let unbound: Vec<usize> = (0..binding.len()).filter(|&k| binding[k].is_none()).collect();
            let blocks_for = |assign: Vec<Ident>| -> Vec<Formula> {
                let mut b = binding.clone();
                for (k, v) in unbound.iter().zip(assign) {
                    b[*k] = Some(v);
                }
                spine.premises().map(|(_, p)| spine.instantiate(p, &b)).collect()
            };
            let questions: Vec<Vec<Formula>> = assignments(unbound.len(), &pool).into_iter().map(blocks_for).collect();
            questions.iter().all(|blocks| {
                blocks.iter().any(|block| {
                    let (taus, a) = split_premises(block);
                    let mut need = own.clone();
                    need.extend(taus.iter().map(|t| hyps.intern(t)));
                    need.sort_unstable();
                    need.dedup();
                    if exact.contains(&(need.clone(), Formula::Atom(a.clone()))) {
                        return true;
                    }
                    by_goal.get(&a).is_some_and(|cands| cands.iter().any(|c| need.iter().all(|n| c.contains(n))))
                })
            })
        })
    })
}

/// Every formula of `j` is `t[S]` for a subformula `t` of `j0` with the range
/// of `S` inside FV(j0) and `x0`.
pub fn is_reasonable(j: &Sigma1Judgment, j0: &Sigma1Judgment) -> bool {
    let mut allowed: HashSet<Ident> = j0.env.free_vars().into_iter().collect();
    allowed.extend(j0.goal.free_vars());
    allowed.insert(ident(X0));
    let mut subs: Vec<Formula> = Vec::new();
    fn collect(f: &Formula, out: &mut Vec<Formula>) {
        out.push(f.clone());
        match f {
            Formula::Atom(_) => {}
            Formula::Imp(a, b) => {
                collect(a, out);
                collect(b, out);
            }
            Formula::Forall(_, b) => collect(b, out),
        }
    }
    for f in j0.env.formulas().chain(std::iter::once(&j0.goal)) {
        collect(f, &mut subs);
    }
    let fits = |f: &Formula| {
        f.free_vars().iter().all(|v| allowed.contains(v))
            && subs.iter().any(|t| {
                let vars: HashSet<Ident> = t.free_vars().into_iter().collect();
                let mut theta = HashMap::new();
                match_formula(t, f, &vars, &mut theta, &mut Vec::new())
            })
    };
    j.env.formulas().all(fits) && fits(&j.goal)
}
