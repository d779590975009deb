//! Budgeted long-normal-form search for arbitrary (forall, ->) judgments.
//!
//! Iterative deepening on the number of nested atomic goals. A goal is cut
//! when some ancestor goal is an instance of it under a renaming of the
//! eigenvariables introduced since, with the new hypotheses mapped into the
//! ancestor's context. Failures that do not depend on the path are cached
//! under a canonical form of the context.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::kernel::ProofTerm;
use crate::prover::spine::{assignments, match_formula, premise_rank, Spine};
use crate::prover::{ProveResult, X0};
use crate::syntax::{ident, Atom, Environment, Formula, Ident};

const NONE: usize = usize::MAX;
const WL_ROUNDS: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GeneralStats {
    pub atom_goals: usize,
    pub iterations: usize,
    pub loop_cuts: usize,
    pub cache_hits: usize,
}

#[derive(Clone, Copy)]
struct Fail {
    /// Shallowest ancestor frame the failure depends on.
    anc: usize,
    /// Whether the depth bound was hit somewhere below.
    cut: bool,
}

impl Fail {
    fn join(self, o: Fail) -> Fail {
        Fail { anc: self.anc.min(o.anc), cut: self.cut || o.cut }
    }
}

const CLEAN: Fail = Fail { anc: NONE, cut: false };

struct Shape {
    id: u32,
    occ: Vec<usize>,
}

/// Canonical judgment: hypothesis shapes with ranked eigenvariables, sorted,
/// then the goal.
type Key = Vec<(u32, Vec<u32>)>;

struct Hyp {
    name: Ident,
    formula: Formula,
    shape: Shape,
    spine: Arc<Spine>,
    usable: bool,
}

struct Frame {
    hyps: usize,
    eigen: usize,
    goal: Atom,
}

struct Search<'a> {
    env: &'a Environment,
    env_spines: Vec<Arc<Spine>>,
    env_by_pred: HashMap<Ident, Vec<usize>>,
    env_compound_preds: HashSet<Ident>,
    hyps_by_pred: HashMap<Ident, Vec<usize>>,
    /// Usable compound hypotheses per head predicate.
    compound_hyps: HashMap<Ident, usize>,
    /// Atomic declarations and usable atomic hypotheses, as a stack, indexed
    /// by predicate and by (predicate, position, argument).
    facts: Vec<(Ident, Atom)>,
    facts_by_pred: HashMap<Ident, Vec<usize>>,
    facts_by_arg: HashMap<(Ident, usize, Ident), Vec<usize>>,
    /// Use times of each declaration on the current path.
    uses: HashMap<Ident, Vec<usize>>,
    tick: usize,
    /// Frame whose goal has been settled by a failed repetition below it.
    commit: Option<usize>,
    base: Vec<Ident>,
    hyps: Vec<Hyp>,
    eigen: Vec<Ident>,
    used: BTreeSet<Ident>,
    prefix: String,
    counter: usize,
    frames: Vec<Frame>,
    /// Canonical judgment -> largest depth known to fail (NONE: any depth).
    failed: HashMap<Key, usize>,
    eigen_idx: HashMap<Ident, usize>,
    /// Alpha keys of the environment and of the usable hypotheses.
    known: HashSet<Formula>,
    shapes: HashMap<String, u32>,
    node_limit: usize,
    stats: GeneralStats,
    exhausted: bool,
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, f)
}

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

impl<'a> Search<'a> {
    fn new(env: &'a Environment, goal: &Formula, node_limit: usize) -> Search<'a> {
        let mut fv = env.free_vars();
        fv.extend(goal.free_vars());
        fv.insert(ident(X0));
        let mut used = fv.clone();
        for f in env.formulas().chain(std::iter::once(goal)) {
            f.all_vars(&mut used);
        }
        let mut prefix = String::from("Z");
        while env.decls.iter().any(|(n, _)| n.strip_prefix(prefix.as_str()).is_some_and(|r| r.chars().all(|c| c.is_ascii_digit()))) {
            prefix.push('Z');
        }
        let env_spines: Vec<Arc<Spine>> = env.formulas().map(|f| Arc::new(Spine::of(f))).collect();
        let mut env_by_pred: HashMap<Ident, Vec<usize>> = HashMap::new();
        let mut env_compound_preds = HashSet::new();
        for (k, s) in env_spines.iter().enumerate() {
            env_by_pred.entry(s.head.pred.clone()).or_default().push(k);
            if !s.items.is_empty() {
                env_compound_preds.insert(s.head.pred.clone());
            }
        }
        let mut s = Search {
            env,
            env_spines,
            env_by_pred,
            env_compound_preds,
            hyps_by_pred: HashMap::new(),
            compound_hyps: HashMap::new(),
            facts: Vec::new(),
            facts_by_pred: HashMap::new(),
            facts_by_arg: HashMap::new(),
            uses: HashMap::new(),
            tick: 0,
            commit: None,
            base: fv.into_iter().collect(),
            hyps: Vec::new(),
            eigen: Vec::new(),
            used,
            prefix,
            counter: 0,
            frames: Vec::new(),
            failed: HashMap::new(),
            eigen_idx: HashMap::new(),
            known: env.formulas().map(Formula::alpha_key).collect(),
            shapes: HashMap::new(),
            node_limit,
            stats: GeneralStats::default(),
            exhausted: false,
        };
        for (n, f) in &env.decls {
            if let Formula::Atom(a) = f {
                s.push_fact(n, a);
            }
        }
        s
    }

    fn push_fact(&mut self, name: &Ident, a: &Atom) {
        let id = self.facts.len();
        self.facts_by_pred.entry(a.pred.clone()).or_default().push(id);
        for (j, v) in a.args.iter().enumerate() {
            self.facts_by_arg.entry((a.pred.clone(), j, v.clone())).or_default().push(id);
        }
        self.facts.push((name.clone(), a.clone()));
    }

    fn pop_fact(&mut self) {
        let (_, a) = self.facts.pop().unwrap();
        self.facts_by_pred.get_mut(&a.pred).unwrap().pop();
        for (j, v) in a.args.iter().enumerate() {
            self.facts_by_arg.get_mut(&(a.pred.clone(), j, v.clone())).unwrap().pop();
        }
    }

    fn pool(&self) -> Vec<Ident> {
        self.base.iter().chain(&self.eigen).cloned().collect()
    }

    fn prove(&mut self, f: &Formula, d: usize) -> Result<ProofTerm, Fail> {
        grow(|| match f {
            Formula::Forall(x, body) => {
                let e = crate::syntax::fresh_var(x, &self.used);
                self.used.insert(e.clone());
                self.eigen_idx.insert(e.clone(), self.eigen.len());
                self.eigen.push(e.clone());
                let r = self.prove(&body.subst1(x, &e), d);
                self.eigen.pop();
                self.eigen_idx.remove(&e);
                r.map(|p| ProofTerm::ObjAbs(e, Arc::new(p)))
            }
            Formula::Imp(a, b) => {
                let name = ident(&format!("{}{}", self.prefix, self.counter));
                self.counter += 1;
                let ak = a.alpha_key();
                let usable = self.known.insert(ak.clone());
                let spine = Arc::new(Spine::of(a));
                self.hyps_by_pred.entry(spine.head.pred.clone()).or_default().push(self.hyps.len());
                let shape = self.shape(a);
                let compound = !spine.items.is_empty();
                if usable {
                    match &**a {
                        Formula::Atom(at) => self.push_fact(&name, at),
                        _ if compound => *self.compound_hyps.entry(spine.head.pred.clone()).or_default() += 1,
                        _ => {}
                    }
                }
                self.hyps.push(Hyp { name: name.clone(), formula: (**a).clone(), shape, spine, usable });
                let r = self.prove(b, d);
                let h = self.hyps.pop().unwrap();
                if usable {
                    self.known.remove(&ak);
                    match &**a {
                        Formula::Atom(_) => self.pop_fact(),
                        _ if compound => *self.compound_hyps.get_mut(&h.spine.head.pred).unwrap() -= 1,
                        _ => {}
                    }
                }
                self.hyps_by_pred.get_mut(&h.spine.head.pred).unwrap().pop();
                r.map(|p| ProofTerm::Abs(name, (**a).clone(), Arc::new(p)))
            }
            Formula::Atom(g) => self.prove_atom(g, d),
        })
    }

    fn prove_atom(&mut self, g: &Atom, d: usize) -> Result<ProofTerm, Fail> {
        if self.stats.atom_goals >= self.node_limit {
            self.exhausted = true;
            return Err(Fail { anc: NONE, cut: true });
        }
        // The nearest ancestor with a goal of the same predicate; a goal
        // whose new hypotheses map back into it adds nothing.
        if let Some(k) = (0..self.frames.len()).rev().find(|&k| self.frames[k].goal.pred == g.pred) {
            if self.renames_into(k, g) {
                self.stats.loop_cuts += 1;
                return Err(Fail { anc: k, cut: false });
            }
        }
        // Otherwise a repeated goal sits in a larger context, so by
        // weakening it is provable whenever the ancestor is: its failure
        // settles the ancestor and nothing in between needs retrying.
        let recurs = (0..self.frames.len()).rev().find(|&k| &self.frames[k].goal == g);
        let r = self.search_atom(g, d);
        if let (Err(_), Some(k)) = (&r, recurs) {
            if !self.exhausted {
                self.commit = Some(self.commit.map_or(k, |c| c.min(k)));
            }
        }
        r
    }

    fn search_atom(&mut self, g: &Atom, d: usize) -> Result<ProofTerm, Fail> {
        if d == 0 {
            return Err(Fail { anc: NONE, cut: true });
        }
        let key = self.canonical_key(g);
        if let Some(&m) = self.failed.get(&key) {
            if m >= d {
                self.stats.cache_hits += 1;
                return Err(Fail { anc: NONE, cut: m != NONE });
            }
        }
        self.stats.atom_goals += 1;
        let me = self.frames.len();
        self.frames.push(Frame { hyps: self.hyps.len(), eigen: self.eigen.len(), goal: g.clone() });
        let mut fail = CLEAN;
        let mut found = None;
        let mut heads: Vec<(Ident, Arc<Spine>)> = Vec::new();
        for &k in self.env_by_pred.get(&g.pred).into_iter().flatten() {
            heads.push((self.env.decls[k].0.clone(), self.env_spines[k].clone()));
        }
        for &i in self.hyps_by_pred.get(&g.pred).into_iter().flatten() {
            let h = &self.hyps[i];
            if h.usable {
                heads.push((h.name.clone(), h.spine.clone()));
            }
        }
        // Least recently used on the current path first, so that no
        // applicable declaration is starved.
        heads.sort_by_key(|(n, _)| self.uses.get(n).and_then(|v| v.last()).map_or(0, |&t| t + 1));
        for (name, spine) in heads {
            let mut binding = vec![None; spine.vars.len()];
            if !spine.match_head(g, &mut binding) {
                continue;
            }
            let mut pending: Vec<usize> = spine.premises().map(|(i, _)| i).collect();
            let mut proofs = Vec::new();
            self.tick += 1;
            self.uses.entry(name.clone()).or_default().push(self.tick);
            let r = self.solve(&spine, &mut binding, &mut pending, &mut proofs, d);
            self.uses.get_mut(&name).unwrap().pop();
            match r {
                Ok(()) => {
                    let w0 = ident(X0);
                    let b: Vec<Ident> = binding.into_iter().map(|b| b.unwrap_or_else(|| w0.clone())).collect();
                    found = Some(spine.assemble(&name, &b, &proofs.into_iter().collect()));
                    break;
                }
                Err(f) => fail = fail.join(f),
            }
            if self.exhausted || self.commit.is_some() {
                break;
            }
        }
        self.frames.pop();
        if self.commit == Some(me) {
            self.commit = None;
        }
        match found {
            Some(p) => Ok(p),
            None => {
                if fail.anc >= me && !self.exhausted && self.commit.is_none() {
                    let v = if fail.cut { d } else { NONE };
                    let e = self.failed.entry(key).or_insert(0);
                    *e = (*e).max(v);
                    Err(Fail { anc: NONE, cut: fail.cut })
                } else {
                    Err(fail)
                }
            }
        }
    }

    fn has_compound_target(&self, pred: &Ident) -> bool {
        self.env_compound_preds.contains(pred) || self.compound_hyps.get(pred).is_some_and(|&n| n > 0)
    }

    /// Facts that could match the atomic premise at `item`, if only facts
    /// can prove it.
    fn direct_candidates(&self, spine: &Spine, item: usize, binding: &[Option<Ident>]) -> Option<&[usize]> {
        let Formula::Atom(pat) = spine.premise(item) else { return None };
        if self.has_compound_target(&pat.pred) {
            return None;
        }
        let list = match spine.bound_arg(item, binding) {
            Some((j, v)) => self.facts_by_arg.get(&(pat.pred.clone(), j, v.clone())),
            None => self.facts_by_pred.get(&pat.pred),
        };
        Some(list.map_or(&[], |l| l.as_slice()))
    }

    /// Proves the `pending` premises of `spine`, extending `binding` and
    /// `proofs`. Both are left as they were on failure.
    fn solve(
        &mut self,
        spine: &Spine,
        binding: &mut Vec<Option<Ident>>,
        pending: &mut Vec<usize>,
        proofs: &mut Vec<(usize, ProofTerm)>,
        d: usize,
    ) -> Result<(), Fail> {
        if pending.is_empty() {
            return Ok(());
        }
        // Every premise needs a nested atomic goal.
        if d <= 1 {
            return Err(Fail { anc: NONE, cut: true });
        }
        // Only atomic hypotheses can prove an atom whose predicate is no
        // compound target: match those directly, fewest candidates first.
        let direct = (0..pending.len())
            .filter_map(|k| self.direct_candidates(spine, pending[k], binding).map(|c| (c.len(), k)))
            .min();
        let mut fail = CLEAN;
        if let Some((_, pos)) = direct {
            let item = pending.remove(pos);
            let cands = self.direct_candidates(spine, item, binding).unwrap().to_vec();
            let unbound = spine.unbound_at(item, binding);
            let mut seen = HashSet::new();
            for id in cands {
                if !spine.match_premise(item, &self.facts[id].1, binding) {
                    continue;
                }
                if !seen.insert(unbound.iter().map(|&k| binding[k].clone()).collect::<Vec<_>>()) {
                    unbound.iter().for_each(|&k| binding[k] = None);
                    continue;
                }
                proofs.push((item, ProofTerm::Var(self.facts[id].0.clone())));
                match self.solve(spine, binding, pending, proofs, d) {
                    Ok(()) => return Ok(()),
                    Err(f) => fail = fail.join(f),
                }
                proofs.pop();
                unbound.iter().for_each(|&k| binding[k] = None);
                if unbound.is_empty() || self.exhausted || self.commit.is_some() {
                    break;
                }
            }
            pending.insert(pos, item);
            return Err(fail);
        }
        let pos = (0..pending.len()).min_by_key(|&k| premise_rank(spine, pending[k], binding)).unwrap();
        let item = pending.remove(pos);
        let prem = spine.premise(item);
        let unbound = spine.unbound_at(item, binding);
        let pool = self.pool();
        for assign in assignments(unbound.len(), &pool) {
            for (k, v) in unbound.iter().zip(assign) {
                binding[*k] = Some(v);
            }
            let inst = spine.instantiate(prem, binding);
            match self.prove(&inst, d - 1) {
                Ok(p) => {
                    proofs.push((item, p));
                    match self.solve(spine, binding, pending, proofs, d) {
                        Ok(()) => return Ok(()),
                        Err(f) => fail = fail.join(f),
                    }
                    proofs.pop();
                }
                Err(f) => fail = fail.join(f),
            }
            unbound.iter().for_each(|&k| binding[k] = None);
            if self.exhausted || self.commit.is_some() {
                break;
            }
        }
        pending.insert(pos, item);
        Err(fail)
    }

    /// Is the ancestor at frame `k` an instance of the current goal under a
    /// renaming of the eigenvariables introduced since, with the hypotheses
    /// added since mapped into the ancestor's context?
    fn renames_into(&self, k: usize, g: &Atom) -> bool {
        let fr = &self.frames[k];
        let vars: HashSet<Ident> = self.eigen[fr.eigen..].iter().cloned().collect();
        let mut theta = HashMap::new();
        if !match_formula(&Formula::Atom(g.clone()), &Formula::Atom(fr.goal.clone()), &vars, &mut theta, &mut Vec::new()) {
            return false;
        }
        let mut delta: Vec<&Formula> = self.hyps[fr.hyps..].iter().filter(|h| h.usable).map(|h| &h.formula).collect();
        delta.sort_by_key(|f| !f.is_atom());
        let old: Vec<&Formula> = self.env.formulas().chain(self.hyps[..fr.hyps].iter().filter(|h| h.usable).map(|h| &h.formula)).collect();
        fn go(i: usize, delta: &[&Formula], old: &[&Formula], vars: &HashSet<Ident>, theta: &HashMap<Ident, Ident>) -> bool {
            if i == delta.len() {
                return true;
            }
            for t in old {
                let mut th = theta.clone();
                if match_formula(delta[i], t, vars, &mut th, &mut Vec::new()) && go(i + 1, delta, old, vars, &th) {
                    return true;
                }
            }
            false
        }
        go(0, &delta, &old, &vars, &theta)
    }

    /// A formula up to alpha-equivalence with its eigenvariables replaced
    /// by placeholders in order of first occurrence, and those
    /// eigenvariables (as stack positions).
    fn shape(&mut self, f: &Formula) -> Shape {
        fn occurrences(f: &Formula, idx: &HashMap<Ident, usize>, out: &mut Vec<usize>) {
            match f {
                Formula::Atom(a) => {
                    for x in &a.args {
                        if let Some(&i) = idx.get(x) {
                            if !out.contains(&i) {
                                out.push(i);
                            }
                        }
                    }
                }
                Formula::Imp(a, b) => {
                    occurrences(a, idx, out);
                    occurrences(b, idx, out);
                }
                Formula::Forall(_, b) => occurrences(b, idx, out),
            }
        }
        let key = f.alpha_key();
        let mut occ = Vec::new();
        occurrences(&key, &self.eigen_idx, &mut occ);
        let map: BTreeMap<Ident, Ident> = occ.iter().enumerate().map(|(j, &i)| (self.eigen[i].clone(), ident(&format!("@{j}")))).collect();
        let text = key.subst_vars(&map).to_string();
        let n = self.shapes.len() as u32;
        let id = *self.shapes.entry(text).or_insert(n);
        Shape { id, occ }
    }

    /// Hypotheses and goal with eigenvariables ranked after a few rounds of
    /// colour refinement; equal keys mean judgments equal up to renaming.
    fn canonical_key(&mut self, g: &Atom) -> Key {
        let goal = self.shape(&Formula::Atom(g.clone()));
        let items: Vec<&Shape> = self.hyps.iter().filter(|h| h.usable).map(|h| &h.shape).chain(std::iter::once(&goal)).collect();
        let mut color = vec![0u64; self.eigen.len()];
        let mut classes = 1;
        for _ in 0..WL_ROUNDS {
            let mut sig: Vec<Vec<u64>> = vec![Vec::new(); color.len()];
            for it in &items {
                let cs: Vec<u64> = it.occ.iter().map(|&v| color[v]).collect();
                for (j, &v) in it.occ.iter().enumerate() {
                    sig[v].push(hash_of(&(it.id, j, &cs)));
                }
            }
            let next: Vec<u64> = sig
                .into_iter()
                .enumerate()
                .map(|(v, mut s)| {
                    s.sort_unstable();
                    hash_of(&(color[v], s))
                })
                .collect();
            let n = next.iter().collect::<HashSet<_>>().len();
            color = next;
            if n == classes {
                break;
            }
            classes = n;
        }
        let mut order: Vec<usize> = (0..color.len()).collect();
        order.sort_by_key(|&v| (color[v], v));
        let mut rank = vec![0u32; color.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r as u32;
        }
        let render = |it: &Shape| (it.id, it.occ.iter().map(|&v| rank[v]).collect::<Vec<u32>>());
        let mut key: Vec<(u32, Vec<u32>)> = items[..items.len() - 1].iter().map(|it| render(it)).collect();
        key.sort();
        key.dedup();
        key.push(render(&goal));
        key
    }
}

/// Searches for a proof of `env |- goal` with at most `budget` nested atomic
/// goals.
pub fn prove_general(env: &Environment, goal: &Formula, budget: usize) -> ProveResult {
    prove_general_limited(env, goal, budget, usize::MAX).0
}

/// As [`prove_general`], also giving up with `Unknown` after `node_limit`
/// atomic goals in total.
pub fn prove_general_limited(env: &Environment, goal: &Formula, budget: usize, node_limit: usize) -> (ProveResult, GeneralStats) {
    let mut s = Search::new(env, goal, node_limit);
    let mut d = 1.min(budget);
    while d >= 1 {
        s.stats.iterations += 1;
        let r = s.prove(goal, d);
        match r {
            Ok(p) => return (ProveResult::Proved(p), s.stats),
            Err(f) if !f.cut => return (ProveResult::Unprovable, s.stats),
            Err(_) if s.exhausted || d == budget => break,
            Err(_) => {}
        }
        // Grow by a quarter: deep searches are dominated by the last rounds.
        d = (d + 1).max(d + d / 4).min(budget);
    }
    (ProveResult::Unknown, s.stats)
}
