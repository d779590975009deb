//! Ben-Yelles style search over W-judgments. Contexts are sets of interned
//! formulas; a branch is cut when a (context, goal) pair repeats on the
//! current path. Proofs are cached for reuse under larger contexts and
//! unconditional failures for reuse under smaller ones.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::kernel::ProofTerm;
use crate::prover::spine::{assignments, premise_rank, Spine};
use crate::prover::{split_premises, ProveResult, Sigma1Judgment};
use crate::syntax::{ident, Atom, Formula, Ident, Interner};

const NONE: usize = usize::MAX;

enum Out {
    Proved(ProofTerm),
    /// Failure depending on path entries at this depth or deeper
    /// (`NONE` when unconditional).
    Failed(usize),
}

#[derive(Clone, Default)]
struct Ctx {
    ids: Vec<u32>,
    bits: FixedBitSet,
}

impl Ctx {
    fn insert(&mut self, id: u32) {
        if let Err(pos) = self.ids.binary_search(&id) {
            self.ids.insert(pos, id);
            self.bits.grow(id as usize + 1);
            self.bits.insert(id as usize);
        }
    }
}

#[derive(Clone, Copy)]
enum Hyp {
    Env(usize),
    Ctx(u32),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Sigma1Stats {
    pub atom_goals: usize,
    pub proof_cache_hits: usize,
    pub failure_cache_hits: usize,
    pub loop_cuts: usize,
}

pub struct Sigma1Prover {
    judgment: Sigma1Judgment,
    pool: Vec<Ident>,
    forms: Interner,
    spines: Vec<Arc<Spine>>,
    in_env: HashSet<u32>,
    env_ids: Vec<u32>,
    /// Environment positions by target predicate, and the atomic ones.
    env_by_pred: HashMap<Ident, Vec<usize>>,
    env_atoms_by_pred: HashMap<Ident, Vec<usize>>,
    env_compound_preds: HashSet<Ident>,
    /// Per interned formula: interned premises and target.
    split: HashMap<u32, Arc<(Vec<u32>, u32)>>,
    /// Interned instances of spine premises, keyed by formula id, item and
    /// the values of the premise's metavariables.
    instances: HashMap<(u32, usize, Vec<Ident>), u32>,
    prefix: String,
    on_path: HashMap<(Vec<u32>, u32), usize>,
    proved: HashMap<u32, Vec<(FixedBitSet, ProofTerm)>>,
    failed: HashMap<u32, Vec<FixedBitSet>>,
    pub stats: Sigma1Stats,
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, f)
}

impl Sigma1Prover {
    pub fn new(j: &Sigma1Judgment) -> Sigma1Prover {
        Sigma1Prover::with_pool(j, j.pool().vars)
    }

    /// Uses `pool` (sorted, a superset of the judgment's free variables) as W.
    pub fn with_pool(j: &Sigma1Judgment, pool: Vec<Ident>) -> Sigma1Prover {
        let mut prefix = String::from("Z");
        while j.env.decls.iter().any(|(n, _)| n.strip_prefix(prefix.as_str()).is_some_and(|r| r.chars().all(|c| c.is_ascii_digit()))) {
            prefix.push('Z');
        }
        let mut p = Sigma1Prover {
            judgment: j.clone(),
            pool,
            forms: Interner::default(),
            spines: Vec::new(),
            in_env: HashSet::new(),
            env_ids: Vec::new(),
            env_by_pred: HashMap::new(),
            env_atoms_by_pred: HashMap::new(),
            env_compound_preds: HashSet::new(),
            split: HashMap::new(),
            instances: HashMap::new(),
            prefix,
            on_path: HashMap::new(),
            proved: HashMap::new(),
            failed: HashMap::new(),
            stats: Sigma1Stats::default(),
        };
        let fs: Vec<Formula> = j.env.formulas().cloned().collect();
        for (k, f) in fs.iter().enumerate() {
            let id = p.intern(f);
            p.env_ids.push(id);
            p.in_env.insert(id);
            let head = p.spines[id as usize].head.pred.clone();
            p.env_by_pred.entry(head.clone()).or_default().push(k);
            if f.is_atom() {
                p.env_atoms_by_pred.entry(head).or_default().push(k);
            } else {
                p.env_compound_preds.insert(head);
            }
        }
        p
    }

    pub fn pool(&self) -> &[Ident] {
        &self.pool
    }

    fn intern(&mut self, f: &Formula) -> u32 {
        let id = self.forms.intern(f);
        if id as usize == self.spines.len() {
            self.spines.push(Arc::new(Spine::of(f)));
        }
        id
    }

    fn hyp_name(&self, id: u32) -> Ident {
        ident(&format!("{}{}", self.prefix, id))
    }

    pub fn prove(&mut self) -> ProveResult {
        let goal = self.judgment.goal.clone();
        match self.prove_formula(&Ctx::default(), &goal, 0) {
            Out::Proved(p) => ProveResult::Proved(p),
            Out::Failed(_) => ProveResult::Unprovable,
        }
    }

    /// Decides `env, extra |- goal` for a Sigma_1 `goal` whose variables lie
    /// in this prover's pool, sharing caches across calls.
    pub fn provable_with(&mut self, extra: &[Formula], goal: &Formula) -> bool {
        let mut ctx = Ctx::default();
        for f in extra {
            let id = self.intern(f);
            if !self.in_env.contains(&id) {
                ctx.insert(id);
            }
        }
        matches!(self.prove_formula(&ctx, goal, 0), Out::Proved(_))
    }

    fn prove_formula(&mut self, ctx: &Ctx, f: &Formula, depth: usize) -> Out {
        let id = self.intern(f);
        self.prove_id(ctx, id, depth)
    }

    fn split_of(&mut self, id: u32) -> Arc<(Vec<u32>, u32)> {
        if let Some(s) = self.split.get(&id) {
            return s.clone();
        }
        let (prem, a) = split_premises(self.forms.get(id));
        let prem: Vec<u32> = prem.iter().map(|t| self.intern(t)).collect();
        let a = self.intern(&Formula::Atom(a));
        let s = Arc::new((prem, a));
        self.split.insert(id, s.clone());
        s
    }

    fn prove_id(&mut self, ctx: &Ctx, id: u32, depth: usize) -> Out {
        let split = self.split_of(id);
        let (prem, a) = (&split.0, split.1);
        let mut inner = ctx.clone();
        for &t in prem {
            if !self.in_env.contains(&t) {
                inner.insert(t);
            }
        }
        match grow(|| self.prove_atom(&inner, a, depth)) {
            Out::Proved(mut p) => {
                for &t in prem.iter().rev() {
                    p = ProofTerm::Abs(self.hyp_name(t), self.forms.get(t).clone(), Arc::new(p));
                }
                Out::Proved(p)
            }
            failed => failed,
        }
    }

    /// Declarations usable in `ctx` whose target has predicate `pred`, in
    /// environment order and then in order of introduction.
    fn candidates(&self, ctx: &Ctx, pred: &Ident) -> Vec<Hyp> {
        let mut out: Vec<Hyp> = self.env_by_pred.get(pred).into_iter().flatten().map(|&k| Hyp::Env(k)).collect();
        for &id in &ctx.ids {
            if &self.spines[id as usize].head.pred == pred {
                out.push(Hyp::Ctx(id));
            }
        }
        out
    }

    fn hyp_id(&self, h: Hyp) -> u32 {
        match h {
            Hyp::Env(k) => self.env_ids[k],
            Hyp::Ctx(id) => id,
        }
    }

    fn name_of(&self, h: Hyp) -> Ident {
        match h {
            Hyp::Env(k) => self.judgment.env.decls[k].0.clone(),
            Hyp::Ctx(id) => self.hyp_name(id),
        }
    }

    fn prove_atom(&mut self, ctx: &Ctx, gid: u32, depth: usize) -> Out {
        let goal_spine = self.spines[gid as usize].clone();
        let goal = &goal_spine.head;
        if let Some(list) = self.proved.get(&gid) {
            if let Some((_, p)) = list.iter().find(|(s, _)| s.is_subset(&ctx.bits)) {
                self.stats.proof_cache_hits += 1;
                return Out::Proved(p.clone());
            }
        }
        if let Some(list) = self.failed.get(&gid) {
            if list.iter().any(|s| ctx.bits.is_subset(s)) {
                self.stats.failure_cache_hits += 1;
                return Out::Failed(NONE);
            }
        }
        let key = (ctx.ids.clone(), gid);
        if let Some(&d) = self.on_path.get(&key) {
            self.stats.loop_cuts += 1;
            return Out::Failed(d);
        }
        self.on_path.insert(key.clone(), depth);
        self.stats.atom_goals += 1;
        let mut min = NONE;
        let mut found = None;
        for h in self.candidates(ctx, &goal.pred) {
            let fid = self.hyp_id(h);
            let spine = self.spines[fid as usize].clone();
            let mut binding = vec![None; spine.vars.len()];
            if !spine.match_head(goal, &mut binding) {
                continue;
            }
            let mut pending: Vec<usize> = spine.premises().map(|(i, _)| i).collect();
            let mut proofs = BTreeMap::new();
            match self.solve(ctx, fid, &spine, &binding, &mut pending, &mut proofs, depth) {
                Ok(b) => {
                    found = Some(spine.assemble(&self.name_of(h), &b, &proofs));
                    break;
                }
                Err(m) => min = min.min(m),
            }
        }
        self.on_path.remove(&key);
        match found {
            Some(p) => {
                self.proved.entry(gid).or_default().push((ctx.bits.clone(), p.clone()));
                Out::Proved(p)
            }
            None if min >= depth => {
                let list = self.failed.entry(gid).or_default();
                list.retain(|s| !s.is_subset(&ctx.bits));
                list.push(ctx.bits.clone());
                Out::Failed(NONE)
            }
            None => Out::Failed(min),
        }
    }

    fn has_compound_target(&self, ctx: &Ctx, pred: &Ident) -> bool {
        self.env_compound_preds.contains(pred)
            || ctx.ids.iter().any(|&id| {
                let s = &self.spines[id as usize];
                &s.head.pred == pred && !s.items.is_empty()
            })
    }

    /// Atomic hypotheses with predicate `pred`: environment positions, then
    /// context ids.
    fn atomic_hyps(&self, ctx: &Ctx, pred: &Ident) -> Vec<Hyp> {
        let mut out: Vec<Hyp> = self.env_atoms_by_pred.get(pred).into_iter().flatten().map(|&k| Hyp::Env(k)).collect();
        for &id in &ctx.ids {
            let s = &self.spines[id as usize];
            if s.items.is_empty() && &s.head.pred == pred {
                out.push(Hyp::Ctx(id));
            }
        }
        out
    }

    fn hyp_atom(&self, h: Hyp) -> &Atom {
        &self.spines[self.hyp_id(h) as usize].head
    }

    /// Proves the premises in `pending`, extending `binding` and `proofs`;
    /// returns the completed binding.
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &mut self,
        ctx: &Ctx,
        fid: u32,
        spine: &Spine,
        binding: &[Option<Ident>],
        pending: &mut Vec<usize>,
        proofs: &mut BTreeMap<usize, ProofTerm>,
        depth: usize,
    ) -> Result<Vec<Ident>, usize> {
        if pending.is_empty() {
            let w0 = &self.pool[0];
            return Ok(binding.iter().map(|b| b.clone().unwrap_or_else(|| w0.clone())).collect());
        }
        let pos = (0..pending.len()).min_by_key(|&k| premise_rank(spine, pending[k], binding)).unwrap();
        let item = pending.remove(pos);
        let r = self.solve_premise(ctx, fid, spine, item, binding, pending, proofs, depth);
        if r.is_err() {
            pending.insert(pos, item);
        }
        r
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_premise(
        &mut self,
        ctx: &Ctx,
        fid: u32,
        spine: &Spine,
        item: usize,
        binding: &[Option<Ident>],
        pending: &mut Vec<usize>,
        proofs: &mut BTreeMap<usize, ProofTerm>,
        depth: usize,
    ) -> Result<Vec<Ident>, usize> {
        let prem = spine.premise(item);
        let mut min = NONE;
        // Only atomic hypotheses can prove an atom whose predicate is no
        // compound target, so match against them directly.
        if let Formula::Atom(pat) = prem {
            if !self.has_compound_target(ctx, &pat.pred) {
                let ground = spine.unbound_at(item, binding).is_empty();
                let mut seen = HashSet::new();
                for h in self.atomic_hyps(ctx, &pat.pred) {
                    let mut b = binding.to_vec();
                    if !spine.match_premise(item, self.hyp_atom(h), &mut b) || (!ground && !seen.insert(b.clone())) {
                        continue;
                    }
                    proofs.insert(item, ProofTerm::Var(self.name_of(h)));
                    match self.solve(ctx, fid, spine, &b, pending, proofs, depth) {
                        Ok(r) => return Ok(r),
                        Err(m) => min = min.min(m),
                    }
                    if ground {
                        break;
                    }
                }
                proofs.remove(&item);
                return Err(min);
            }
        }
        let unbound = spine.unbound_at(item, binding);
        for assign in assignments(unbound.len(), &self.pool) {
            let mut b = binding.to_vec();
            for (k, v) in unbound.iter().zip(assign) {
                b[*k] = Some(v);
            }
            let key = (fid, item, spine.metas_of(item).iter().map(|&k| b[k].clone().unwrap()).collect());
            let inst = match self.instances.get(&key) {
                Some(&i) => i,
                None => {
                    let i = self.intern(&spine.instantiate(prem, &b));
                    self.instances.insert(key, i);
                    i
                }
            };
            match self.prove_id(ctx, inst, depth + 1) {
                Out::Proved(p) => {
                    proofs.insert(item, p);
                    match self.solve(ctx, fid, spine, &b, pending, proofs, depth) {
                        Ok(r) => return Ok(r),
                        Err(m) => min = min.min(m),
                    }
                }
                Out::Failed(m) => min = min.min(m),
            }
        }
        proofs.remove(&item);
        Err(min)
    }
}

pub fn prove_sigma1(j: &Sigma1Judgment) -> ProveResult {
    Sigma1Prover::new(j).prove()
}
