//! Decomposition of hypotheses into quantifier/premise spines and
//! head matching under partial substitutions.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::kernel::{Arg, ProofTerm};
use crate::syntax::{ident, Atom, Formula, Ident};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpineItem {
    /// Index into `Spine::vars`.
    Var(usize),
    Premise(Formula),
}

/// An argument of a spine atom: a metavariable or a fixed variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pat {
    Meta(usize),
    Fixed(Ident),
}

/// `forall y1. s1 -> forall y2. s2 -> ... -> b` with the quantified
/// variables renamed to metavariables `?0, ?1, ...` that cannot clash with
/// parsed names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spine {
    pub vars: Vec<Ident>,
    /// The quantified variables as written.
    pub orig: Vec<Ident>,
    pub items: Vec<SpineItem>,
    pub head: Atom,
    head_pat: Vec<Pat>,
    /// Per item: the metavariables free in a premise, and the argument
    /// pattern of an atomic premise.
    metas: Vec<Vec<usize>>,
    pats: Vec<Option<Vec<Pat>>>,
}

pub fn meta_name(i: usize) -> Ident {
    ident(&format!("?{i}"))
}

impl Spine {
    pub fn of(f: &Formula) -> Spine {
        let mut vars = Vec::new();
        let mut orig = Vec::new();
        let mut items = Vec::new();
        let mut cur = f.clone();
        loop {
            match cur {
                Formula::Forall(x, body) => {
                    let m = meta_name(vars.len());
                    let next = body.subst1(&x, &m);
                    items.push(SpineItem::Var(vars.len()));
                    vars.push(m);
                    orig.push(x.clone());
                    cur = next;
                }
                Formula::Imp(a, b) => {
                    items.push(SpineItem::Premise((*a).clone()));
                    cur = (*b).clone();
                }
                Formula::Atom(a) => {
                    let mut sp = Spine { vars, orig, items, head: a, head_pat: Vec::new(), metas: Vec::new(), pats: Vec::new() };
                    sp.head_pat = sp.compile(&sp.head);
                    for it in &sp.items {
                        let (m, p) = match it {
                            SpineItem::Var(_) => (Vec::new(), None),
                            SpineItem::Premise(f) => {
                                let mut m: Vec<usize> = f.free_vars().iter().filter_map(|v| sp.meta_index(v)).collect();
                                m.sort_unstable();
                                m.dedup();
                                (m, f.as_atom().map(|a| sp.compile(a)))
                            }
                        };
                        sp.metas.push(m);
                        sp.pats.push(p);
                    }
                    return sp;
                }
            }
        }
    }

    pub fn premises(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.items.iter().enumerate().filter_map(|(i, it)| match it {
            SpineItem::Premise(p) => Some((i, p)),
            _ => None,
        })
    }

    fn compile(&self, a: &Atom) -> Vec<Pat> {
        a.args.iter().map(|v| self.meta_index(v).map_or_else(|| Pat::Fixed(v.clone()), Pat::Meta)).collect()
    }

    /// The premise at item `i`.
    pub fn premise(&self, i: usize) -> &Formula {
        match &self.items[i] {
            SpineItem::Premise(p) => p,
            SpineItem::Var(_) => panic!("item {i} is a quantifier"),
        }
    }

    pub fn meta_index(&self, v: &str) -> Option<usize> {
        v.strip_prefix('?').and_then(|n| n.parse().ok()).filter(|&i: &usize| i < self.vars.len())
    }

    /// Extends `binding` so that the head instantiates to `goal`.
    pub fn match_head(&self, goal: &Atom, binding: &mut [Option<Ident>]) -> bool {
        self.head.pred == goal.pred && match_args(&self.head_pat, &goal.args, binding)
    }

    /// Extends `binding` so that the atomic premise at item `i` instantiates
    /// to `fact`.
    pub fn match_premise(&self, i: usize, fact: &Atom, binding: &mut [Option<Ident>]) -> bool {
        match (&self.items[i], &self.pats[i]) {
            (SpineItem::Premise(Formula::Atom(a)), Some(pat)) => a.pred == fact.pred && match_args(pat, &fact.args, binding),
            _ => false,
        }
    }

    /// The first argument of the atomic premise at item `i` that `binding`
    /// already determines, with its position.
    pub fn bound_arg<'b>(&'b self, i: usize, binding: &'b [Option<Ident>]) -> Option<(usize, &'b Ident)> {
        self.pats[i].as_ref()?.iter().enumerate().find_map(|(j, p)| match p {
            Pat::Fixed(v) => Some((j, v)),
            Pat::Meta(k) => binding[*k].as_ref().map(|v| (j, v)),
        })
    }

    /// Metavariables free in the premise at item `i`.
    pub fn metas_of(&self, i: usize) -> &[usize] {
        &self.metas[i]
    }

    /// Metavariables of the premise at item `i` not yet bound.
    pub fn unbound_at(&self, i: usize, binding: &[Option<Ident>]) -> Vec<usize> {
        self.metas[i].iter().copied().filter(|&k| binding[k].is_none()).collect()
    }

    pub fn instantiate(&self, f: &Formula, binding: &[Option<Ident>]) -> Formula {
        let map: BTreeMap<Ident, Ident> = binding
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.as_ref().map(|v| (self.vars[i].clone(), v.clone())))
            .collect();
        f.subst_vars(&map)
    }

    /// Builds `X y1 N1 y2 N2 ...` from a full binding and premise proofs
    /// (indexed by item position).
    pub fn assemble(&self, head: &Ident, binding: &[Ident], proofs: &BTreeMap<usize, ProofTerm>) -> ProofTerm {
        let args = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| match it {
                SpineItem::Var(k) => Arg::Obj(binding[*k].clone()),
                SpineItem::Premise(_) => Arg::Proof(proofs[&i].clone()),
            })
            .collect();
        ProofTerm::apply(head.clone(), args)
    }
}

/// Matches compiled arguments against ground ones. `binding` is left
/// untouched on failure.
fn match_args(pat: &[Pat], args: &[Ident], binding: &mut [Option<Ident>]) -> bool {
    if pat.len() != args.len() {
        return false;
    }
    for (j, (p, g)) in pat.iter().zip(args).enumerate() {
        let ok = match p {
            Pat::Fixed(v) => v == g,
            Pat::Meta(i) => match &binding[*i] {
                Some(v) => v == g,
                // A repeated metavariable must meet the same argument.
                None => pat[..j].iter().zip(args).all(|(q, h)| q != p || h == g),
            },
        };
        if !ok {
            return false;
        }
    }
    for (p, g) in pat.iter().zip(args) {
        if let Pat::Meta(i) = p {
            if binding[*i].is_none() {
                binding[*i] = Some(g.clone());
            }
        }
    }
    true
}

/// Matches `p` against `t` up to bound-variable renaming, extending `theta`
/// on the free occurrences of `vars` in `p`.
pub fn match_formula(
    p: &Formula,
    t: &Formula,
    vars: &HashSet<Ident>,
    theta: &mut HashMap<Ident, Ident>,
    bound: &mut Vec<(Ident, Ident)>,
) -> bool {
    match (p, t) {
        (Formula::Atom(a), Formula::Atom(b)) => {
            if a.pred != b.pred || a.args.len() != b.args.len() {
                return false;
            }
            for (u, v) in a.args.iter().zip(&b.args) {
                let lu = bound.iter().rposition(|(x, _)| x == u);
                let lv = bound.iter().rposition(|(_, y)| y == v);
                match (lu, lv) {
                    (Some(i), Some(j)) if i == j => {}
                    (None, None) => {
                        if vars.contains(u) {
                            match theta.get(u) {
                                Some(w) if w != v => return false,
                                Some(_) => {}
                                None => {
                                    theta.insert(u.clone(), v.clone());
                                }
                            }
                        } else if u != v {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
            true
        }
        (Formula::Imp(a1, b1), Formula::Imp(a2, b2)) => {
            match_formula(a1, a2, vars, theta, bound) && match_formula(b1, b2, vars, theta, bound)
        }
        (Formula::Forall(x, b1), Formula::Forall(y, b2)) => {
            bound.push((x.clone(), y.clone()));
            let r = match_formula(b1, b2, vars, theta, bound);
            bound.pop();
            r
        }
        _ => false,
    }
}

/// Premise ordering: ground atoms, then atoms with unbound metavariables
/// (fewest first), then ground compound premises, then the rest.
pub fn premise_rank(spine: &Spine, i: usize, binding: &[Option<Ident>]) -> (u8, usize) {
    let unbound = spine.metas[i].iter().filter(|&&k| binding[k].is_none()).count();
    match (spine.pats[i].is_some(), unbound) {
        (true, 0) => (0, 0),
        (true, n) => (1, n),
        (false, 0) => (2, 0),
        (false, n) => (3, n),
    }
}

/// Every assignment of `vars` into `pool`, in lexicographic order.
pub fn assignments(n: usize, pool: &[Ident]) -> Vec<Vec<Ident>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * pool.len());
        for prefix in &out {
            for v in pool {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}
