//! Brute-force oracles kept deliberately apart from the library code paths.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use mints::hierarchy::Side;
use mints::prover::Sigma1Judgment;
use mints::syntax::{ident, Environment, Formula, Ident};

/// Grammar membership computed bottom-up: every subformula starts with the
/// facts that hold outright and the productions are applied until nothing
/// changes. Levels above `max_n` are not tracked.
pub fn grammar_members(f: &Formula, max_n: usize) -> HashSet<(usize, Side)> {
    let mut subs: Vec<Formula> = Vec::new();
    fn collect(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Atom(_) => {}
            Formula::Imp(a, b) => {
                collect(a, out);
                collect(b, out);
            }
            Formula::Forall(_, b) => collect(b, out),
        }
        if !out.contains(f) {
            out.push(f.clone());
        }
    }
    collect(f, &mut subs);
    let mut member: HashMap<Formula, HashSet<(usize, Side)>> = subs.iter().map(|g| (g.clone(), HashSet::new())).collect();
    let has = |m: &HashMap<Formula, HashSet<(usize, Side)>>, g: &Formula, n: usize, s: Side| m[g].contains(&(n, s));
    loop {
        let mut changed = false;
        for g in &subs {
            for n in 0..=max_n {
                for side in [Side::Sigma, Side::Pi] {
                    if has(&member, g, n, side) {
                        continue;
                    }
                    let other = if side == Side::Sigma { Side::Pi } else { Side::Sigma };
                    let holds = if n == 0 {
                        g.is_quantifier_free()
                    } else {
                        matches!(g, Formula::Atom(_))
                            || has(&member, g, n - 1, other)
                            || match (g, side) {
                                (Formula::Imp(a, b), _) => has(&member, a, n, other) && has(&member, b, n, side),
                                (Formula::Forall(_, b), Side::Pi) => has(&member, b, n, Side::Pi),
                                _ => false,
                            }
                    };
                    if holds {
                        member.get_mut(g).unwrap().insert((n, side));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return member.remove(f).unwrap();
        }
    }
}

/// Least level on `side` found by scanning `n = 0..=max_n`.
pub fn least_level(members: &HashSet<(usize, Side)>, side: Side) -> Option<usize> {
    members.iter().filter(|(_, s)| *s == side).map(|(n, _)| *n).min()
}

/// Naive proof search for Sigma_1 judgments. Contexts only grow along a
/// branch, so a shortest proof never revisits a (context, atom) pair; the
/// search is therefore complete once it cuts such repetitions, and the
/// number of pairs over the finite instance space bounds its depth.
pub struct NaiveSigma1 {
    pool: Vec<Ident>,
    pub nodes: usize,
}

type Ctx = BTreeSet<Formula>;

impl NaiveSigma1 {
    pub fn provable(j: &Sigma1Judgment) -> bool {
        let mut fv = j.env.free_vars();
        fv.extend(j.goal.free_vars());
        if fv.is_empty() {
            fv.insert(ident("x0"));
        }
        let mut n = NaiveSigma1 { pool: fv.into_iter().collect(), nodes: 0 };
        let ctx: Ctx = j.env.formulas().map(|f| f.alpha_key()).collect();
        n.prove(&ctx, &j.goal, &mut Vec::new())
    }

    fn prove(&mut self, ctx: &Ctx, goal: &Formula, path: &mut Vec<(Ctx, Formula)>) -> bool {
        self.nodes += 1;
        let mut ctx = ctx.clone();
        let mut cur = goal;
        while let Formula::Imp(a, b) = cur {
            ctx.insert(a.alpha_key());
            cur = b;
        }
        let atom = cur.clone();
        if path.iter().any(|(c, a)| *c == ctx && *a == atom) {
            return false;
        }
        path.push((ctx.clone(), atom.clone()));
        let mut found = false;
        for psi in &ctx {
            let mut instances = Vec::new();
            self.instances(psi, Vec::new(), &mut instances);
            for (premises, head) in instances {
                if head == atom && premises.iter().all(|p| self.prove(&ctx, p, path)) {
                    found = true;
                    break;
                }
            }
            if found {
                break;
            }
        }
        path.pop();
        found
    }

    /// All instances of a Pi_1 formula with quantifiers drawn from the pool.
    fn instances(&self, psi: &Formula, premises: Vec<Formula>, out: &mut Vec<(Vec<Formula>, Formula)>) {
        match psi {
            Formula::Atom(_) => out.push((premises, psi.clone())),
            Formula::Imp(a, b) => {
                let mut p = premises;
                p.push((**a).clone());
                self.instances(b, p, out);
            }
            Formula::Forall(y, b) => {
                for w in &self.pool {
                    self.instances(&b.subst1(y, w), premises.clone(), out);
                }
            }
        }
    }
}

/// Every formula of depth at most `depth` over `P/1`, `q/0` and the
/// variables `x, y`, up to alpha-equivalence.
pub fn small_formulas(depth: usize) -> Vec<Formula> {
    let vars = ["x", "y"];
    let mut level: Vec<Formula> = vec![Formula::atom("P", &["x"]), Formula::atom("P", &["y"]), Formula::atom("q", &[])];
    for _ in 0..depth {
        let mut seen: BTreeSet<Formula> = BTreeSet::new();
        let mut next = Vec::new();
        let mut add = |f: Formula, next: &mut Vec<Formula>| {
            if seen.insert(f.alpha_key()) {
                next.push(f);
            }
        };
        for f in &level {
            add(f.clone(), &mut next);
        }
        for a in &level {
            for b in &level {
                add(Formula::Imp(Arc::new(a.clone()), Arc::new(b.clone())), &mut next);
            }
        }
        for v in vars {
            for b in &level {
                add(Formula::forall(v, b.clone()), &mut next);
            }
        }
        level = next;
    }
    level
}

/// The exhaustive duality family: each Sigma_1 formula of depth at most 3
/// read both as a closed goal and with its premises moved into the
/// environment.
pub fn small_judgments() -> Vec<Sigma1Judgment> {
    let mut out = Vec::new();
    for f in small_formulas(3) {
        let Ok(j) = Sigma1Judgment::new(Environment::new(), f.clone()) else { continue };
        let mut premises = Vec::new();
        let mut cur = &f;
        while let Formula::Imp(a, b) = cur {
            premises.push((**a).clone());
            cur = b;
        }
        out.push(j);
        if !premises.is_empty() {
            let decls: Vec<(String, Formula)> = premises.into_iter().enumerate().map(|(i, p)| (format!("H{i}"), p)).collect();
            let env = Environment::from_decls(decls).unwrap();
            out.push(Sigma1Judgment::new(env, cur.clone()).unwrap());
        }
    }
    out
}
