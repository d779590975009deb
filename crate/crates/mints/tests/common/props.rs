//! Kernel invariants, written once and driven both by the proptest suites
//! and by the acceptance target.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use mints::kernel::{head_analysis, is_lnf, is_normal, normalize, subst_obj_in_term, subst_proof, typecheck, Arg, ProofTerm};
use mints::prover::{decompose_pi1, prove_sigma1, ProveResult, Sigma1Judgment};
use mints::refuter::{build_soup, verify_soup, SoupOutcome};
use mints::syntax::{fresh_var, ident, Environment, Formula, Ident};

use super::sigma1_judgment;

#[derive(Clone, Debug)]
pub struct Proved {
    pub j: Sigma1Judgment,
    pub proof: ProofTerm,
}

pub fn proved_judgment() -> impl Strategy<Value = Proved> {
    sigma1_judgment().prop_filter_map("unprovable", |j| match prove_sigma1(&j) {
        ProveResult::Proved(proof) => Some(Proved { j, proof }),
        _ => None,
    })
}

const VARS: &[&str] = &["x", "y", "z", "w", "u"];

/// A proved judgment with a substitution and a redex selector.
pub fn proved_case() -> impl Strategy<Value = (Proved, Ident, Ident, usize)> {
    (proved_judgment(), prop::sample::select(VARS), prop::sample::select(VARS), any::<usize>())
        .prop_map(|(p, a, b, k)| (p, ident(a), ident(b), k))
}

fn names(p: &Proved) -> BTreeSet<Ident> {
    let mut out: BTreeSet<Ident> = p.j.env.decls.iter().map(|(n, _)| n.clone()).collect();
    p.proof.all_names(&mut out);
    out
}

/// Variables of the goal that the environment does not mention; the proof
/// may be closed over them.
fn generalizable(p: &Proved) -> Vec<Ident> {
    let env_fv = p.j.env.free_vars();
    p.j.goal.free_vars().into_iter().filter(|v| !env_fv.contains(v)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn typed(env: &Environment, t: &ProofTerm, phi: &Formula) -> Result<(), TestCaseError> {
    typecheck(env, t, Some(phi)).map(|_| ()).map_err(|e| TestCaseError::fail(format!("{e}: {t} : {phi}")))
}

/// If Gamma |- M : phi then Gamma[a:=b] |- M[a:=b] : phi[a:=b], also for the
/// generalised proof of a closed-over goal.
pub fn substitution_lemma(case: &(Proved, Ident, Ident, usize)) -> Result<(), TestCaseError> {
    let (p, a, b, k) = case;
    // A second pair from the selector makes the map simultaneous.
    let (c, d) = (ident(VARS[k % VARS.len()]), ident(VARS[k / VARS.len() % VARS.len()]));
    let mut map: BTreeMap<Ident, Ident> = [(a.clone(), b.clone())].into_iter().collect();
    map.entry(c).or_insert(d.clone());
    let env = p.j.env.subst_vars(&map);
    typed(&env, &subst_obj_in_term(&p.proof, &map), &p.j.goal.subst_vars(&map))?;
    for v in generalizable(p) {
        // Terms are taken up to renaming of bound variables, so the binder
        // first moves away from the substituted variable.
        let mut avoid = names(p);
        p.j.goal.all_vars(&mut avoid);
        avoid.extend(map.values().cloned());
        let v2 = if map.values().any(|x| *x == v) { fresh_var(&v, &avoid) } else { v.clone() };
        let body = subst_obj_in_term(&p.proof, &[(v.clone(), v2.clone())].into_iter().collect());
        let t = ProofTerm::ObjAbs(v2.clone(), Arc::new(body));
        let phi = Formula::Forall(v2.clone(), Arc::new(p.j.goal.subst1(&v, &v2)));
        typed(&p.j.env, &t, &phi)?;
        typed(&env, &subst_obj_in_term(&t, &map), &phi.subst_vars(&map))?;
    }
    Ok(())
}

/// Eta-long expansion of a variable of type `phi`.
fn eta(head: ProofTerm, phi: &Formula, avoid: &mut BTreeSet<Ident>) -> ProofTerm {
    match phi {
        Formula::Atom(_) => head,
        Formula::Forall(y, body) => {
            let y2 = fresh_var(y, avoid);
            avoid.insert(y2.clone());
            let body = body.subst1(y, &y2);
            ProofTerm::ObjAbs(y2.clone(), Arc::new(eta(ProofTerm::ObjApp(Arc::new(head), y2), &body, avoid)))
        }
        Formula::Imp(a, b) => {
            let z = fresh_var("E", avoid);
            avoid.insert(z.clone());
            let arg = eta(ProofTerm::Var(z.clone()), a, avoid);
            ProofTerm::Abs(z, (**a).clone(), Arc::new(eta(ProofTerm::App(Arc::new(head), Arc::new(arg)), b, avoid)))
        }
    }
}

/// Replaces every `f y` by `(\w. f w) y`.
fn expand_obj_apps(t: &ProofTerm, avoid: &mut BTreeSet<Ident>) -> ProofTerm {
    match t {
        ProofTerm::Var(_) => t.clone(),
        ProofTerm::Abs(x, phi, b) => ProofTerm::Abs(x.clone(), phi.clone(), Arc::new(expand_obj_apps(b, avoid))),
        ProofTerm::ObjAbs(x, b) => ProofTerm::ObjAbs(x.clone(), Arc::new(expand_obj_apps(b, avoid))),
        ProofTerm::App(f, a) => ProofTerm::App(Arc::new(expand_obj_apps(f, avoid)), Arc::new(expand_obj_apps(a, avoid))),
        ProofTerm::ObjApp(f, y) => {
            let w = fresh_var("w", avoid);
            avoid.insert(w.clone());
            let inner = ProofTerm::ObjApp(Arc::new(expand_obj_apps(f, avoid)), w.clone());
            ProofTerm::ObjApp(Arc::new(ProofTerm::ObjAbs(w, Arc::new(inner))), y.clone())
        }
    }
}

/// Redexes planted into a normal proof normalize back to a normal proof of
/// the same formula.
pub fn subject_reduction(case: &(Proved, Ident, Ident, usize)) -> Result<(), TestCaseError> {
    let (p, _, target, k) = case;
    let mut avoid = names(p);
    avoid.extend(p.j.goal.free_vars());
    avoid.extend(p.j.env.free_vars());
    for f in p.j.env.formulas() {
        f.all_vars(&mut avoid);
    }
    p.j.goal.all_vars(&mut avoid);
    let (x, psi) = p.j.env.decls[k % p.j.env.len()].clone();
    let z = fresh_var("Z", &avoid);
    avoid.insert(z.clone());
    let body = expand_obj_apps(&subst_proof(&p.proof, &x, &ProofTerm::Var(z.clone())), &mut avoid);
    let arg = eta(ProofTerm::Var(x), &psi, &mut avoid);
    let redex = ProofTerm::App(Arc::new(ProofTerm::Abs(z, psi, Arc::new(body))), Arc::new(arg));
    let mut cases = vec![(redex, p.j.goal.clone())];
    for v in generalizable(p) {
        let gen = ProofTerm::ObjAbs(v.clone(), Arc::new(cases[0].0.clone()));
        cases.push((ProofTerm::ObjApp(Arc::new(gen), target.clone()), p.j.goal.subst1(&v, target)));
    }
    for (t, phi) in cases {
        typed(&p.j.env, &t, &phi)?;
        let n = normalize(&t).map_err(|e| TestCaseError::fail(e.to_string()))?;
        ensure(is_normal(&n), || format!("not normal: {n}"))?;
        ensure(normalize(&n).ok().as_ref() == Some(&n), || format!("normalize moved {n}"))?;
        typed(&p.j.env, &n, &phi)?;
    }
    Ok(())
}

fn spine_len(phi: &Formula) -> usize {
    let (blocks, trailing, _) = decompose_pi1(phi);
    blocks.iter().map(|b| b.vars.len() + 1).sum::<usize>() + trailing.len()
}

/// The body of an lnf of atomic type is a head variable applied to a full
/// spine whose target matches the goal.
pub fn lnf_heads(p: &Proved) -> Result<(), TestCaseError> {
    ensure(is_lnf(&p.j.env, &p.proof, &p.j.goal).unwrap_or(false), || format!("not lnf: {}", p.proof))?;
    let mut env = p.j.env.clone();
    let mut t = &p.proof;
    while let ProofTerm::Abs(x, phi, b) = t {
        env.decls.push((x.clone(), phi.clone()));
        t = b;
    }
    let h = head_analysis(&env, t).map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(h.args.len() == spine_len(&h.head_type), || format!("partial spine {t} for {}", h.head_type))?;
    let (_, _, goal_atom) = decompose_pi1(&p.j.goal);
    ensure(h.head_type.target_atom().pred == goal_atom.pred, || format!("head {} misses {}", h.head, goal_atom.pred))?;
    let objs = h.args.iter().filter(|a| matches!(a, Arg::Obj(_))).count();
    let quants: usize = {
        let (blocks, trailing, _) = decompose_pi1(&h.head_type);
        blocks.iter().map(|b| b.vars.len()).sum::<usize>() + trailing.len()
    };
    ensure(objs == quants, || format!("object arguments {objs} vs quantifiers {quants}"))
}

pub fn no_object_abstraction(p: &Proved) -> Result<(), TestCaseError> {
    ensure(p.proof.count_obj_abs() == 0, || format!("object abstraction in {}", p.proof))
}

pub fn free_vars_in_pool(p: &Proved) -> Result<(), TestCaseError> {
    typed(&p.j.env, &p.proof, &p.j.goal)?;
    let pool = p.j.pool();
    let bad: Vec<Ident> = p.proof.free_obj_vars().into_iter().filter(|v| !pool.contains(v)).collect();
    ensure(bad.is_empty(), || format!("{bad:?} outside the pool in {}", p.proof))
}

/// `None` when prover and refuter agree, otherwise a description.
pub fn soup_disagreement(j: &Sigma1Judgment) -> Option<String> {
    let r = prove_sigma1(j);
    let soup = match build_soup(j) {
        Ok(SoupOutcome::Soup(s)) => Some(verify_soup(&s, j)),
        Ok(SoupOutcome::Provable) => None,
        Err(e) => return Some(format!("{j}: refuter error {e}")),
    };
    match (&r, soup) {
        (ProveResult::Proved(_), None) | (ProveResult::Unprovable, Some(true)) => None,
        _ => Some(format!("{j}: prover {r}, soup {soup:?}")),
    }
}
