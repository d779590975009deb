//! Substitution in proof terms and leftmost-outermost beta reduction.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::kernel::term::ProofTerm;
use crate::kernel::KernelError;
use crate::syntax::{fresh_var, Ident};

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, f)
}

/// Capture-avoiding simultaneous substitution of object variables, applied
/// to applications, binders and annotations alike.
pub fn subst_obj_in_term(t: &ProofTerm, map: &BTreeMap<Ident, Ident>) -> ProofTerm {
    if map.is_empty() {
        return t.clone();
    }
    grow(|| match t {
        ProofTerm::Var(_) => t.clone(),
        ProofTerm::Abs(x, phi, b) => ProofTerm::Abs(x.clone(), phi.subst_vars(map), Arc::new(subst_obj_in_term(b, map))),
        ProofTerm::App(f, a) => ProofTerm::App(Arc::new(subst_obj_in_term(f, map)), Arc::new(subst_obj_in_term(a, map))),
        ProofTerm::ObjApp(f, y) => ProofTerm::ObjApp(Arc::new(subst_obj_in_term(f, map)), map.get(y).unwrap_or(y).clone()),
        ProofTerm::ObjAbs(x, b) => {
            let fv = b.free_obj_vars();
            let mut inner: BTreeMap<Ident, Ident> =
                map.iter().filter(|(k, _)| *k != x && fv.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
            if inner.is_empty() {
                return t.clone();
            }
            if inner.values().any(|v| v == x) {
                let mut avoid = fv.clone();
                b.all_names(&mut avoid);
                avoid.extend(inner.values().cloned());
                avoid.extend(inner.keys().cloned());
                let y = fresh_var(x, &avoid);
                inner.insert(x.clone(), y.clone());
                ProofTerm::ObjAbs(y, Arc::new(subst_obj_in_term(b, &inner)))
            } else {
                ProofTerm::ObjAbs(x.clone(), Arc::new(subst_obj_in_term(b, &inner)))
            }
        }
    })
}

/// `t[x := n]` for a proof variable `x`, renaming binders of either sort to
/// avoid capturing free variables of `n`.
pub fn subst_proof(t: &ProofTerm, x: &Ident, n: &ProofTerm) -> ProofTerm {
    let npv = n.free_proof_vars();
    let nov = n.free_obj_vars();
    subst_proof_with(t, x, n, &npv, &nov)
}

fn subst_proof_with(t: &ProofTerm, x: &Ident, n: &ProofTerm, npv: &BTreeSet<Ident>, nov: &BTreeSet<Ident>) -> ProofTerm {
    grow(|| match t {
        ProofTerm::Var(y) => {
            if y == x {
                n.clone()
            } else {
                t.clone()
            }
        }
        ProofTerm::App(f, a) => ProofTerm::App(Arc::new(subst_proof_with(f, x, n, npv, nov)), Arc::new(subst_proof_with(a, x, n, npv, nov))),
        ProofTerm::ObjApp(f, y) => ProofTerm::ObjApp(Arc::new(subst_proof_with(f, x, n, npv, nov)), y.clone()),
        ProofTerm::Abs(y, phi, b) => {
            if y == x || !b.free_proof_vars().contains(x) {
                return t.clone();
            }
            if npv.contains(y) {
                let mut avoid = npv.clone();
                b.all_names(&mut avoid);
                n.all_names(&mut avoid);
                avoid.insert(x.clone());
                let z = fresh_var(y, &avoid);
                let renamed = subst_proof(b, y, &ProofTerm::Var(z.clone()));
                ProofTerm::Abs(z, phi.clone(), Arc::new(subst_proof_with(&renamed, x, n, npv, nov)))
            } else {
                ProofTerm::Abs(y.clone(), phi.clone(), Arc::new(subst_proof_with(b, x, n, npv, nov)))
            }
        }
        ProofTerm::ObjAbs(y, b) => {
            if !b.free_proof_vars().contains(x) {
                return t.clone();
            }
            if nov.contains(y) {
                let mut avoid = nov.clone();
                b.all_names(&mut avoid);
                n.all_names(&mut avoid);
                let z = fresh_var(y, &avoid);
                let mut m = BTreeMap::new();
                m.insert(y.clone(), z.clone());
                let renamed = subst_obj_in_term(b, &m);
                ProofTerm::ObjAbs(z, Arc::new(subst_proof_with(&renamed, x, n, npv, nov)))
            } else {
                ProofTerm::ObjAbs(y.clone(), Arc::new(subst_proof_with(b, x, n, npv, nov)))
            }
        }
    })
}

pub fn is_normal(t: &ProofTerm) -> bool {
    grow(|| match t {
        ProofTerm::Var(_) => true,
        ProofTerm::App(f, a) => !matches!(**f, ProofTerm::Abs(..)) && is_normal(f) && is_normal(a),
        ProofTerm::ObjApp(f, _) => !matches!(**f, ProofTerm::ObjAbs(..)) && is_normal(f),
        ProofTerm::Abs(_, _, b) | ProofTerm::ObjAbs(_, b) => is_normal(b),
    })
}

/// Contracts the leftmost-outermost redex, if any.
pub fn step(t: &ProofTerm) -> Option<ProofTerm> {
    grow(|| match t {
        ProofTerm::Var(_) => None,
        ProofTerm::App(f, a) => {
            if let ProofTerm::Abs(x, _, body) = &**f {
                return Some(subst_proof(body, x, a));
            }
            if let Some(f2) = step(f) {
                return Some(ProofTerm::App(Arc::new(f2), a.clone()));
            }
            step(a).map(|a2| ProofTerm::App(f.clone(), Arc::new(a2)))
        }
        ProofTerm::ObjApp(f, y) => {
            if let ProofTerm::ObjAbs(x, body) = &**f {
                let mut m = BTreeMap::new();
                m.insert(x.clone(), y.clone());
                return Some(subst_obj_in_term(body, &m));
            }
            step(f).map(|f2| ProofTerm::ObjApp(Arc::new(f2), y.clone()))
        }
        ProofTerm::Abs(x, phi, b) => step(b).map(|b2| ProofTerm::Abs(x.clone(), phi.clone(), Arc::new(b2))),
        ProofTerm::ObjAbs(x, b) => step(b).map(|b2| ProofTerm::ObjAbs(x.clone(), Arc::new(b2))),
    })
}

pub const DEFAULT_FUEL: usize = 100_000;

/// Reduces to normal form, giving up after `fuel` contractions.
pub fn normalize_with_fuel(t: &ProofTerm, fuel: usize) -> Result<ProofTerm, KernelError> {
    let mut cur = t.clone();
    for _ in 0..fuel {
        match step(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    if is_normal(&cur) {
        Ok(cur)
    } else {
        Err(KernelError::FuelExhausted(fuel))
    }
}

pub fn normalize(t: &ProofTerm) -> Result<ProofTerm, KernelError> {
    normalize_with_fuel(t, DEFAULT_FUEL)
}
