//! The typing rules Ax, ->I, ->E, forallI, forallE, and elaboration of
//! unannotated terms against an expected formula.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::kernel::term::{ProofTerm, RawTerm};
use crate::kernel::KernelError;
use crate::syntax::{Environment, Formula, Ident};

/// A typing context: the environment followed by locally bound hypotheses.
pub(crate) struct Ctx {
    decls: Vec<(Ident, Formula)>,
}

impl Ctx {
    pub fn new(env: &Environment) -> Ctx {
        Ctx { decls: env.decls.clone() }
    }

    pub fn lookup(&self, x: &str) -> Option<&Formula> {
        self.decls.iter().rev().find(|(n, _)| &**n == x).map(|(_, f)| f)
    }

    pub fn push(&mut self, x: Ident, f: Formula) {
        self.decls.push((x, f));
    }

    pub fn pop(&mut self) {
        self.decls.pop();
    }

    /// FV of the formulas visible in the context (shadowed entries excluded).
    pub fn mentions(&self, x: &str) -> bool {
        let mut seen: BTreeSet<&Ident> = BTreeSet::new();
        for (n, f) in self.decls.iter().rev() {
            if seen.insert(n) && f.has_free(x) {
                return true;
            }
        }
        false
    }
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, f)
}

pub(crate) fn infer(ctx: &mut Ctx, t: &ProofTerm) -> Result<Formula, KernelError> {
    grow(|| match t {
        ProofTerm::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| KernelError::UnboundProofVar(x.to_string())),
        ProofTerm::Abs(x, phi, body) => {
            ctx.push(x.clone(), phi.clone());
            let psi = infer(ctx, body);
            ctx.pop();
            Ok(Formula::imp(phi.clone(), psi?))
        }
        ProofTerm::ObjAbs(x, body) => {
            if ctx.mentions(x) {
                return Err(KernelError::Eigenvariable(x.to_string()));
            }
            let psi = infer(ctx, body)?;
            Ok(Formula::Forall(x.clone(), Arc::new(psi)))
        }
        ProofTerm::App(f, a) => match infer(ctx, f)? {
            Formula::Imp(dom, cod) => {
                let arg = infer(ctx, a)?;
                if !arg.alpha_eq(&dom) {
                    return Err(KernelError::ArgumentMismatch { expected: dom.to_string(), found: arg.to_string() });
                }
                Ok((*cod).clone())
            }
            other => Err(KernelError::NotImplication { term: f.to_string(), found: other.to_string() }),
        },
        ProofTerm::ObjApp(f, y) => match infer(ctx, f)? {
            Formula::Forall(x, body) => Ok(body.subst1(&x, y)),
            other => Err(KernelError::NotUniversal { term: f.to_string(), found: other.to_string() }),
        },
    })
}

/// Returns the formula assigned to `term`; with `expected`, succeeds iff it is
/// alpha-equal to the expected formula.
pub fn typecheck(env: &Environment, term: &ProofTerm, expected: Option<&Formula>) -> Result<Formula, KernelError> {
    let mut ctx = Ctx::new(env);
    let phi = infer(&mut ctx, term)?;
    match expected {
        Some(e) if !e.alpha_eq(&phi) => Err(KernelError::ExpectedMismatch { expected: e.to_string(), found: phi.to_string() }),
        _ => Ok(phi),
    }
}

fn check_raw(ctx: &mut Ctx, t: &RawTerm, phi: &Formula) -> Result<ProofTerm, KernelError> {
    grow(|| match (t, phi) {
        (RawTerm::Abs(x, annot, body), Formula::Imp(dom, cod)) => {
            if let Some(a) = annot {
                if !a.alpha_eq(dom) {
                    return Err(KernelError::ExpectedMismatch { expected: dom.to_string(), found: a.to_string() });
                }
            }
            let d = annot.clone().unwrap_or_else(|| (**dom).clone());
            ctx.push(x.clone(), d.clone());
            let b = check_raw(ctx, body, cod);
            ctx.pop();
            Ok(ProofTerm::Abs(x.clone(), d, Arc::new(b?)))
        }
        (RawTerm::ObjAbs(x, body), Formula::Forall(y, inner)) => {
            if ctx.mentions(x) {
                return Err(KernelError::Eigenvariable(x.to_string()));
            }
            let b = check_raw(ctx, body, &inner.subst1(y, x))?;
            Ok(ProofTerm::ObjAbs(x.clone(), Arc::new(b)))
        }
        _ => {
            let (term, found) = synth_raw(ctx, t)?;
            if !found.alpha_eq(phi) {
                return Err(KernelError::ExpectedMismatch { expected: phi.to_string(), found: found.to_string() });
            }
            Ok(term)
        }
    })
}

fn synth_raw(ctx: &mut Ctx, t: &RawTerm) -> Result<(ProofTerm, Formula), KernelError> {
    grow(|| match t {
        RawTerm::Var(x) => {
            let f = ctx.lookup(x).cloned().ok_or_else(|| KernelError::UnboundProofVar(x.to_string()))?;
            Ok((ProofTerm::Var(x.clone()), f))
        }
        RawTerm::Abs(x, Some(a), body) => {
            ctx.push(x.clone(), a.clone());
            let r = synth_raw(ctx, body);
            ctx.pop();
            let (b, psi) = r?;
            Ok((ProofTerm::Abs(x.clone(), a.clone(), Arc::new(b)), Formula::imp(a.clone(), psi)))
        }
        RawTerm::Abs(x, None, _) => Err(KernelError::CannotInfer(x.to_string())),
        RawTerm::ObjAbs(x, body) => {
            if ctx.mentions(x) {
                return Err(KernelError::Eigenvariable(x.to_string()));
            }
            let (b, psi) = synth_raw(ctx, body)?;
            Ok((ProofTerm::ObjAbs(x.clone(), Arc::new(b)), Formula::Forall(x.clone(), Arc::new(psi))))
        }
        RawTerm::App(f, a) => {
            let (ft, fty) = synth_raw(ctx, f)?;
            match fty {
                Formula::Imp(dom, cod) => {
                    let at = check_raw(ctx, a, &dom)?;
                    Ok((ProofTerm::App(Arc::new(ft), Arc::new(at)), (*cod).clone()))
                }
                other => Err(KernelError::NotImplication { term: ft.to_string(), found: other.to_string() }),
            }
        }
        RawTerm::ObjApp(f, y) => {
            let (ft, fty) = synth_raw(ctx, f)?;
            match fty {
                Formula::Forall(x, body) => Ok((ProofTerm::ObjApp(Arc::new(ft), y.clone()), body.subst1(&x, y))),
                other => Err(KernelError::NotUniversal { term: ft.to_string(), found: other.to_string() }),
            }
        }
    })
}

/// Fills in missing annotations by checking against `expected`.
pub fn elaborate(env: &Environment, raw: &RawTerm, expected: Option<&Formula>) -> Result<ProofTerm, KernelError> {
    let mut ctx = Ctx::new(env);
    match expected {
        Some(phi) => check_raw(&mut ctx, raw, phi),
        None => synth_raw(&mut ctx, raw).map(|(t, _)| t),
    }
}
