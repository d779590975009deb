//! Long normal forms and head analysis.

use crate::kernel::term::{Arg, ProofTerm};
use crate::kernel::typing::{infer, typecheck, Ctx};
use crate::kernel::KernelError;
use crate::syntax::{Environment, Formula, Ident};

/// Checks the three lnf clauses. Typing failures are reported as errors,
/// shape failures as `Ok(false)`.
pub fn is_lnf(env: &Environment, term: &ProofTerm, formula: &Formula) -> Result<bool, KernelError> {
    typecheck(env, term, Some(formula))?;
    let mut ctx = Ctx::new(env);
    Ok(lnf(&mut ctx, term, formula))
}

fn lnf(ctx: &mut Ctx, t: &ProofTerm, phi: &Formula) -> bool {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, || match (phi, t) {
        (Formula::Forall(x, body), ProofTerm::ObjAbs(y, n)) => lnf(ctx, n, &body.subst1(x, y)),
        (Formula::Forall(..), _) => false,
        (Formula::Imp(_, cod), ProofTerm::Abs(x, a, n)) => {
            ctx.push(x.clone(), a.clone());
            let r = lnf(ctx, n, cod);
            ctx.pop();
            r
        }
        (Formula::Imp(..), _) => false,
        (Formula::Atom(_), _) => {
            let (head, args) = t.spine();
            let ProofTerm::Var(h) = head else { return false };
            let Some(mut ty) = ctx.lookup(h).cloned() else { return false };
            for a in &args {
                match (a, ty) {
                    (Arg::Obj(y), Formula::Forall(x, body)) => ty = body.subst1(&x, y),
                    (Arg::Proof(p), Formula::Imp(dom, cod)) => {
                        if !lnf(ctx, p, &dom) {
                            return false;
                        }
                        ty = (*cod).clone();
                    }
                    _ => return false,
                }
            }
            ty.is_atom()
        }
    })
}

/// Head variable and spine of an lnf of atomic type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadAnalysis {
    pub head: Ident,
    pub head_type: Formula,
    pub args: Vec<Arg>,
}

pub fn head_analysis(env: &Environment, term: &ProofTerm) -> Result<HeadAnalysis, KernelError> {
    let mut ctx = Ctx::new(env);
    let ty = infer(&mut ctx, term)?;
    let Formula::Atom(goal) = &ty else {
        return Err(KernelError::NotAtomic(ty.to_string()));
    };
    if !lnf(&mut ctx, term, &ty) {
        return Err(KernelError::NotLnf(term.to_string()));
    }
    let (head, args) = term.spine();
    let ProofTerm::Var(h) = head else {
        return Err(KernelError::NotLnf(term.to_string()));
    };
    let head_type = ctx.lookup(h).cloned().ok_or_else(|| KernelError::UnboundProofVar(h.to_string()))?;
    if head_type.target().name != goal.pred {
        return Err(KernelError::NotLnf(format!("head {h} has target {}, goal {}", head_type.target().name, goal.pred)));
    }
    Ok(HeadAnalysis { head: h.clone(), head_type, args })
}
