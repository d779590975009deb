//! Mints hierarchy: classification into Sigma/Pi levels and easy formulas.

use std::fmt;

use serde::Serialize;

use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Sigma,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MintsClass {
    pub sigma_level: usize,
    pub pi_level: usize,
}

impl MintsClass {
    /// Least n with the formula in Delta_n (both Sigma_n and Pi_n).
    pub fn delta_level(&self) -> usize {
        self.sigma_level.max(self.pi_level)
    }
}

impl fmt::Display for MintsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pi-level {}, Sigma-level {}", self.pi_level, self.sigma_level)
    }
}

/// Direct reading of the grammar
///   Sigma_{n+1} ::= a | Pi_n | Pi_{n+1} -> Sigma_{n+1}
///   Pi_{n+1}    ::= a | Sigma_n | Sigma_{n+1} -> Pi_{n+1} | forall x Pi_{n+1}
/// with Sigma_0 = Pi_0 = quantifier-free formulas.
pub fn in_class(f: &Formula, n: usize, side: Side) -> bool {
    if n == 0 {
        return f.is_quantifier_free();
    }
    if f.is_atom() {
        return true;
    }
    let other = match side {
        Side::Sigma => Side::Pi,
        Side::Pi => Side::Sigma,
    };
    if in_class(f, n - 1, other) {
        return true;
    }
    match (f, side) {
        (Formula::Imp(a, b), Side::Sigma) => in_class(a, n, Side::Pi) && in_class(b, n, Side::Sigma),
        (Formula::Imp(a, b), Side::Pi) => in_class(a, n, Side::Sigma) && in_class(b, n, Side::Pi),
        (Formula::Forall(_, b), Side::Pi) => in_class(b, n, Side::Pi),
        _ => false,
    }
}

pub fn classify(f: &Formula) -> MintsClass {
    if f.is_quantifier_free() {
        return MintsClass { sigma_level: 0, pi_level: 0 };
    }
    match f {
        Formula::Atom(_) => unreachable!(),
        Formula::Forall(_, body) => {
            let pi = classify(body).pi_level.max(1);
            MintsClass { sigma_level: pi + 1, pi_level: pi }
        }
        Formula::Imp(a, b) => {
            let ca = classify(a);
            let cb = classify(b);
            let pi0 = 1.max(ca.sigma_level).max(cb.pi_level);
            let sigma0 = 1.max(ca.pi_level).max(cb.sigma_level);
            MintsClass { sigma_level: sigma0.min(pi0 + 1), pi_level: pi0.min(sigma0 + 1) }
        }
    }
}

/// An atom, or a formula with nullary/unary target built from easy parts.
pub fn is_easy(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => true,
        _ if f.target().arity > 1 => false,
        Formula::Forall(_, b) => is_easy(b),
        Formula::Imp(a, b) => is_easy(a) && is_easy(b),
    }
}

/// Diagnostic rendering marking each quantifier `forall+` or `forall-`
/// according to the polarity of its occurrence.
pub fn polarity_annotated(f: &Formula) -> String {
    fn go(f: &Formula, positive: bool, left: bool, out: &mut String) {
        match f {
            Formula::Atom(_) => out.push_str(&f.to_string()),
            Formula::Imp(a, b) => {
                if left {
                    out.push('(');
                }
                go(a, !positive, true, out);
                out.push_str(" -> ");
                go(b, positive, false, out);
                if left {
                    out.push(')');
                }
            }
            Formula::Forall(x, b) => {
                if left {
                    out.push('(');
                }
                out.push_str(if positive { "forall+ " } else { "forall- " });
                out.push_str(x);
                out.push_str(". ");
                go(b, positive, false, out);
                if left {
                    out.push(')');
                }
            }
        }
    }
    let mut s = String::new();
    go(f, true, false, &mut s);
    s
}
