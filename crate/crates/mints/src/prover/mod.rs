//! Decision procedure for Sigma_1 judgments and a budgeted general search.

pub mod general;
pub mod sigma1;
pub mod spine;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::hierarchy::classify;
use crate::kernel::{subst_obj_in_term, ProofTerm};
use crate::syntax::{ident, Atom, Environment, Formula, Ident};

pub use general::{prove_general, prove_general_limited, GeneralStats};
pub use sigma1::{prove_sigma1, Sigma1Prover, Sigma1Stats};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveResult {
    Proved(ProofTerm),
    Unprovable,
    Unknown,
}

impl ProveResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProveResult::Proved(_))
    }

    pub fn proof(&self) -> Option<&ProofTerm> {
        match self {
            ProveResult::Proved(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for ProveResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProveResult::Proved(t) => write!(f, "proved: {t}"),
            ProveResult::Unprovable => write!(f, "unprovable"),
            ProveResult::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ProverError {
    #[error("goal {0} is not Sigma_1")]
    GoalNotSigma1(String),
    #[error("declaration {name} : {formula} is not Pi_1")]
    DeclNotPi1 { name: String, formula: String },
}

/// An environment of Pi_1 formulas with a Sigma_1 goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sigma1Judgment {
    pub env: Environment,
    pub goal: Formula,
}

impl Sigma1Judgment {
    pub fn new(env: Environment, goal: Formula) -> Result<Sigma1Judgment, ProverError> {
        if classify(&goal).sigma_level > 1 {
            return Err(ProverError::GoalNotSigma1(goal.to_string()));
        }
        for (n, f) in &env.decls {
            if classify(f).pi_level > 1 {
                return Err(ProverError::DeclNotPi1 { name: n.to_string(), formula: f.to_string() });
            }
        }
        Ok(Sigma1Judgment { env, goal })
    }

    pub fn pool(&self) -> VariablePool {
        VariablePool::of_judgment(&self.env, &self.goal)
    }
}

impl fmt::Display for Sigma1Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.env.decls.iter().map(|(n, g)| format!("{n} : {g}")).collect();
        write!(f, "{} |- {}", parts.join("; "), self.goal)
    }
}

/// The instantiation pool W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariablePool {
    pub vars: Vec<Ident>,
}

pub const X0: &str = "x0";

impl VariablePool {
    /// FV(env) and FV(goal), or just `x0` when both are closed.
    pub fn of_judgment(env: &Environment, goal: &Formula) -> VariablePool {
        let mut fv = env.free_vars();
        fv.extend(goal.free_vars());
        if fv.is_empty() {
            fv.insert(ident(X0));
        }
        VariablePool { vars: fv.into_iter().collect() }
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vars.iter().any(|w| &**w == v)
    }
}

/// `tau1 -> ... -> tn -> a` split into premises and the target atom.
pub fn decompose_sigma1(goal: &Formula) -> Result<(Vec<Formula>, Atom), ProverError> {
    if classify(goal).sigma_level > 1 {
        return Err(ProverError::GoalNotSigma1(goal.to_string()));
    }
    Ok(split_premises(goal))
}

pub(crate) fn split_premises(goal: &Formula) -> (Vec<Formula>, Atom) {
    let mut prem = Vec::new();
    let mut cur = goal;
    while let Formula::Imp(a, b) = cur {
        prem.push((**a).clone());
        cur = b;
    }
    match cur {
        Formula::Atom(a) => (prem, a.clone()),
        _ => unreachable!("Sigma_1 formulas end in an atom"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Block {
    pub vars: Vec<Ident>,
    pub premise: Formula,
}

/// `forall y1. s1 -> forall y2. s2 -> ... -> forall yk. b` as blocks, the
/// trailing quantified variables and the head (original variable names).
pub fn decompose_pi1(f: &Formula) -> (Vec<Pi1Block>, Vec<Ident>, Atom) {
    let mut blocks = Vec::new();
    let mut vars = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Forall(x, b) => {
                vars.push(x.clone());
                cur = b;
            }
            Formula::Imp(a, b) => {
                blocks.push(Pi1Block { vars: std::mem::take(&mut vars), premise: (**a).clone() });
                cur = b;
            }
            Formula::Atom(a) => return (blocks, vars, a.clone()),
        }
    }
}

/// Renames free object variables of `term` outside W to the least element
/// of W.
pub fn minimize_free_vars(env: &Environment, term: &ProofTerm, goal: &Formula) -> ProofTerm {
    let pool = VariablePool::of_judgment(env, goal);
    let target = pool.vars[0].clone();
    let spurious: BTreeSet<Ident> = term.free_obj_vars().into_iter().filter(|v| !pool.contains(v)).collect();
    let map: BTreeMap<Ident, Ident> = spurious.into_iter().map(|v| (v, target.clone())).collect();
    subst_obj_in_term(term, &map)
}
