//! Arity lowering: every n-ary atom `P(x1,...,xn)` becomes
//! `M1(x1) -> ... -> Mn(xn) -> p` for fresh unary markers and a fresh
//! nullary `p`; nullary and unary atoms are kept.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{fresh_var, ident, Atom, Environment, Formula, Ident, Signature, SyntaxError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MonadicError {
    #[error("predicate {pred} has arity {arity}, expected 0, 1 or {n}")]
    Arity { pred: String, arity: usize, n: usize },
    #[error(transparent)]
    Signature(#[from] SyntaxError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationScheme {
    pub n: usize,
    pub markers: Vec<Ident>,
    pub atom_map: BTreeMap<Ident, Ident>,
    /// Dummy variable filling the trailing positions of predicates of arity
    /// between 2 and n-1; `None` rejects such predicates.
    pub pad: Option<Ident>,
}

impl TranslationScheme {
    /// Builds a scheme for the predicates of `fs`; `n` is their largest
    /// arity (at least 2).
    pub fn for_formulas<'a, I>(fs: I, pad: bool) -> Result<TranslationScheme, MonadicError>
    where
        I: IntoIterator<Item = &'a Formula>,
        I::IntoIter: Clone,
    {
        let it = fs.into_iter();
        let sig = Signature::of_formulas(it.clone())?;
        let n = sig.max_arity().max(2);
        let mut vars = BTreeSet::new();
        for f in it {
            f.all_vars(&mut vars);
        }
        let mut taken: BTreeSet<Ident> = sig.arities.keys().cloned().collect();
        taken.extend(vars.iter().cloned());
        let mut stem = String::from("M");
        while (1..=n).any(|i| taken.contains(format!("{stem}{i}").as_str())) {
            stem.push('M');
        }
        let markers: Vec<Ident> = (1..=n).map(|i| ident(&format!("{stem}{i}"))).collect();
        let mut used: BTreeSet<Ident> = taken.clone();
        used.extend(markers.iter().cloned());
        let mut atom_map = BTreeMap::new();
        for (p, &k) in &sig.arities {
            if k < 2 {
                continue;
            }
            if k < n && !pad {
                return Err(MonadicError::Arity { pred: p.to_string(), arity: k, n });
            }
            let base = p.to_lowercase();
            let name = (0usize..).map(|i| ident(&format!("{base}${i}"))).find(|c| !used.contains(c)).unwrap();
            used.insert(name.clone());
            atom_map.insert(p.clone(), name);
        }
        let pad = if pad && sig.arities.values().any(|&k| k >= 2 && k < n) {
            Some(fresh_var("pad", &used))
        } else {
            None
        };
        Ok(TranslationScheme { n, markers, atom_map, pad })
    }

    pub fn for_env(env: &Environment, goal: Option<&Formula>, pad: bool) -> Result<TranslationScheme, MonadicError> {
        let fs: Vec<&Formula> = env.formulas().chain(goal).collect();
        TranslationScheme::for_formulas(fs, pad)
    }
}

fn translate_atom(a: &Atom, s: &TranslationScheme) -> Result<Formula, MonadicError> {
    let k = a.args.len();
    if k < 2 {
        return Ok(Formula::Atom(a.clone()));
    }
    let err = || MonadicError::Arity { pred: a.pred.to_string(), arity: k, n: s.n };
    let p = s.atom_map.get(&a.pred).ok_or_else(err)?;
    let mut args = a.args.clone();
    if k < s.n {
        let d = s.pad.as_ref().ok_or_else(err)?;
        args.resize(s.n, d.clone());
    } else if k > s.n {
        return Err(err());
    }
    let premises = args.iter().zip(&s.markers).map(|(x, m)| Formula::Atom(Atom { pred: m.clone(), args: vec![x.clone()] }));
    Ok(Formula::imps(premises, Formula::Atom(Atom { pred: p.clone(), args: vec![] })))
}

pub fn translate(f: &Formula, s: &TranslationScheme) -> Result<Formula, MonadicError> {
    Ok(match f {
        Formula::Atom(a) => translate_atom(a, s)?,
        Formula::Imp(a, b) => Formula::imp(translate(a, s)?, translate(b, s)?),
        Formula::Forall(x, b) => Formula::Forall(x.clone(), std::sync::Arc::new(translate(b, s)?)),
    })
}

pub fn translate_env(env: &Environment, s: &TranslationScheme) -> Result<Environment, MonadicError> {
    let decls = env.decls.iter().map(|(n, f)| Ok((n.clone(), translate(f, s)?))).collect::<Result<Vec<_>, MonadicError>>()?;
    Ok(Environment { decls })
}
