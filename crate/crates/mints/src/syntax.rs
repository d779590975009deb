//! Formulas of the (forall, ->) fragment: AST, parsing, printing and variable handling.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Ident = Arc<str>;

pub fn ident(s: &str) -> Ident {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateSymbol {
    pub name: Ident,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: Ident,
    pub args: Vec<Ident>,
}

impl Atom {
    pub fn new(pred: &str, args: &[&str]) -> Atom {
        Atom { pred: ident(pred), args: args.iter().map(|a| ident(a)).collect() }
    }

    pub fn symbol(&self) -> PredicateSymbol {
        PredicateSymbol { name: self.pred.clone(), arity: self.args.len() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Imp(Arc<Formula>, Arc<Formula>),
    Forall(Ident, Arc<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(ident(x), Arc::new(body))
    }

    /// `a1 -> a2 -> ... -> concl`
    pub fn imps<I: IntoIterator<Item = Formula>>(premises: I, concl: Formula) -> Formula
    where
        I::IntoIter: DoubleEndedIterator,
    {
        premises.into_iter().rev().fold(concl, |acc, p| Formula::imp(p, acc))
    }

    /// `forall x1 ... xn. body`
    pub fn foralls<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Imp(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Atom(a) => {
                for x in &a.args {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
            }
            Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, v: &str) -> bool {
        match self {
            Formula::Atom(a) => a.args.iter().any(|x| &**x == v),
            Formula::Imp(a, b) => a.has_free(v) || b.has_free(v),
            Formula::Forall(x, body) => &**x != v && body.has_free(v),
        }
    }

    /// Every variable name occurring in the formula, free or bound.
    pub fn all_vars(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Formula::Atom(a) => out.extend(a.args.iter().cloned()),
            Formula::Imp(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Forall(x, body) => {
                out.insert(x.clone());
                body.all_vars(out);
            }
        }
    }

    pub fn target(&self) -> PredicateSymbol {
        match self {
            Formula::Atom(a) => a.symbol(),
            Formula::Imp(_, b) => b.target(),
            Formula::Forall(_, b) => b.target(),
        }
    }

    pub fn target_atom(&self) -> &Atom {
        match self {
            Formula::Atom(a) => a,
            Formula::Imp(_, b) => b.target_atom(),
            Formula::Forall(_, b) => b.target_atom(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, b) => 1 + b.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, b) => 1 + b.size(),
        }
    }

    pub fn predicates(&self, out: &mut BTreeSet<PredicateSymbol>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.symbol());
            }
            Formula::Imp(a, b) => {
                a.predicates(out);
                b.predicates(out);
            }
            Formula::Forall(_, b) => b.predicates(out),
        }
    }

    /// Capture-avoiding simultaneous substitution of object variables.
    pub fn subst_vars(&self, map: &BTreeMap<Ident, Ident>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        subst(self, map)
    }

    pub fn subst1(&self, x: &Ident, y: &Ident) -> Formula {
        if x == y {
            return self.clone();
        }
        let mut m = BTreeMap::new();
        m.insert(x.clone(), y.clone());
        subst(self, &m)
    }

    /// Canonical representative of the alpha-equivalence class: bound
    /// variables are renamed by binder depth to names no parser can produce.
    pub fn alpha_key(&self) -> Formula {
        fn go(f: &Formula, bound: &mut Vec<(Ident, Ident)>) -> Formula {
            match f {
                Formula::Atom(a) => Formula::Atom(Atom {
                    pred: a.pred.clone(),
                    args: a
                        .args
                        .iter()
                        .map(|x| match bound.iter().rev().find(|(b, _)| b == x) {
                            Some((_, k)) => k.clone(),
                            None => x.clone(),
                        })
                        .collect(),
                }),
                Formula::Imp(a, b) => Formula::imp(go(a, bound), go(b, bound)),
                Formula::Forall(x, body) => {
                    let k = ident(&format!("#{}", bound.len()));
                    bound.push((x.clone(), k.clone()));
                    let b = go(body, bound);
                    bound.pop();
                    Formula::Forall(k, Arc::new(b))
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        fn go(a: &Formula, b: &Formula, env: &mut Vec<(Ident, Ident)>) -> bool {
            match (a, b) {
                (Formula::Atom(x), Formula::Atom(y)) => {
                    x.pred == y.pred
                        && x.args.len() == y.args.len()
                        && x.args.iter().zip(&y.args).all(|(u, v)| {
                            let lu = env.iter().rposition(|(p, _)| p == u);
                            let lv = env.iter().rposition(|(_, q)| q == v);
                            match (lu, lv) {
                                (None, None) => u == v,
                                (Some(i), Some(j)) => i == j,
                                _ => false,
                            }
                        })
                }
                (Formula::Imp(a1, b1), Formula::Imp(a2, b2)) => go(a1, a2, env) && go(b1, b2, env),
                (Formula::Forall(x, b1), Formula::Forall(y, b2)) => {
                    env.push((x.clone(), y.clone()));
                    let r = go(b1, b2, env);
                    env.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

fn subst(f: &Formula, map: &BTreeMap<Ident, Ident>) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|x| map.get(x).unwrap_or(x).clone()).collect(),
        }),
        Formula::Imp(a, b) => Formula::Imp(Arc::new(subst(a, map)), Arc::new(subst(b, map))),
        Formula::Forall(x, body) => {
            let fv = body.free_vars();
            let mut inner: BTreeMap<Ident, Ident> = map
                .iter()
                .filter(|(k, _)| *k != x && fv.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return f.clone();
            }
            if inner.values().any(|v| v == x) {
                let mut avoid = fv.clone();
                avoid.extend(inner.values().cloned());
                avoid.extend(inner.keys().cloned());
                let y = fresh_var(x, &avoid);
                inner.insert(x.clone(), y.clone());
                Formula::Forall(y, Arc::new(subst(body, &inner)))
            } else {
                Formula::Forall(x.clone(), Arc::new(subst(body, &inner)))
            }
        }
    }
}

/// Base name plus the smallest numeric suffix avoiding `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (1usize..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !avoid.contains(c.as_str()))
        .map(|c| ident(&c))
        .unwrap()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub arities: BTreeMap<Ident, usize>,
}

impl Signature {
    pub fn of_formulas<'a, I: IntoIterator<Item = &'a Formula>>(fs: I) -> Result<Signature, SyntaxError> {
        let mut sig = Signature::default();
        for f in fs {
            let mut ps = BTreeSet::new();
            f.predicates(&mut ps);
            for p in ps {
                sig.declare(&p.name, p.arity, 0)?;
            }
        }
        Ok(sig)
    }

    pub fn declare(&mut self, name: &Ident, arity: usize, pos: usize) -> Result<(), SyntaxError> {
        match self.arities.get(name) {
            Some(&a) if a != arity => Err(SyntaxError::ArityMismatch {
                pred: name.to_string(),
                expected: a,
                found: arity,
                pos,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.clone(), arity);
                Ok(())
            }
        }
    }

    pub fn max_arity(&self) -> usize {
        self.arities.values().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    pub decls: Vec<(Ident, Formula)>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn from_decls<S: AsRef<str>>(decls: Vec<(S, Formula)>) -> Result<Environment, SyntaxError> {
        let mut env = Environment::new();
        for (n, f) in decls {
            env.push(ident(n.as_ref()), f)?;
        }
        Ok(env)
    }

    pub fn push(&mut self, name: Ident, f: Formula) -> Result<(), SyntaxError> {
        if self.decls.iter().any(|(n, _)| *n == name) {
            return Err(SyntaxError::DuplicateDecl(name.to_string()));
        }
        self.decls.push((name, f));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.decls.iter().rev().find(|(n, _)| &**n == name).map(|(_, f)| f)
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.decls.iter().map(|(_, f)| f)
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        self.formulas().flat_map(|f| f.free_vars()).collect()
    }

    pub fn subst_vars(&self, map: &BTreeMap<Ident, Ident>) -> Environment {
        Environment { decls: self.decls.iter().map(|(n, f)| (n.clone(), f.subst_vars(map))).collect() }
    }

    /// Environment text: one `X : formula` per line; blank lines and `#`
    /// comments are skipped, `;` also separates declarations.
    pub fn parse(text: &str) -> Result<Environment, SyntaxError> {
        let mut env = Environment::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = line.split('#').next().unwrap_or("");
            let mut local = 0;
            for piece in body.split(';') {
                let p = piece.trim();
                if !p.is_empty() {
                    let lead = piece.len() - piece.trim_start().len();
                    let base = offset + local + lead;
                    let (name, f) = parse_decl(p).map_err(|e| e.shift(base))?;
                    env.push(name, f)?;
                }
                local += piece.len() + 1;
            }
            offset += line.len();
        }
        Ok(env)
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, phi) in &self.decls {
            writeln!(f, "{n} : {phi}")?;
        }
        Ok(())
    }
}

fn parse_decl(text: &str) -> Result<(Ident, Formula), SyntaxError> {
    let colon = text.find(':').ok_or(SyntaxError::Unexpected { pos: text.len(), msg: "expected `Name : formula`".into() })?;
    let name = text[..colon].trim();
    if !is_ident(name) || !starts_upper(name) {
        return Err(SyntaxError::Unexpected { pos: 0, msg: format!("bad proof variable name `{name}`") });
    }
    let rest = &text[colon + 1..];
    let f = parse_formula(rest).map_err(|e| e.shift(colon + 1))?;
    Ok((ident(name), f))
}

pub fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '$')
        && s != "forall"
}

pub fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

pub fn starts_lower(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at offset {pos}: {msg}")]
    Unexpected { pos: usize, msg: String },
    #[error("arity mismatch for {pred} at offset {pos}: declared {expected}, used with {found}")]
    ArityMismatch { pred: String, expected: usize, found: usize, pos: usize },
    #[error("quantified variable `{var}` used as a predicate at offset {pos}")]
    BoundVarAsPredicate { var: String, pos: usize },
    #[error("duplicate declaration of {0}")]
    DuplicateDecl(String),
}

impl SyntaxError {
    pub fn pos(&self) -> Option<usize> {
        match self {
            SyntaxError::Unexpected { pos, .. }
            | SyntaxError::ArityMismatch { pos, .. }
            | SyntaxError::BoundVarAsPredicate { pos, .. } => Some(*pos),
            SyntaxError::DuplicateDecl(_) => None,
        }
    }

    pub(crate) fn shift(self, by: usize) -> SyntaxError {
        match self {
            SyntaxError::Unexpected { pos, msg } => SyntaxError::Unexpected { pos: pos + by, msg },
            SyntaxError::ArityMismatch { pred, expected, found, pos } => {
                SyntaxError::ArityMismatch { pred, expected, found, pos: pos + by }
            }
            SyntaxError::BoundVarAsPredicate { var, pos } => SyntaxError::BoundVarAsPredicate { var, pos: pos + by },
            e => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Forall,
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Backslash,
    Colon,
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '\\' | 'λ' => Some(Tok::Backslash),
            ':' => Some(Tok::Colon),
            '→' => Some(Tok::Arrow),
            '∀' => Some(Tok::Forall),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1).map(|p| p.1) == Some('>') {
                out.push((Tok::Arrow, pos));
                i += 2;
                continue;
            }
            return Err(SyntaxError::Unexpected { pos, msg: "expected `->`".into() });
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && {
                let d = chars[i].1;
                d.is_ascii_alphanumeric() || d == '_' || d == '\'' || d == '$'
            } {
                i += 1;
            }
            let end = chars.get(i).map(|p| p.0).unwrap_or(text.len());
            let word = &text[chars[start].0..end];
            out.push((if word == "forall" { Tok::Forall } else { Tok::Ident(word.to_string()) }, pos));
            continue;
        }
        return Err(SyntaxError::Unexpected { pos, msg: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

pub(crate) struct FormulaParser<'a> {
    pub toks: &'a [(Tok, usize)],
    pub i: usize,
    pub end: usize,
    pub sig: Signature,
    bound: Vec<String>,
}

impl<'a> FormulaParser<'a> {
    pub fn new(toks: &'a [(Tok, usize)], end: usize, sig: Signature) -> Self {
        FormulaParser { toks, i: 0, end, sig, bound: Vec::new() }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    pub fn err<T>(&self, msg: &str) -> Result<T, SyntaxError> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        };
        Err(SyntaxError::Unexpected { pos: self.pos(), msg: format!("{msg}, found {found}") })
    }

    pub fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&t) {
            self.i += 1;
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    pub fn formula(&mut self) -> Result<Formula, SyntaxError> {
        if self.peek() == Some(&Tok::Forall) {
            self.i += 1;
            let mut vars = Vec::new();
            while let Some(Tok::Ident(v)) = self.peek() {
                if !starts_lower(v) {
                    return self.err("quantified variables must start with a lowercase letter");
                }
                vars.push(v.clone());
                self.i += 1;
            }
            if vars.is_empty() {
                return self.err("expected a bound variable");
            }
            self.expect(Tok::Dot, "`.`")?;
            let n = self.bound.len();
            self.bound.extend(vars.iter().cloned());
            let body = self.formula();
            self.bound.truncate(n);
            return Ok(Formula::foralls(&vars, body?));
        }
        let lhs = self.app()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.i += 1;
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn app(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(p)) => {
                let pos = self.pos();
                if self.bound.contains(&p) {
                    return Err(SyntaxError::BoundVarAsPredicate { var: p, pos });
                }
                self.i += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.i += 1;
                    loop {
                        match self.peek().cloned() {
                            Some(Tok::Ident(v)) if starts_lower(&v) => {
                                args.push(ident(&v));
                                self.i += 1;
                            }
                            _ => return self.err("expected an object variable"),
                        }
                        match self.peek() {
                            Some(Tok::Comma) => self.i += 1,
                            Some(Tok::RParen) => {
                                self.i += 1;
                                break;
                            }
                            _ => return self.err("expected `,` or `)`"),
                        }
                    }
                }
                let name = ident(&p);
                self.sig.declare(&name, args.len(), pos)?;
                Ok(Formula::Atom(Atom { pred: name, args }))
            }
            _ => self.err("expected a formula"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    parse_formula_with(text, None).map(|(f, _)| f)
}

/// Parses against an optional signature; returns the formula and the
/// (possibly extended) signature.
pub fn parse_formula_with(text: &str, sig: Option<&Signature>) -> Result<(Formula, Signature), SyntaxError> {
    let toks = lex(text)?;
    let mut p = FormulaParser::new(&toks, text.len(), sig.cloned().unwrap_or_default());
    let f = p.formula()?;
    if p.i != toks.len() {
        return p.err("trailing input");
    }
    Ok((f, p.sig))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f, false)
    }
}

fn write_formula(phi: &Formula, f: &mut fmt::Formatter<'_>, left_of_arrow: bool) -> fmt::Result {
    match phi {
        Formula::Atom(a) => {
            write!(f, "{}", a.pred)?;
            if !a.args.is_empty() {
                write!(f, "({})", a.args.join(","))?;
            }
            Ok(())
        }
        Formula::Imp(a, b) => {
            if left_of_arrow {
                write!(f, "(")?;
            }
            write_formula(a, f, true)?;
            write!(f, " -> ")?;
            write_formula(b, f, false)?;
            if left_of_arrow {
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Forall(..) => {
            if left_of_arrow {
                write!(f, "(")?;
            }
            write!(f, "forall")?;
            let mut cur = phi;
            while let Formula::Forall(x, body) = cur {
                write!(f, " {x}")?;
                cur = body;
            }
            write!(f, ". ")?;
            write_formula(cur, f, false)?;
            if left_of_arrow {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

/// Renders a formula for use as a lambda annotation: atoms bare, anything
/// else parenthesised.
pub fn print_annotation(phi: &Formula) -> String {
    match phi {
        Formula::Atom(_) => phi.to_string(),
        _ => format!("({phi})"),
    }
}

pub fn print_formula(phi: &Formula) -> String {
    phi.to_string()
}

/// Builds a variable map from string pairs.
pub fn var_map<'a, I: IntoIterator<Item = (&'a str, &'a str)>>(pairs: I) -> BTreeMap<Ident, Ident> {
    pairs.into_iter().map(|(a, b)| (ident(a), ident(b))).collect()
}

/// Interning table mapping alpha-equivalence classes to dense ids.
#[derive(Default, Debug, Clone)]
pub struct Interner {
    ids: HashMap<Formula, u32>,
    formulas: Vec<Formula>,
}

impl Interner {
    pub fn intern(&mut self, f: &Formula) -> u32 {
        let key = f.alpha_key();
        if let Some(&i) = self.ids.get(&key) {
            return i;
        }
        let i = self.formulas.len() as u32;
        self.ids.insert(key, i);
        self.formulas.push(f.clone());
        i
    }

    pub fn get(&self, i: u32) -> &Formula {
        &self.formulas[i as usize]
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn parses_nested_implication() {
        let f = p("(forall x. P(x) -> Q) -> Q");
        let expected = Formula::imp(
            Formula::imp(Formula::forall("x", Formula::atom("P", &["x"])), Formula::atom("Q", &[])),
            Formula::atom("Q", &[]),
        );
        // forall extends right, so the antecedent is forall x.(P(x) -> Q)
        let alt = Formula::imp(
            Formula::forall("x", Formula::imp(Formula::atom("P", &["x"]), Formula::atom("Q", &[]))),
            Formula::atom("Q", &[]),
        );
        assert_eq!(f, alt);
        assert_ne!(f, expected);
        assert_eq!(p("((forall x. P(x)) -> Q) -> Q"), expected);
    }

    #[test]
    fn multi_binder_sugar() {
        assert_eq!(
            p("forall x y. H(x,y)"),
            Formula::forall("x", Formula::forall("y", Formula::atom("H", &["x", "y"])))
        );
    }

    #[test]
    fn unterminated_atom_reports_offset() {
        let e = parse_formula("P(x").unwrap_err();
        assert_eq!(e.pos(), Some(3));
    }

    #[test]
    fn arity_and_binder_errors() {
        assert!(matches!(parse_formula("P(x) -> P(x,y)"), Err(SyntaxError::ArityMismatch { .. })));
        assert!(matches!(parse_formula("forall x. x"), Err(SyntaxError::BoundVarAsPredicate { .. })));
        let mut sig = Signature::default();
        sig.declare(&ident("P"), 2, 0).unwrap();
        assert!(parse_formula_with("P(x)", Some(&sig)).is_err());
    }

    #[test]
    fn free_vars_cases() {
        assert_eq!(p("P(x,y)").free_vars(), ["x", "y"].iter().map(|s| ident(s)).collect());
        assert_eq!(p("forall x. P(x,y)").free_vars(), ["y"].iter().map(|s| ident(s)).collect());
        assert!(p("Q").free_vars().is_empty());
    }

    #[test]
    fn substitution_cases() {
        assert_eq!(p("P(x,y)").subst1(&ident("x"), &ident("z")), p("P(z,y)"));
        let s = p("forall x. P(x,y)").subst1(&ident("y"), &ident("x"));
        assert!(s.alpha_eq(&p("forall w. P(w,x)")));
        assert_eq!(p("Q").subst1(&ident("x"), &ident("y")), p("Q"));
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let m = var_map([("x", "y"), ("y", "x")]);
        assert_eq!(p("P(x,y)").subst_vars(&m), p("P(y,x)"));
    }

    #[test]
    fn target_cases() {
        assert_eq!(&*p("P(x)").target().name, "P");
        assert_eq!(&*p("(A -> B) -> Q").target().name, "Q");
        assert_eq!(&*p("forall x. P(x) -> R(x)").target().name, "R");
    }

    #[test]
    fn printing() {
        assert_eq!(p("a -> (b -> c)").to_string(), "a -> b -> c");
        assert_eq!(p("(a -> b) -> c").to_string(), "(a -> b) -> c");
        assert_eq!(p("forall x. P(x)").to_string(), "forall x. P(x)");
        assert_eq!(p("(forall x. P(x)) -> Q").to_string(), "(forall x. P(x)) -> Q");
        assert_eq!(p("forall x y. H(x,y)").to_string(), "forall x y. H(x,y)");
    }

    #[test]
    fn alpha_equivalence() {
        assert!(p("forall x. P(x)").alpha_eq(&p("forall y. P(y)")));
        assert!(!p("forall x. P(x,y)").alpha_eq(&p("forall y. P(y,y)")));
        assert_eq!(p("forall x. P(x)").alpha_key(), p("forall z. P(z)").alpha_key());
    }

    #[test]
    fn environment_text() {
        let env = Environment::parse("X : a -> b\nY : forall x. P(x)\n\n# note\n").unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(Environment::parse(&env.to_string()).unwrap(), env);
        assert!(Environment::parse("X : a\nX : b").is_err());
        assert_eq!(Environment::parse("X : b; Y : a").unwrap().len(), 2);
    }
}
