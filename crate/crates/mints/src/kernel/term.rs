//! Proof terms and their text format.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{ident, lex, print_annotation, starts_lower, starts_upper, Formula, FormulaParser, Ident, Signature, SyntaxError, Tok};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    Var(Ident),
    Abs(Ident, Formula, Arc<ProofTerm>),
    ObjAbs(Ident, Arc<ProofTerm>),
    App(Arc<ProofTerm>, Arc<ProofTerm>),
    ObjApp(Arc<ProofTerm>, Ident),
}

/// An argument in an application spine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Obj(Ident),
    Proof(ProofTerm),
}

impl ProofTerm {
    pub fn var(x: &str) -> ProofTerm {
        ProofTerm::Var(ident(x))
    }

    pub fn abs(x: &str, annot: Formula, body: ProofTerm) -> ProofTerm {
        ProofTerm::Abs(ident(x), annot, Arc::new(body))
    }

    pub fn obj_abs(x: &str, body: ProofTerm) -> ProofTerm {
        ProofTerm::ObjAbs(ident(x), Arc::new(body))
    }

    pub fn app(f: ProofTerm, a: ProofTerm) -> ProofTerm {
        ProofTerm::App(Arc::new(f), Arc::new(a))
    }

    pub fn obj_app(f: ProofTerm, y: &str) -> ProofTerm {
        ProofTerm::ObjApp(Arc::new(f), ident(y))
    }

    /// Head variable applied to a spine of arguments.
    pub fn apply(head: Ident, args: Vec<Arg>) -> ProofTerm {
        args.into_iter().fold(ProofTerm::Var(head), |acc, a| match a {
            Arg::Obj(y) => ProofTerm::ObjApp(Arc::new(acc), y),
            Arg::Proof(t) => ProofTerm::App(Arc::new(acc), Arc::new(t)),
        })
    }

    /// Splits `h a1 ... an` into its head and spine.
    pub fn spine(&self) -> (&ProofTerm, Vec<Arg>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                ProofTerm::App(f, a) => {
                    args.push(Arg::Proof((**a).clone()));
                    cur = f;
                }
                ProofTerm::ObjApp(f, y) => {
                    args.push(Arg::Obj(y.clone()));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }

    pub fn size(&self) -> usize {
        match self {
            ProofTerm::Var(_) => 1,
            ProofTerm::Abs(_, _, b) | ProofTerm::ObjAbs(_, b) | ProofTerm::ObjApp(b, _) => 1 + b.size(),
            ProofTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn count_obj_abs(&self) -> usize {
        match self {
            ProofTerm::Var(_) => 0,
            ProofTerm::ObjAbs(_, b) => 1 + b.count_obj_abs(),
            ProofTerm::Abs(_, _, b) | ProofTerm::ObjApp(b, _) => b.count_obj_abs(),
            ProofTerm::App(f, a) => f.count_obj_abs() + a.count_obj_abs(),
        }
    }

    /// Number of subterms whose head is the proof variable `x` (free occurrences).
    pub fn count_head_uses(&self, x: &str) -> usize {
        match self {
            ProofTerm::Var(v) => usize::from(&**v == x),
            ProofTerm::Abs(v, _, b) => {
                if &**v == x {
                    0
                } else {
                    b.count_head_uses(x)
                }
            }
            ProofTerm::ObjAbs(_, b) | ProofTerm::ObjApp(b, _) => b.count_head_uses(x),
            ProofTerm::App(f, a) => f.count_head_uses(x) + a.count_head_uses(x),
        }
    }

    pub fn free_proof_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        fn go(t: &ProofTerm, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
            match t {
                ProofTerm::Var(v) => {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
                ProofTerm::Abs(v, _, b) => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                ProofTerm::ObjAbs(_, b) | ProofTerm::ObjApp(b, _) => go(b, bound, out),
                ProofTerm::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Free object variables, including those of annotations.
    pub fn free_obj_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        fn go(t: &ProofTerm, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
            match t {
                ProofTerm::Var(_) => {}
                ProofTerm::Abs(_, phi, b) => {
                    out.extend(phi.free_vars().into_iter().filter(|v| !bound.contains(v)));
                    go(b, bound, out);
                }
                ProofTerm::ObjAbs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                ProofTerm::ObjApp(f, y) => {
                    if !bound.contains(y) {
                        out.insert(y.clone());
                    }
                    go(f, bound, out);
                }
                ProofTerm::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// All names used anywhere (both sorts, bound or free).
    pub fn all_names(&self, out: &mut BTreeSet<Ident>) {
        match self {
            ProofTerm::Var(v) => {
                out.insert(v.clone());
            }
            ProofTerm::Abs(v, phi, b) => {
                out.insert(v.clone());
                phi.all_vars(out);
                b.all_names(out);
            }
            ProofTerm::ObjAbs(x, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            ProofTerm::ObjApp(f, y) => {
                out.insert(y.clone());
                f.all_names(out);
            }
            ProofTerm::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
        }
    }
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, &mut s);
        f.write_str(&s)
    }
}

fn write_term(t: &ProofTerm, out: &mut String) {
    stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, || match t {
        ProofTerm::Abs(..) | ProofTerm::ObjAbs(..) => {
            out.push('\\');
            let mut cur = t;
            let mut first = true;
            loop {
                match cur {
                    ProofTerm::Abs(x, phi, b) => {
                        if !first {
                            out.push(' ');
                        }
                        out.push_str(x);
                        out.push(':');
                        out.push_str(&print_annotation(phi));
                        cur = b;
                    }
                    ProofTerm::ObjAbs(x, b) => {
                        if !first {
                            out.push(' ');
                        }
                        out.push_str(x);
                        cur = b;
                    }
                    _ => break,
                }
                first = false;
            }
            out.push_str(". ");
            write_term(cur, out);
        }
        _ => {
            let (head, args) = t.spine();
            write_atomic(head, out);
            for a in args {
                out.push(' ');
                match a {
                    Arg::Obj(y) => out.push_str(&y),
                    Arg::Proof(p) => write_atomic(&p, out),
                }
            }
        }
    })
}

fn write_atomic(t: &ProofTerm, out: &mut String) {
    match t {
        ProofTerm::Var(v) => out.push_str(v),
        _ => {
            out.push('(');
            write_term(t, out);
            out.push(')');
        }
    }
}

/// A proof term whose proof abstractions may lack annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Var(Ident),
    Abs(Ident, Option<Formula>, Box<RawTerm>),
    ObjAbs(Ident, Box<RawTerm>),
    App(Box<RawTerm>, Box<RawTerm>),
    ObjApp(Box<RawTerm>, Ident),
}

impl RawTerm {
    /// Converts to a proof term when every abstraction is annotated.
    pub fn annotated(&self) -> Option<ProofTerm> {
        Some(match self {
            RawTerm::Var(v) => ProofTerm::Var(v.clone()),
            RawTerm::Abs(x, Some(phi), b) => ProofTerm::Abs(x.clone(), phi.clone(), Arc::new(b.annotated()?)),
            RawTerm::Abs(_, None, _) => return None,
            RawTerm::ObjAbs(x, b) => ProofTerm::ObjAbs(x.clone(), Arc::new(b.annotated()?)),
            RawTerm::App(f, a) => ProofTerm::App(Arc::new(f.annotated()?), Arc::new(a.annotated()?)),
            RawTerm::ObjApp(f, y) => ProofTerm::ObjApp(Arc::new(f.annotated()?), y.clone()),
        })
    }
}

impl From<&ProofTerm> for RawTerm {
    fn from(t: &ProofTerm) -> RawTerm {
        match t {
            ProofTerm::Var(v) => RawTerm::Var(v.clone()),
            ProofTerm::Abs(x, phi, b) => RawTerm::Abs(x.clone(), Some(phi.clone()), Box::new((&**b).into())),
            ProofTerm::ObjAbs(x, b) => RawTerm::ObjAbs(x.clone(), Box::new((&**b).into())),
            ProofTerm::App(f, a) => RawTerm::App(Box::new((&**f).into()), Box::new((&**a).into())),
            ProofTerm::ObjApp(f, y) => RawTerm::ObjApp(Box::new((&**f).into()), y.clone()),
        }
    }
}

struct TermParser<'a> {
    fp: FormulaParser<'a>,
}

impl<'a> TermParser<'a> {
    fn term(&mut self) -> Result<RawTerm, SyntaxError> {
        if self.fp.peek() == Some(&Tok::Backslash) {
            return self.lambda();
        }
        let mut acc = match self.fp.peek().cloned() {
            Some(Tok::Ident(v)) if starts_upper(&v) => {
                self.fp.i += 1;
                RawTerm::Var(ident(&v))
            }
            Some(Tok::LParen) => {
                self.fp.i += 1;
                let t = self.term()?;
                self.fp.expect(Tok::RParen, "`)`")?;
                t
            }
            _ => return self.fp.err("expected a proof variable, `(` or `\\`"),
        };
        loop {
            match self.fp.peek().cloned() {
                Some(Tok::Ident(v)) if starts_lower(&v) => {
                    self.fp.i += 1;
                    acc = RawTerm::ObjApp(Box::new(acc), ident(&v));
                }
                Some(Tok::Ident(v)) => {
                    self.fp.i += 1;
                    acc = RawTerm::App(Box::new(acc), Box::new(RawTerm::Var(ident(&v))));
                }
                Some(Tok::LParen) => {
                    self.fp.i += 1;
                    let t = self.term()?;
                    self.fp.expect(Tok::RParen, "`)`")?;
                    acc = RawTerm::App(Box::new(acc), Box::new(t));
                }
                Some(Tok::Backslash) => {
                    let t = self.lambda()?;
                    acc = RawTerm::App(Box::new(acc), Box::new(t));
                    return Ok(acc);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<RawTerm, SyntaxError> {
        self.fp.expect(Tok::Backslash, "`\\`")?;
        let mut binders: Vec<(Ident, bool, Option<Formula>)> = Vec::new();
        loop {
            match self.fp.peek().cloned() {
                Some(Tok::Ident(v)) => {
                    self.fp.i += 1;
                    if starts_lower(&v) {
                        binders.push((ident(&v), false, None));
                    } else if self.fp.peek() == Some(&Tok::Colon) {
                        self.fp.i += 1;
                        let phi = self.fp.formula()?;
                        binders.push((ident(&v), true, Some(phi)));
                    } else {
                        binders.push((ident(&v), true, None));
                    }
                }
                Some(Tok::Dot) if !binders.is_empty() => {
                    self.fp.i += 1;
                    break;
                }
                _ => return self.fp.err("expected a binder or `.`"),
            }
        }
        let body = self.term()?;
        Ok(binders.into_iter().rev().fold(body, |acc, (x, proof, annot)| {
            if proof {
                RawTerm::Abs(x, annot, Box::new(acc))
            } else {
                RawTerm::ObjAbs(x, Box::new(acc))
            }
        }))
    }
}

/// Parses the proof-term text format; annotations may be omitted.
pub fn parse_raw_term(text: &str) -> Result<RawTerm, SyntaxError> {
    let toks = lex(text)?;
    let mut p = TermParser { fp: FormulaParser::new(&toks, text.len(), Signature::default()) };
    let t = stacker::maybe_grow(64 * 1024, 16 * 1024 * 1024, || p.term())?;
    if p.fp.i != toks.len() {
        return p.fp.err("trailing input");
    }
    Ok(t)
}

/// Parses a fully annotated proof term.
pub fn parse_term(text: &str) -> Result<ProofTerm, SyntaxError> {
    let raw = parse_raw_term(text)?;
    raw.annotated().ok_or(SyntaxError::Unexpected {
        pos: 0,
        msg: "proof abstraction without annotation; supply an expected formula".into(),
    })
}
