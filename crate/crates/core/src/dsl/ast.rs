//! Syntax trees and the canonical printer.

use std::fmt::{self, Write};

use super::lexer::Pos;

/// Source position that never takes part in equality, so trees parsed
/// from differently formatted text compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span(pub Pos);

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elem {
    Int(u64),
    Name(String),
}

/// A tuple of elements, one per coordinate of a fiber.
pub type Tuple = Vec<Elem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub from: Tuple,
    pub to: Tuple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TyExpr {
    /// The unit 1-cell on the unit 0-cell.
    One,
    Wire(String),
    /// `[C]`, the open region over `C`.
    Region(String),
    Left(String),
    Right(String),
    /// `unit(C)`, the identity 1-cell on the 0-cell `C`.
    UnitOn(String),
    Then(Box<TyExpr>, Box<TyExpr>),
    Tensor(Box<TyExpr>, Box<TyExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Ty(TyExpr),
    Perm(Vec<u64>),
    Family(Vec<(Elem, Vec<Pair>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Name(String, Span),
    Call(String, Vec<Arg>, Span),
    Seq(Box<Term>, Box<Term>),
    Then(Box<Term>, Box<Term>),
    Par(Box<Term>, Box<Term>),
}

impl Term {
    pub fn span(&self) -> Span {
        match self {
            Term::Name(_, s) | Term::Call(_, _, s) => *s,
            Term::Seq(a, _) | Term::Then(a, _) | Term::Par(a, _) => a.span(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Term::Seq(..) => 0,
            Term::Then(..) => 1,
            Term::Par(..) => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetBody {
    Size(u64),
    Labels(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Set {
        name: String,
        body: SetBody,
        span: Span,
    },
    Gen {
        name: String,
        dom: TyExpr,
        cod: TyExpr,
        data: Vec<Pair>,
        span: Span,
    },
    Builtin {
        name: String,
        call: Term,
        span: Span,
    },
    Def {
        name: String,
        term: Term,
        span: Span,
    },
    Check {
        label: Option<String>,
        lhs: Term,
        rhs: Term,
        span: Span,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceFile {
    pub stmts: Vec<Stmt>,
}

fn elem(out: &mut String, e: &Elem) {
    match e {
        Elem::Int(n) => write!(out, "{n}").unwrap(),
        Elem::Name(s) => out.push_str(s),
    }
}

fn tuple(out: &mut String, t: &Tuple) {
    if let [e] = t.as_slice() {
        elem(out, e);
        return;
    }
    out.push('(');
    for (i, e) in t.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        elem(out, e);
    }
    out.push(')');
}

fn pairs(out: &mut String, ps: &[Pair]) {
    out.push('{');
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        tuple(out, &p.from);
        out.push_str(" -> ");
        tuple(out, &p.to);
    }
    out.push('}');
}

fn ty_prec(t: &TyExpr) -> u8 {
    match t {
        TyExpr::Then(..) => 0,
        TyExpr::Tensor(..) => 1,
        _ => 2,
    }
}

fn ty(out: &mut String, t: &TyExpr) {
    let binary = |out: &mut String, a: &TyExpr, b: &TyExpr, op: &str, p: u8| {
        child_ty(out, a, ty_prec(a) < p);
        out.push_str(op);
        child_ty(out, b, ty_prec(b) <= p);
    };
    match t {
        TyExpr::One => out.push('1'),
        TyExpr::Wire(s) => out.push_str(s),
        TyExpr::Region(s) => write!(out, "[{s}]").unwrap(),
        TyExpr::Left(s) => write!(out, "left({s})").unwrap(),
        TyExpr::Right(s) => write!(out, "right({s})").unwrap(),
        TyExpr::UnitOn(s) => write!(out, "unit({s})").unwrap(),
        TyExpr::Then(a, b) => binary(out, a, b, " . ", 0),
        TyExpr::Tensor(a, b) => binary(out, a, b, " * ", 1),
    }
}

fn child_ty(out: &mut String, t: &TyExpr, parens: bool) {
    if parens {
        out.push('(');
    }
    ty(out, t);
    if parens {
        out.push(')');
    }
}

fn arg(out: &mut String, a: &Arg) {
    match a {
        Arg::Ty(t) => ty(out, t),
        Arg::Perm(p) => {
            let items: Vec<String> = p.iter().map(u64::to_string).collect();
            write!(out, "[{}]", items.join(", ")).unwrap();
        }
        Arg::Family(members) => {
            out.push('{');
            for (i, (key, ps)) in members.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                elem(out, key);
                out.push_str(": ");
                pairs(out, ps);
            }
            out.push('}');
        }
    }
}

fn term(out: &mut String, t: &Term) {
    let binary = |out: &mut String, a: &Term, b: &Term, op: &str| {
        let p = t.prec();
        child(out, a, a.prec() < p);
        out.push_str(op);
        child(out, b, b.prec() <= p);
    };
    match t {
        Term::Name(n, _) => out.push_str(n),
        Term::Call(n, args, _) => {
            out.push_str(n);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                arg(out, a);
            }
            out.push(')');
        }
        Term::Seq(a, b) => binary(out, a, b, " ; "),
        Term::Then(a, b) => binary(out, a, b, " . "),
        Term::Par(a, b) => binary(out, a, b, " * "),
    }
}

fn child(out: &mut String, t: &Term, parens: bool) {
    if parens {
        out.push('(');
    }
    term(out, t);
    if parens {
        out.push(')');
    }
}

impl fmt::Display for TyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        ty(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Set { name, body, .. } => match body {
                SetBody::Size(n) => write!(f, "set {name} = {n}"),
                SetBody::Labels(ls) => write!(f, "set {name} = {{{}}}", ls.join(", ")),
            },
            Stmt::Gen {
                name, dom, cod, data, ..
            } => {
                let mut s = String::new();
                pairs(&mut s, data);
                write!(f, "gen {name} : {dom} -> {cod} = {s}")
            }
            Stmt::Builtin { name, call, .. } => write!(f, "builtin {name} = {call}"),
            Stmt::Def { name, term, .. } => write!(f, "def {name} = {term}"),
            Stmt::Check { label, lhs, rhs, .. } => match label {
                Some(l) => write!(f, "check {l}: {lhs} == {rhs}"),
                None => write!(f, "check {lhs} == {rhs}"),
            },
        }
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Canonical text for a file; parsing it gives back an equal tree.
pub fn pretty(sf: &SourceFile) -> String {
    sf.to_string()
}
