//! Type checking against named 1-cell types, and evaluation to 2-cells.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::ast::{Arg, Elem, Pair, SetBody, SourceFile, Span, Stmt, Term, TyExpr};
use super::DslError;
use crate::cells::{self, hcompose_one, tensor_one, Difference, OneCell, TwoCell};
use crate::relcore::{FiniteSet, Permutation, Rel};
use crate::structures::{self, ControlledOp, Side};

pub const BUILTINS: [&str; 18] = [
    "id",
    "left",
    "right",
    "unit",
    "cup",
    "cap",
    "delete",
    "create",
    "copy",
    "compare",
    "delete_region",
    "create_region",
    "publish",
    "sample",
    "swap",
    "controlled",
    "rcontrolled",
    "converse",
];

/// A 0-cell: a product of named sets, empty for the unit.
pub type Obj = Vec<String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seg {
    Wire(String),
    Left(String),
    Right(String),
    Tensor(Box<Ty>, Box<Ty>),
}

/// A 1-cell type: a horizontal string of segments between two 0-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ty {
    pub src: Obj,
    pub dst: Obj,
    pub segs: Vec<Seg>,
}

impl Seg {
    fn ends(&self) -> (Obj, Obj) {
        match self {
            Seg::Wire(_) => (vec![], vec![]),
            Seg::Left(c) => (vec![], vec![c.clone()]),
            Seg::Right(c) => (vec![c.clone()], vec![]),
            Seg::Tensor(a, b) => (
                [a.src.clone(), b.src.clone()].concat(),
                [a.dst.clone(), b.dst.clone()].concat(),
            ),
        }
    }
}

impl Ty {
    pub fn unit_on(obj: Obj) -> Ty {
        Ty {
            src: obj.clone(),
            dst: obj,
            segs: vec![],
        }
    }

    pub fn one() -> Ty {
        Ty::unit_on(vec![])
    }

    fn seg(s: Seg) -> Ty {
        let (src, dst) = s.ends();
        Ty {
            src,
            dst,
            segs: vec![s],
        }
    }

    pub fn wire(name: &str) -> Ty {
        Ty::seg(Seg::Wire(name.to_string()))
    }

    pub fn left(c: &str) -> Ty {
        Ty::seg(Seg::Left(c.to_string()))
    }

    pub fn right(c: &str) -> Ty {
        Ty::seg(Seg::Right(c.to_string()))
    }

    pub fn region(c: &str) -> Ty {
        Ty::left(c).then(&Ty::right(c)).expect("left meets right")
    }

    /// Runs between unit 0-cells.
    pub fn is_scalar(&self) -> bool {
        self.src.is_empty() && self.dst.is_empty()
    }

    pub fn then(&self, next: &Ty) -> Option<Ty> {
        (self.dst == next.src).then(|| Ty {
            src: self.src.clone(),
            dst: next.dst.clone(),
            segs: [self.segs.clone(), next.segs.clone()].concat(),
        })
    }

    pub fn tensor(&self, other: &Ty) -> Ty {
        if self.is_scalar() && other.is_scalar() {
            return self.then(other).expect("scalar types compose");
        }
        if *self == Ty::one() {
            return other.clone();
        }
        if *other == Ty::one() {
            return self.clone();
        }
        Ty::seg(Seg::Tensor(Box::new(self.clone()), Box::new(other.clone())))
    }

    /// The set named by each coordinate of the single fiber of a scalar
    /// type, left to right, or `None` if the type is not scalar.
    pub fn coordinates(&self) -> Option<Vec<String>> {
        if !self.is_scalar() {
            return None;
        }
        let mut out = Vec::new();
        for (i, s) in self.segs.iter().enumerate() {
            match s {
                Seg::Wire(x) => out.push(x.clone()),
                Seg::Tensor(..) => return None,
                _ => {}
            }
            if i + 1 < self.segs.len() {
                out.extend(s.ends().1);
            }
        }
        Some(out)
    }
}

fn obj_str(o: &Obj) -> String {
    if o.is_empty() {
        "1".into()
    } else {
        o.join(" * ")
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segs.is_empty() {
            return if self.src.is_empty() {
                f.write_str("1")
            } else {
                write!(f, "unit({})", obj_str(&self.src))
            };
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.segs.len() {
            match (&self.segs[i], self.segs.get(i + 1)) {
                (Seg::Left(a), Some(Seg::Right(b))) if a == b => {
                    parts.push(format!("[{a}]"));
                    i += 2;
                    continue;
                }
                (Seg::Wire(x), _) => parts.push(x.clone()),
                (Seg::Left(c), _) => parts.push(format!("left({c})")),
                (Seg::Right(c), _) => parts.push(format!("right({c})")),
                (Seg::Tensor(a, b), _) => parts.push(format!("({a} * {b})")),
            }
            i += 1;
        }
        f.write_str(&parts.join(" . "))
    }
}

/// A typed term, ready to evaluate.
#[derive(Clone, Debug)]
pub struct TTerm {
    pub dom: Ty,
    pub cod: Ty,
    pub node: Node,
}

#[derive(Clone, Debug)]
pub enum Node {
    Cell(String, Arc<TwoCell>),
    Ref(String, Arc<TTerm>),
    Seq(Box<TTerm>, Box<TTerm>),
    Then(Box<TTerm>, Box<TTerm>),
    Par(Box<TTerm>, Box<TTerm>),
}

impl TTerm {
    pub fn type_string(&self) -> String {
        format!("{} => {}", self.dom, self.cod)
    }
}

#[derive(Clone, Debug)]
pub struct CheckItem {
    pub name: String,
    pub lhs: TTerm,
    pub rhs: TTerm,
    pub span: Span,
}

/// An elaborated file.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub sets: BTreeMap<String, FiniteSet>,
    pub names: BTreeMap<String, Arc<TTerm>>,
    pub checks: Vec<CheckItem>,
}

fn type_error(span: Span, msg: impl Into<String>) -> DslError {
    DslError::Type {
        line: span.0.line,
        col: span.0.col,
        msg: msg.into(),
    }
}

struct Elab {
    prog: Program,
}

impl Elab {
    fn declare(&self, name: &str, span: Span) -> Result<(), DslError> {
        if BUILTINS.contains(&name) {
            return Err(type_error(
                span,
                format!("`{name}` is a builtin and cannot be redeclared"),
            ));
        }
        if self.prog.sets.contains_key(name) || self.prog.names.contains_key(name) {
            return Err(type_error(span, format!("`{name}` is already declared")));
        }
        Ok(())
    }

    fn set(&self, name: &str, span: Span) -> Result<&FiniteSet, DslError> {
        self.prog
            .sets
            .get(name)
            .ok_or_else(|| type_error(span, format!("unknown set `{name}`")))
    }

    fn obj_set(&self, o: &Obj, span: Span) -> Result<FiniteSet, DslError> {
        let mut acc = FiniteSet::unit();
        for (i, name) in o.iter().enumerate() {
            let s = self.set(name, span)?;
            acc = if i == 0 { s.clone() } else { acc.product(s) };
        }
        Ok(acc)
    }

    fn ty(&self, t: &TyExpr, span: Span) -> Result<Ty, DslError> {
        let named = |n: &str| self.set(n, span).map(|_| n.to_string());
        Ok(match t {
            TyExpr::One => Ty::one(),
            TyExpr::Wire(x) => Ty::wire(&named(x)?),
            TyExpr::Region(c) => Ty::region(&named(c)?),
            TyExpr::Left(c) => Ty::left(&named(c)?),
            TyExpr::Right(c) => Ty::right(&named(c)?),
            TyExpr::UnitOn(c) => Ty::unit_on(vec![named(c)?]),
            TyExpr::Then(a, b) => {
                let (a, b) = (self.ty(a, span)?, self.ty(b, span)?);
                a.then(&b).ok_or_else(|| {
                    type_error(
                        span,
                        format!(
                            "cannot place `{a}` (ending at {}) before `{b}` (starting at {})",
                            obj_str(&a.dst),
                            obj_str(&b.src)
                        ),
                    )
                })?
            }
            TyExpr::Tensor(a, b) => self.ty(a, span)?.tensor(&self.ty(b, span)?),
        })
    }

    fn one_cell(&self, t: &Ty, span: Span) -> Result<OneCell, DslError> {
        let mut acc: Option<OneCell> = None;
        for s in &t.segs {
            let cell = match s {
                Seg::Wire(x) => OneCell::scalar(self.set(x, span)?),
                Seg::Left(c) => OneCell::singletons(&FiniteSet::unit(), self.set(c, span)?),
                Seg::Right(c) => OneCell::singletons(self.set(c, span)?, &FiniteSet::unit()),
                Seg::Tensor(a, b) => tensor_one(&self.one_cell(a, span)?, &self.one_cell(b, span)?),
            };
            acc = Some(match acc {
                None => cell,
                Some(prev) => hcompose_one(&prev, &cell).map_err(|e| type_error(span, e.to_string()))?,
            });
        }
        match acc {
            Some(c) => Ok(c),
            None => Ok(OneCell::identity(&self.obj_set(&t.src, span)?)),
        }
    }

    /// Fiber index of a tuple of elements in a scalar type.
    fn index(&self, t: &Ty, tuple: &[Elem], span: Span) -> Result<usize, DslError> {
        let coords = t.coordinates().ok_or_else(|| {
            type_error(
                span,
                format!("explicit data needs a type between unit 0-cells, got `{t}`"),
            )
        })?;
        if tuple.len() != coords.len() {
            return Err(type_error(
                span,
                format!("`{t}` has {} coordinates but a tuple has {}", coords.len(), tuple.len()),
            ));
        }
        let mut idx = 0;
        for (e, c) in tuple.iter().zip(&coords) {
            let set = self.set(c, span)?;
            let i = match e {
                Elem::Int(n) => *n as usize,
                Elem::Name(l) => set
                    .index_of(l)
                    .ok_or_else(|| type_error(span, format!("`{l}` is not an element of `{c}`")))?,
            };
            if i >= set.size() {
                return Err(type_error(span, format!("element {i} is out of range for `{c}`")));
            }
            idx = idx * set.size() + i;
        }
        Ok(idx)
    }

    fn rel(&self, dom: &Ty, cod: &Ty, data: &[Pair], span: Span) -> Result<Rel, DslError> {
        let (src, dst) = (self.one_cell(dom, span)?, self.one_cell(cod, span)?);
        let mut r = Rel::empty(&src.fiber(0, 0), &dst.fiber(0, 0));
        for p in data {
            r.insert(self.index(dom, &p.from, span)?, self.index(cod, &p.to, span)?);
        }
        Ok(r)
    }

    fn cell(&self, name: &str, dom: Ty, cod: Ty, cell: TwoCell, span: Span) -> Result<TTerm, DslError> {
        if *cell.domain() != self.one_cell(&dom, span)? || *cell.codomain() != self.one_cell(&cod, span)? {
            return Err(type_error(span, format!("internal shape mismatch building `{name}`")));
        }
        Ok(TTerm {
            dom,
            cod,
            node: Node::Cell(name.to_string(), Arc::new(cell)),
        })
    }

    fn arg_set(&self, name: &str, args: &[Arg], i: usize, span: Span) -> Result<(String, FiniteSet), DslError> {
        match args.get(i) {
            Some(Arg::Ty(TyExpr::Wire(s))) => Ok((s.clone(), self.set(s, span)?.clone())),
            _ => Err(type_error(
                span,
                format!("argument {} of `{name}` must be a set name", i + 1),
            )),
        }
    }

    fn arg_ty(&self, name: &str, args: &[Arg], i: usize, span: Span) -> Result<Ty, DslError> {
        match args.get(i) {
            Some(Arg::Ty(t)) => self.ty(t, span),
            _ => Err(type_error(
                span,
                format!("argument {} of `{name}` must be a type", i + 1),
            )),
        }
    }

    fn scalar_arg(&self, name: &str, args: &[Arg], i: usize, span: Span) -> Result<Ty, DslError> {
        let t = self.arg_ty(name, args, i, span)?;
        if !t.is_scalar() {
            return Err(type_error(
                span,
                format!("`{name}` needs a type between unit 0-cells, got `{t}`"),
            ));
        }
        Ok(t)
    }

    fn arity(name: &str, args: &[Arg], allowed: &[usize], span: Span) -> Result<(), DslError> {
        if allowed.contains(&args.len()) {
            return Ok(());
        }
        let want: Vec<String> = allowed.iter().map(usize::to_string).collect();
        Err(type_error(
            span,
            format!("`{name}` takes {} argument(s), got {}", want.join(" or "), args.len()),
        ))
    }

    fn builtin(&self, name: &str, args: &[Arg], span: Span) -> Result<TTerm, DslError> {
        let cell_err = |e: &dyn fmt::Display| type_error(span, format!("`{name}`: {e}"));
        match name {
            "id" | "left" | "right" | "unit" => {
                Self::arity(name, args, &[1], span)?;
                let t = match name {
                    "id" => self.arg_ty(name, args, 0, span)?,
                    _ => {
                        let (c, _) = self.arg_set(name, args, 0, span)?;
                        match name {
                            "left" => Ty::left(&c),
                            "right" => Ty::right(&c),
                            _ => Ty::unit_on(vec![c]),
                        }
                    }
                };
                let cell = TwoCell::identity(&self.one_cell(&t, span)?);
                self.cell(name, t.clone(), t, cell, span)
            }
            "cup" | "cap" => {
                Self::arity(name, args, &[1, 2], span)?;
                let (k, set) = self.arg_set(name, args, 0, span)?;
                let pair = match args.get(1) {
                    None => structures::canonical_cup(&set),
                    Some(Arg::Perm(p)) => {
                        let perm =
                            Permutation::new(p.iter().map(|&x| x as usize).collect()).map_err(|e| cell_err(&e))?;
                        if perm.len() != set.size() {
                            return Err(type_error(span, format!("permutation length differs from |{k}|")));
                        }
                        structures::cup_from_permutation(&perm)
                    }
                    Some(_) => {
                        return Err(type_error(
                            span,
                            format!("argument 2 of `{name}` must be a permutation"),
                        ))
                    }
                };
                let wire = OneCell::scalar(&set);
                let kk = Ty::wire(&k).then(&Ty::wire(&k)).expect("scalars");
                if name == "cup" {
                    let c = pair.cup_cell(&wire).map_err(|e| cell_err(&e))?;
                    self.cell(name, Ty::one(), kk, c, span)
                } else {
                    let c = pair.cap_cell(&wire).map_err(|e| cell_err(&e))?;
                    self.cell(name, kk, Ty::one(), c, span)
                }
            }
            "delete" | "create" => {
                Self::arity(name, args, &[1], span)?;
                let t = self.scalar_arg(name, args, 0, span)?;
                let w = self.one_cell(&t, span)?;
                let unit = OneCell::identity(&FiniteSet::unit());
                let fiber = w.fiber(0, 0);
                let (dom, cod, r) = if name == "delete" {
                    (t, Ty::one(), structures::delete(&fiber))
                } else {
                    (Ty::one(), t, structures::create(&fiber))
                };
                let (a, b) = if name == "delete" { (&w, &unit) } else { (&unit, &w) };
                let c = TwoCell::scalar_between(a, b, &r).map_err(|e| cell_err(&e))?;
                self.cell(name, dom, cod, c, span)
            }
            "copy" | "compare" | "delete_region" | "create_region" | "publish" | "sample" => {
                Self::arity(name, args, &[1], span)?;
                let (c, set) = self.arg_set(name, args, 0, span)?;
                let rs = structures::region_structure(&set);
                let split = Ty::right(&c).then(&Ty::left(&c)).expect("right meets left");
                let (dom, cod, cell) = match name {
                    "copy" => (Ty::unit_on(vec![c.clone()]), split, rs.copy),
                    "compare" => (split, Ty::unit_on(vec![c.clone()]), rs.compare),
                    "delete_region" => (Ty::region(&c), Ty::one(), rs.delete_region),
                    "create_region" => (Ty::one(), Ty::region(&c), rs.create_region),
                    "publish" => (Ty::wire(&c), Ty::region(&c), rs.publish),
                    _ => (Ty::region(&c), Ty::wire(&c), rs.sample),
                };
                self.cell(name, dom, cod, cell, span)
            }
            "swap" => {
                Self::arity(name, args, &[2], span)?;
                let (a, b) = (
                    self.scalar_arg(name, args, 0, span)?,
                    self.scalar_arg(name, args, 1, span)?,
                );
                let c = cells::swap(&self.one_cell(&a, span)?, &self.one_cell(&b, span)?).map_err(|e| cell_err(&e))?;
                let (dom, cod) = (a.then(&b).expect("scalars"), b.then(&a).expect("scalars"));
                self.cell(name, dom, cod, c, span)
            }
            "controlled" | "rcontrolled" => {
                Self::arity(name, args, &[4], span)?;
                let (c, public) = self.arg_set(name, args, 0, span)?;
                let x = self.scalar_arg(name, args, 1, span)?;
                let y = self.scalar_arg(name, args, 2, span)?;
                let Some(Arg::Family(members)) = args.get(3) else {
                    return Err(type_error(
                        span,
                        format!("argument 4 of `{name}` must be a family block"),
                    ));
                };
                let mut family: Vec<Option<Rel>> = vec![None; public.size()];
                for (key, data) in members {
                    let i = self.index(&Ty::wire(&c), std::slice::from_ref(key), span)?;
                    if family[i].is_some() {
                        return Err(type_error(
                            span,
                            format!("family member {} given twice", public.label(i)),
                        ));
                    }
                    family[i] = Some(self.rel(&x, &y, data, span)?);
                }
                let family: Vec<Rel> = family
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| r.ok_or_else(|| type_error(span, format!("family lacks member {}", public.label(i)))))
                    .collect::<Result<_, _>>()?;
                let (wx, wy) = (self.one_cell(&x, span)?, self.one_cell(&y, span)?);
                let side = if name == "controlled" { Side::Left } else { Side::Right };
                let op = ControlledOp::new(&public, &wx.fiber(0, 0), &wy.fiber(0, 0), family, side)
                    .map_err(|e| cell_err(&e))?;
                let cell = structures::controlled_between(&op, &wx, &wy).map_err(|e| cell_err(&e))?;
                let wrap = |t: &Ty| match side {
                    Side::Left => Ty::right(&c).then(t).expect("scalar after right"),
                    Side::Right => t.then(&Ty::left(&c)).expect("scalar before left"),
                };
                self.cell(name, wrap(&x), wrap(&y), cell, span)
            }
            "converse" => Err(type_error(span, "`converse` takes a term, write it as a def")),
            other => Err(type_error(span, format!("unknown builtin `{other}`"))),
        }
    }

    fn term(&self, t: &Term) -> Result<TTerm, DslError> {
        match t {
            Term::Name(n, span) => {
                let body = self
                    .prog
                    .names
                    .get(n)
                    .ok_or_else(|| type_error(*span, format!("unknown name `{n}`")))?;
                Ok(TTerm {
                    dom: body.dom.clone(),
                    cod: body.cod.clone(),
                    node: Node::Ref(n.clone(), body.clone()),
                })
            }
            Term::Call(n, args, span) => {
                if n == "converse" {
                    return self.converse(args, *span);
                }
                self.builtin(n, args, *span)
            }
            Term::Seq(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                if x.cod != y.dom {
                    return Err(type_error(
                        b.span(),
                        format!(
                            "cannot compose vertically: left side has codomain `{}` but right side has domain `{}`",
                            x.cod, y.dom
                        ),
                    ));
                }
                Ok(TTerm {
                    dom: x.dom.clone(),
                    cod: y.cod.clone(),
                    node: Node::Seq(Box::new(x), Box::new(y)),
                })
            }
            Term::Then(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                let dom = x.dom.then(&y.dom);
                let cod = x.cod.then(&y.cod);
                match (dom, cod) {
                    (Some(dom), Some(cod)) => Ok(TTerm {
                        dom,
                        cod,
                        node: Node::Then(Box::new(x), Box::new(y)),
                    }),
                    _ => Err(type_error(
                        b.span(),
                        format!(
                            "cannot compose horizontally: `{}` ends at {} but `{}` starts at {}",
                            x.type_string(),
                            obj_str(&x.dom.dst),
                            y.type_string(),
                            obj_str(&y.dom.src)
                        ),
                    )),
                }
            }
            Term::Par(a, b) => {
                let (x, y) = (self.term(a)?, self.term(b)?);
                Ok(TTerm {
                    dom: x.dom.tensor(&y.dom),
                    cod: x.cod.tensor(&y.cod),
                    node: Node::Par(Box::new(x), Box::new(y)),
                })
            }
        }
    }

    /// `converse(name)`: the reversed relation of a declared cell.
    fn converse(&self, args: &[Arg], span: Span) -> Result<TTerm, DslError> {
        Self::arity("converse", args, &[1], span)?;
        let Some(Arg::Ty(TyExpr::Wire(n))) = args.first() else {
            return Err(type_error(span, "argument of `converse` must be a declared name"));
        };
        let body = self
            .prog
            .names
            .get(n)
            .ok_or_else(|| type_error(span, format!("unknown name `{n}`")))?;
        let value = evaluate(body);
        Ok(TTerm {
            dom: body.cod.clone(),
            cod: body.dom.clone(),
            node: Node::Cell(format!("converse({n})"), Arc::new(cells::converse(&value))),
        })
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), DslError> {
        match s {
            Stmt::Set { name, body, span } => {
                self.declare(name, *span)?;
                let set = match body {
                    SetBody::Size(n) => FiniteSet::new(*n as usize),
                    SetBody::Labels(ls) => {
                        FiniteSet::labeled(ls.clone()).map_err(|e| type_error(*span, e.to_string()))?
                    }
                };
                self.prog.sets.insert(name.clone(), set);
            }
            Stmt::Gen {
                name,
                dom,
                cod,
                data,
                span,
            } => {
                self.declare(name, *span)?;
                let (d, c) = (self.ty(dom, *span)?, self.ty(cod, *span)?);
                let r = self.rel(&d, &c, data, *span)?;
                let cell = TwoCell::scalar_between(&self.one_cell(&d, *span)?, &self.one_cell(&c, *span)?, &r)
                    .map_err(|e| type_error(*span, e.to_string()))?;
                let t = self.cell(name, d, c, cell, *span)?;
                self.prog.names.insert(name.clone(), Arc::new(t));
            }
            Stmt::Builtin { name, call, span } => {
                self.declare(name, *span)?;
                let t = self.term(call)?;
                self.prog.names.insert(name.clone(), Arc::new(t));
            }
            Stmt::Def { name, term, span } => {
                self.declare(name, *span)?;
                let t = self.term(term)?;
                self.prog.names.insert(name.clone(), Arc::new(t));
            }
            Stmt::Check { label, lhs, rhs, span } => {
                let name = label.clone().unwrap_or_else(|| format!("{lhs} == {rhs}"));
                let (lhs, rhs) = (self.term(lhs)?, self.term(rhs)?);
                self.prog.checks.push(CheckItem {
                    name,
                    lhs,
                    rhs,
                    span: *span,
                });
            }
        }
        Ok(())
    }
}

pub fn elaborate(sf: &SourceFile) -> Result<Program, DslError> {
    let mut e = Elab {
        prog: Program::default(),
    };
    for s in &sf.stmts {
        e.stmt(s)?;
    }
    Ok(e.prog)
}

fn eval_cached(t: &TTerm, cache: &mut HashMap<String, TwoCell>) -> TwoCell {
    let bin =
        |a: &TTerm, b: &TTerm, cache: &mut HashMap<String, TwoCell>| (eval_cached(a, cache), eval_cached(b, cache));
    match &t.node {
        Node::Cell(_, c) => (**c).clone(),
        Node::Ref(n, body) => {
            if let Some(c) = cache.get(n) {
                return c.clone();
            }
            let c = eval_cached(body, cache);
            cache.insert(n.clone(), c.clone());
            c
        }
        Node::Seq(a, b) => {
            let (x, y) = bin(a, b, cache);
            cells::vcompose(&x, &y).expect("elaborated terms compose")
        }
        Node::Then(a, b) => {
            let (x, y) = bin(a, b, cache);
            cells::hcompose_two(&x, &y).expect("elaborated terms compose")
        }
        Node::Par(a, b) => {
            let (x, y) = bin(a, b, cache);
            cells::tensor(&x, &y)
        }
    }
}

/// The 2-cell a typed term denotes.
pub fn evaluate(t: &TTerm) -> TwoCell {
    eval_cached(t, &mut HashMap::new())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    Unequal,
    TypeError,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckWitness {
    pub component: (usize, usize),
    pub source: String,
    pub target: String,
    /// Which side relates the pair.
    pub present_in: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub lhs_type: String,
    pub rhs_type: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CheckWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl CheckReport {
    pub fn is_equal(&self) -> bool {
        self.verdict == Verdict::Equal
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            Verdict::Equal => "equal",
            Verdict::Unequal => "UNEQUAL",
            Verdict::TypeError => "TYPE ERROR",
        };
        write!(f, "{}: {v}", self.name)?;
        if let Some(w) = &self.witness {
            write!(
                f,
                " (component {:?}: {} -> {} only in the {})",
                w.component, w.source, w.target, w.present_in
            )?;
        }
        if let Some(m) = &self.message {
            write!(f, " ({m})")?;
        }
        Ok(())
    }
}

/// Labels for fiber element `i` of a type, given the declared sets.
fn describe(sets: &BTreeMap<String, FiniteSet>, ty: &Ty, cell: &OneCell, t: usize, s: usize, i: usize) -> String {
    if let Some(coords) = ty.coordinates() {
        let sized: Option<Vec<&FiniteSet>> = coords.iter().map(|c| sets.get(c)).collect();
        if let Some(sized) = sized {
            let mut rest = i;
            let mut parts = vec![String::new(); sized.len()];
            for (j, set) in sized.iter().enumerate().rev() {
                parts[j] = set.label(rest % set.size().max(1));
                rest /= set.size().max(1);
            }
            return format!("({})", parts.join(", "));
        }
    }
    format!("{:?}", cell.key(t, s, i))
}

/// Compares two typed terms by evaluating both sides.
pub fn check_equation(prog: &Program, name: &str, lhs: &TTerm, rhs: &TTerm) -> CheckReport {
    let mut report = CheckReport {
        name: name.to_string(),
        verdict: Verdict::Equal,
        lhs_type: lhs.type_string(),
        rhs_type: rhs.type_string(),
        witness: None,
        message: None,
    };
    if lhs.dom != rhs.dom || lhs.cod != rhs.cod {
        report.verdict = Verdict::TypeError;
        report.message = Some(format!(
            "sides have types `{}` and `{}`",
            report.lhs_type, report.rhs_type
        ));
        return report;
    }
    let (l, r) = (evaluate(lhs), evaluate(rhs));
    match cells::equal(&l, &r) {
        Ok(()) => {}
        Err(Difference::Component { t, s, a, b, in_left }) => {
            report.verdict = Verdict::Unequal;
            report.witness = Some(CheckWitness {
                component: (t, s),
                source: describe(&prog.sets, &lhs.dom, l.domain(), t, s, a),
                target: describe(&prog.sets, &lhs.cod, l.codomain(), t, s, b),
                present_in: if in_left { "left side" } else { "right side" },
            });
        }
        Err(d) => {
            report.verdict = Verdict::Unequal;
            report.message = Some(d.to_string());
        }
    }
    report
}

/// Runs every check of a program, in parallel, in file order.
pub fn run_checks(prog: &Program) -> Vec<CheckReport> {
    prog.checks
        .par_iter()
        .map(|c| check_equation(prog, &c.name, &c.lhs, &c.rhs))
        .collect()
}
