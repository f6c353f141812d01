//! Recursive-descent parser. Precedence: `*` binds tightest, then `.`,
//! then `;`; all three associate to the left.

use super::ast::*;
use super::lexer::{lex, Pos, Tok, Token};
use super::DslError;

pub const KEYWORDS: [&str; 5] = ["set", "gen", "builtin", "def", "check"];

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> DslError {
        let p = self.pos();
        DslError::Syntax {
            line: p.line,
            col: p.col,
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Pos> {
        if *self.peek() == t {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[&format!("`{}`", t.symbol())]))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut stmts = Vec::new();
        while *self.peek() != Tok::Eof {
            stmts.push(self.stmt()?);
        }
        Ok(SourceFile { stmts })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = Span(self.pos());
        let kw = match self.peek() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.error(&["`set`", "`gen`", "`builtin`", "`def`", "`check`"])),
        };
        self.bump();
        match kw.as_str() {
            "set" => {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let body = match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        SetBody::Size(n)
                    }
                    Tok::LBrace => {
                        self.bump();
                        let mut labels = vec![self.ident()?];
                        while self.eat(&Tok::Comma) {
                            labels.push(self.ident()?);
                        }
                        self.expect(Tok::RBrace)?;
                        SetBody::Labels(labels)
                    }
                    _ => return Err(self.error(&["integer", "`{`"])),
                };
                Ok(Stmt::Set { name, body, span })
            }
            "gen" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                let dom = self.ty()?;
                self.expect(Tok::Arrow)?;
                let cod = self.ty()?;
                self.expect(Tok::Eq)?;
                let data = self.pairs()?;
                Ok(Stmt::Gen {
                    name,
                    dom,
                    cod,
                    data,
                    span,
                })
            }
            "builtin" => {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let call = match self.atom()? {
                    call @ Term::Call(..) => call,
                    _ => {
                        return Err(DslError::Syntax {
                            line: span.0.line,
                            col: span.0.col,
                            found: "a name".into(),
                            expected: vec!["builtin call".into()],
                        })
                    }
                };
                Ok(Stmt::Builtin { name, call, span })
            }
            "def" => {
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let term = self.term()?;
                Ok(Stmt::Def { name, term, span })
            }
            _ => {
                let label = if matches!(self.peek(), Tok::Ident(_)) && *self.peek2() == Tok::Colon {
                    let l = self.ident()?;
                    self.bump();
                    Some(l)
                } else {
                    None
                };
                let lhs = self.term()?;
                if *self.peek() != Tok::EqEq {
                    return Err(self.error(&["`==`", "`;`", "`.`", "`*`"]));
                }
                self.bump();
                let rhs = self.term()?;
                Ok(Stmt::Check { label, lhs, rhs, span })
            }
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.then()?;
        while self.eat(&Tok::Semi) {
            t = Term::Seq(Box::new(t), Box::new(self.then()?));
        }
        Ok(t)
    }

    fn then(&mut self) -> PResult<Term> {
        let mut t = self.par()?;
        while self.eat(&Tok::Dot) {
            t = Term::Then(Box::new(t), Box::new(self.par()?));
        }
        Ok(t)
    }

    fn par(&mut self) -> PResult<Term> {
        let mut t = self.atom()?;
        while self.eat(&Tok::Star) {
            t = Term::Par(Box::new(t), Box::new(self.atom()?));
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        let span = Span(self.pos());
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.arg()?);
                        while self.eat(&Tok::Comma) {
                            args.push(self.arg()?);
                        }
                    }
                    if *self.peek() != Tok::RParen {
                        return Err(self.error(&["`,`", "`)`"]));
                    }
                    self.bump();
                    Ok(Term::Call(s, args, span))
                } else {
                    Ok(Term::Name(s, span))
                }
            }
            _ => Err(self.error(&["identifier", "`(`"])),
        }
    }

    fn arg(&mut self) -> PResult<Arg> {
        match (self.peek(), self.peek2()) {
            (Tok::LBrace, _) => self.family(),
            (Tok::LBracket, Tok::Int(_)) => {
                self.bump();
                let mut p = vec![self.int()?];
                while self.eat(&Tok::Comma) {
                    p.push(self.int()?);
                }
                self.expect(Tok::RBracket)?;
                Ok(Arg::Perm(p))
            }
            _ => Ok(Arg::Ty(self.ty()?)),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn family(&mut self) -> PResult<Arg> {
        self.expect(Tok::LBrace)?;
        let mut members = Vec::new();
        if !self.eat(&Tok::RBrace) {
            loop {
                let key = self.elem()?;
                self.expect(Tok::Colon)?;
                members.push((key, self.pairs()?));
                if self.eat(&Tok::RBrace) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.error(&["`,`", "`}`"]));
                }
            }
        }
        Ok(Arg::Family(members))
    }

    fn ty(&mut self) -> PResult<TyExpr> {
        let mut t = self.ty_tensor()?;
        while self.eat(&Tok::Dot) {
            t = TyExpr::Then(Box::new(t), Box::new(self.ty_tensor()?));
        }
        Ok(t)
    }

    fn ty_tensor(&mut self) -> PResult<TyExpr> {
        let mut t = self.ty_atom()?;
        while self.eat(&Tok::Star) {
            t = TyExpr::Tensor(Box::new(t), Box::new(self.ty_atom()?));
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> PResult<TyExpr> {
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok(TyExpr::One)
            }
            Tok::LBracket => {
                self.bump();
                let s = self.ident()?;
                self.expect(Tok::RBracket)?;
                Ok(TyExpr::Region(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if matches!(s.as_str(), "left" | "right" | "unit") && *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                let inner = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(match s.as_str() {
                    "left" => TyExpr::Left(inner),
                    "right" => TyExpr::Right(inner),
                    _ => TyExpr::UnitOn(inner),
                })
            }
            Tok::Ident(_) => Ok(TyExpr::Wire(self.ident()?)),
            _ => Err(self.error(&["identifier", "`1`", "`[`", "`(`"])),
        }
    }

    fn elem(&mut self) -> PResult<Elem> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Elem::Int(n))
            }
            Tok::Ident(_) => Ok(Elem::Name(self.ident()?)),
            _ => Err(self.error(&["integer", "identifier"])),
        }
    }

    fn tuple(&mut self) -> PResult<Tuple> {
        if self.eat(&Tok::LParen) {
            if self.eat(&Tok::RParen) {
                return Ok(vec![]);
            }
            let mut t = vec![self.elem()?];
            while self.eat(&Tok::Comma) {
                t.push(self.elem()?);
            }
            if !self.eat(&Tok::RParen) {
                return Err(self.error(&["`,`", "`)`"]));
            }
            Ok(t)
        } else {
            Ok(vec![self.elem()?])
        }
    }

    fn pairs(&mut self) -> PResult<Vec<Pair>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            let from = self.tuple()?;
            self.expect(Tok::Arrow)?;
            let to = self.tuple()?;
            out.push(Pair { from, to });
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error(&["`,`", "`}`"]));
            }
        }
    }
}

pub fn parse(text: &str) -> Result<SourceFile, DslError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.file()
}

/// Parses a single term, as used in checks and definitions.
pub fn parse_term(text: &str) -> Result<Term, DslError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`;`", "`.`", "`*`", "end of input"]));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_declaration() {
        let sf = parse("set K = 2").unwrap();
        assert_eq!(sf.stmts.len(), 1);
        assert!(matches!(&sf.stmts[0], Stmt::Set { name, body: SetBody::Size(2), .. } if name == "K"));
    }

    #[test]
    fn seq_over_par() {
        let sf = parse("def lhs = (E * id(K)) ; D").unwrap();
        let Stmt::Def { term, .. } = &sf.stmts[0] else {
            panic!("not a def")
        };
        let Term::Seq(a, b) = term else { panic!("not a seq") };
        assert!(matches!(**a, Term::Par(..)));
        assert!(matches!(**b, Term::Name(..)));
    }

    #[test]
    fn precedence_without_parens() {
        let t = parse_term("a * b . c ; d").unwrap();
        let Term::Seq(l, _) = &t else { panic!() };
        let Term::Then(ll, _) = &**l else { panic!() };
        assert!(matches!(**ll, Term::Par(..)));
    }

    #[test]
    fn malformed_def_points_at_equals() {
        match parse("def = ;").unwrap_err() {
            DslError::Syntax {
                line, col, expected, ..
            } => {
                assert_eq!((line, col), (1, 5));
                assert_eq!(expected, vec!["identifier".to_string()]);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn generator_data_and_families() {
        let src = "gen E : P . K -> [C] = {(0, 0) -> 0, (a, 1) -> (1)}\n\
                   builtin D = controlled(C, K, P, {0: {0 -> 0}, 1: {}})\n\
                   def e = cup(K, [1, 0]) ; cap(K)\n\
                   check named: e == id(1)\n\
                   check e == e";
        let sf = parse(src).unwrap();
        assert_eq!(sf.stmts.len(), 5);
        let again = parse(&pretty(&sf)).unwrap();
        assert_eq!(again, sf);
    }

    #[test]
    fn check_needs_double_equals() {
        let err = parse("check a = b").unwrap_err();
        assert!(matches!(err, DslError::Syntax { col: 9, .. }), "{err}");
    }
}
