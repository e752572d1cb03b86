use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use super::lexer::{tokenize, Token, TokenKind};
use super::{AExpr, BExpr, CmpOp, ProgramState, Prog, Stmt};
use crate::extreal::{parse_rational, ExtValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct PgclParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub(crate) const KEYWORDS: &[&str] = &[
    "skip", "tick", "if", "else", "while", "true", "false", "inf", "and", "or", "not", "min", "max",
];

/// Recursive-descent parser over a token stream. Shared with the
/// expectation parser.
pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, PgclParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> PgclParseError {
        let t = self.peek();
        PgclParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    pub(crate) fn describe(&self) -> String {
        match &self.peek().kind {
            TokenKind::Ident(s) => format!("`{}`", s),
            TokenKind::Num(q) => format!("`{}`", q),
            TokenKind::Sym(s) => format!("`{}`", s),
            TokenKind::Eof => "end of input".to_string(),
        }
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Sym(t) if *t == s)
    }

    pub(crate) fn is_kw(&self, k: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(t) if t == k)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), PgclParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`, found {}", s, self.describe())))
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), PgclParseError> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe())))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, PgclParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(format!("expected a variable, found {}", self.describe()))),
        }
    }

    // ---- statements ----

    pub(crate) fn seq(&mut self) -> Result<Prog, PgclParseError> {
        let mut parts = vec![self.stmt()?];
        while self.eat_sym(";") {
            if self.is_sym("}") || self.peek().kind == TokenKind::Eof {
                break;
            }
            parts.push(self.stmt()?);
        }
        let mut acc = parts.pop().expect("at least one statement");
        while let Some(p) = parts.pop() {
            acc = Stmt::seq(p, acc);
        }
        Ok(acc)
    }

    fn block(&mut self) -> Result<Prog, PgclParseError> {
        self.expect_sym("{")?;
        let p = self.seq()?;
        self.expect_sym("}")?;
        Ok(p)
    }

    fn stmt(&mut self) -> Result<Prog, PgclParseError> {
        if self.eat_kw("skip") {
            return Ok(Stmt::skip());
        }
        if self.eat_kw("tick") {
            self.expect_sym("(")?;
            let r = if self.eat_kw("inf") {
                ExtValue::infinity()
            } else {
                match &self.peek().kind {
                    TokenKind::Num(q) => {
                        let v = ExtValue::finite(q.clone()).expect("literals are nonnegative");
                        self.bump();
                        v
                    }
                    _ => return Err(self.error(format!("expected a reward, found {}", self.describe()))),
                }
            };
            self.expect_sym(")")?;
            return Ok(Stmt::tick(r));
        }
        if self.eat_kw("if") {
            self.expect_sym("(")?;
            let g = self.bexpr()?;
            self.expect_sym(")")?;
            let a = self.block()?;
            let b = if self.eat_kw("else") { self.block()? } else { Stmt::skip() };
            return Ok(Stmt::ite(g, a, b));
        }
        if self.eat_kw("while") {
            self.expect_sym("(")?;
            let g = self.bexpr()?;
            self.expect_sym(")")?;
            let body = self.block()?;
            return Ok(Stmt::while_loop(g, body));
        }
        if self.is_sym("{") {
            let a = self.block()?;
            if !self.is_sym("[") {
                return Ok(a);
            }
            self.bump();
            if self.eat_sym("]") {
                let b = self.block()?;
                return Ok(Stmt::nondet(a, b));
            }
            let p = match &self.peek().kind {
                TokenKind::Num(q) => q.clone(),
                _ => return Err(self.error(format!("expected a probability, found {}", self.describe()))),
            };
            if p.is_negative() || p > BigRational::one() {
                return Err(self.error(format!("probability {} outside [0, 1]", p)));
            }
            self.bump();
            self.expect_sym("]")?;
            let b = self.block()?;
            return Ok(Stmt::prob(a, p, b));
        }
        if let TokenKind::Ident(_) = &self.peek().kind {
            let x = self.ident()?;
            self.expect_sym(":=")?;
            let e = self.aexpr()?;
            return Ok(Stmt::assign(&x, e));
        }
        Err(self.error(format!("expected a statement, found {}", self.describe())))
    }

    // ---- arithmetic ----

    pub(crate) fn aexpr(&mut self) -> Result<AExpr, PgclParseError> {
        let mut acc = self.aterm()?;
        loop {
            if self.eat_sym("+") {
                acc = AExpr::Add(Box::new(acc), Box::new(self.aterm()?));
            } else if self.eat_sym("-") {
                acc = AExpr::Monus(Box::new(acc), Box::new(self.aterm()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn aterm(&mut self) -> Result<AExpr, PgclParseError> {
        let mut acc = self.aatom()?;
        while self.eat_sym("*") {
            acc = AExpr::Mul(Box::new(acc), Box::new(self.aatom()?));
        }
        Ok(acc)
    }

    fn aatom(&mut self) -> Result<AExpr, PgclParseError> {
        match &self.peek().kind {
            TokenKind::Num(q) => {
                let q = q.clone();
                self.bump();
                Ok(AExpr::Lit(q))
            }
            TokenKind::Sym("(") => {
                self.bump();
                let e = self.aexpr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            TokenKind::Ident(_) => Ok(AExpr::Var(Arc::from(self.ident()?.as_str()))),
            _ => Err(self.error(format!("expected an expression, found {}", self.describe()))),
        }
    }

    // ---- guards ----

    pub(crate) fn bexpr(&mut self) -> Result<BExpr, PgclParseError> {
        let mut acc = self.band()?;
        while self.eat_kw("or") || self.eat_sym("||") {
            acc = BExpr::Or(Box::new(acc), Box::new(self.band()?));
        }
        Ok(acc)
    }

    fn band(&mut self) -> Result<BExpr, PgclParseError> {
        let mut acc = self.bnot()?;
        while self.eat_kw("and") || self.eat_sym("&&") {
            acc = BExpr::And(Box::new(acc), Box::new(self.bnot()?));
        }
        Ok(acc)
    }

    fn bnot(&mut self) -> Result<BExpr, PgclParseError> {
        if self.eat_kw("not") || self.eat_sym("!") {
            return Ok(BExpr::Not(Box::new(self.bnot()?)));
        }
        self.batom()
    }

    fn batom(&mut self) -> Result<BExpr, PgclParseError> {
        if self.eat_kw("true") {
            return Ok(BExpr::True);
        }
        if self.eat_kw("false") {
            return Ok(BExpr::False);
        }
        if self.is_sym("(") {
            // either a parenthesized guard or the left operand of a comparison
            let save = self.position();
            self.bump();
            if let Ok(b) = self.bexpr() {
                if self.eat_sym(")") && self.cmp_op().is_none() && !self.is_arith_op() {
                    return Ok(b);
                }
            }
            self.reset(save);
        }
        let lhs = self.aexpr()?;
        let op = self
            .cmp_op()
            .ok_or_else(|| self.error(format!("expected a comparison, found {}", self.describe())))?;
        self.bump();
        let rhs = self.aexpr()?;
        Ok(BExpr::Cmp(op, lhs, rhs))
    }

    fn is_arith_op(&self) -> bool {
        self.is_sym("+") || self.is_sym("-") || self.is_sym("*")
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match &self.peek().kind {
            TokenKind::Sym("=") | TokenKind::Sym("==") => Some(CmpOp::Eq),
            TokenKind::Sym("!=") => Some(CmpOp::Ne),
            TokenKind::Sym("<") => Some(CmpOp::Lt),
            TokenKind::Sym("<=") => Some(CmpOp::Le),
            TokenKind::Sym(">") => Some(CmpOp::Gt),
            TokenKind::Sym(">=") => Some(CmpOp::Ge),
            _ => None,
        }
    }
}

pub fn parse_program(src: &str) -> Result<Prog, PgclParseError> {
    let mut p = Parser::new(src)?;
    let prog = p.seq()?;
    p.expect_eof()?;
    Ok(prog)
}

pub fn parse_aexpr(src: &str) -> Result<AExpr, PgclParseError> {
    let mut p = Parser::new(src)?;
    let e = p.aexpr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_bexpr(src: &str) -> Result<BExpr, PgclParseError> {
    let mut p = Parser::new(src)?;
    let e = p.bexpr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses `x=3/2,y=0`. The empty string and `{}` denote the all-zero state.
pub fn parse_state(src: &str) -> Result<ProgramState, PgclParseError> {
    let mut state = ProgramState::new();
    let trimmed = src.trim();
    if trimmed.is_empty() || trimmed == "{}" {
        return Ok(state);
    }
    let mut col = 1;
    for part in src.split(',') {
        let err = |message: String| PgclParseError { line: 1, col, message };
        let (x, v) = part
            .split_once('=')
            .ok_or_else(|| err(format!("expected `var=value`, found `{}`", part.trim())))?;
        let x = x.trim();
        let valid = x.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !KEYWORDS.contains(&x);
        if !valid {
            return Err(err(format!("invalid variable `{}`", x)));
        }
        let q = parse_rational(v.trim()).ok_or_else(|| err(format!("invalid value `{}`", v.trim())))?;
        if q.is_negative() {
            return Err(err(format!("negative value for `{}`", x)));
        }
        state.set(x, q);
        col += part.chars().count() + 1;
    }
    Ok(state)
}
