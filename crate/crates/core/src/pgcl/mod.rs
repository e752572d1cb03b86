//! Probabilistic guarded commands: syntax, program states and expression
//! evaluation.
//!
//! Concrete syntax:
//!
//! ```text
//! stmt  ::= stmt ; stmt                     (right-associative)
//!         | skip | x := aexpr | tick(q) | tick(inf)
//!         | { stmt }                        (grouping)
//!         | { stmt } [p] { stmt }           (probabilistic choice)
//!         | { stmt } [] { stmt }            (nondeterministic choice)
//!         | if (bexpr) { stmt } [else { stmt }]
//!         | while (bexpr) { stmt }
//! aexpr ::= aexpr + aexpr | aexpr - aexpr | aexpr * aexpr | (aexpr) | q | x
//! bexpr ::= true | false | aexpr op aexpr | not bexpr | bexpr and bexpr
//!         | bexpr or bexpr | (bexpr)        op in = != < <= > >=
//! ```
//!
//! Literals are integers, decimals or `p/q`. `-` is truncated subtraction.
//! `!`, `&&`, `||` and `==` are accepted as alternative spellings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::extreal::ExtValue;

mod lexer;
mod parser;
mod print;

pub use parser::{parse_aexpr, parse_bexpr, parse_program, parse_state, PgclParseError};
pub(crate) use lexer::TokenKind;
pub(crate) use parser::Parser;

pub type Var = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AExpr {
    Lit(BigRational),
    Var(Var),
    Add(Box<AExpr>, Box<AExpr>),
    /// Truncated subtraction.
    Monus(Box<AExpr>, Box<AExpr>),
    Mul(Box<AExpr>, Box<AExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BExpr {
    True,
    False,
    Cmp(CmpOp, AExpr, AExpr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

/// A shared, immutable program.
pub type Prog = Arc<Stmt>;

/// pGCL statements. Equality and hashing are structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(Var, AExpr),
    Tick(ExtValue),
    Seq(Prog, Prog),
    /// `{C1} [p] {C2}`: `C1` with probability `p`.
    Prob(Prog, BigRational, Prog),
    Nondet(Prog, Prog),
    Ite(BExpr, Prog, Prog),
    While(BExpr, Prog),
}

impl Stmt {
    pub fn skip() -> Prog {
        Arc::new(Stmt::Skip)
    }

    pub fn assign(x: &str, e: AExpr) -> Prog {
        Arc::new(Stmt::Assign(Arc::from(x), e))
    }

    pub fn tick(r: ExtValue) -> Prog {
        Arc::new(Stmt::Tick(r))
    }

    pub fn seq(a: Prog, b: Prog) -> Prog {
        Arc::new(Stmt::Seq(a, b))
    }

    /// Panics unless `0 <= p <= 1`.
    pub fn prob(a: Prog, p: BigRational, b: Prog) -> Prog {
        assert!(!p.is_negative() && p <= BigRational::from_integer(1.into()), "probability {} outside [0, 1]", p);
        Arc::new(Stmt::Prob(a, p, b))
    }

    pub fn nondet(a: Prog, b: Prog) -> Prog {
        Arc::new(Stmt::Nondet(a, b))
    }

    pub fn ite(g: BExpr, a: Prog, b: Prog) -> Prog {
        Arc::new(Stmt::Ite(g, a, b))
    }

    pub fn while_loop(g: BExpr, body: Prog) -> Prog {
        Arc::new(Stmt::While(g, body))
    }

    /// Whether the statement contains no `while`.
    pub fn is_loop_free(&self) -> bool {
        match self {
            Stmt::Skip | Stmt::Assign(..) | Stmt::Tick(_) => true,
            Stmt::Seq(a, b) | Stmt::Prob(a, _, b) | Stmt::Nondet(a, b) | Stmt::Ite(_, a, b) => {
                a.is_loop_free() && b.is_loop_free()
            }
            Stmt::While(..) => false,
        }
    }

    /// An upper bound on the number of small steps a loop-free statement
    /// needs to terminate.
    pub fn step_bound(&self) -> Option<usize> {
        match self {
            Stmt::Skip | Stmt::Assign(..) | Stmt::Tick(_) => Some(1),
            Stmt::Seq(a, b) => Some(a.step_bound()? + b.step_bound()?),
            Stmt::Prob(a, _, b) | Stmt::Nondet(a, b) | Stmt::Ite(_, a, b) => {
                Some(1 + a.step_bound()?.max(b.step_bound()?))
            }
            Stmt::While(..) => None,
        }
    }
}

/// A program state: variables map to nonnegative rationals, unlisted
/// variables read as 0. Zero entries are never stored, so equality ignores
/// them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramState {
    vars: BTreeMap<Var, BigRational>,
}

impl ProgramState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> BigRational {
        self.vars.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Panics on negative values.
    pub fn set(&mut self, x: &str, v: BigRational) {
        assert!(!v.is_negative(), "program values are nonnegative, got {}", v);
        if v.is_zero() {
            self.vars.remove(x);
        } else {
            self.vars.insert(Arc::from(x), v);
        }
    }

    /// `self[x -> v]`
    pub fn updated(&self, x: &str, v: BigRational) -> ProgramState {
        let mut s = self.clone();
        s.set(x, v);
        s
    }

    /// Nonzero entries in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &BigRational)> {
        self.vars.iter().map(|(k, v)| (k.as_ref(), v))
    }
}

impl FromIterator<(String, BigRational)> for ProgramState {
    fn from_iter<I: IntoIterator<Item = (String, BigRational)>>(iter: I) -> Self {
        let mut s = ProgramState::new();
        for (x, v) in iter {
            s.set(&x, v);
        }
        s
    }
}

impl fmt::Display for ProgramState {
    /// `x=1,y=3/2`; the empty state prints as `{}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            return f.write_str("{}");
        }
        let mut first = true;
        for (x, v) in &self.vars {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}={}", x, v)?;
        }
        Ok(())
    }
}

impl AExpr {
    pub fn lit(n: i64) -> AExpr {
        AExpr::Lit(BigRational::from_integer(n.into()))
    }

    pub fn var(x: &str) -> AExpr {
        AExpr::Var(Arc::from(x))
    }

    pub fn eval(&self, s: &ProgramState) -> BigRational {
        match self {
            AExpr::Lit(q) => q.clone(),
            AExpr::Var(x) => s.get(x),
            AExpr::Add(a, b) => a.eval(s) + b.eval(s),
            AExpr::Monus(a, b) => {
                let d = a.eval(s) - b.eval(s);
                if d.is_negative() {
                    BigRational::zero()
                } else {
                    d
                }
            }
            AExpr::Mul(a, b) => a.eval(s) * b.eval(s),
        }
    }
}

impl BExpr {
    pub fn eval(&self, s: &ProgramState) -> bool {
        match self {
            BExpr::True => true,
            BExpr::False => false,
            BExpr::Cmp(op, a, b) => {
                let (x, y) = (a.eval(s), b.eval(s));
                match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                }
            }
            BExpr::Not(b) => !b.eval(s),
            BExpr::And(a, b) => a.eval(s) && b.eval(s),
            BExpr::Or(a, b) => a.eval(s) || b.eval(s),
        }
    }
}

/// The example loop with `L`-reward `r`:
///
/// ```text
/// while (x = 0) { { {tick(r)} [] { {skip} [1/2] {x := 1} } }; y := y + 1 }
/// ```
pub fn example_program(r: ExtValue) -> Prog {
    let half = BigRational::new(1.into(), 2.into());
    let choice = Stmt::nondet(Stmt::tick(r), Stmt::prob(Stmt::skip(), half, Stmt::assign("x", AExpr::lit(1))));
    let body = Stmt::seq(
        choice,
        Stmt::assign("y", AExpr::Add(Box::new(AExpr::var("y")), Box::new(AExpr::lit(1)))),
    );
    Stmt::while_loop(BExpr::Cmp(CmpOp::Eq, AExpr::var("x"), AExpr::lit(0)), body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unlisted_variables_read_zero() {
        let s = ProgramState::new();
        assert_eq!(AExpr::var("x").eval(&s), BigRational::zero());
        let t = s.updated("x", BigRational::from_integer(3.into()));
        assert_eq!(t.get("y"), BigRational::zero());
        assert_eq!(t.get("x"), BigRational::from_integer(3.into()));
    }

    #[test]
    fn zero_entries_do_not_affect_equality() {
        let a = ProgramState::new().updated("x", BigRational::zero());
        assert_eq!(a, ProgramState::new());
        let b = ProgramState::new()
            .updated("x", BigRational::from_integer(1.into()))
            .updated("x", BigRational::zero());
        assert_eq!(b, ProgramState::new());
    }

    #[test]
    fn monus_clamps() {
        let e = AExpr::Monus(Box::new(AExpr::lit(1)), Box::new(AExpr::lit(2)));
        assert_eq!(e.eval(&ProgramState::new()), BigRational::zero());
    }

    #[test]
    fn increment() {
        let e = AExpr::Add(Box::new(AExpr::var("y")), Box::new(AExpr::lit(1)));
        assert_eq!(e.eval(&ProgramState::new()), BigRational::from_integer(1.into()));
    }

    #[test]
    fn step_bounds() {
        let p = parse_program("x := 1; { skip } [1/2] { tick(1); skip }").unwrap();
        assert_eq!(p.step_bound(), Some(4));
        assert!(p.is_loop_free());
        assert_eq!(example_program(ExtValue::one()).step_bound(), None);
    }
}
