//! Concrete syntax printing. Output re-parses to a structurally equal tree.

use std::fmt;

use super::{AExpr, BExpr, Stmt};

fn aprec(e: &AExpr) -> u8 {
    match e {
        AExpr::Add(..) | AExpr::Monus(..) => 1,
        AExpr::Mul(..) => 2,
        AExpr::Lit(_) | AExpr::Var(_) => 3,
    }
}

fn write_aop(f: &mut fmt::Formatter<'_>, a: &AExpr, op: &str, b: &AExpr, prec: u8) -> fmt::Result {
    if aprec(a) < prec {
        write!(f, "({})", a)?;
    } else {
        write!(f, "{}", a)?;
    }
    write!(f, " {} ", op)?;
    if aprec(b) <= prec {
        write!(f, "({})", b)
    } else {
        write!(f, "{}", b)
    }
}

impl fmt::Display for AExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AExpr::Lit(q) => write!(f, "{}", q),
            AExpr::Var(x) => f.write_str(x),
            AExpr::Add(a, b) => write_aop(f, a, "+", b, 1),
            AExpr::Monus(a, b) => write_aop(f, a, "-", b, 1),
            AExpr::Mul(a, b) => write_aop(f, a, "*", b, 2),
        }
    }
}

fn bprec(e: &BExpr) -> u8 {
    match e {
        BExpr::Or(..) => 1,
        BExpr::And(..) => 2,
        BExpr::Not(_) => 3,
        BExpr::True | BExpr::False | BExpr::Cmp(..) => 4,
    }
}

fn write_bop(f: &mut fmt::Formatter<'_>, a: &BExpr, op: &str, b: &BExpr, prec: u8) -> fmt::Result {
    if bprec(a) < prec {
        write!(f, "({})", a)?;
    } else {
        write!(f, "{}", a)?;
    }
    write!(f, " {} ", op)?;
    if bprec(b) <= prec {
        write!(f, "({})", b)
    } else {
        write!(f, "{}", b)
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BExpr::True => f.write_str("true"),
            BExpr::False => f.write_str("false"),
            BExpr::Cmp(op, a, b) => write!(f, "{} {} {}", a, op.symbol(), b),
            BExpr::Not(b) if bprec(b) < 3 => write!(f, "not ({})", b),
            BExpr::Not(b) => write!(f, "not {}", b),
            BExpr::And(a, b) => write_bop(f, a, "and", b, 2),
            BExpr::Or(a, b) => write_bop(f, a, "or", b, 1),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Skip => f.write_str("skip"),
            Stmt::Assign(x, e) => write!(f, "{} := {}", x, e),
            Stmt::Tick(r) => write!(f, "tick({})", r),
            // `;` is right-associative, so a left-nested sequence needs braces
            Stmt::Seq(a, b) if matches!(**a, Stmt::Seq(..)) => write!(f, "{{ {} }}; {}", a, b),
            Stmt::Seq(a, b) => write!(f, "{}; {}", a, b),
            Stmt::Prob(a, p, b) => write!(f, "{{ {} }} [{}] {{ {} }}", a, p, b),
            Stmt::Nondet(a, b) => write!(f, "{{ {} }} [] {{ {} }}", a, b),
            Stmt::Ite(g, a, b) => write!(f, "if ({}) {{ {} }} else {{ {} }}", g, a, b),
            Stmt::While(g, body) => write!(f, "while ({}) {{ {} }}", g, body),
        }
    }
}
