use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::extreal::ExtValue;
use crate::pgcl::{AExpr, BExpr, Parser, PgclParseError, ProgramState, TokenKind, Var};

/// An expectation: a total map from program states to `[0, ∞]`, built from
/// combinators and evaluated pointwise.
///
/// Nodes are shared, so the wp of a loop is a DAG rather than a tree.
/// Evaluation memoizes shared nodes per state, which keeps loop
/// approximants polynomial.
#[derive(Clone)]
pub struct Expectation(Arc<Node>);

enum Node {
    Const(ExtValue),
    /// An arithmetic expression over program variables.
    Arith(AExpr),
    Iverson(BExpr),
    Add(Expectation, Expectation),
    Mul(Expectation, Expectation),
    Monus(Expectation, Expectation),
    Min(Expectation, Expectation),
    Max(Expectation, Expectation),
    /// `X[x/e]`
    Subst(Expectation, Var, AExpr),
    /// The `k`-th loop approximant; evaluates to `inner`.
    Approx(usize, Expectation),
}

impl Expectation {
    fn node(n: Node) -> Self {
        Expectation(Arc::new(n))
    }

    pub fn constant(v: ExtValue) -> Self {
        Self::node(Node::Const(v))
    }

    pub fn zero() -> Self {
        Self::constant(ExtValue::zero())
    }

    pub fn var(x: &str) -> Self {
        Self::node(Node::Arith(AExpr::var(x)))
    }

    pub fn arith(e: AExpr) -> Self {
        Self::node(Node::Arith(e))
    }

    /// `[b]`: 1 where `b` holds, 0 elsewhere.
    pub fn iverson(b: BExpr) -> Self {
        Self::node(Node::Iverson(b))
    }

    pub fn add(&self, other: &Expectation) -> Self {
        Self::node(Node::Add(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Expectation) -> Self {
        Self::node(Node::Mul(self.clone(), other.clone()))
    }

    pub fn monus(&self, other: &Expectation) -> Self {
        Self::node(Node::Monus(self.clone(), other.clone()))
    }

    pub fn min(&self, other: &Expectation) -> Self {
        Self::node(Node::Min(self.clone(), other.clone()))
    }

    pub fn max(&self, other: &Expectation) -> Self {
        Self::node(Node::Max(self.clone(), other.clone()))
    }

    /// `self[x/e]`, i.e. `σ ↦ self(σ[x ↦ e(σ)])`.
    pub fn subst(&self, x: &str, e: &AExpr) -> Self {
        Self::node(Node::Subst(self.clone(), Arc::from(x), e.clone()))
    }

    pub fn approx(k: usize, inner: Expectation) -> Self {
        Self::node(Node::Approx(k, inner))
    }

    pub fn eval(&self, s: &ProgramState) -> ExtValue {
        Evaluator::new(self).eval(s)
    }

    /// Number of distinct nodes in the DAG.
    pub fn size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(Arc::as_ptr(&e.0) as usize) {
                continue;
            }
            match &*e.0 {
                Node::Const(_) | Node::Arith(_) | Node::Iverson(_) => {}
                Node::Add(a, b) | Node::Mul(a, b) | Node::Monus(a, b) | Node::Min(a, b) | Node::Max(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Subst(a, _, _) | Node::Approx(_, a) => stack.push(a.clone()),
            }
        }
        seen.len()
    }
}

/// Evaluates one expectation at many states, sharing the memo table.
pub struct Evaluator<'a> {
    root: &'a Expectation,
    memo: HashMap<(usize, ProgramState), ExtValue>,
}

impl<'a> Evaluator<'a> {
    pub fn new(root: &'a Expectation) -> Self {
        Evaluator {
            root,
            memo: HashMap::new(),
        }
    }

    pub fn eval(&mut self, s: &ProgramState) -> ExtValue {
        let root = self.root;
        self.go(root, s)
    }

    fn go(&mut self, e: &Expectation, s: &ProgramState) -> ExtValue {
        // only shared nodes can be reached twice
        let shared = Arc::strong_count(&e.0) > 1;
        let key = (Arc::as_ptr(&e.0) as usize, s.clone());
        if shared {
            if let Some(v) = self.memo.get(&key) {
                return v.clone();
            }
        }
        let v = match &*e.0 {
            Node::Const(c) => c.clone(),
            Node::Arith(a) => ExtValue::finite(a.eval(s)).expect("expressions are nonnegative"),
            Node::Iverson(b) => {
                if b.eval(s) {
                    ExtValue::one()
                } else {
                    ExtValue::zero()
                }
            }
            Node::Add(a, b) => self.go(a, s) + self.go(b, s),
            Node::Mul(a, b) => {
                let x = self.go(a, s);
                // 0 * anything is 0, so skip the other side
                if x.is_zero() {
                    x
                } else {
                    x * self.go(b, s)
                }
            }
            Node::Monus(a, b) => self.go(a, s).monus(&self.go(b, s)),
            Node::Min(a, b) => self.go(a, s).min_of(self.go(b, s)),
            Node::Max(a, b) => self.go(a, s).max_of(self.go(b, s)),
            Node::Subst(a, x, ex) => {
                let t = s.updated(x, ex.eval(s));
                self.go(a, &t)
            }
            Node::Approx(_, a) => self.go(a, s),
        };
        if shared {
            self.memo.insert(key, v.clone());
        }
        v
    }
}

fn prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Monus(..) => 1,
        Node::Mul(..) => 2,
        Node::Arith(AExpr::Add(..)) | Node::Arith(AExpr::Monus(..)) => 1,
        Node::Arith(AExpr::Mul(..)) => 2,
        _ => 3,
    }
}

fn write_bin(f: &mut fmt::Formatter<'_>, a: &Expectation, op: &str, b: &Expectation, p: u8) -> fmt::Result {
    if prec(&a.0) < p {
        write!(f, "({})", a)?;
    } else {
        write!(f, "{}", a)?;
    }
    write!(f, " {} ", op)?;
    if prec(&b.0) <= p {
        write!(f, "({})", b)
    } else {
        write!(f, "{}", b)
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{}", c),
            Node::Arith(a) => write!(f, "{}", a),
            Node::Iverson(b) => write!(f, "[{}]", b),
            Node::Add(a, b) => write_bin(f, a, "+", b, 1),
            Node::Monus(a, b) => write_bin(f, a, "-", b, 1),
            Node::Mul(a, b) => write_bin(f, a, "*", b, 2),
            Node::Min(a, b) => write!(f, "min({}, {})", a, b),
            Node::Max(a, b) => write!(f, "max({}, {})", a, b),
            Node::Subst(a, x, e) => {
                if prec(&a.0) < 3 {
                    write!(f, "({})[{}/{}]", a, x, e)
                } else {
                    write!(f, "{}[{}/{}]", a, x, e)
                }
            }
            Node::Approx(k, _) => write!(f, "loop^{}", k),
        }
    }
}

impl fmt::Debug for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expectation({})", self)
    }
}

/// Parses a postexpectation: arithmetic over variables and rational
/// literals, extended with `inf`, Iverson brackets `[b]`, `min(e, e)` and
/// `max(e, e)`.
pub fn parse_expectation(src: &str) -> Result<Expectation, PgclParseError> {
    let mut p = Parser::new(src)?;
    let e = sum(&mut p)?;
    p.expect_eof()?;
    Ok(e)
}

fn sum(p: &mut Parser) -> Result<Expectation, PgclParseError> {
    let mut acc = product(p)?;
    loop {
        if p.eat_sym("+") {
            acc = acc.add(&product(p)?);
        } else if p.eat_sym("-") {
            acc = acc.monus(&product(p)?);
        } else {
            return Ok(acc);
        }
    }
}

fn product(p: &mut Parser) -> Result<Expectation, PgclParseError> {
    let mut acc = atom(p)?;
    while p.eat_sym("*") {
        acc = acc.mul(&atom(p)?);
    }
    Ok(acc)
}

fn atom(p: &mut Parser) -> Result<Expectation, PgclParseError> {
    if p.eat_kw("inf") {
        return Ok(Expectation::constant(ExtValue::infinity()));
    }
    for (kw, is_min) in [("min", true), ("max", false)] {
        if p.eat_kw(kw) {
            p.expect_sym("(")?;
            let a = sum(p)?;
            p.expect_sym(",")?;
            let b = sum(p)?;
            p.expect_sym(")")?;
            return Ok(if is_min { a.min(&b) } else { a.max(&b) });
        }
    }
    if p.eat_sym("[") {
        let b = p.bexpr()?;
        p.expect_sym("]")?;
        return Ok(Expectation::iverson(b));
    }
    if p.eat_sym("(") {
        let e = sum(p)?;
        p.expect_sym(")")?;
        return Ok(e);
    }
    match &p.peek().kind {
        TokenKind::Num(q) => {
            let v = ExtValue::finite(q.clone()).expect("literals are nonnegative");
            p.bump();
            Ok(Expectation::constant(v))
        }
        TokenKind::Ident(_) => Ok(Expectation::var(&p.ident()?)),
        _ => Err(p.error(format!("expected an expectation, found {}", p.describe()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgcl::{parse_aexpr, parse_state};

    fn st(s: &str) -> ProgramState {
        parse_state(s).unwrap()
    }

    #[test]
    fn iverson_is_zero_or_one() {
        let e = parse_expectation("[x = 0]").unwrap();
        assert_eq!(e.eval(&st("")), ExtValue::one());
        assert_eq!(e.eval(&st("x=2")), ExtValue::zero());
    }

    #[test]
    fn zero_times_infinity() {
        let e = parse_expectation("[x = 0] * inf").unwrap();
        assert_eq!(e.eval(&st("x=1")), ExtValue::zero());
        assert!(e.eval(&st("")).is_infinite());
    }

    #[test]
    fn arithmetic_and_lattice_ops() {
        let e = parse_expectation("min(y + 2, 3 * x) + max(1/2, z) - 1").unwrap();
        // min(2+2, 3) + max(1/2, 0) - 1 = 3 + 1/2 - 1
        assert_eq!(e.eval(&st("x=1,y=2")), ExtValue::ratio(5, 2));
    }

    #[test]
    fn substitution_law() {
        let x = parse_expectation("y * [x < 2] + x").unwrap();
        let e = parse_aexpr("y + 1").unwrap();
        let sub = x.subst("x", &e);
        for s in ["", "y=1", "x=5,y=3/2"] {
            let s = st(s);
            assert_eq!(sub.eval(&s), x.eval(&s.updated("x", e.eval(&s))));
        }
    }

    #[test]
    fn display_round_trips() {
        for src in ["[x = 0] * (y + 2)", "min(y, inf) - (a - b)", "max(1/2, [not x < 1])"] {
            let e = parse_expectation(src).unwrap();
            let again = parse_expectation(&e.to_string()).unwrap();
            assert_eq!(again.to_string(), e.to_string(), "{}", src);
        }
    }

    #[test]
    fn shared_nodes_are_memoized() {
        // a chain where each level uses the previous one twice
        let mut e = Expectation::var("x");
        for _ in 0..200 {
            e = e.add(&e);
        }
        assert_eq!(e.size(), 201);
        let v = e.eval(&st("x=1"));
        assert_eq!(v.to_string(), num_bigint::BigInt::from(2).pow(200).to_string());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_expectation("min(x)").is_err());
        assert!(parse_expectation("[x]").is_err());
        assert!(parse_expectation("x +").is_err());
    }
}
