//! Random programs, expectations and states for randomized testing.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::extreal::ExtValue;
use crate::pgcl::{AExpr, BExpr, CmpOp, ProgramState, Prog, Stmt};
use crate::wp::Expectation;

pub const VARS: &[&str] = &["x", "y", "z"];

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let (n, d) = *[(0, 1), (1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (1, 3)].choose(rng).expect("nonempty");
    BigRational::new(n.into(), d.into())
}

fn probability<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let (n, d) = *[(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1)].choose(rng).expect("nonempty");
    BigRational::new(n.into(), d.into())
}

fn var<R: Rng + ?Sized>(rng: &mut R) -> &'static str {
    VARS.choose(rng).expect("nonempty")
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> ProgramState {
    let mut s = ProgramState::new();
    for x in VARS {
        s.set(x, small_rational(rng));
    }
    s
}

pub fn random_aexpr<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> AExpr {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return if rng.gen_bool(0.5) {
            AExpr::var(var(rng))
        } else {
            AExpr::Lit(small_rational(rng))
        };
    }
    let a = Box::new(random_aexpr(rng, depth - 1));
    let b = Box::new(random_aexpr(rng, depth - 1));
    match rng.gen_range(0..3) {
        0 => AExpr::Add(a, b),
        1 => AExpr::Monus(a, b),
        _ => AExpr::Mul(a, b),
    }
}

pub fn random_bexpr<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> BExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        let op = *[CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]
            .choose(rng)
            .expect("nonempty");
        return BExpr::Cmp(op, random_aexpr(rng, 1), random_aexpr(rng, 1));
    }
    match rng.gen_range(0..4) {
        0 => BExpr::Not(Box::new(random_bexpr(rng, depth - 1))),
        1 => BExpr::And(Box::new(random_bexpr(rng, depth - 1)), Box::new(random_bexpr(rng, depth - 1))),
        2 => BExpr::Or(Box::new(random_bexpr(rng, depth - 1)), Box::new(random_bexpr(rng, depth - 1))),
        _ => {
            if rng.gen_bool(0.5) {
                BExpr::True
            } else {
                BExpr::False
            }
        }
    }
}

fn tick_reward<R: Rng + ?Sized>(rng: &mut R, allow_inf: bool) -> ExtValue {
    if allow_inf && rng.gen_bool(0.05) {
        ExtValue::infinity()
    } else {
        ExtValue::finite(small_rational(rng)).expect("nonnegative")
    }
}

/// A random loop-free program of nesting depth at most `depth`.
pub fn random_loop_free<R: Rng + ?Sized>(rng: &mut R, depth: usize, allow_inf: bool) -> Prog {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Stmt::skip(),
            1 => Stmt::assign(var(rng), random_aexpr(rng, 2)),
            _ => Stmt::tick(tick_reward(rng, allow_inf)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Stmt::seq(random_loop_free(rng, d, allow_inf), random_loop_free(rng, d, allow_inf)),
        1 => Stmt::prob(
            random_loop_free(rng, d, allow_inf),
            probability(rng),
            random_loop_free(rng, d, allow_inf),
        ),
        2 => Stmt::nondet(random_loop_free(rng, d, allow_inf), random_loop_free(rng, d, allow_inf)),
        _ => Stmt::ite(
            random_bexpr(rng, 1),
            random_loop_free(rng, d, allow_inf),
            random_loop_free(rng, d, allow_inf),
        ),
    }
}

/// A random program containing a loop: either a counter loop or a loop
/// with a random guard whose body flips a coin on incrementing a variable.
pub fn random_loop<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Prog {
    let body = random_loop_free(rng, depth, false);
    let v = var(rng);
    let inc = Stmt::assign(v, AExpr::Add(Box::new(AExpr::var(v)), Box::new(AExpr::lit(1))));
    if rng.gen_bool(0.5) {
        let guard = BExpr::Cmp(CmpOp::Lt, AExpr::var(v), AExpr::lit(rng.gen_range(1..4)));
        Stmt::while_loop(guard, Stmt::seq(body, inc))
    } else {
        let half = BigRational::new(1.into(), 2.into());
        Stmt::while_loop(random_bexpr(rng, 1), Stmt::prob(body, half, inc))
    }
}

/// A random expectation over [`VARS`].
pub fn random_expectation<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Expectation {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Expectation::constant(tick_reward(rng, true)),
            1 => Expectation::iverson(random_bexpr(rng, 1)),
            _ => Expectation::arith(random_aexpr(rng, 1)),
        };
    }
    let a = random_expectation(rng, depth - 1);
    let b = random_expectation(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => a.add(&b),
        1 => a.mul(&b),
        2 => a.monus(&b),
        3 => a.min(&b),
        4 => a.max(&b),
        _ => a.subst(var(rng), &random_aexpr(rng, 1)),
    }
}
