//! Weakest preexpectations of pGCL programs and their operational
//! counterpart.
//!
//! [`wp`] follows the syntax-directed rules, approximating each loop by a
//! finite Kleene iterate of its characteristic function. [`op_wp`] computes
//! Kleene iterates of the Bellman operator on the operational MDP. Both are
//! exact lower bounds of the same quantity.

use num_rational::BigRational;
use num_traits::One;

use crate::extreal::ExtValue;
use crate::fixpoint::{kleene_iterate, BellmanMode, FixpointError, KleeneOptions, KleeneRun};
use crate::opsem::{torew, Configuration, OperationalMdp};
use crate::pgcl::{BExpr, ProgramState, Prog, Stmt};

mod check;
mod expectation;
pub mod gen;

pub use check::{
    decomposition_checks, soundness_check, BudgetSchedule, DecompositionReport, DecompositionRow, SoundnessReport,
    SoundnessRow, Verdict,
};
pub use expectation::{parse_expectation, Evaluator, Expectation};

/// How nondeterministic choice is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WpMode {
    /// Minimize: `dwp`.
    Demonic,
    /// Maximize: `awp`.
    Angelic,
}

impl WpMode {
    pub fn bellman(self) -> BellmanMode {
        match self {
            WpMode::Demonic => BellmanMode::Min,
            WpMode::Angelic => BellmanMode::Max,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WpMode::Demonic => "demonic",
            WpMode::Angelic => "angelic",
        }
    }
}

fn prob_const(p: &BigRational) -> Expectation {
    Expectation::constant(ExtValue::finite(p.clone()).expect("probabilities are nonnegative"))
}

/// The weakest preexpectation of `c` with respect to `x`.
///
/// Every loop is replaced by the `budget`-th iterate of its characteristic
/// function starting from 0; nested loops get the same budget. The result is
/// a pointwise lower bound of the exact transformer and grows with `budget`.
pub fn wp(c: &Stmt, x: &Expectation, mode: WpMode, budget: usize) -> Expectation {
    match c {
        Stmt::Skip => x.clone(),
        Stmt::Assign(v, e) => x.subst(v, e),
        Stmt::Tick(r) => Expectation::constant(r.clone()).add(x),
        Stmt::Seq(c1, c2) => wp(c1, &wp(c2, x, mode, budget), mode, budget),
        Stmt::Nondet(c1, c2) => {
            let (a, b) = (wp(c1, x, mode, budget), wp(c2, x, mode, budget));
            match mode {
                WpMode::Demonic => a.min(&b),
                WpMode::Angelic => a.max(&b),
            }
        }
        Stmt::Prob(c1, p, c2) => {
            let a = prob_const(p).mul(&wp(c1, x, mode, budget));
            let b = prob_const(&(BigRational::one() - p)).mul(&wp(c2, x, mode, budget));
            a.add(&b)
        }
        Stmt::Ite(g, c1, c2) => guarded(g, &wp(c1, x, mode, budget), &wp(c2, x, mode, budget)),
        Stmt::While(g, body) => {
            let mut y = Expectation::zero();
            for k in 1..=budget {
                y = Expectation::approx(k, psi(g, body, x, mode, &y, budget));
            }
            y
        }
    }
}

/// `[g]·a + [¬g]·b`
fn guarded(g: &BExpr, a: &Expectation, b: &Expectation) -> Expectation {
    let yes = Expectation::iverson(g.clone()).mul(a);
    let no = Expectation::iverson(BExpr::Not(Box::new(g.clone()))).mul(b);
    yes.add(&no)
}

fn psi(g: &BExpr, body: &Stmt, x: &Expectation, mode: WpMode, y: &Expectation, budget: usize) -> Expectation {
    guarded(g, &wp(body, y, mode, budget), x)
}

/// One application of the characteristic function of `lp` (which must be a
/// `while` loop) with postexpectation `x`: `[B]·wp(body, y) + [¬B]·x`.
///
/// # Panics
/// If `lp` is not a loop.
pub fn char_fn_apply(lp: &Stmt, x: &Expectation, mode: WpMode, y: &Expectation, budget: usize) -> Expectation {
    match lp {
        Stmt::While(g, body) => psi(g, body, x, mode, y, budget),
        other => panic!("char_fn_apply needs a loop, got `{}`", other),
    }
}

/// `wp(c, x)(s)` at budgets `0..=max_budget`.
pub fn wp_sweep(c: &Stmt, x: &Expectation, s: &ProgramState, mode: WpMode, max_budget: usize) -> Vec<ExtValue> {
    (0..=max_budget).map(|b| wp(c, x, mode, b).eval(s)).collect()
}

/// Kleene iterates `0..=steps` of the Bellman operator on the operational
/// MDP with reward `torew(x)`, at the configuration `(c, s)`.
pub fn op_wp_run(
    c: &Prog,
    x: &Expectation,
    s: &ProgramState,
    mode: WpMode,
    steps: usize,
    opts: KleeneOptions,
) -> Result<KleeneRun<Configuration>, FixpointError> {
    let mdp = OperationalMdp::new();
    let rew = torew(|t: &ProgramState| x.eval(t));
    let start = [Configuration::Running(c.clone(), s.clone())];
    kleene_iterate(&mdp, &rew, mode.bellman(), &start, steps, opts)
}

/// The `steps`-th iterate: an exact lower bound on the operational
/// expected reward, nondecreasing in `steps`.
pub fn op_wp(
    c: &Prog,
    x: &Expectation,
    s: &ProgramState,
    mode: WpMode,
    steps: usize,
) -> Result<ExtValue, FixpointError> {
    let run = op_wp_run(c, x, s, mode, steps, KleeneOptions::default())?;
    Ok(run.last().get(&Configuration::Running(c.clone(), s.clone())))
}

/// All iterates `0..=steps` of [`op_wp`] at `(c, s)`.
pub fn op_wp_sweep(
    c: &Prog,
    x: &Expectation,
    s: &ProgramState,
    mode: WpMode,
    steps: usize,
) -> Result<Vec<ExtValue>, FixpointError> {
    let run = op_wp_run(c, x, s, mode, steps, KleeneOptions::default())?;
    let key = Configuration::Running(c.clone(), s.clone());
    Ok(run.iterates.iter().map(|v| v.get(&key)).collect())
}
