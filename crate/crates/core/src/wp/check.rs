//! Cross-checks between the wp transformers and the operational MDP.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::extreal::ExtValue;
use crate::fixpoint::{ConvergenceStatus, FixpointError, KleeneOptions};
use crate::opsem::{rew_pgcl, step, Configuration};
use crate::pgcl::{ProgramState, Prog, Stmt};
use crate::wp::{op_wp, op_wp_run, wp, Expectation, WpMode};

/// Budgets at which both sequences are sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetSchedule {
    pub wp_budgets: Vec<usize>,
    pub op_steps: Vec<usize>,
}

impl BudgetSchedule {
    /// Every budget `0..=wp_max` and every step count `0..=op_max`.
    pub fn upto(wp_max: usize, op_max: usize) -> Self {
        BudgetSchedule {
            wp_budgets: (0..=wp_max).collect(),
            op_steps: (0..=op_max).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Both sequences stabilized on this value.
    Agree(ExtValue),
    /// Both stabilized, on different values. This contradicts soundness.
    Disagree { wp: ExtValue, op: ExtValue },
    /// At least one sequence is still a lower bound; last values shown.
    Gap { wp: ExtValue, op: ExtValue },
}

#[derive(Debug, Clone)]
pub struct SoundnessRow {
    pub state: ProgramState,
    pub wp: Vec<(usize, ExtValue)>,
    pub op: Vec<(usize, ExtValue)>,
    pub wp_monotone: bool,
    pub op_monotone: bool,
    /// The last two wp values coincide.
    pub wp_stable: bool,
    /// The operational iteration reached an exact fixed point.
    pub op_stable: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub mode: WpMode,
    pub rows: Vec<SoundnessRow>,
}

impl SoundnessReport {
    /// No monotonicity violation and no disagreement.
    pub fn ok(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.wp_monotone && r.op_monotone && !matches!(r.verdict, Verdict::Disagree { .. }))
    }
}

fn monotone(seq: &[(usize, ExtValue)]) -> bool {
    seq.windows(2).all(|w| w[0].1 <= w[1].1)
}

/// Sweeps wp over the loop budgets and the operational iteration over the
/// step counts of `schedule`, for every state in `states`.
pub fn soundness_check(
    c: &Prog,
    x: &Expectation,
    states: &[ProgramState],
    mode: WpMode,
    schedule: &BudgetSchedule,
) -> Result<SoundnessReport, FixpointError> {
    let max_steps = schedule.op_steps.iter().copied().max().unwrap_or(0);
    let wps: Vec<(usize, Expectation)> = schedule.wp_budgets.iter().map(|&b| (b, wp(c, x, mode, b))).collect();
    let mut rows = Vec::new();
    for s in states {
        let wp_seq: Vec<(usize, ExtValue)> = wps.iter().map(|(b, e)| (*b, e.eval(s))).collect();
        let run = op_wp_run(c, x, s, mode, max_steps, KleeneOptions::default())?;
        let key = Configuration::Running(c.clone(), s.clone());
        let op_seq: Vec<(usize, ExtValue)> = schedule.op_steps.iter().map(|&k| (k, run.iterates[k].get(&key))).collect();
        let wp_stable = wp_seq.len() >= 2 && wp_seq[wp_seq.len() - 1].1 == wp_seq[wp_seq.len() - 2].1;
        let op_stable = matches!(run.status, ConvergenceStatus::ConvergedExact { .. });
        let wp_last = wp_seq.last().map(|p| p.1.clone()).unwrap_or_else(ExtValue::zero);
        let op_last = op_seq.last().map(|p| p.1.clone()).unwrap_or_else(ExtValue::zero);
        let verdict = match (wp_stable && op_stable, wp_last == op_last) {
            (true, true) => Verdict::Agree(wp_last),
            (true, false) => Verdict::Disagree { wp: wp_last, op: op_last },
            (false, _) => Verdict::Gap { wp: wp_last, op: op_last },
        };
        rows.push(SoundnessRow {
            state: s.clone(),
            wp_monotone: monotone(&wp_seq),
            op_monotone: monotone(&op_seq),
            wp: wp_seq,
            op: op_seq,
            wp_stable,
            op_stable,
            verdict,
        });
    }
    Ok(SoundnessReport { mode, rows })
}

/// `wp(c, x)(s)` recomputed from one execution step: the configuration
/// reward plus the best expected wp of the successors, where a final
/// configuration `(term, t)` contributes `x(t)`.
fn one_step_unrolled(c: &Prog, x: &Expectation, s: &ProgramState, mode: WpMode, budget: usize) -> ExtValue {
    let conf = Configuration::Running(c.clone(), s.clone());
    let mut best: Option<ExtValue> = None;
    for (_, dist) in step(&conf) {
        let v = dist.expect(|succ| match succ {
            Configuration::Running(cp, sp) => wp(cp, x, mode, budget).eval(sp),
            Configuration::Terminated(t) => x.eval(t),
            Configuration::Sink => ExtValue::zero(),
        });
        best = Some(match (best, mode) {
            (None, _) => v,
            (Some(b), WpMode::Demonic) => b.min_of(v),
            (Some(b), WpMode::Angelic) => b.max_of(v),
        });
    }
    rew_pgcl(&conf) + best.expect("every configuration has an action")
}

#[derive(Debug, Clone)]
pub struct DecompositionRow {
    pub state: ProgramState,
    /// `op_n(C1, op_n(C2, X))`
    pub nested: ExtValue,
    /// `op_2n(C1; C2, X)`
    pub combined: ExtValue,
    pub sequential_holds: bool,
    /// `(program, wp, one-step unrolling)` for each loop-free program among
    /// `C1`, `C2`, `C1; C2`.
    pub unrolling: Vec<(String, ExtValue, ExtValue)>,
}

impl DecompositionRow {
    pub fn unrolling_holds(&self) -> bool {
        self.unrolling.iter().all(|(_, a, b)| a == b)
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub mode: WpMode,
    pub steps: usize,
    pub rows: Vec<DecompositionRow>,
}

impl DecompositionReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.sequential_holds && r.unrolling_holds())
    }
}

/// Checks, for every sampled state,
///
/// - the sequential decomposition `op_n(C1, op_n(C2, X)) <= op_2n(C1; C2, X)`,
///   where the inner operational value is evaluated as a postexpectation of
///   `C1`;
/// - the one-step unrolling `wp(C, X) = rew + opt Σ P · wp(C', X)` on the
///   loop-free programs among `C1`, `C2` and `C1; C2`.
///
/// The nested side gets `n` steps in each program, so the combined side
/// gets `2n`. At equal budgets the inequality can fail: the nested side
/// restarts the step count at `C2`.
pub fn decomposition_checks(
    c1: &Prog,
    c2: &Prog,
    x: &Expectation,
    states: &[ProgramState],
    mode: WpMode,
    steps: usize,
) -> Result<DecompositionReport, FixpointError> {
    let seq = Stmt::seq(c1.clone(), c2.clone());
    let memo: RefCell<HashMap<ProgramState, ExtValue>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<FixpointError>> = RefCell::new(None);
    let inner = |t: &ProgramState| -> ExtValue {
        if let Some(v) = memo.borrow().get(t) {
            return v.clone();
        }
        let v = match op_wp(c2, x, t, mode, steps) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                ExtValue::zero()
            }
        };
        memo.borrow_mut().insert(t.clone(), v.clone());
        v
    };
    let mut rows = Vec::new();
    for s in states {
        let nested = {
            let mdp = crate::opsem::OperationalMdp::new();
            let rew = crate::opsem::torew(&inner);
            let start = [Configuration::Running(c1.clone(), s.clone())];
            let run = crate::fixpoint::kleene_iterate(&mdp, &rew, mode.bellman(), &start, steps, KleeneOptions::default())?;
            run.last().get(&start[0])
        };
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let combined = op_wp(&seq, x, s, mode, 2 * steps)?;
        let mut unrolling = Vec::new();
        for c in [c1, c2, &seq] {
            if c.is_loop_free() {
                let lhs = wp(c, x, mode, 0).eval(s);
                let rhs = one_step_unrolled(c, x, s, mode, 0);
                unrolling.push((c.to_string(), lhs, rhs));
            }
        }
        rows.push(DecompositionRow {
            state: s.clone(),
            sequential_holds: nested <= combined,
            nested,
            combined,
            unrolling,
        });
    }
    Ok(DecompositionReport { mode, steps, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgcl::{example_program, parse_program, parse_state};

    fn st(s: &str) -> ProgramState {
        parse_state(s).unwrap()
    }

    #[test]
    fn loop_free_agrees() {
        let c = parse_program("{ tick(1) } [1/2] { y := y + 2 }; { skip } [] { tick(1/2) }").unwrap();
        for mode in [WpMode::Demonic, WpMode::Angelic] {
            let r = soundness_check(&c, &Expectation::var("y"), &[st(""), st("y=1")], mode, &BudgetSchedule::upto(2, 8)).unwrap();
            assert!(r.ok());
            assert!(r.rows.iter().all(|row| matches!(row.verdict, Verdict::Agree(_))), "{:?}", r);
        }
    }

    #[test]
    fn loop_not_entered_agrees() {
        let c = example_program(ExtValue::one());
        let r = soundness_check(&c, &Expectation::var("y"), &[st("x=1,y=3")], WpMode::Demonic, &BudgetSchedule::upto(5, 5)).unwrap();
        assert_eq!(r.rows[0].verdict, Verdict::Agree(ExtValue::from(3u64)));
    }

    #[test]
    fn example_loop_reports_gap() {
        let c = example_program(ExtValue::one());
        let r = soundness_check(&c, &Expectation::var("y"), &[st("")], WpMode::Demonic, &BudgetSchedule::upto(20, 20)).unwrap();
        assert!(r.ok());
        assert!(matches!(r.rows[0].verdict, Verdict::Gap { .. }));
    }

    #[test]
    fn skip_skip_decomposition() {
        let r = decomposition_checks(&Stmt::skip(), &Stmt::skip(), &Expectation::var("y"), &[st("y=2")], WpMode::Demonic, 3).unwrap();
        assert!(r.ok());
        assert_eq!(r.rows[0].nested, ExtValue::from(2u64));
        assert_eq!(r.rows[0].combined, ExtValue::from(2u64));
    }

    #[test]
    fn equal_budget_would_fail() {
        // the nested side sees the tick, the sequential one at equal budget does not
        let c1 = Stmt::skip();
        let c2 = parse_program("skip; tick(1)").unwrap();
        let x = Expectation::zero();
        let nested = decomposition_checks(&c1, &c2, &x, &[st("")], WpMode::Demonic, 2).unwrap().rows[0].nested.clone();
        let seq = Stmt::seq(c1, c2);
        assert_eq!(nested, ExtValue::one());
        assert_eq!(op_wp(&seq, &x, &st(""), WpMode::Demonic, 2).unwrap(), ExtValue::zero());
    }

    #[test]
    fn decomposition_with_loop() {
        let c1 = parse_program("while (y < 3) { { y := y + 1 } [1/2] { tick(1) } }").unwrap();
        let c2 = parse_program("{ tick(2) } [] { y := y * 2 }").unwrap();
        for steps in [1, 4, 9] {
            let r = decomposition_checks(&c1, &c2, &Expectation::var("y"), &[st(""), st("y=2")], WpMode::Angelic, steps).unwrap();
            assert!(r.ok(), "{:?}", r);
        }
    }
}
