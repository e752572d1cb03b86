//! Property bodies shared by the proptest suite and the acceptance runner.
//! Each takes a seed and draws its instance from a ChaCha stream.

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;

use rewlfp::mdp::random::{random_explicit_model, random_memoryless_scheduler, RandomModelConfig};
use rewlfp::mdp::{enumerate_paths, path_probability, PathMode, StateId};
use rewlfp::pgcl::{Prog, Stmt};
use rewlfp::wp::gen::{random_aexpr, random_expectation, random_loop, random_loop_free, random_state, VARS};
use rewlfp::wp::{op_wp, wp, WpMode};
use rewlfp::{
    bellman_apply, kleene_iterate, park_check, BellmanMode, ConvergenceStatus, ExtValue, KleeneOptions, Mdp,
    ParkOutcome, ValueFunction,
};

pub type Outcome = Result<(), TestCaseError>;

pub fn random_value<R: Rng>(rng: &mut R) -> ExtValue {
    if rng.gen_bool(0.1) {
        ExtValue::infinity()
    } else {
        ExtValue::ratio(rng.gen_range(0..12), rng.gen_range(1..4))
    }
}

pub fn mode_of(min: bool) -> BellmanMode {
    if min {
        BellmanMode::Min
    } else {
        BellmanMode::Max
    }
}

/// Replaces every `skip` by `tick(0)`.
pub fn skip_to_tick0(c: &Prog) -> Prog {
    match &**c {
        Stmt::Skip => Stmt::tick(ExtValue::zero()),
        Stmt::Assign(..) | Stmt::Tick(_) => c.clone(),
        Stmt::Seq(a, b) => Stmt::seq(skip_to_tick0(a), skip_to_tick0(b)),
        Stmt::Prob(a, p, b) => Stmt::prob(skip_to_tick0(a), p.clone(), skip_to_tick0(b)),
        Stmt::Nondet(a, b) => Stmt::nondet(skip_to_tick0(a), skip_to_tick0(b)),
        Stmt::Ite(g, a, b) => Stmt::ite(g.clone(), skip_to_tick0(a), skip_to_tick0(b)),
        Stmt::While(g, b) => Stmt::while_loop(g.clone(), skip_to_tick0(b)),
    }
}

pub fn bellman_is_monotone(seed: u64, min: bool) -> Outcome {
    let mut r = super::rng(seed);
    let m = random_explicit_model(&mut r, RandomModelConfig::default());
    let states: Vec<StateId> = m.mdp.states().collect();
    let v: ValueFunction<StateId> = states.iter().map(|s| (*s, random_value(&mut r))).collect();
    let w: ValueFunction<StateId> = states.iter().map(|s| (*s, v.get(s) + random_value(&mut r))).collect();
    prop_assert!(v.leq(&w));
    let fv = bellman_apply(&m.mdp, &m.rewards, mode_of(min), &v, &states);
    let fw = bellman_apply(&m.mdp, &m.rewards, mode_of(min), &w, &states);
    prop_assert!(fv.leq_on(&fw, &states));
    Ok(())
}

pub fn kleene_chain_is_monotone(seed: u64, min: bool, steps: usize) -> Outcome {
    let mut r = super::rng(seed);
    let m = random_explicit_model(&mut r, RandomModelConfig::default());
    let states: Vec<StateId> = m.mdp.states().collect();
    let run = kleene_iterate(&m.mdp, &m.rewards, mode_of(min), &states, steps, KleeneOptions::default()).unwrap();
    prop_assert_eq!(run.iterates.len(), steps + 1);
    for w in run.iterates.windows(2) {
        prop_assert!(w[0].leq_on(&w[1], &states));
    }
    Ok(())
}

pub fn park_certificates_bound_every_iterate(seed: u64, min: bool) -> Outcome {
    let mut r = super::rng(seed);
    let m = random_explicit_model(&mut r, RandomModelConfig::default());
    let states: Vec<StateId> = m.mdp.states().collect();
    let mode = mode_of(min);
    let run = kleene_iterate(&m.mdp, &m.rewards, mode, &states, 25, KleeneOptions::default()).unwrap();
    // random candidates, and the exact fixed point when iteration converged
    let mut candidates: Vec<ValueFunction<StateId>> = (0..4)
        .map(|_| states.iter().map(|s| (*s, random_value(&mut r))).collect())
        .collect();
    if let (ConvergenceStatus::ConvergedExact { .. }, Some(region)) = (run.status, &run.region) {
        prop_assert_eq!(park_check(&m.mdp, &m.rewards, mode, region, &states).unwrap(), ParkOutcome::Certificate);
        candidates.push(region.clone());
    }
    for c in &candidates {
        if park_check(&m.mdp, &m.rewards, mode, c, &states).unwrap() == ParkOutcome::Certificate {
            for it in &run.iterates {
                prop_assert!(it.leq_on(c, &states));
            }
        }
    }
    Ok(())
}

pub fn path_probabilities_sum_to_one(seed: u64, n: usize) -> Outcome {
    let mut r = super::rng(seed);
    let m = random_explicit_model(&mut r, RandomModelConfig::default());
    let sched = random_memoryless_scheduler(&mut r, &m.mdp);
    let s0 = StateId(0);
    let total: ExtValue = enumerate_paths(&m.mdp, &s0, n, PathMode::ExactLength)
        .iter()
        .map(|p| path_probability(&m.mdp, &sched, p).unwrap())
        .sum();
    prop_assert_eq!(total, ExtValue::one());
    for s in m.mdp.states() {
        for a in m.mdp.enabled_actions(&s) {
            let mass: BigRational = m.mdp.successors(&s, &a).iter().map(|(_, p)| p.clone()).sum();
            prop_assert_eq!(mass, BigRational::one());
        }
    }
    Ok(())
}

pub fn demonic_below_angelic(seed: u64, budget: usize) -> Outcome {
    let mut r = super::rng(seed);
    let c = if r.gen_bool(0.5) { random_loop_free(&mut r, 4, true) } else { random_loop(&mut r, 2) };
    let x = random_expectation(&mut r, 3);
    let d = wp(&c, &x, WpMode::Demonic, budget);
    let a = wp(&c, &x, WpMode::Angelic, budget);
    for _ in 0..3 {
        let s = random_state(&mut r);
        prop_assert!(d.eval(&s) <= a.eval(&s), "{} at {}", c, s);
    }
    Ok(())
}

pub fn substitution_law(seed: u64) -> Outcome {
    let mut r = super::rng(seed);
    let x = random_expectation(&mut r, 4);
    let v = VARS[r.gen_range(0..VARS.len())];
    let e = random_aexpr(&mut r, 2);
    let s = random_state(&mut r);
    prop_assert_eq!(x.subst(v, &e).eval(&s), x.eval(&s.updated(v, e.eval(&s))));
    Ok(())
}

pub fn tick_zero_is_skip(seed: u64) -> Outcome {
    let mut r = super::rng(seed);
    let c = random_loop_free(&mut r, 3, true);
    let t = skip_to_tick0(&c);
    let x = random_expectation(&mut r, 2);
    let s = random_state(&mut r);
    for mode in [WpMode::Demonic, WpMode::Angelic] {
        prop_assert_eq!(wp(&c, &x, mode, 0).eval(&s), wp(&t, &x, mode, 0).eval(&s));
        let steps = c.step_bound().unwrap() + 1;
        prop_assert_eq!(op_wp(&c, &x, &s, mode, steps).unwrap(), op_wp(&t, &x, &s, mode, steps).unwrap());
    }
    Ok(())
}
