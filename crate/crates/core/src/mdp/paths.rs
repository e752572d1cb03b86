//! Path enumeration and the path-based (definitional) expected rewards.
//!
//! Everything here follows the definitions literally and is meant as an oracle
//! for the fixpoint engine, so nothing is memoized or clever.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ExplicitMdp, HorizonScheduler, Mdp, MdpError, Path, RewardFn, Scheduler, StateId};
use crate::extreal::ExtValue;
use crate::fixpoint::BellmanMode;

/// Upper bound on the number of horizon schedulers the brute-force oracle
/// will enumerate.
pub const SCHEDULER_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// `Paths^{=n}(s)`
    ExactLength,
    /// `Paths^{<=n}(s)`
    UpToLength,
}

/// Successors of `s` under some enabled action with positive probability,
/// deduplicated, in first-seen order.
fn any_successors<M: Mdp>(mdp: &M, s: &M::State) -> Vec<M::State> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in mdp.enabled_actions(s) {
        for t in mdp.successors(s, &a).support() {
            if seen.insert(t.clone()) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// All paths of length exactly `n` (or at most `n`) starting in `s`.
///
/// Order is deterministic: shorter paths first, then lexicographic in the
/// MDP's successor order.
pub fn enumerate_paths<M: Mdp>(mdp: &M, s: &M::State, n: usize, mode: PathMode) -> Vec<Path<M::State>> {
    let mut layer = vec![Path::single(s.clone())];
    let mut all = Vec::new();
    for _ in 0..n {
        if mode == PathMode::UpToLength {
            all.extend(layer.iter().cloned());
        }
        let mut next = Vec::new();
        for p in &layer {
            for t in any_successors(mdp, p.last()) {
                next.push(p.extended(t));
            }
        }
        layer = next;
    }
    all.extend(layer);
    all
}

/// Probability of `path` under `sched`; the empty product is 1.
///
/// The scheduler is consulted only on prefixes that still have positive
/// probability. A step with probability zero makes the result zero.
pub fn path_probability<M, Sc>(mdp: &M, sched: &Sc, path: &Path<M::State>) -> Result<ExtValue, MdpError>
where
    M: Mdp,
    Sc: Scheduler<M::State, M::Action> + ?Sized,
{
    let states = path.states();
    let mut prob = BigRational::one();
    for i in 0..path.len() {
        let here = &states[i];
        let enabled = mdp.enabled_actions(here);
        let a = sched
            .choose(&states[..=i], &enabled)
            .ok_or_else(|| MdpError::SchedulerUndefined(mdp.state_name(here)))?;
        if !enabled.contains(&a) {
            return Err(MdpError::DisabledAction {
                state: mdp.state_name(here),
                action: mdp.action_name(&a),
            });
        }
        prob *= mdp.successors(here, &a).prob(&states[i + 1]);
        if prob.is_zero() {
            break;
        }
    }
    Ok(ExtValue::finite(prob).expect("probabilities are nonnegative"))
}

/// Sum of the rewards of all states on the path, the first one included.
pub fn path_reward<S, R: RewardFn<S> + ?Sized>(rew: &R, path: &Path<S>) -> ExtValue {
    path.states().iter().map(|s| rew.reward(s)).sum()
}

/// `ER^{=n}(s)` under `sched`: the sum over `Paths^{=n}(s)` of probability
/// times path reward.
pub fn expected_reward_step<M, R, Sc>(mdp: &M, rew: &R, sched: &Sc, s: &M::State, n: usize) -> Result<ExtValue, MdpError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
    Sc: Scheduler<M::State, M::Action> + ?Sized,
{
    let mut total = ExtValue::zero();
    for p in enumerate_paths(mdp, s, n, PathMode::ExactLength) {
        let prob = path_probability(mdp, sched, &p)?;
        total = total + &prob * &path_reward(rew, &p);
    }
    Ok(total)
}

/// The sum over `Paths^{<=n}(s)` of probability times the reward of the last
/// state.
pub fn expected_reward_last_state<M, R, Sc>(
    mdp: &M,
    rew: &R,
    sched: &Sc,
    s: &M::State,
    n: usize,
) -> Result<ExtValue, MdpError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
    Sc: Scheduler<M::State, M::Action> + ?Sized,
{
    let mut total = ExtValue::zero();
    for p in enumerate_paths(mdp, s, n, PathMode::UpToLength) {
        let prob = path_probability(mdp, sched, &p)?;
        total = total + &prob * &rew.reward(p.last());
    }
    Ok(total)
}

/// Number of horizon-`n` schedulers that differ on histories reachable with
/// positive probability. The count depends only on the last state and the
/// remaining horizon. Saturates at `u128::MAX`.
fn count_schedulers(
    mdp: &ExplicitMdp,
    last: StateId,
    remaining: usize,
    memo: &mut std::collections::HashMap<(StateId, usize), u128>,
) -> u128 {
    if remaining == 0 {
        return 1;
    }
    if let Some(&c) = memo.get(&(last, remaining)) {
        return c;
    }
    let mut total: u128 = 0;
    for a in mdp.enabled_actions(&last) {
        let mut prod: u128 = 1;
        for t in mdp.successors(&last, &a).support() {
            prod = prod.saturating_mul(count_schedulers(mdp, *t, remaining - 1, memo));
        }
        total = total.saturating_add(prod);
    }
    memo.insert((last, remaining), total);
    total
}

/// Exact optimum of `ER^{=n}(s)` over all deterministic history-dependent
/// schedulers, by enumeration.
///
/// Two schedulers that agree on every history reachable with positive
/// probability yield the same expected reward, so only those histories are
/// enumerated. More than [`SCHEDULER_ENUMERATION_CAP`] candidates is an error.
pub fn opt_expected_reward_step_bruteforce<R>(
    mdp: &ExplicitMdp,
    rew: &R,
    s: StateId,
    n: usize,
    mode: BellmanMode,
) -> Result<ExtValue, MdpError>
where
    R: RewardFn<StateId> + ?Sized,
{
    let count = count_schedulers(mdp, s, n, &mut Default::default());
    if count > SCHEDULER_ENUMERATION_CAP {
        return Err(MdpError::EnumerationBoundExceeded {
            count,
            cap: SCHEDULER_ENUMERATION_CAP,
        });
    }
    let mut best: Option<ExtValue> = None;
    let mut err = None;
    let mut sched = HorizonScheduler::new();
    let pending = if n == 0 { Vec::new() } else { vec![vec![s]] };
    for_each_scheduler(mdp, n, pending, &mut sched, &mut |sc| {
        if err.is_some() {
            return;
        }
        match expected_reward_step(mdp, rew, sc, &s, n) {
            Ok(v) => {
                best = Some(match best.take() {
                    None => v,
                    Some(b) => match mode {
                        BellmanMode::Min => b.min_of(v),
                        BellmanMode::Max => b.max_of(v),
                    },
                })
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("at least one scheduler exists"))
}

/// Backtracking over decisions at the `pending` histories. A decision at a
/// history of fewer than `n` transitions opens decisions at its extensions.
fn for_each_scheduler(
    mdp: &ExplicitMdp,
    n: usize,
    mut pending: Vec<Vec<StateId>>,
    sched: &mut HorizonScheduler<StateId, crate::mdp::ActionId>,
    f: &mut dyn FnMut(&HorizonScheduler<StateId, crate::mdp::ActionId>),
) {
    let Some(h) = pending.pop() else {
        f(sched);
        return;
    };
    let last = *h.last().expect("histories are nonempty");
    for a in mdp.enabled_actions(&last) {
        sched.set(h.clone(), a);
        let mut next = pending.clone();
        if h.len() < n {
            for t in mdp.successors(&last, &a).support() {
                let mut ext = h.clone();
                ext.push(*t);
                next.push(ext);
            }
        }
        for_each_scheduler(mdp, n, next, sched, f);
    }
}
