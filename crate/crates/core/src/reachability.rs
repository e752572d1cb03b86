//! Reachability probabilities as expected rewards.
//!
//! `M_T` adds a fresh sink; target states and the sink move to the sink with
//! probability one, and the reward is 1 exactly on targets. The expected
//! reward of `M_T` is then the probability of reaching `T`.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::extreal::ExtValue;
use crate::fixpoint::{kleene_iterate, park_check, BellmanMode, FixpointError, KleeneOptions, KleeneRun, ParkOutcome, ValueFunction};
use crate::mdp::{Distribution, Mdp, RewardFn};

/// A set of target states, given explicitly or as a predicate.
#[derive(Clone)]
pub enum TargetSet<S> {
    Explicit(HashSet<S>),
    Predicate(Arc<dyn Fn(&S) -> bool + Send + Sync>),
}

impl<S: Eq + Hash> TargetSet<S> {
    pub fn empty() -> Self {
        TargetSet::Explicit(HashSet::new())
    }

    pub fn predicate(f: impl Fn(&S) -> bool + Send + Sync + 'static) -> Self {
        TargetSet::Predicate(Arc::new(f))
    }

    pub fn contains(&self, s: &S) -> bool {
        match self {
            TargetSet::Explicit(set) => set.contains(s),
            TargetSet::Predicate(f) => f(s),
        }
    }
}

impl<S: Eq + Hash> FromIterator<S> for TargetSet<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TargetSet::Explicit(iter.into_iter().collect())
    }
}

impl<S: fmt::Debug> fmt::Debug for TargetSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSet::Explicit(set) => f.debug_tuple("Explicit").field(set).finish(),
            TargetSet::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReachState<S> {
    Base(S),
    FreshSink,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReachAction<A> {
    Base(A),
    /// The only action of the fresh sink.
    Stay,
}

/// `M_T` for a base MDP and a target set.
///
/// Target states keep their own enabled actions, each redirected to the sink.
#[derive(Debug, Clone)]
pub struct ReachMdp<M: Mdp> {
    base: M,
    targets: TargetSet<M::State>,
}

/// The reward `rew_T`: 1 on targets, 0 elsewhere (the fresh sink included).
#[derive(Debug, Clone)]
pub struct ReachReward<S> {
    targets: TargetSet<S>,
}

pub fn reach_transform<M: Mdp>(mdp: M, targets: TargetSet<M::State>) -> (ReachMdp<M>, ReachReward<M::State>) {
    let rew = ReachReward {
        targets: targets.clone(),
    };
    (ReachMdp { base: mdp, targets }, rew)
}

impl<M: Mdp> ReachMdp<M> {
    pub fn base(&self) -> &M {
        &self.base
    }
}

impl<M: Mdp> Mdp for ReachMdp<M> {
    type State = ReachState<M::State>;
    type Action = ReachAction<M::Action>;

    fn enabled_actions(&self, s: &Self::State) -> Vec<Self::Action> {
        match s {
            ReachState::Base(b) => self.base.enabled_actions(b).into_iter().map(ReachAction::Base).collect(),
            ReachState::FreshSink => vec![ReachAction::Stay],
        }
    }

    fn successors(&self, s: &Self::State, a: &Self::Action) -> Distribution<Self::State> {
        match (s, a) {
            (ReachState::Base(b), ReachAction::Base(act)) => {
                if self.targets.contains(b) {
                    Distribution::dirac(ReachState::FreshSink)
                } else {
                    self.base.successors(b, act).map(|t| ReachState::Base(t.clone()))
                }
            }
            (ReachState::FreshSink, ReachAction::Stay) => Distribution::dirac(ReachState::FreshSink),
            _ => panic!("action {:?} not enabled in {:?}", a, s),
        }
    }

    fn state_name(&self, s: &Self::State) -> String {
        match s {
            ReachState::Base(b) => self.base.state_name(b),
            ReachState::FreshSink => "<sink>".to_string(),
        }
    }

    fn action_name(&self, a: &Self::Action) -> String {
        match a {
            ReachAction::Base(b) => self.base.action_name(b),
            ReachAction::Stay => "<stay>".to_string(),
        }
    }
}

impl<S: Eq + Hash> RewardFn<ReachState<S>> for ReachReward<S> {
    fn reward(&self, s: &ReachState<S>) -> ExtValue {
        match s {
            ReachState::Base(b) if self.targets.contains(b) => ExtValue::one(),
            _ => ExtValue::zero(),
        }
    }
}

/// Result of [`reach_probability`].
#[derive(Debug, Clone)]
pub struct ReachResult<S: Eq + Hash> {
    /// Kleene iterates at the query state of the transformed model.
    pub run: KleeneRun<ReachState<S>>,
    /// Outcome of the Park check, when a candidate was supplied.
    pub certificate: Option<ParkOutcome<ReachState<S>>>,
}

impl<S: Eq + Hash + Clone> ReachResult<S> {
    /// The last iterate at `s`: an exact lower bound on the reach probability.
    pub fn lower_bound(&self, s: &S) -> ExtValue {
        self.run.last().get(&ReachState::Base(s.clone()))
    }
}

/// Step-bounded min/max probability to reach `targets` from `s`.
///
/// When `candidate` is given, it is Park-checked on `domain` (base states;
/// the fresh sink is added automatically).
#[allow(clippy::too_many_arguments)]
pub fn reach_probability<M: Mdp>(
    mdp: &M,
    targets: TargetSet<M::State>,
    s: &M::State,
    mode: BellmanMode,
    steps: usize,
    candidate: Option<(&ValueFunction<M::State>, &[M::State])>,
    opts: KleeneOptions,
) -> Result<ReachResult<M::State>, FixpointError> {
    let (reach, rew) = reach_transform(mdp, targets);
    let start = [ReachState::Base(s.clone())];
    let run = kleene_iterate(&reach, &rew, mode, &start, steps, opts)?;
    let certificate = match candidate {
        None => None,
        Some((v, domain)) => {
            let lifted: ValueFunction<_> = domain
                .iter()
                .map(|t| (ReachState::Base(t.clone()), v.get(t)))
                .collect();
            let mut dom: Vec<_> = domain.iter().cloned().map(ReachState::Base).collect();
            dom.push(ReachState::FreshSink);
            Some(park_check(&reach, &rew, mode, &lifted, &dom)?)
        }
    };
    Ok(ReachResult { run, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::builtin::{running_example_explicit, RunningExample, RunningState};
    use crate::mdp::{enumerate_paths, PathMode, StateId};

    fn right_states() -> TargetSet<RunningState> {
        TargetSet::predicate(|s| matches!(s, RunningState::Right(_)))
    }

    #[test]
    fn running_example_is_preserved() {
        // mapping bot to the fresh sink, paths from s0 coincide
        let m = RunningExample::new(ExtValue::one());
        let (mt, _) = reach_transform(&m, right_states());
        let lift = |s: &RunningState| match s {
            RunningState::Sink => ReachState::FreshSink,
            other => ReachState::Base(*other),
        };
        let base: HashSet<Vec<ReachState<RunningState>>> = enumerate_paths(&m, &RunningState::Col(0), 6, PathMode::UpToLength)
            .iter()
            .map(|p| p.states().iter().map(lift).collect())
            .collect();
        let transformed: HashSet<Vec<ReachState<RunningState>>> =
            enumerate_paths(&mt, &ReachState::Base(RunningState::Col(0)), 6, PathMode::UpToLength)
                .iter()
                .map(|p| p.states().to_vec())
                .collect();
        assert_eq!(base, transformed);
    }

    #[test]
    fn empty_target_is_zero() {
        let m = RunningExample::new(ExtValue::one());
        for mode in [BellmanMode::Min, BellmanMode::Max] {
            let r = reach_probability(&m, TargetSet::empty(), &RunningState::Col(0), mode, 20, None, KleeneOptions::default()).unwrap();
            assert!(r.run.iterates.iter().all(|v| v.get(&ReachState::Base(RunningState::Col(0))).is_zero()));
        }
    }

    #[test]
    fn start_in_target_is_one() {
        let m = RunningExample::new(ExtValue::one());
        let t: TargetSet<RunningState> = [RunningState::Col(0)].into_iter().collect();
        for mode in [BellmanMode::Min, BellmanMode::Max] {
            let r = reach_probability(&m, t.clone(), &RunningState::Col(0), mode, 5, None, KleeneOptions::default()).unwrap();
            assert_eq!(r.run.iterates[1].get(&ReachState::Base(RunningState::Col(0))), ExtValue::one());
            assert_eq!(r.lower_bound(&RunningState::Col(0)), ExtValue::one());
        }
    }

    #[test]
    fn max_reach_approaches_one() {
        let m = RunningExample::new(ExtValue::one());
        let r = reach_probability(&m, right_states(), &RunningState::Col(0), BellmanMode::Max, 40, None, KleeneOptions::default()).unwrap();
        let lb = r.lower_bound(&RunningState::Col(0));
        assert!(lb <= ExtValue::one());
        assert!(lb >= ExtValue::finite(num_rational::BigRational::new(1023.into(), 1024.into())).unwrap());
    }

    #[test]
    fn min_reach_certified_zero() {
        let model = running_example_explicit(10, ExtValue::one());
        let targets: TargetSet<StateId> = model
            .mdp
            .states()
            .filter(|s| model.mdp.name_of(*s).ends_with('R'))
            .collect();
        let domain: Vec<StateId> = model.mdp.states().collect();
        let candidate: ValueFunction<StateId> = domain
            .iter()
            .map(|s| (*s, if targets.contains(s) { ExtValue::one() } else { ExtValue::zero() }))
            .collect();
        let s0 = model.mdp.state_id("s0").unwrap();
        let r = reach_probability(&model.mdp, targets, &s0, BellmanMode::Min, 30, Some((&candidate, &domain)), KleeneOptions::default()).unwrap();
        assert!(r.run.iterates.iter().all(|v| v.get(&ReachState::Base(s0)).is_zero()));
        assert_eq!(r.certificate, Some(ParkOutcome::Certificate));
    }
}
