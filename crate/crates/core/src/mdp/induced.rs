use std::hash::Hash;

use super::{Distribution, Mdp, MdpError, MemorylessScheduler};

/// The Markov chain induced by a memoryless scheduler: every state keeps
/// exactly one enabled action, the scheduled one.
#[derive(Debug, Clone)]
pub struct InducedMc<M: Mdp>
where
    M::State: Eq + Hash,
{
    mdp: M,
    sched: MemorylessScheduler<M::State, M::Action>,
}

/// Builds the induced chain. Table entries are validated up front; a state
/// missing from the table with several enabled actions panics on first use.
pub fn induced_mc<M: Mdp>(
    mdp: M,
    sched: MemorylessScheduler<M::State, M::Action>,
) -> Result<InducedMc<M>, MdpError> {
    for (s, a) in sched.table() {
        if !mdp.enabled_actions(s).contains(a) {
            return Err(MdpError::DisabledAction {
                state: mdp.state_name(s),
                action: mdp.action_name(a),
            });
        }
    }
    Ok(InducedMc { mdp, sched })
}

impl<M: Mdp> InducedMc<M> {
    pub fn base(&self) -> &M {
        &self.mdp
    }

    pub fn scheduler(&self) -> &MemorylessScheduler<M::State, M::Action> {
        &self.sched
    }

    fn chosen(&self, s: &M::State) -> M::Action {
        let enabled = self.mdp.enabled_actions(s);
        self.sched.action(s, &enabled).unwrap_or_else(|| {
            panic!("{}", MdpError::SchedulerUndefined(self.mdp.state_name(s)))
        })
    }
}

impl<M: Mdp> Mdp for InducedMc<M> {
    type State = M::State;
    type Action = M::Action;

    fn enabled_actions(&self, s: &M::State) -> Vec<M::Action> {
        vec![self.chosen(s)]
    }

    fn successors(&self, s: &M::State, a: &M::Action) -> Distribution<M::State> {
        self.mdp.successors(s, a)
    }

    fn state_name(&self, s: &M::State) -> String {
        self.mdp.state_name(s)
    }

    fn action_name(&self, a: &M::Action) -> String {
        self.mdp.action_name(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreal::ExtValue;
    use crate::mdp::builtin::{RunningAction, RunningExample, RunningState};
    use crate::mdp::{enumerate_paths, Fallback, PathMode};

    #[test]
    fn always_left_keeps_top_row() {
        let m = RunningExample::new(ExtValue::zero());
        let sched = MemorylessScheduler::new(Default::default()).with_fallback(Fallback::First);
        let mc = induced_mc(&m, sched).unwrap();
        for p in enumerate_paths(&mc, &RunningState::Col(0), 6, PathMode::UpToLength) {
            for s in p.states() {
                assert!(matches!(s, RunningState::Col(_) | RunningState::Left(_)), "{:?}", s);
            }
        }
    }

    #[test]
    fn rejects_disabled_choice() {
        let m = RunningExample::new(ExtValue::zero());
        let sched: MemorylessScheduler<_, _> = [(RunningState::Sink, RunningAction::L)].into_iter().collect();
        assert!(matches!(induced_mc(&m, sched), Err(MdpError::DisabledAction { .. })));
    }

    #[test]
    #[should_panic(expected = "no choice")]
    fn undefined_choice_panics_on_use() {
        let m = RunningExample::new(ExtValue::zero());
        let mc = induced_mc(&m, MemorylessScheduler::new(Default::default())).unwrap();
        mc.enabled_actions(&RunningState::Col(0));
    }
}
