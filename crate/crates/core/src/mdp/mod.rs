//! Markov decision processes over countable state spaces.
//!
//! An [`Mdp`] only has to answer two local questions, which actions are
//! enabled in a state and where an action leads, so infinite models can be
//! expanded lazily. Finite models live in [`ExplicitMdp`].

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::extreal::ExtValue;

pub mod builtin;
mod explicit;
mod induced;
mod paths;
pub mod random;
mod simulate;

pub use explicit::{ActionId, ExplicitMdp, ExplicitModel, ModelParseError, StateId};
pub use induced::{induced_mc, InducedMc};
pub use paths::{
    enumerate_paths, expected_reward_last_state, expected_reward_step,
    opt_expected_reward_step_bruteforce, path_probability, path_reward, PathMode,
    SCHEDULER_ENUMERATION_CAP,
};
pub use simulate::{monte_carlo_estimate, McEstimate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdpError {
    #[error("distribution is empty")]
    EmptyDistribution,
    #[error("negative probability {0}")]
    NegativeProbability(BigRational),
    #[error("probabilities sum to {0}, expected exactly 1")]
    NotNormalized(BigRational),
    #[error("scheduler has no choice for history ending in {0}")]
    SchedulerUndefined(String),
    #[error("scheduler selects action {action} which is not enabled in {state}")]
    DisabledAction { state: String, action: String },
    #[error("{count} horizon schedulers exceed the enumeration cap of {cap}")]
    EnumerationBoundExceeded { count: u128, cap: u128 },
    #[error("path is empty")]
    EmptyPath,
}

/// A finite-support probability distribution with exact rational weights.
///
/// Construction merges duplicate outcomes, drops zero weights and checks that
/// the weights sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution<S> {
    entries: Vec<(S, BigRational)>,
}

impl<S: Clone + Eq> Distribution<S> {
    pub fn new(entries: impl IntoIterator<Item = (S, BigRational)>) -> Result<Self, MdpError> {
        let mut merged: Vec<(S, BigRational)> = Vec::new();
        for (s, p) in entries {
            if p.is_negative() {
                return Err(MdpError::NegativeProbability(p));
            }
            if p.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(t, _)| *t == s) {
                Some((_, q)) => *q += p,
                None => merged.push((s, p)),
            }
        }
        if merged.is_empty() {
            return Err(MdpError::EmptyDistribution);
        }
        let total: BigRational = merged.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(MdpError::NotNormalized(total));
        }
        Ok(Distribution { entries: merged })
    }

    pub fn dirac(s: S) -> Self {
        Distribution {
            entries: vec![(s, BigRational::one())],
        }
    }

    /// Probability of `s`; zero outside the support.
    pub fn prob(&self, s: &S) -> BigRational {
        self.entries
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn map<T: Clone + Eq>(&self, f: impl Fn(&S) -> T) -> Distribution<T> {
        let mut out: Vec<(T, BigRational)> = Vec::with_capacity(self.entries.len());
        for (s, p) in &self.entries {
            let t = f(s);
            match out.iter_mut().find(|(u, _)| *u == t) {
                Some((_, q)) => *q += p,
                None => out.push((t, p.clone())),
            }
        }
        Distribution { entries: out }
    }
}

impl<S> Distribution<S> {
    pub fn iter(&self) -> impl Iterator<Item = (&S, &BigRational)> {
        self.entries.iter().map(|(s, p)| (s, p))
    }

    pub fn support(&self) -> impl Iterator<Item = &S> {
        self.entries.iter().map(|(s, _)| s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expected value of `f` under this distribution, with `0 * inf = 0`.
    pub fn expect(&self, mut f: impl FnMut(&S) -> ExtValue) -> ExtValue {
        self.entries.iter().map(|(s, p)| p * &f(s)).sum()
    }
}

/// A finitely-branching MDP.
///
/// Implementations must return at least one enabled action for every state
/// and a deterministic successor distribution for each enabled action.
/// `enabled_actions` fixes the action order used for tie-breaking.
pub trait Mdp {
    type State: Clone + Eq + Hash + Debug;
    type Action: Clone + Eq + Hash + Debug;

    fn enabled_actions(&self, s: &Self::State) -> Vec<Self::Action>;

    fn successors(&self, s: &Self::State, a: &Self::Action) -> Distribution<Self::State>;

    /// Human-readable state name used in reports and file formats.
    fn state_name(&self, s: &Self::State) -> String {
        format!("{:?}", s)
    }

    fn action_name(&self, a: &Self::Action) -> String {
        format!("{:?}", a)
    }
}

impl<M: Mdp + ?Sized> Mdp for &M {
    type State = M::State;
    type Action = M::Action;

    fn enabled_actions(&self, s: &Self::State) -> Vec<Self::Action> {
        (**self).enabled_actions(s)
    }

    fn successors(&self, s: &Self::State, a: &Self::Action) -> Distribution<Self::State> {
        (**self).successors(s, a)
    }

    fn state_name(&self, s: &Self::State) -> String {
        (**self).state_name(s)
    }

    fn action_name(&self, a: &Self::Action) -> String {
        (**self).action_name(a)
    }
}

/// Rewards collected upon entering a state.
pub trait RewardFn<S> {
    fn reward(&self, s: &S) -> ExtValue;
}

impl<S, F> RewardFn<S> for F
where
    F: Fn(&S) -> ExtValue,
{
    fn reward(&self, s: &S) -> ExtValue {
        self(s)
    }
}

/// Table-backed reward function; unlisted states earn zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableReward<S: Eq + Hash> {
    table: HashMap<S, ExtValue>,
}

impl<S: Eq + Hash> TableReward<S> {
    pub fn new() -> Self {
        TableReward {
            table: HashMap::new(),
        }
    }

    pub fn set(&mut self, s: S, v: ExtValue) {
        if v.is_zero() {
            self.table.remove(&s);
        } else {
            self.table.insert(s, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, &ExtValue)> {
        self.table.iter()
    }
}

impl<S: Eq + Hash> FromIterator<(S, ExtValue)> for TableReward<S> {
    fn from_iter<I: IntoIterator<Item = (S, ExtValue)>>(iter: I) -> Self {
        let mut t = TableReward::new();
        for (s, v) in iter {
            t.set(s, v);
        }
        t
    }
}

impl<S: Eq + Hash> RewardFn<S> for TableReward<S> {
    fn reward(&self, s: &S) -> ExtValue {
        self.table.get(s).cloned().unwrap_or_default()
    }
}

/// A finite, nonempty sequence of states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path<S>(Vec<S>);

impl<S> Path<S> {
    pub fn new(states: Vec<S>) -> Result<Self, MdpError> {
        if states.is_empty() {
            Err(MdpError::EmptyPath)
        } else {
            Ok(Path(states))
        }
    }

    pub fn single(s: S) -> Self {
        Path(vec![s])
    }

    pub fn states(&self) -> &[S] {
        &self.0
    }

    /// Number of transitions, i.e. one less than the number of states.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &S {
        &self.0[0]
    }

    pub fn last(&self) -> &S {
        self.0.last().expect("paths are nonempty")
    }
}

impl<S: Clone> Path<S> {
    pub fn extended(&self, s: S) -> Path<S> {
        let mut v = self.0.clone();
        v.push(s);
        Path(v)
    }
}

/// Deterministic resolution of nondeterminism given a history.
pub trait Scheduler<S, A> {
    /// `history` is nonempty; `enabled` lists the actions enabled in its last
    /// state, in the MDP's order.
    fn choose(&self, history: &[S], enabled: &[A]) -> Option<A>;
}

/// What a [`MemorylessScheduler`] does in states missing from its table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    /// Only states with a single enabled action may be omitted.
    #[default]
    Forced,
    First,
    Last,
}

/// A scheduler whose choice depends on the current state only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemorylessScheduler<S: Eq + Hash, A> {
    table: HashMap<S, A>,
    fallback: Fallback,
}

impl<S: Eq + Hash, A: Clone + PartialEq> MemorylessScheduler<S, A> {
    pub fn new(table: HashMap<S, A>) -> Self {
        MemorylessScheduler {
            table,
            fallback: Fallback::Forced,
        }
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn table(&self) -> &HashMap<S, A> {
        &self.table
    }

    pub fn action(&self, s: &S, enabled: &[A]) -> Option<A> {
        if let Some(a) = self.table.get(s) {
            return enabled.contains(a).then(|| a.clone());
        }
        match self.fallback {
            Fallback::Forced if enabled.len() == 1 => Some(enabled[0].clone()),
            Fallback::Forced => None,
            Fallback::First => enabled.first().cloned(),
            Fallback::Last => enabled.last().cloned(),
        }
    }
}

impl<S: Eq + Hash, A: Clone + PartialEq> FromIterator<(S, A)> for MemorylessScheduler<S, A> {
    fn from_iter<I: IntoIterator<Item = (S, A)>>(iter: I) -> Self {
        MemorylessScheduler::new(iter.into_iter().collect())
    }
}

impl<S: Eq + Hash, A: Clone + PartialEq> Scheduler<S, A> for MemorylessScheduler<S, A> {
    fn choose(&self, history: &[S], enabled: &[A]) -> Option<A> {
        self.action(history.last()?, enabled)
    }
}

/// A history-dependent scheduler defined on histories shorter than a horizon.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HorizonScheduler<S: Eq + Hash, A> {
    choices: HashMap<Vec<S>, A>,
}

impl<S: Eq + Hash + Clone, A: Clone + PartialEq> HorizonScheduler<S, A> {
    pub fn new() -> Self {
        HorizonScheduler {
            choices: HashMap::new(),
        }
    }

    pub fn set(&mut self, history: Vec<S>, a: A) {
        self.choices.insert(history, a);
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

impl<S: Eq + Hash + Clone, A: Clone + PartialEq> Scheduler<S, A> for HorizonScheduler<S, A> {
    fn choose(&self, history: &[S], enabled: &[A]) -> Option<A> {
        match self.choices.get(history) {
            Some(a) => enabled.contains(a).then(|| a.clone()),
            None if enabled.len() == 1 => Some(enabled[0].clone()),
            None => None,
        }
    }
}
