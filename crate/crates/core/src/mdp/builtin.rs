//! Built-in example MDPs.
//!
//! [`RunningExample`] is the infinite ladder: from `s_i`, action `L` moves to
//! `s_i^L` (reward `r`) and then on to `s_{i+1}`; action `R` moves with
//! probability one half to `s_i^R` (reward `i+1`) and otherwise to
//! `s_{i+1}`. Every `s_i^R` falls into the absorbing state `bot`.
//!
//! [`NoOptSched`] is the ladder where `L` climbs and `R` cashes in reward `i`
//! at `s_i'`; no max-optimal scheduler exists there.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{ActionId, Distribution, ExplicitMdp, ExplicitModel, Mdp, RewardFn, StateId, TableReward};
use crate::extreal::ExtValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunningAction {
    L,
    R,
    N,
}

impl RunningAction {
    pub fn name(self) -> &'static str {
        match self {
            RunningAction::L => "L",
            RunningAction::R => "R",
            RunningAction::N => "N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunningState {
    Col(u64),
    Left(u64),
    Right(u64),
    Sink,
}

impl RunningState {
    pub fn name(self) -> String {
        match self {
            RunningState::Col(i) => format!("s{}", i),
            RunningState::Left(i) => format!("s{}L", i),
            RunningState::Right(i) => format!("s{}R", i),
            RunningState::Sink => "bot".to_string(),
        }
    }

    /// Inverse of [`RunningState::name`].
    pub fn parse(name: &str) -> Option<Self> {
        if name == "bot" {
            return Some(RunningState::Sink);
        }
        let rest = name.strip_prefix('s')?;
        let (digits, ctor): (&str, fn(u64) -> RunningState) = if let Some(d) = rest.strip_suffix('L') {
            (d, RunningState::Left)
        } else if let Some(d) = rest.strip_suffix('R') {
            (d, RunningState::Right)
        } else {
            (rest, RunningState::Col)
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return None;
        }
        digits.parse().ok().map(ctor)
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// The lazily expanded infinite running example with `L`-reward `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunningExample {
    pub r: ExtValue,
}

impl RunningExample {
    pub fn new(r: ExtValue) -> Self {
        RunningExample { r }
    }
}

impl Mdp for RunningExample {
    type State = RunningState;
    type Action = RunningAction;

    fn enabled_actions(&self, s: &RunningState) -> Vec<RunningAction> {
        match s {
            RunningState::Col(_) => vec![RunningAction::L, RunningAction::R],
            _ => vec![RunningAction::N],
        }
    }

    fn successors(&self, s: &RunningState, a: &RunningAction) -> Distribution<RunningState> {
        use RunningState::*;
        match (s, a) {
            (Col(i), RunningAction::L) => Distribution::dirac(Left(*i)),
            (Col(i), RunningAction::R) => {
                Distribution::new([(Right(*i), half()), (Col(i + 1), half())]).expect("valid")
            }
            (Left(i), RunningAction::N) => Distribution::dirac(Col(i + 1)),
            (Right(_), RunningAction::N) | (Sink, RunningAction::N) => Distribution::dirac(Sink),
            _ => panic!("action {:?} not enabled in {:?}", a, s),
        }
    }

    fn state_name(&self, s: &RunningState) -> String {
        s.name()
    }

    fn action_name(&self, a: &RunningAction) -> String {
        a.name().to_string()
    }
}

impl RewardFn<RunningState> for RunningExample {
    fn reward(&self, s: &RunningState) -> ExtValue {
        match s {
            RunningState::Left(_) => self.r.clone(),
            RunningState::Right(i) => ExtValue::from(i + 1),
            _ => ExtValue::zero(),
        }
    }
}

/// Finite truncation of the running example with `columns` full columns.
///
/// Columns `0..columns` are as in the infinite model; `s{columns}` is a dead
/// end whose only action `N` leads to `bot`. The truncation is closed under
/// successors.
pub fn running_example_explicit(columns: u64, r: ExtValue) -> ExplicitModel {
    use RunningState::*;
    let mut states = Vec::new();
    for i in 0..columns {
        states.extend([Col(i), Left(i), Right(i)]);
    }
    states.push(Col(columns));
    states.push(Sink);
    let index = |s: RunningState| -> StateId {
        StateId(match s {
            Col(i) if i == columns => 3 * columns as usize,
            Sink => 3 * columns as usize + 1,
            Col(i) => 3 * i as usize,
            Left(i) => 3 * i as usize + 1,
            Right(i) => 3 * i as usize + 2,
        })
    };
    let infinite = RunningExample::new(r);
    let actions = [RunningAction::L, RunningAction::R, RunningAction::N];
    let aid = |a: RunningAction| ActionId(actions.iter().position(|b| *b == a).expect("known action"));
    let mut records = Vec::new();
    for s in &states {
        if *s == Col(columns) {
            records.push((index(*s), aid(RunningAction::N), BigRational::one(), index(Sink)));
            continue;
        }
        for a in infinite.enabled_actions(s) {
            for (t, p) in infinite.successors(s, &a).iter() {
                records.push((index(*s), aid(a), p.clone(), index(*t)));
            }
        }
    }
    let rewards: TableReward<StateId> = states
        .iter()
        .filter(|s| **s != Col(columns))
        .map(|s| (index(*s), infinite.reward(s)))
        .collect();
    let mdp = ExplicitMdp::from_parts(
        states.iter().map(|s| s.name()).collect(),
        actions.iter().map(|a| a.name().to_string()).collect(),
        records,
    )
    .expect("truncation is well formed");
    ExplicitModel { mdp, rewards }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoOptState {
    Climb(u64),
    Cash(u64),
    Sink,
}

impl NoOptState {
    pub fn name(self) -> String {
        match self {
            NoOptState::Climb(i) => format!("s{}", i),
            NoOptState::Cash(i) => format!("s{}'", i),
            NoOptState::Sink => "bot".to_string(),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        if name == "bot" {
            return Some(NoOptState::Sink);
        }
        let rest = name.strip_prefix('s')?;
        let (digits, ctor): (&str, fn(u64) -> NoOptState) = match rest.strip_suffix('\'') {
            Some(d) => (d, NoOptState::Cash),
            None => (rest, NoOptState::Climb),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok().map(ctor)
    }
}

/// The ladder without a max-optimal scheduler.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoOptSched;

impl Mdp for NoOptSched {
    type State = NoOptState;
    type Action = RunningAction;

    fn enabled_actions(&self, s: &NoOptState) -> Vec<RunningAction> {
        match s {
            NoOptState::Climb(_) => vec![RunningAction::L, RunningAction::R],
            _ => vec![RunningAction::N],
        }
    }

    fn successors(&self, s: &NoOptState, a: &RunningAction) -> Distribution<NoOptState> {
        match (s, a) {
            (NoOptState::Climb(i), RunningAction::L) => Distribution::dirac(NoOptState::Climb(i + 1)),
            (NoOptState::Climb(i), RunningAction::R) => Distribution::dirac(NoOptState::Cash(*i)),
            (NoOptState::Cash(_), RunningAction::N) | (NoOptState::Sink, RunningAction::N) => {
                Distribution::dirac(NoOptState::Sink)
            }
            _ => panic!("action {:?} not enabled in {:?}", a, s),
        }
    }

    fn state_name(&self, s: &NoOptState) -> String {
        s.name()
    }

    fn action_name(&self, a: &RunningAction) -> String {
        a.name().to_string()
    }
}

impl RewardFn<NoOptState> for NoOptSched {
    fn reward(&self, s: &NoOptState) -> ExtValue {
        match s {
            NoOptState::Cash(i) => ExtValue::from(*i),
            _ => ExtValue::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in [RunningState::Col(0), RunningState::Left(12), RunningState::Right(3), RunningState::Sink] {
            assert_eq!(RunningState::parse(&s.name()), Some(s));
        }
        for s in [NoOptState::Climb(4), NoOptState::Cash(0), NoOptState::Sink] {
            assert_eq!(NoOptState::parse(&s.name()), Some(s));
        }
        assert_eq!(RunningState::parse("s"), None);
        assert_eq!(RunningState::parse("s01"), None);
        assert_eq!(RunningState::parse("sxL"), None);
    }

    #[test]
    fn running_example_transitions() {
        let m = RunningExample::new(ExtValue::one());
        let d = m.successors(&RunningState::Col(0), &RunningAction::R);
        assert_eq!(d.prob(&RunningState::Right(0)), half());
        assert_eq!(d.prob(&RunningState::Col(1)), half());
        assert_eq!(m.reward(&RunningState::Right(4)), ExtValue::from(5));
        assert_eq!(m.reward(&RunningState::Left(4)), ExtValue::one());
    }

    #[test]
    fn truncation_matches_infinite_model() {
        let model = running_example_explicit(4, ExtValue::one());
        let inf = RunningExample::new(ExtValue::one());
        assert_eq!(model.mdp.num_states(), 14);
        for s in model.mdp.states() {
            let name = model.mdp.name_of(s).to_string();
            let rs = RunningState::parse(&name).unwrap();
            if rs == RunningState::Col(4) {
                assert_eq!(model.mdp.enabled_actions(&s).len(), 1);
                continue;
            }
            assert_eq!(model.rewards.reward(&s), inf.reward(&rs));
            let acts: Vec<String> = model.mdp.enabled_actions(&s).iter().map(|a| model.mdp.action_label(*a).to_string()).collect();
            let want: Vec<String> = inf.enabled_actions(&rs).iter().map(|a| a.name().to_string()).collect();
            assert_eq!(acts, want);
        }
    }

    #[test]
    fn truncation_text_round_trips() {
        let model = running_example_explicit(3, ExtValue::ratio(1, 2));
        assert_eq!(ExplicitModel::parse(&model.to_text()).unwrap(), model);
    }
}
