//! Finite MDPs given as transition tables, and their text format.
//!
//! ```text
//! # comments start with '#'
//! states:
//!   s0 s1 goal
//! actions:
//!   a b
//! transitions:
//!   s0 a 1/2 s1
//!   s0 a 1/2 goal
//!   s0 b 1 s0
//!   s1 a 1 goal
//!   goal a 1 goal
//! rewards:
//!   goal 1
//! ```
//!
//! Section headers are `states:`, `actions:`, `transitions:` and `rewards:`,
//! each on its own line and in this order (`rewards:` may be omitted).
//! Names in `states:`/`actions:` are whitespace-separated and may span lines.
//! A transition record is `state action prob state` with `prob` an integer,
//! `p/q` or decimal. A reward record is `state value` with `value` a
//! nonnegative rational or `inf`; unlisted states earn 0. Every state needs at
//! least one action, and each `(state, action)` pair must sum to exactly 1.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use num_rational::BigRational;
use thiserror::Error;

use super::{Distribution, Mdp, MdpError, TableReward};
use crate::extreal::{parse_rational, ExtValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ModelParseError {
    pub line: Option<usize>,
    pub reason: String,
}

impl ModelParseError {
    fn at(line: usize, reason: impl Into<String>) -> Self {
        ModelParseError {
            line: Some(line),
            reason: reason.into(),
        }
    }

    fn global(reason: impl Into<String>) -> Self {
        ModelParseError {
            line: None,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ModelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {}: {}", l, self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitMdp {
    state_names: Vec<String>,
    action_names: Vec<String>,
    state_index: HashMap<String, StateId>,
    action_index: HashMap<String, ActionId>,
    /// Per state, enabled actions in declaration order.
    table: Vec<Vec<(ActionId, Distribution<StateId>)>>,
}

/// An explicit MDP together with its reward table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitModel {
    pub mdp: ExplicitMdp,
    pub rewards: TableReward<StateId>,
}

impl ExplicitMdp {
    /// Builds an MDP from index-based transition records.
    pub fn from_parts(
        state_names: Vec<String>,
        action_names: Vec<String>,
        transitions: impl IntoIterator<Item = (StateId, ActionId, BigRational, StateId)>,
    ) -> Result<Self, ModelParseError> {
        let state_index = index_names(&state_names, "state")?;
        let action_index = index_names(&action_names, "action")?;
        let mut raw: Vec<Vec<Vec<(StateId, BigRational)>>> =
            vec![vec![Vec::new(); action_names.len()]; state_names.len()];
        for (s, a, p, t) in transitions {
            if s.0 >= state_names.len() || t.0 >= state_names.len() || a.0 >= action_names.len() {
                return Err(ModelParseError::global("transition refers to an unknown index"));
            }
            raw[s.0][a.0].push((t, p));
        }
        let mut table = Vec::with_capacity(state_names.len());
        for (si, per_action) in raw.into_iter().enumerate() {
            let mut enabled = Vec::new();
            for (ai, entries) in per_action.into_iter().enumerate() {
                if entries.is_empty() {
                    continue;
                }
                let d = Distribution::new(entries).map_err(|e| {
                    ModelParseError::global(format!(
                        "state {} action {}: {}",
                        state_names[si], action_names[ai], e
                    ))
                })?;
                enabled.push((ActionId(ai), d));
            }
            if enabled.is_empty() {
                return Err(ModelParseError::global(format!(
                    "state {} has no enabled action",
                    state_names[si]
                )));
            }
            table.push(enabled);
        }
        Ok(ExplicitMdp {
            state_names,
            action_names,
            state_index,
            action_index,
            table,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_names.len()).map(StateId)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn name_of(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn action_label(&self, a: ActionId) -> &str {
        &self.action_names[a.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    /// Checks that `a` is enabled in `s`.
    pub fn check_enabled(&self, s: StateId, a: ActionId) -> Result<(), MdpError> {
        if self.table[s.0].iter().any(|(b, _)| *b == a) {
            Ok(())
        } else {
            Err(MdpError::DisabledAction {
                state: self.state_names[s.0].clone(),
                action: self.action_names[a.0].clone(),
            })
        }
    }
}

fn index_names<T: From<usize> + Copy>(
    names: &[String],
    what: &str,
) -> Result<HashMap<String, T>, ModelParseError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), T::from(i)).is_some() {
            return Err(ModelParseError::global(format!("duplicate {} `{}`", what, n)));
        }
    }
    Ok(index)
}

impl From<usize> for StateId {
    fn from(i: usize) -> Self {
        StateId(i)
    }
}

impl From<usize> for ActionId {
    fn from(i: usize) -> Self {
        ActionId(i)
    }
}

impl Mdp for ExplicitMdp {
    type State = StateId;
    type Action = ActionId;

    fn enabled_actions(&self, s: &StateId) -> Vec<ActionId> {
        self.table[s.0].iter().map(|(a, _)| *a).collect()
    }

    fn successors(&self, s: &StateId, a: &ActionId) -> Distribution<StateId> {
        self.table[s.0]
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, d)| d.clone())
            .unwrap_or_else(|| panic!("action {} not enabled in {}", self.action_names[a.0], self.state_names[s.0]))
    }

    fn state_name(&self, s: &StateId) -> String {
        self.state_names[s.0].clone()
    }

    fn action_name(&self, a: &ActionId) -> String {
        self.action_names[a.0].clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    None,
    States,
    Actions,
    Transitions,
    Rewards,
}

impl ExplicitModel {
    pub fn parse(text: &str) -> Result<Self, ModelParseError> {
        let mut section = Section::None;
        let mut states: Vec<String> = Vec::new();
        let mut actions: Vec<String> = Vec::new();
        let mut transitions: Vec<(usize, Vec<String>)> = Vec::new();
        let mut rewards: Vec<(usize, Vec<String>)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let next = match line {
                "states:" => Some(Section::States),
                "actions:" => Some(Section::Actions),
                "transitions:" => Some(Section::Transitions),
                "rewards:" => Some(Section::Rewards),
                _ => None,
            };
            if let Some(next) = next {
                if next <= section {
                    return Err(ModelParseError::at(lineno, format!("section `{}` out of order or repeated", line)));
                }
                section = next;
                continue;
            }
            let fields: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            match section {
                Section::None => {
                    return Err(ModelParseError::at(lineno, "content before the `states:` section"))
                }
                Section::States => states.extend(fields),
                Section::Actions => actions.extend(fields),
                Section::Transitions => transitions.push((lineno, fields)),
                Section::Rewards => rewards.push((lineno, fields)),
            }
        }
        if states.is_empty() {
            return Err(ModelParseError::global("missing or empty `states:` section"));
        }
        if actions.is_empty() {
            return Err(ModelParseError::global("missing or empty `actions:` section"));
        }

        let state_index: HashMap<&str, usize> =
            states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let action_index: HashMap<&str, usize> =
            actions.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup_state = |name: &str, lineno: usize| {
            state_index
                .get(name)
                .copied()
                .map(StateId)
                .ok_or_else(|| ModelParseError::at(lineno, format!("undeclared state `{}`", name)))
        };

        let mut records = Vec::with_capacity(transitions.len());
        let mut first_line: HashMap<(usize, usize), usize> = HashMap::new();
        for (lineno, f) in &transitions {
            let lineno = *lineno;
            if f.len() != 4 {
                return Err(ModelParseError::at(lineno, "expected `state action prob state`"));
            }
            let s = lookup_state(&f[0], lineno)?;
            let a = action_index
                .get(f[1].as_str())
                .copied()
                .map(ActionId)
                .ok_or_else(|| ModelParseError::at(lineno, format!("undeclared action `{}`", f[1])))?;
            let p = parse_rational(&f[2])
                .ok_or_else(|| ModelParseError::at(lineno, format!("bad probability `{}`", f[2])))?;
            if p < BigRational::from_integer(0.into()) || p > BigRational::from_integer(1.into()) {
                return Err(ModelParseError::at(lineno, format!("probability {} outside [0, 1]", p)));
            }
            let t = lookup_state(&f[3], lineno)?;
            first_line.entry((s.0, a.0)).or_insert(lineno);
            records.push((s, a, p, t));
        }

        let mut reward_table = TableReward::new();
        let mut seen = HashMap::new();
        for (lineno, f) in &rewards {
            let lineno = *lineno;
            if f.len() != 2 {
                return Err(ModelParseError::at(lineno, "expected `state value`"));
            }
            let s = lookup_state(&f[0], lineno)?;
            if seen.insert(s, lineno).is_some() {
                return Err(ModelParseError::at(lineno, format!("duplicate reward for `{}`", f[0])));
            }
            let v: ExtValue = f[1]
                .parse()
                .map_err(|e| ModelParseError::at(lineno, format!("{}", e)))?;
            reward_table.set(s, v);
        }

        let mdp = ExplicitMdp::from_parts(states.clone(), actions.clone(), records).map_err(|mut e| {
            // attach the line of the offending state/action where we can
            if e.line.is_none() {
                for ((s, a), l) in &first_line {
                    let tag = format!("state {} action {}:", states[*s], actions[*a]);
                    if e.reason.starts_with(&tag) {
                        e.line = Some(*l);
                    }
                }
            }
            e
        })?;
        Ok(ExplicitModel {
            mdp,
            rewards: reward_table,
        })
    }

    /// Renders the model in the text format accepted by [`ExplicitModel::parse`].
    pub fn to_text(&self) -> String {
        let mdp = &self.mdp;
        let mut out = String::new();
        out.push_str("states:\n");
        for name in &mdp.state_names {
            let _ = writeln!(out, "  {}", name);
        }
        out.push_str("actions:\n");
        for name in &mdp.action_names {
            let _ = writeln!(out, "  {}", name);
        }
        out.push_str("transitions:\n");
        for s in mdp.states() {
            for (a, d) in &mdp.table[s.0] {
                for (t, p) in d.iter() {
                    let _ = writeln!(out, "  {} {} {} {}", mdp.name_of(s), mdp.action_label(*a), p, mdp.name_of(*t));
                }
            }
        }
        out.push_str("rewards:\n");
        for s in mdp.states() {
            let r = super::RewardFn::reward(&self.rewards, &s);
            if !r.is_zero() {
                let _ = writeln!(out, "  {} {}", mdp.name_of(s), r);
            }
        }
        out
    }
}
