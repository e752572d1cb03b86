//! Bellman operators, Kleene iteration, Park induction and min-scheduler
//! extraction.
//!
//! Kleene iterates are exact: `Phi^k(0)` at a query state only depends on the
//! states reachable in fewer than `k` steps, so iteration explores that ball
//! and evaluates each state only as far as its distance allows. When the
//! explored region turns out to be closed under successors, iteration sweeps
//! the whole region instead and can detect exact convergence.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;

use num_rational::BigRational;
use thiserror::Error;

use crate::extreal::ExtValue;
use crate::mdp::{Mdp, MemorylessScheduler, ModelParseError, RewardFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellmanMode {
    Min,
    Max,
}

impl BellmanMode {
    pub fn name(self) -> &'static str {
        match self {
            BellmanMode::Min => "min",
            BellmanMode::Max => "max",
        }
    }

    fn pick(self, a: ExtValue, b: ExtValue) -> ExtValue {
        match self {
            BellmanMode::Min => a.min_of(b),
            BellmanMode::Max => a.max_of(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixpointError {
    #[error("exploration exceeded the cap of {cap} states")]
    ResourceCap { cap: usize },
    #[error("domain is not closed under successors: {state} reaches {successor}")]
    DomainNotClosed { state: String, successor: String },
    #[error("divergence threshold must be finite")]
    InfiniteThreshold,
}

/// A value function with implicit default 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueFunction<S: Eq + Hash> {
    map: HashMap<S, ExtValue>,
}

impl<S: Eq + Hash> Default for ValueFunction<S> {
    fn default() -> Self {
        ValueFunction { map: HashMap::new() }
    }
}

impl<S: Eq + Hash + Clone> ValueFunction<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &S) -> ExtValue {
        self.map.get(s).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, s: S, v: ExtValue) {
        if v.is_zero() {
            self.map.remove(&s);
        } else {
            self.map.insert(s, v);
        }
    }

    /// Explicitly listed entries (zeros are never stored).
    pub fn iter(&self) -> impl Iterator<Item = (&S, &ExtValue)> {
        self.map.iter()
    }

    /// Pointwise `self <= other` over `domain`.
    pub fn leq_on<'a>(&self, other: &Self, domain: impl IntoIterator<Item = &'a S>) -> bool
    where
        S: 'a,
    {
        domain.into_iter().all(|s| self.get(s) <= other.get(s))
    }

    /// Pointwise `self <= other` everywhere.
    pub fn leq(&self, other: &Self) -> bool {
        self.map.iter().all(|(s, v)| *v <= other.get(s))
    }

    /// Renders `name value` lines in the order given by `order`.
    pub fn to_text<'a>(&self, order: impl IntoIterator<Item = &'a S>, name: impl Fn(&S) -> String) -> String
    where
        S: 'a,
    {
        let mut out = String::new();
        for s in order {
            let _ = writeln!(out, "{} {}", name(s), self.get(s));
        }
        out
    }
}

impl<S: Eq + Hash + Clone> FromIterator<(S, ExtValue)> for ValueFunction<S> {
    fn from_iter<I: IntoIterator<Item = (S, ExtValue)>>(iter: I) -> Self {
        let mut v = ValueFunction::zero();
        for (s, x) in iter {
            v.set(s, x);
        }
        v
    }
}

/// Parses `name value` lines (value `p/q`, decimal, integer or `inf`). `#`
/// starts a comment. Duplicate names are rejected.
pub fn parse_value_table(text: &str) -> Result<Vec<(String, ExtValue)>, ModelParseError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| ModelParseError {
            line: Some(i + 1),
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err("expected `state value`".into()));
        }
        let v: ExtValue = fields[1].parse().map_err(|e| err(format!("{}", e)))?;
        if !seen.insert(fields[0].to_string()) {
            return Err(err(format!("duplicate entry for `{}`", fields[0])));
        }
        out.push((fields[0].to_string(), v));
    }
    Ok(out)
}

/// `rew(s) + opt_a sum_t P(s,a,t) * v(t)` together with the index (in
/// enabled-action order) of the first optimal action.
fn bellman_at<M, R>(mdp: &M, rew: &R, mode: BellmanMode, v: impl Fn(&M::State) -> ExtValue, s: &M::State) -> (ExtValue, usize)
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    let mut best: Option<(ExtValue, usize)> = None;
    for (i, a) in mdp.enabled_actions(s).iter().enumerate() {
        let x = mdp.successors(s, a).expect(&v);
        best = Some(match best {
            None => (x, i),
            Some((b, j)) => {
                let better = match mode {
                    BellmanMode::Min => x < b,
                    BellmanMode::Max => x > b,
                };
                if better {
                    (x, i)
                } else {
                    (b, j)
                }
            }
        });
    }
    let (x, i) = best.expect("every state has an enabled action");
    (rew.reward(s) + x, i)
}

/// One application of the Bellman operator on `frontier`; other states keep
/// their value from `v`.
pub fn bellman_apply<'a, M, R>(
    mdp: &M,
    rew: &R,
    mode: BellmanMode,
    v: &ValueFunction<M::State>,
    frontier: impl IntoIterator<Item = &'a M::State>,
) -> ValueFunction<M::State>
where
    M: Mdp,
    M::State: 'a,
    R: RewardFn<M::State> + ?Sized,
{
    let mut out = v.clone();
    for s in frontier {
        let (x, _) = bellman_at(mdp, rew, mode, |t| v.get(t), s);
        out.set(s.clone(), x);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KleeneOptions {
    /// Maximum number of distinct states to explore.
    pub max_states: usize,
}

impl Default for KleeneOptions {
    fn default() -> Self {
        KleeneOptions { max_states: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceStatus {
    /// `Phi^{k+1}(0) = Phi^k(0)` on a successor-closed region containing the
    /// query states, so `Phi^k(0)` is the least fixed point there.
    ConvergedExact { at: usize },
    /// The last iterate is an exact lower bound with unknown gap.
    LowerBound,
}

#[derive(Debug, Clone)]
pub struct KleeneRun<S: Eq + Hash> {
    /// `iterates[k]` is `Phi^k(0)` restricted to the query states, for
    /// `k = 0..=steps`.
    pub iterates: Vec<ValueFunction<S>>,
    pub status: ConvergenceStatus,
    /// Number of distinct states explored.
    pub explored: usize,
    /// Whether the explored region is closed under successors.
    pub closed: bool,
    /// On a closed region: `Phi^steps(0)` on every explored state.
    pub region: Option<ValueFunction<S>>,
}

impl<S: Eq + Hash + Clone> KleeneRun<S> {
    pub fn last(&self) -> &ValueFunction<S> {
        self.iterates.last().expect("iterates include Phi^0")
    }
}

struct Explored<S> {
    states: Vec<S>,
    depth: Vec<usize>,
    /// Per expanded state: per enabled action, (successor index, probability).
    adj: Vec<Option<Vec<Vec<(usize, BigRational)>>>>,
    rew: Vec<ExtValue>,
    closed: bool,
}

fn explore<M, R>(mdp: &M, rew: &R, start: &[M::State], max_depth: usize, cap: usize) -> Result<Explored<M::State>, FixpointError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    let mut index: HashMap<M::State, usize> = HashMap::new();
    let mut ex = Explored {
        states: Vec::new(),
        depth: Vec::new(),
        adj: Vec::new(),
        rew: Vec::new(),
        closed: true,
    };
    let mut queue = VecDeque::new();
    for s in start {
        if !index.contains_key(s) {
            index.insert(s.clone(), ex.states.len());
            queue.push_back(ex.states.len());
            ex.states.push(s.clone());
            ex.depth.push(0);
            ex.adj.push(None);
            ex.rew.push(rew.reward(s));
        }
    }
    while let Some(i) = queue.pop_front() {
        let d = ex.depth[i];
        let s = ex.states[i].clone();
        let mut per_action = Vec::new();
        for a in mdp.enabled_actions(&s) {
            let mut succ = Vec::new();
            for (t, p) in mdp.successors(&s, &a).iter() {
                let j = match index.get(t) {
                    Some(&j) => j,
                    None if d + 1 > max_depth => {
                        ex.closed = false;
                        continue;
                    }
                    None => {
                        if ex.states.len() >= cap {
                            return Err(FixpointError::ResourceCap { cap });
                        }
                        let j = ex.states.len();
                        index.insert(t.clone(), j);
                        ex.states.push(t.clone());
                        ex.depth.push(d + 1);
                        ex.adj.push(None);
                        ex.rew.push(rew.reward(t));
                        queue.push_back(j);
                        j
                    }
                };
                succ.push((j, p.clone()));
            }
            per_action.push(succ);
        }
        // states on the boundary are only evaluated by the first sweep,
        // which never reads successors
        if d < max_depth {
            ex.adj[i] = Some(per_action);
        }
    }
    Ok(ex)
}

fn eval_state(ex: &Explored<impl Clone>, mode: BellmanMode, vals: &[ExtValue], i: usize) -> ExtValue {
    let Some(adj) = &ex.adj[i] else {
        // boundary state at its first (and only) sweep
        return ex.rew[i].clone();
    };
    let mut best: Option<ExtValue> = None;
    for succ in adj {
        let x: ExtValue = succ.iter().map(|(j, p)| p * &vals[*j]).sum();
        best = Some(match best {
            None => x,
            Some(b) => mode.pick(b, x),
        });
    }
    &ex.rew[i] + &best.expect("nonempty action list")
}

/// The Kleene iterates `Phi^0(0), ..., Phi^steps(0)` at the `start` states.
pub fn kleene_iterate<M, R>(
    mdp: &M,
    rew: &R,
    mode: BellmanMode,
    start: &[M::State],
    steps: usize,
    opts: KleeneOptions,
) -> Result<KleeneRun<M::State>, FixpointError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    let mut iterates = vec![start.iter().map(|s| (s.clone(), ExtValue::zero())).collect()];
    if steps == 0 {
        return Ok(KleeneRun {
            iterates,
            status: ConvergenceStatus::LowerBound,
            explored: 0,
            closed: false,
            region: None,
        });
    }
    let ex = explore(mdp, rew, start, steps - 1, opts.max_states)?;
    let n = ex.states.len();
    // query states are interned first
    let head = &ex.states[..ex.states.len().min(start.len())];
    let start_idx: Vec<usize> = start
        .iter()
        .map(|s| head.iter().position(|t| t == s).expect("start states explored first"))
        .collect();
    let snapshot = |vals: &[ExtValue]| -> ValueFunction<M::State> {
        start_idx.iter().map(|&i| (ex.states[i].clone(), vals[i].clone())).collect()
    };

    let mut vals = vec![ExtValue::zero(); n];
    let mut status = ConvergenceStatus::LowerBound;
    for j in 1..=steps {
        if let ConvergenceStatus::ConvergedExact { .. } = status {
            iterates.push(iterates.last().expect("nonempty").clone());
            continue;
        }
        let next: Vec<ExtValue> = (0..n)
            .map(|i| {
                if ex.closed || ex.depth[i] + j <= steps {
                    eval_state(&ex, mode, &vals, i)
                } else {
                    vals[i].clone()
                }
            })
            .collect();
        if ex.closed && next == vals {
            status = ConvergenceStatus::ConvergedExact { at: j - 1 };
        }
        vals = next;
        iterates.push(snapshot(&vals));
    }
    let region = ex
        .closed
        .then(|| ex.states.iter().cloned().zip(vals.iter().cloned()).collect());
    Ok(KleeneRun {
        iterates,
        status,
        explored: n,
        closed: ex.closed,
        region,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParkOutcome<S> {
    /// `Phi(candidate) <= candidate` on the whole domain.
    Certificate,
    /// The first domain state (in domain order) where `Phi` goes up.
    Counterexample {
        state: S,
        applied: ExtValue,
        candidate: ExtValue,
    },
}

fn check_closed<M: Mdp>(mdp: &M, domain: &[M::State]) -> Result<(), FixpointError> {
    let set: HashSet<&M::State> = domain.iter().collect();
    for s in domain {
        for a in mdp.enabled_actions(s) {
            for t in mdp.successors(s, &a).support() {
                if !set.contains(t) {
                    return Err(FixpointError::DomainNotClosed {
                        state: mdp.state_name(s),
                        successor: mdp.state_name(t),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Park induction: if `Phi(candidate) <= candidate` on a successor-closed
/// domain, then `lfp Phi <= candidate` there.
pub fn park_check<M, R>(
    mdp: &M,
    rew: &R,
    mode: BellmanMode,
    candidate: &ValueFunction<M::State>,
    domain: &[M::State],
) -> Result<ParkOutcome<M::State>, FixpointError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    check_closed(mdp, domain)?;
    for s in domain {
        let (applied, _) = bellman_at(mdp, rew, mode, |t| candidate.get(t), s);
        let cand = candidate.get(s);
        if applied > cand {
            return Ok(ParkOutcome::Counterexample {
                state: s.clone(),
                applied,
                candidate: cand,
            });
        }
    }
    Ok(ParkOutcome::Certificate)
}

/// Memoryless scheduler choosing, in each domain state, the first action
/// (in enabled-action order) minimizing `rew(s) + sum P * v`.
pub fn extract_min_scheduler<M, R>(
    mdp: &M,
    rew: &R,
    v: &ValueFunction<M::State>,
    domain: &[M::State],
) -> Result<MemorylessScheduler<M::State, M::Action>, FixpointError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    check_closed(mdp, domain)?;
    let mut table = HashMap::new();
    for s in domain {
        let (_, i) = bellman_at(mdp, rew, BellmanMode::Min, |t| v.get(t), s);
        table.insert(s.clone(), mdp.enabled_actions(s)[i].clone());
    }
    Ok(MemorylessScheduler::new(table))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivergenceVerdict {
    /// `Phi^step(0)(s) = value > threshold`. A one-sided witness that the
    /// optimal expected reward exceeds the threshold.
    ExceedsThreshold { step: usize, value: ExtValue },
    /// No iterate up to the cap passed the threshold. This says nothing
    /// about finiteness.
    BelowThresholdAtCap { cap: usize, last: ExtValue },
}

/// Kleene iteration at `s` until an iterate passes `threshold` or `cap`
/// steps are done. The horizon doubles between runs, so a crossing at step
/// `k` costs about as much as a single run to `2k`.
pub fn divergence_probe<M, R>(
    mdp: &M,
    rew: &R,
    mode: BellmanMode,
    s: &M::State,
    threshold: &ExtValue,
    cap: usize,
    opts: KleeneOptions,
) -> Result<DivergenceVerdict, FixpointError>
where
    M: Mdp,
    R: RewardFn<M::State> + ?Sized,
{
    if threshold.is_infinite() {
        return Err(FixpointError::InfiniteThreshold);
    }
    let mut horizon = cap.min(64);
    loop {
        let run = kleene_iterate(mdp, rew, mode, std::slice::from_ref(s), horizon, opts)?;
        for (k, it) in run.iterates.iter().enumerate() {
            let v = it.get(s);
            if v > *threshold {
                return Ok(DivergenceVerdict::ExceedsThreshold { step: k, value: v });
            }
        }
        if horizon >= cap {
            return Ok(DivergenceVerdict::BelowThresholdAtCap {
                cap,
                last: run.last().get(s),
            });
        }
        horizon = (2 * horizon).min(cap);
    }
}
