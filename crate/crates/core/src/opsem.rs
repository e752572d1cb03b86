//! Small-step execution of pGCL and the resulting operational MDP.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::One;

use crate::extreal::ExtValue;
use crate::mdp::{Distribution, Mdp, RewardFn};
use crate::pgcl::{ProgramState, Prog, Stmt};

/// A configuration: a program still to run on a state, a final state, or
/// the absorbing sink.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Configuration {
    Running(Prog, ProgramState),
    Terminated(ProgramState),
    Sink,
}

impl Configuration {
    pub fn running(p: Prog, s: ProgramState) -> Self {
        Configuration::Running(p, s)
    }

    /// Short label: the head statement followed by `; …` when a continuation
    /// exists, plus the state.
    pub fn label(&self) -> String {
        match self {
            Configuration::Running(p, s) => {
                let head = head_of(p);
                if Arc::ptr_eq(head, p) || **head == **p {
                    format!("({}, {})", p, s)
                } else {
                    format!("({}; …, {})", head, s)
                }
            }
            Configuration::Terminated(s) => format!("(term, {})", s),
            Configuration::Sink => "bot".to_string(),
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::Running(p, s) => write!(f, "({}, {})", p, s),
            Configuration::Terminated(s) => write!(f, "(term, {})", s),
            Configuration::Sink => f.write_str("bot"),
        }
    }
}

/// Leftmost statement of a (possibly left-nested) sequence.
fn head_of(p: &Prog) -> &Prog {
    match &**p {
        Stmt::Seq(a, _) => head_of(a),
        _ => p,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpAction {
    N,
    L,
    R,
}

impl OpAction {
    pub fn name(self) -> &'static str {
        match self {
            OpAction::N => "N",
            OpAction::L => "L",
            OpAction::R => "R",
        }
    }
}

pub type Transitions = Vec<(OpAction, Distribution<Configuration>)>;

fn dirac(c: Configuration) -> Distribution<Configuration> {
    Distribution::dirac(c)
}

/// One execution step: every enabled action with its successor distribution.
///
/// Actions are listed in the order `L, R` for nondeterministic heads and
/// `N` otherwise.
pub fn step(c: &Configuration) -> Transitions {
    match c {
        Configuration::Sink | Configuration::Terminated(_) => vec![(OpAction::N, dirac(Configuration::Sink))],
        Configuration::Running(p, s) => step_running(p, s),
    }
}

fn step_running(p: &Prog, s: &ProgramState) -> Transitions {
    let n = |c| vec![(OpAction::N, dirac(c))];
    match &**p {
        Stmt::Skip | Stmt::Tick(_) => n(Configuration::Terminated(s.clone())),
        Stmt::Assign(x, e) => n(Configuration::Terminated(s.updated(x, e.eval(s)))),
        Stmt::Seq(c1, c2) => step_running(c1, s)
            .into_iter()
            .map(|(a, d)| {
                let lifted = d.map(|c| match c {
                    Configuration::Terminated(t) => Configuration::Running(c2.clone(), t.clone()),
                    Configuration::Running(c1p, t) => Configuration::Running(Stmt::seq(c1p.clone(), c2.clone()), t.clone()),
                    Configuration::Sink => unreachable!("a running program never steps to the sink"),
                });
                (a, lifted)
            })
            .collect(),
        Stmt::Prob(c1, q, c2) => {
            if c1 == c2 {
                return n(Configuration::Running(c1.clone(), s.clone()));
            }
            let d = Distribution::new([
                (Configuration::Running(c1.clone(), s.clone()), q.clone()),
                (Configuration::Running(c2.clone(), s.clone()), BigRational::one() - q),
            ])
            .expect("branch weights sum to one");
            vec![(OpAction::N, d)]
        }
        Stmt::Nondet(c1, c2) => vec![
            (OpAction::L, dirac(Configuration::Running(c1.clone(), s.clone()))),
            (OpAction::R, dirac(Configuration::Running(c2.clone(), s.clone()))),
        ],
        Stmt::Ite(b, c1, c2) => {
            let next = if b.eval(s) { c1 } else { c2 };
            n(Configuration::Running(next.clone(), s.clone()))
        }
        Stmt::While(b, body) => {
            if b.eval(s) {
                n(Configuration::Running(Stmt::seq(body.clone(), p.clone()), s.clone()))
            } else {
                n(Configuration::Terminated(s.clone()))
            }
        }
    }
}

/// The lazy operational MDP. Configurations are compared structurally, so
/// equal (program, state) pairs are the same MDP state. Step results are
/// memoized behind a mutex.
#[derive(Debug, Default)]
pub struct OperationalMdp {
    memo: Mutex<HashMap<Configuration, Arc<Transitions>>>,
}

impl OperationalMdp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn transitions(&self, c: &Configuration) -> Arc<Transitions> {
        if let Some(t) = self.memo.lock().expect("memo lock").get(c) {
            return t.clone();
        }
        let t = Arc::new(step(c));
        self.memo.lock().expect("memo lock").insert(c.clone(), t.clone());
        t
    }

    /// Number of memoized configurations.
    pub fn cached(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }
}

impl Mdp for OperationalMdp {
    type State = Configuration;
    type Action = OpAction;

    fn enabled_actions(&self, s: &Configuration) -> Vec<OpAction> {
        self.transitions(s).iter().map(|(a, _)| *a).collect()
    }

    fn successors(&self, s: &Configuration, a: &OpAction) -> Distribution<Configuration> {
        self.transitions(s)
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, d)| d.clone())
            .unwrap_or_else(|| panic!("action {} not enabled in {}", a.name(), s))
    }

    fn state_name(&self, s: &Configuration) -> String {
        s.to_string()
    }

    fn action_name(&self, a: &OpAction) -> String {
        a.name().to_string()
    }
}

/// The tick reward of a configuration: `r` when the program is `tick(r)` or
/// begins with it.
///
/// "Begins with" looks through left-nested sequences, so
/// `(tick(r); C1); C2` also earns `r`. Such programs arise whenever a
/// sequence steps inside a loop body.
pub fn rew_pgcl(c: &Configuration) -> ExtValue {
    match c {
        Configuration::Running(p, _) => match &**head_of(p) {
            Stmt::Tick(r) => r.clone(),
            _ => ExtValue::zero(),
        },
        _ => ExtValue::zero(),
    }
}

/// Reward function that adds a postexpectation on final configurations.
#[derive(Debug, Clone)]
pub struct ToRew<X> {
    post: X,
}

/// `torew(X)`: `X(τ)` on `(term, τ)`, `rew_pgcl` elsewhere.
pub fn torew<X: Fn(&ProgramState) -> ExtValue>(post: X) -> ToRew<X> {
    ToRew { post }
}

impl<X: Fn(&ProgramState) -> ExtValue> RewardFn<Configuration> for ToRew<X> {
    fn reward(&self, c: &Configuration) -> ExtValue {
        match c {
            Configuration::Terminated(t) => (self.post)(t),
            other => rew_pgcl(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentNode {
    pub id: usize,
    pub depth: usize,
    pub config: Configuration,
    pub reward: ExtValue,
    /// Whether the node's outgoing edges are part of the fragment.
    pub expanded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentEdge {
    pub from: usize,
    pub action: OpAction,
    pub prob: BigRational,
    pub to: usize,
}

/// The configuration graph reachable within a bounded number of steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub nodes: Vec<FragmentNode>,
    pub edges: Vec<FragmentEdge>,
}

/// Breadth-first exploration from `start`. Nodes at distance at most `depth`
/// are included; nodes at distance exactly `depth` are not expanded. Node ids
/// follow discovery order, which is deterministic.
pub fn dump_fragment(start: &Configuration, depth: usize) -> Fragment {
    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    nodes.push(FragmentNode {
        id: 0,
        depth: 0,
        config: start.clone(),
        reward: rew_pgcl(start),
        expanded: false,
    });
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        if nodes[i].depth >= depth {
            continue;
        }
        nodes[i].expanded = true;
        let d = nodes[i].depth;
        for (a, dist) in step(&nodes[i].config.clone()) {
            for (c, p) in dist.iter() {
                let j = match index.get(c) {
                    Some(&j) => j,
                    None => {
                        let j = nodes.len();
                        index.insert(c.clone(), j);
                        nodes.push(FragmentNode {
                            id: j,
                            depth: d + 1,
                            config: c.clone(),
                            reward: rew_pgcl(c),
                            expanded: false,
                        });
                        queue.push_back(j);
                        j
                    }
                };
                edges.push(FragmentEdge {
                    from: i,
                    action: a,
                    prob: p.clone(),
                    to: j,
                });
            }
        }
    }
    Fragment { nodes, edges }
}

impl Fragment {
    /// Line-oriented dump:
    ///
    /// ```text
    /// node <id> depth=<d> rew=<r> expanded=<bool> <label>
    /// edge <from> <action> <prob> <to>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&format!(
                "node {} depth={} rew={} expanded={} {}\n",
                n.id,
                n.depth,
                n.reward,
                n.expanded,
                n.config.label()
            ));
        }
        for e in &self.edges {
            out.push_str(&format!("edge {} {} {} {}\n", e.from, e.action.name(), e.prob, e.to));
        }
        out
    }

    pub fn find(&self, c: &Configuration) -> Option<usize> {
        self.nodes.iter().position(|n| &n.config == c)
    }

    /// Outgoing edges of a node as `(action, prob, target)`.
    pub fn out_edges(&self, id: usize) -> Vec<(OpAction, BigRational, usize)> {
        self.edges
            .iter()
            .filter(|e| e.from == id)
            .map(|e| (e.action, e.prob.clone(), e.to))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgcl::{example_program, parse_program, AExpr};

    fn st(pairs: &[(&str, i64)]) -> ProgramState {
        pairs
            .iter()
            .map(|(x, v)| (x.to_string(), BigRational::from_integer((*v).into())))
            .collect()
    }

    fn run(src: &str) -> Configuration {
        Configuration::Running(parse_program(src).unwrap(), ProgramState::new())
    }

    #[test]
    fn skip_terminates() {
        let t = step(&run("skip"));
        assert_eq!(t, vec![(OpAction::N, dirac(Configuration::Terminated(ProgramState::new())))]);
    }

    #[test]
    fn final_configurations() {
        assert_eq!(step(&Configuration::Sink), vec![(OpAction::N, dirac(Configuration::Sink))]);
        assert_eq!(
            step(&Configuration::Terminated(ProgramState::new())),
            vec![(OpAction::N, dirac(Configuration::Sink))]
        );
    }

    #[test]
    fn probabilistic_choice() {
        let t = step(&run("{ x := 1 } [1/3] { x := 2 }"));
        assert_eq!(t.len(), 1);
        let d = &t[0].1;
        assert_eq!(d.len(), 2);
        assert_eq!(d.prob(&run("x := 1")), BigRational::new(1.into(), 3.into()));
        assert_eq!(d.prob(&run("x := 2")), BigRational::new(2.into(), 3.into()));
        let same = step(&run("{ x := 1 } [1/3] { x := 1 }"));
        assert_eq!(same, vec![(OpAction::N, dirac(run("x := 1")))]);
        let degenerate = step(&run("{ x := 1 } [1] { x := 2 }"));
        assert_eq!(degenerate[0].1.len(), 1);
    }

    #[test]
    fn nondeterminism_enables_l_and_r() {
        let m = OperationalMdp::new();
        assert_eq!(m.enabled_actions(&run("{ skip } [] { tick(1) }; skip")), vec![OpAction::L, OpAction::R]);
        assert_eq!(m.enabled_actions(&run("skip; { skip } [] { tick(1) }")), vec![OpAction::N]);
    }

    #[test]
    fn sequencing() {
        let t = step(&run("x := 1; y := x + 1"));
        let expected = Configuration::Running(
            Stmt::assign("y", AExpr::Add(Box::new(AExpr::var("x")), Box::new(AExpr::lit(1)))),
            st(&[("x", 1)]),
        );
        assert_eq!(t, vec![(OpAction::N, dirac(expected))]);
        let inner = step(&run("{ { skip } [] { skip }; x := 1 }; y := 1"));
        let want = run("{ skip; x := 1 }; y := 1");
        assert_eq!(inner[0].1.prob(&want), BigRational::one());
    }

    #[test]
    fn loops_and_conditionals() {
        let t = step(&Configuration::Running(parse_program("while (x < 2) { x := x + 1 }").unwrap(), st(&[("x", 2)])));
        assert_eq!(t[0].1.prob(&Configuration::Terminated(st(&[("x", 2)]))), BigRational::one());
        let t = step(&run("if (x = 0) { x := 5 } else { skip }"));
        assert_eq!(t[0].1.prob(&run("x := 5")), BigRational::one());
    }

    #[test]
    fn tick_rewards() {
        let r = ExtValue::ratio(3, 2);
        assert_eq!(rew_pgcl(&run("tick(3/2)")), r);
        assert_eq!(rew_pgcl(&run("tick(3/2); skip")), r);
        assert_eq!(rew_pgcl(&run("{ tick(3/2); skip }; skip")), r);
        assert_eq!(rew_pgcl(&run("skip; tick(3/2)")), ExtValue::zero());
        assert_eq!(rew_pgcl(&run("skip")), ExtValue::zero());
        assert_eq!(rew_pgcl(&Configuration::Sink), ExtValue::zero());
    }

    #[test]
    fn torew_reads_post_on_final_states() {
        let y = |s: &ProgramState| ExtValue::finite(s.get("y")).unwrap();
        let rew = torew(y);
        assert_eq!(rew.reward(&Configuration::Terminated(st(&[("y", 4)]))), ExtValue::from(4u64));
        assert_eq!(rew.reward(&run("tick(2)")), ExtValue::from(2u64));
        assert_eq!(rew.reward(&Configuration::Sink), ExtValue::zero());
        let zero = torew(|_: &ProgramState| ExtValue::zero());
        assert_eq!(zero.reward(&run("tick(2); skip")), rew_pgcl(&run("tick(2); skip")));
    }

    #[test]
    fn terminated_reaches_two_states() {
        let f = dump_fragment(&Configuration::Terminated(st(&[("x", 1)])), 10);
        assert_eq!(f.nodes.len(), 2);
    }

    #[test]
    fn example_fragment_shape() {
        let c = Configuration::Running(example_program(ExtValue::one()), ProgramState::new());
        let f = dump_fragment(&c, 7);
        let sink = f.find(&Configuration::Sink).expect("sink within 7 steps");
        assert_eq!(f.nodes[sink].depth, 7);
        let one_tick: Vec<_> = f.nodes.iter().filter(|n| n.reward == ExtValue::one()).collect();
        // first loop iteration at depth 2, second at depth 6
        let depths: Vec<usize> = one_tick.iter().map(|n| n.depth).collect();
        assert_eq!(depths, vec![2, 6]);
    }

    #[test]
    fn memo_is_consistent() {
        let m = OperationalMdp::new();
        let c = Configuration::Running(example_program(ExtValue::one()), ProgramState::new());
        let a = m.successors(&c, &OpAction::N);
        let b = m.successors(&c, &OpAction::N);
        assert_eq!(a, b);
        assert_eq!(m.cached(), 1);
    }
}
