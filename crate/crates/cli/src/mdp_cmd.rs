//! `mdp solve`, `mdp reach` and `mdp generate`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rewlfp::fixpoint::parse_value_table;
use rewlfp::mdp::builtin::{running_example_explicit, NoOptSched, NoOptState, RunningExample, RunningState};
use rewlfp::mdp::{ExplicitModel, StateId, TableReward};
use rewlfp::reachability::ReachState;
use rewlfp::{
    kleene_iterate, park_check, reach_probability, BellmanMode, ConvergenceStatus, ExtValue, Mdp,
    ParkOutcome, RewardFn, TargetSet, ValueFunction,
};

use crate::error::CliError;
use crate::report::{read_file, verdict, Render, Report, Section};
use crate::Common;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// The column-structured running example; lazy unless `--columns` is set.
    RunningExample,
    /// The ladder where no scheduler attains the maximal reward.
    NoOptSched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

impl ModeArg {
    fn bellman(self) -> BellmanMode {
        match self {
            ModeArg::Min => BellmanMode::Min,
            ModeArg::Max => BellmanMode::Max,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Explicit model file.
    #[arg(conflicts_with = "builtin", required_unless_present = "builtin")]
    pub model: Option<PathBuf>,
    /// Use a generated model instead of a file.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Truncate the running example to this many columns (explicit model).
    #[arg(long, requires = "builtin")]
    pub columns: Option<u64>,
    /// Reward of the running example's left branch.
    #[arg(long, default_value = "1")]
    pub r: String,
    /// Replace the model's rewards by a `state value` table.
    #[arg(long)]
    pub rewards: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "min")]
    pub mode: ModeArg,
    /// Queried states (default: the initial state).
    #[arg(long = "state")]
    pub states: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Report `exceeds-threshold` once an iterate passes this value.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Park-check this value table; its states form the domain.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReachArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Target state patterns; `*` matches any run of characters.
    #[arg(long = "target", required = true)]
    pub targets: Vec<String>,
    #[arg(long, value_enum, default_value = "max")]
    pub mode: ModeArg,
    #[arg(long = "state")]
    pub states: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Park-check this value table over base states; the fresh sink is added.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "running-example")]
    pub builtin: Builtin,
    #[arg(long)]
    pub columns: u64,
    #[arg(long, default_value = "1")]
    pub r: String,
}

/// Glob matching with `*` only.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(i) => rest = &rest[i + mid.len()..],
            None => return false,
        }
    }
    true
}

/// A loaded model with its state-name parser and default query state.
struct Loaded<M: Mdp, R> {
    mdp: M,
    rew: R,
    parse: Box<dyn Fn(&str) -> Option<M::State>>,
    /// Detached from the model borrow so target predicates can own it.
    name: Arc<dyn Fn(&M::State) -> String + Send + Sync>,
    initial: M::State,
}

enum AnyModel {
    Explicit(Loaded<rewlfp::ExplicitMdp, TableReward<StateId>>),
    Running(Loaded<RunningExample, RunningExample>),
    Ladder(Loaded<NoOptSched, NoOptSched>),
}

fn explicit(model: ExplicitModel) -> Result<AnyModel, CliError> {
    let initial = model.mdp.states().next().ok_or_else(|| CliError::Input("model has no states".into()))?;
    let mdp = model.mdp;
    let names = Arc::new(mdp.clone());
    let lookup = names.clone();
    Ok(AnyModel::Explicit(Loaded {
        mdp,
        rew: model.rewards,
        parse: Box::new(move |n| lookup.state_id(n)),
        name: Arc::new(move |s: &StateId| names.name_of(*s).to_string()),
        initial,
    }))
}

fn load(args: &ModelArgs, report: &mut Report) -> Result<AnyModel, CliError> {
    let r: ExtValue = args.r.parse().map_err(|e| CliError::input("--r", e))?;
    let mut model = match (&args.model, args.builtin) {
        (Some(path), _) => {
            let (text, bytes) = read_file(path)?;
            report.input_bytes("model", &path.display().to_string(), &bytes);
            let m = ExplicitModel::parse(&text).map_err(|e| CliError::input(path.display(), e))?;
            explicit(m)?
        }
        (None, Some(Builtin::RunningExample)) => {
            let desc = match args.columns {
                Some(k) => format!("builtin:running-example:r={}:columns={}", r, k),
                None => format!("builtin:running-example:r={}", r),
            };
            report.input_bytes("model", &desc, desc.as_bytes());
            match args.columns {
                Some(k) => explicit(running_example_explicit(k, r))?,
                None => AnyModel::Running(Loaded {
                    mdp: RunningExample::new(r.clone()),
                    rew: RunningExample::new(r),
                    parse: Box::new(RunningState::parse),
                    name: Arc::new(|s: &RunningState| s.name()),
                    initial: RunningState::Col(0),
                }),
            }
        }
        (None, Some(Builtin::NoOptSched)) => {
            let desc = "builtin:no-opt-sched";
            report.input_bytes("model", desc, desc.as_bytes());
            AnyModel::Ladder(Loaded {
                mdp: NoOptSched,
                rew: NoOptSched,
                parse: Box::new(NoOptState::parse),
                name: Arc::new(|s: &NoOptState| s.name()),
                initial: NoOptState::Climb(0),
            })
        }
        (None, None) => return Err(CliError::Input("give a model file or --builtin".into())),
    };
    if let Some(path) = &args.rewards {
        let AnyModel::Explicit(m) = &mut model else {
            return Err(CliError::Input("--rewards needs an explicit model".into()));
        };
        let (text, bytes) = read_file(path)?;
        report.input_bytes("rewards", &path.display().to_string(), &bytes);
        let mut table = TableReward::new();
        for (name, v) in parse_value_table(&text).map_err(|e| CliError::input(path.display(), e))? {
            let s = (m.parse)(&name).ok_or_else(|| CliError::input(path.display(), format!("unknown state {}", name)))?;
            table.set(s, v);
        }
        m.rew = table;
    }
    Ok(model)
}

fn query_states<M: Mdp, R>(m: &Loaded<M, R>, names: &[String]) -> Result<Vec<M::State>, CliError> {
    if names.is_empty() {
        return Ok(vec![m.initial.clone()]);
    }
    names
        .iter()
        .map(|n| (m.parse)(n).ok_or_else(|| CliError::Input(format!("unknown state {}", n))))
        .collect()
}

fn load_value_table<M: Mdp, R>(
    m: &Loaded<M, R>,
    path: &PathBuf,
    report: &mut Report,
) -> Result<(ValueFunction<M::State>, Vec<M::State>), CliError> {
    let (text, bytes) = read_file(path)?;
    report.input_bytes("certificate", &path.display().to_string(), &bytes);
    let rows = parse_value_table(&text).map_err(|e| CliError::input(path.display(), e))?;
    let mut domain = Vec::new();
    let mut v = ValueFunction::zero();
    for (name, x) in rows {
        let s = (m.parse)(&name).ok_or_else(|| CliError::input(path.display(), format!("unknown state {}", name)))?;
        v.set(s.clone(), x);
        domain.push(s);
    }
    Ok((v, domain))
}

fn park_lines<S>(mdp_name: impl Fn(&S) -> String, outcome: &ParkOutcome<S>, render: Render) -> (bool, String) {
    match outcome {
        ParkOutcome::Certificate => (true, "accepted".to_string()),
        ParkOutcome::Counterexample { state, applied, candidate } => (
            false,
            format!("rejected state={} applied={} candidate={}", mdp_name(state), render.value(applied), render.value(candidate)),
        ),
    }
}

/// Outcome of a command that may reject a certificate.
pub struct Outcome {
    pub report: Report,
    pub certificate_rejected: bool,
}

fn solve_on<M: Mdp, R: RewardFn<M::State>>(
    m: &Loaded<M, R>,
    args: &SolveArgs,
    common: &Common,
    mut report: Report,
) -> Result<Outcome, CliError> {
    let render = Render { float: common.float };
    let states = query_states(m, &args.states)?;
    let threshold = args.threshold.as_deref().map(str::parse::<ExtValue>).transpose()?;
    let mode = args.mode.bellman();
    let t = Instant::now();
    let run = kleene_iterate(&m.mdp, &m.rew, mode, &states, args.steps, common.kleene())?;
    common.timing("solve", t);
    let converged = match run.status {
        ConvergenceStatus::ConvergedExact { at } => Some(at),
        ConvergenceStatus::LowerBound => None,
    };
    let mut sec = Section::new("solve");
    sec.field("mode", mode.name());
    sec.field("steps", args.steps);
    if let Some(th) = &threshold {
        sec.field("threshold", th);
    }
    sec.field("explored", run.explored);
    sec.field("closed", run.closed);
    for s in &states {
        let seq: Vec<ExtValue> = run.iterates.iter().map(|v| v.get(s)).collect();
        let v = verdict(&seq, converged, threshold.as_ref());
        sec.tables.push(render.table(m.mdp.state_name(s), &seq, v));
    }
    report.sections.push(sec);

    let mut rejected = false;
    if let Some(path) = &args.certificate {
        let (cand, domain) = load_value_table(m, path, &mut report)?;
        let t = Instant::now();
        let outcome = park_check(&m.mdp, &m.rew, mode, &cand, &domain)?;
        common.timing("certificate", t);
        let (ok, line) = park_lines(|s| m.mdp.state_name(s), &outcome, render);
        rejected = !ok;
        let mut sec = Section::new("certificate");
        sec.field("domain", domain.len());
        sec.field("result", line);
        if ok {
            for s in &states {
                if domain.contains(s) {
                    sec.lines.push(format!("upper-bound {} {}", m.mdp.state_name(s), render.value(&cand.get(s))));
                }
            }
        }
        report.sections.push(sec);
    }
    Ok(Outcome {
        report,
        certificate_rejected: rejected,
    })
}

fn reach_on<M: Mdp, R>(m: &Loaded<M, R>, args: &ReachArgs, common: &Common, mut report: Report) -> Result<Outcome, CliError>
where
    M::State: Send + Sync + 'static,
{
    let render = Render { float: common.float };
    let states = query_states(m, &args.states)?;
    let mode = args.mode.bellman();
    let cert = match &args.certificate {
        Some(path) => Some(load_value_table(m, path, &mut report)?),
        None => None,
    };
    let patterns = Arc::new(args.targets.clone());
    let mut sec = Section::new("reach");
    sec.field("mode", mode.name());
    sec.field("steps", args.steps);
    sec.field("targets", args.targets.join(" "));
    let mut cert_line = None;
    let t = Instant::now();
    for s in &states {
        let (patterns, name) = (patterns.clone(), m.name.clone());
        let targets = TargetSet::predicate(move |t: &M::State| patterns.iter().any(|p| glob_match(p, &name(t))));
        let res = reach_probability(
            &m.mdp,
            targets,
            s,
            mode,
            args.steps,
            cert.as_ref().map(|(v, d)| (v, d.as_slice())),
            common.kleene(),
        )?;
        let key = ReachState::Base(s.clone());
        let seq: Vec<ExtValue> = res.run.iterates.iter().map(|v| v.get(&key)).collect();
        let converged = match res.run.status {
            ConvergenceStatus::ConvergedExact { at } => Some(at),
            ConvergenceStatus::LowerBound => None,
        };
        sec.tables.push(render.table(m.mdp.state_name(s), &seq, verdict(&seq, converged, None)));
        if cert_line.is_none() {
            cert_line = res.certificate.map(|o| {
                park_lines(
                    |r: &ReachState<M::State>| match r {
                        ReachState::Base(b) => m.mdp.state_name(b),
                        ReachState::FreshSink => "fresh-sink".to_string(),
                    },
                    &o,
                    render,
                )
            });
        }
    }
    common.timing("reach", t);
    report.sections.push(sec);
    let mut rejected = false;
    if let (Some((ok, line)), Some((cand, domain))) = (cert_line, &cert) {
        rejected = !ok;
        let mut sec = Section::new("certificate");
        sec.field("domain", domain.len() + 1);
        sec.field("result", line);
        if ok {
            for s in &states {
                if domain.contains(s) {
                    sec.lines.push(format!("upper-bound {} {}", m.mdp.state_name(s), render.value(&cand.get(s))));
                }
            }
        }
        report.sections.push(sec);
    }
    Ok(Outcome {
        report,
        certificate_rejected: rejected,
    })
}

pub fn cmd_solve(args: &SolveArgs, common: &Common, report: Report) -> Result<Outcome, CliError> {
    let mut report = report;
    match load(&args.model, &mut report)? {
        AnyModel::Explicit(m) => solve_on(&m, args, common, report),
        AnyModel::Running(m) => solve_on(&m, args, common, report),
        AnyModel::Ladder(m) => solve_on(&m, args, common, report),
    }
}

pub fn cmd_reach(args: &ReachArgs, common: &Common, report: Report) -> Result<Outcome, CliError> {
    let mut report = report;
    match load(&args.model, &mut report)? {
        AnyModel::Explicit(m) => reach_on(&m, args, common, report),
        AnyModel::Running(m) => reach_on(&m, args, common, report),
        AnyModel::Ladder(m) => reach_on(&m, args, common, report),
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<String, CliError> {
    let r: ExtValue = args.r.parse().map_err(|e| CliError::input("--r", e))?;
    match args.builtin {
        Builtin::RunningExample => Ok(running_example_explicit(args.columns, r).to_text()),
        Builtin::NoOptSched => Err(CliError::Input("only the running example has an explicit truncation".into())),
    }
}
