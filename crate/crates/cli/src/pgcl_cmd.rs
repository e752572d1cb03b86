//! `pgcl` and `dump-fragment`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rewlfp::mdp::{monte_carlo_estimate, Fallback};
use rewlfp::opsem::{dump_fragment, torew, Configuration, OperationalMdp};
use rewlfp::pgcl::{parse_program, parse_state, ProgramState};
use rewlfp::wp::{op_wp_run, parse_expectation, soundness_check, wp_sweep, BudgetSchedule, Verdict, WpMode};
use rewlfp::{ConvergenceStatus, ExtValue, MemorylessScheduler};
use serde::Serialize;

use crate::error::CliError;
use crate::report::{read_file, verdict, Render, Report, Section};
use crate::Common;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WpModeArg {
    Demonic,
    Angelic,
}

impl From<WpModeArg> for WpMode {
    fn from(m: WpModeArg) -> Self {
        match m {
            WpModeArg::Demonic => WpMode::Demonic,
            WpModeArg::Angelic => WpMode::Angelic,
        }
    }
}

#[derive(Debug, Args)]
pub struct PgclArgs {
    /// Program file.
    pub program: PathBuf,
    /// Postexpectation, e.g. `y`, `[x = 0] * (y + 2)`, `min(x, 3)`.
    #[arg(long)]
    pub post: String,
    /// Initial state such as `x=0,y=0`; repeatable (default: all zero).
    #[arg(long = "state")]
    pub states: Vec<String>,
    #[arg(long, value_enum, default_value = "demonic")]
    pub mode: WpModeArg,
    /// Loop approximation budget for wp.
    #[arg(long, default_value_t = 60)]
    pub wp_budget: usize,
    /// Kleene steps on the operational MDP.
    #[arg(long, default_value_t = 200)]
    pub op_steps: usize,
    #[arg(long)]
    pub threshold: Option<String>,
    /// Compare the two sequences budget by budget.
    #[arg(long)]
    pub check_soundness: bool,
    /// Monte Carlo estimate of the step-bounded reward: TRIALS SEED.
    #[arg(long, num_args = 2, value_names = ["TRIALS", "SEED"])]
    pub simulate: Option<Vec<u64>>,
    /// Branch the simulation takes at every nondeterministic choice.
    #[arg(long, value_enum, default_value = "left")]
    pub sim_choice: SimChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimChoice {
    Left,
    Right,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    /// Program file.
    pub program: PathBuf,
    #[arg(long, default_value = "")]
    pub state: String,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
}

fn states_of(raw: &[String]) -> Result<Vec<ProgramState>, CliError> {
    if raw.is_empty() {
        return Ok(vec![ProgramState::new()]);
    }
    raw.iter()
        .map(|s| parse_state(s).map_err(|e| CliError::input(format!("--state {}", s), e)))
        .collect()
}

fn state_label(s: &ProgramState) -> String {
    let t = s.to_string();
    if t.is_empty() {
        "{}".to_string()
    } else {
        t
    }
}

pub fn cmd_pgcl(args: &PgclArgs, common: &Common, mut report: Report) -> Result<Report, CliError> {
    let render = Render { float: common.float };
    let (text, bytes) = read_file(&args.program)?;
    report.input_bytes("program", &args.program.display().to_string(), &bytes);
    let prog = parse_program(&text).map_err(|e| CliError::input(args.program.display(), e))?;
    let post = parse_expectation(&args.post).map_err(|e| CliError::input("--post", e))?;
    let states = states_of(&args.states)?;
    let mode: WpMode = args.mode.into();
    let threshold = args.threshold.as_deref().map(str::parse::<ExtValue>).transpose()?;

    let mut sec = Section::new("wp");
    sec.field("mode", mode.name());
    sec.field("post", &post);
    sec.field("budget", args.wp_budget);
    let t = Instant::now();
    for s in &states {
        let seq = wp_sweep(&prog, &post, s, mode, args.wp_budget);
        // loop-free programs are exact at every budget; otherwise two equal
        // consecutive budgets count as stabilized
        let stable = prog.is_loop_free() || (seq.len() >= 2 && seq[seq.len() - 2] == seq[seq.len() - 1]);
        let v = verdict(&seq, stable.then_some(args.wp_budget), threshold.as_ref());
        sec.tables.push(render.table(state_label(s), &seq, v));
    }
    common.timing("wp", t);
    report.sections.push(sec);

    let mut sec = Section::new("op");
    sec.field("mode", mode.name());
    sec.field("steps", args.op_steps);
    let t = Instant::now();
    for s in &states {
        let run = op_wp_run(&prog, &post, s, mode, args.op_steps, common.kleene())?;
        let key = Configuration::Running(prog.clone(), s.clone());
        let seq: Vec<ExtValue> = run.iterates.iter().map(|v| v.get(&key)).collect();
        let converged = match run.status {
            ConvergenceStatus::ConvergedExact { at } => Some(at),
            ConvergenceStatus::LowerBound => None,
        };
        sec.lines.push(format!("explored {} {}", state_label(s), run.explored));
        sec.tables.push(render.table(state_label(s), &seq, verdict(&seq, converged, threshold.as_ref())));
    }
    common.timing("op", t);
    report.sections.push(sec);

    if args.check_soundness {
        let t = Instant::now();
        let sched = BudgetSchedule::upto(args.wp_budget, args.op_steps);
        let rep = soundness_check(&prog, &post, &states, mode, &sched)?;
        common.timing("soundness", t);
        let mut sec = Section::new("soundness");
        sec.field("ok", rep.ok());
        for row in &rep.rows {
            let v = match &row.verdict {
                Verdict::Agree(v) => format!("agree value={}", render.value(v)),
                Verdict::Disagree { wp, op } => format!("disagree wp={} op={}", render.value(wp), render.value(op)),
                Verdict::Gap { wp, op } => format!("gap wp={} op={}", render.value(wp), render.value(op)),
            };
            sec.lines.push(format!(
                "row {} wp-monotone={} op-monotone={} wp-stable={} op-stable={} {}",
                state_label(&row.state),
                row.wp_monotone,
                row.op_monotone,
                row.wp_stable,
                row.op_stable,
                v
            ));
        }
        report.sections.push(sec);
    }

    if let Some(sim) = &args.simulate {
        let (trials, seed) = (sim[0] as usize, sim[1]);
        let mdp = OperationalMdp::new();
        let rew = torew(|t: &ProgramState| post.eval(t));
        // enabled actions are [N] or [L, R], so first/last pick the branch
        let (fallback, name) = match args.sim_choice {
            SimChoice::Left => (Fallback::First, "always-left"),
            SimChoice::Right => (Fallback::Last, "always-right"),
        };
        let sched = MemorylessScheduler::new(HashMap::new()).with_fallback(fallback);
        let mut sec = Section::new("simulation");
        sec.field("scheduler", name);
        sec.field("trials", trials);
        sec.field("seed", seed);
        sec.field("horizon", args.op_steps);
        let t = Instant::now();
        for s in &states {
            let start = Configuration::Running(prog.clone(), s.clone());
            let est = monte_carlo_estimate(&mdp, &rew, &sched, &start, args.op_steps, trials, seed)?;
            sec.lines.push(format!("estimate {} mean={} stderr={}", state_label(s), est.mean, est.std_err));
        }
        common.timing("simulation", t);
        report.sections.push(sec);
    }
    Ok(report)
}

#[derive(Serialize)]
struct JsonNode {
    id: usize,
    depth: usize,
    reward: String,
    expanded: bool,
    label: String,
}

#[derive(Serialize)]
struct JsonEdge {
    from: usize,
    action: &'static str,
    prob: String,
    to: usize,
}

pub fn cmd_dump(args: &DumpArgs, common: &Common, mut report: Report) -> Result<Report, CliError> {
    let (text, bytes) = read_file(&args.program)?;
    report.input_bytes("program", &args.program.display().to_string(), &bytes);
    let prog = parse_program(&text).map_err(|e| CliError::input(args.program.display(), e))?;
    let state = parse_state(&args.state).map_err(|e| CliError::input("--state", e))?;
    let f = dump_fragment(&Configuration::Running(prog, state), args.depth);
    let mut sec = Section::new("fragment");
    sec.field("depth", args.depth);
    sec.field("nodes", f.nodes.len());
    sec.field("edges", f.edges.len());
    if common.json {
        // one JSON object per line keeps the section machine-readable
        for n in &f.nodes {
            let j = JsonNode {
                id: n.id,
                depth: n.depth,
                reward: n.reward.to_string(),
                expanded: n.expanded,
                label: n.config.to_string(),
            };
            sec.lines.push(serde_json::to_string(&j).expect("serializable"));
        }
        for e in &f.edges {
            let j = JsonEdge {
                from: e.from,
                action: e.action.name(),
                prob: e.prob.to_string(),
                to: e.to,
            };
            sec.lines.push(serde_json::to_string(&j).expect("serializable"));
        }
    } else {
        sec.lines.extend(f.to_text().lines().map(str::to_string));
    }
    report.sections.push(sec);
    Ok(report)
}
