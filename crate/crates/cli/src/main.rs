//! `rewlfp`: expected rewards of MDPs and weakest preexpectations of pGCL
//! programs from the command line.
//!
//! Exit codes: 0 success, 1 input error, 2 resource cap, 3 certificate
//! rejected.

mod error;
mod mdp_cmd;
mod pgcl_cmd;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rewlfp::KleeneOptions;

use error::CliError;
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "rewlfp", version, about = "Exact expected rewards and weakest preexpectations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Render numbers as floats instead of exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    /// Print wall-clock times to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Cap on the number of explored states.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_states: usize,
}

impl Common {
    pub fn kleene(&self) -> KleeneOptions {
        KleeneOptions {
            max_states: self.max_states,
        }
    }

    pub fn timing(&self, label: &str, since: Instant) {
        if self.timing {
            eprintln!("timing {} {:.3}s", label, since.elapsed().as_secs_f64());
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyses of Markov decision processes.
    #[command(subcommand)]
    Mdp(MdpCommand),
    /// wp and operational expected rewards of a pGCL program.
    Pgcl(pgcl_cmd::PgclArgs),
    /// The reachable operational configuration graph up to a depth.
    DumpFragment(pgcl_cmd::DumpArgs),
}

#[derive(Debug, Subcommand)]
enum MdpCommand {
    /// Kleene iterates of the Bellman operator, with optional Park check.
    Solve(mdp_cmd::SolveArgs),
    /// Step-bounded reachability probabilities.
    Reach(mdp_cmd::ReachArgs),
    /// Print an explicit truncation of a builtin model.
    Generate(mdp_cmd::GenerateArgs),
}

fn command_echo() -> String {
    std::env::args()
        .skip(1)
        .map(|a| {
            if a.is_empty() || a.contains(char::is_whitespace) {
                format!("'{}'", a)
            } else {
                a
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn emit(report: &Report, common: &Common) {
    if common.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let report = Report::new(command_echo());
    let common = &cli.common;
    match &cli.command {
        Command::Mdp(MdpCommand::Generate(args)) => {
            print!("{}", mdp_cmd::cmd_generate(args)?);
            Ok(0)
        }
        Command::Mdp(MdpCommand::Solve(args)) => {
            let out = mdp_cmd::cmd_solve(args, common, report)?;
            emit(&out.report, common);
            Ok(if out.certificate_rejected { 3 } else { 0 })
        }
        Command::Mdp(MdpCommand::Reach(args)) => {
            let out = mdp_cmd::cmd_reach(args, common, report)?;
            emit(&out.report, common);
            Ok(if out.certificate_rejected { 3 } else { 0 })
        }
        Command::Pgcl(args) => {
            emit(&pgcl_cmd::cmd_pgcl(args, common, report)?, common);
            Ok(0)
        }
        Command::DumpFragment(args) => {
            emit(&pgcl_cmd::cmd_dump(args, common, report)?, common);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // deep programs recurse in the evaluator; give the work a large stack
    let worker = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || run(&cli))
        .expect("spawn worker");
    match worker.join() {
        Ok(Ok(code)) => ExitCode::from(code as u8),
        Ok(Err(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(101),
    }
}
