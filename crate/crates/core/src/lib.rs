//! Exact analysis of total expected rewards in Markov decision processes and
//! weakest preexpectations of probabilistic guarded commands.
//!
//! Values live in [`ExtValue`], the nonnegative rationals extended with
//! infinity. MDPs may be infinite and are expanded on demand; the fixpoint
//! engine computes exact Kleene lower bounds and checks Park certificates.

pub mod extreal;
pub mod fixpoint;
pub mod mdp;
pub mod opsem;
pub mod pgcl;
pub mod reachability;
pub mod wp;

pub use extreal::{sup_of_sequence, ExtRealError, ExtValue, SupResult, SupStatus};
pub use fixpoint::{
    bellman_apply, divergence_probe, extract_min_scheduler, kleene_iterate, park_check, BellmanMode,
    ConvergenceStatus, DivergenceVerdict, FixpointError, KleeneOptions, KleeneRun, ParkOutcome, ValueFunction,
};
pub use reachability::{reach_probability, reach_transform, ReachMdp, ReachResult, ReachState, TargetSet};
pub use mdp::{Distribution, ExplicitMdp, ExplicitModel, Mdp, MdpError, MemorylessScheduler, Path, RewardFn};
pub use opsem::{dump_fragment, rew_pgcl, step, torew, Configuration, Fragment, OpAction, OperationalMdp};
pub use pgcl::{parse_program, parse_state, AExpr, BExpr, PgclParseError, ProgramState, Prog, Stmt};
pub use wp::{
    char_fn_apply, decomposition_checks, op_wp, parse_expectation, soundness_check, wp, BudgetSchedule, Expectation,
    WpMode,
};
