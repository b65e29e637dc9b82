//! Compiles QAOA MaxCut circuits onto nearest-neighbor quantum chips as
//! temporal plans: SWAP routing, gate scheduling, PDDL export and plan
//! validation.

pub mod fixtures;
pub mod hardware;
pub mod pddl;
pub mod plan;
pub mod planner;
pub mod problem;
pub mod report;
pub mod time;
pub mod validator;

pub use hardware::{load_hardware, preset, GateKind, HardwareError, HardwareGraph, Qubit};
pub use pddl::{emit_domain, emit_problem, parse_plan, render_plan, PddlError, Variant};
pub use plan::{makespan, PlanSummary, ScheduledAction, TemporalPlan};
pub use planner::{
    anytime_compile, greedy_compile, optimal_compile, replicate_reverse, AnytimeResult, Budget, Limits,
    OptimalResult, PlannerError,
};
pub use problem::{
    build_problem, generate_instance, Assignment, CompilationProblem, MaxCutInstance, ProblemError, PsGoal, QPair,
    QState,
};
pub use report::{gantt, run_bench, BenchConfig, BenchRow, GanttFormat, ReportError};
pub use time::Time;
pub use validator::{
    ipc_score, remove_superfluous, validate, ScoreEntry, ValidationReport, Violation, ViolationKind,
};
