//! Small reference problems and hand-written plans on the N8 ring.
//!
//! These are used throughout the test suites and by the CLI demos.

use std::sync::Arc;

use crate::hardware::{self, HardwareGraph};
use crate::plan::TemporalPlan;
use crate::problem::{build_problem, Assignment, CompilationProblem, MaxCutInstance, QPair, QState};

pub fn n8() -> Arc<HardwareGraph> {
    Arc::new(hardware::preset("N8").expect("N8 preset"))
}

/// Eight qstates on N8 with identity placement and the given goal pairs
/// (0-based qstate indices).
pub fn problem_on_n8(edges: &[(usize, usize)], p: u32) -> CompilationProblem {
    let inst = MaxCutInstance::new(8, edges).expect("valid edges");
    build_problem(inst, n8(), p, Assignment::Identity, 0).expect("fits N8")
}

pub fn empty_problem(p: u32) -> CompilationProblem {
    problem_on_n8(&[], p)
}

/// The six-vertex MaxCut graph over q1, q3, q4, q5, q6, q7; q2 and q8 carry
/// no goals.
pub fn six_vertex_maxcut() -> MaxCutInstance {
    MaxCutInstance::new(8, &[(0, 2), (0, 3), (0, 4), (4, 5), (2, 6), (5, 6)]).expect("valid edges")
}

pub fn six_vertex_problem(p: u32) -> CompilationProblem {
    build_problem(six_vertex_maxcut(), n8(), p, Assignment::Identity, 0).expect("fits N8")
}

/// Single goal {q2, q4}: the two qstates sit at n2 and n4, two hops apart.
pub fn single_goal_problem() -> CompilationProblem {
    problem_on_n8(&[(1, 3)], 1)
}

/// Swaps at n4-n1 and n2-n3 in parallel, then n1-n2, then the duration-4 PS
/// on n2-n3: makespan 2 * 2 + 4 = 8.
pub fn single_goal_witness() -> (CompilationProblem, TemporalPlan) {
    let problem = single_goal_problem();
    let plan = TemporalPlan::new(vec![
        act::swap(&problem, 0, "n4", "n1", "q4", "q1"),
        act::swap(&problem, 0, "n2", "n3", "q2", "q3"),
        act::swap(&problem, 2, "n1", "n2", "q4", "q3"),
        act::ps(&problem, 4, 1, "n2", "n3", "q4", "q2"),
    ]);
    (problem, plan)
}

/// Two goals sharing q2: {q1, q2} on a duration-3 gate and {q2, q4} on a
/// duration-4 gate.
pub fn two_goal_tradeoff() -> CompilationProblem {
    let mut problem = problem_on_n8(&[(0, 1), (1, 3)], 1);
    problem.pin_gate(QPair::new(QState(0), QState(1)), 3).expect("N8 has duration-3 PS edges");
    problem.pin_gate(QPair::new(QState(1), QState(3)), 4).expect("N8 has duration-4 PS edges");
    problem
}

/// Runs the short gate first, then the same routing as
/// [`single_goal_witness`]: makespan 3 + 8 = 11.
pub fn tradeoff_wait_then_route() -> TemporalPlan {
    let p = two_goal_tradeoff();
    TemporalPlan::new(vec![
        act::ps(&p, 0, 1, "n1", "n2", "q1", "q2"),
        act::swap(&p, 3, "n4", "n1", "q4", "q1"),
        act::swap(&p, 3, "n2", "n3", "q2", "q3"),
        act::swap(&p, 5, "n1", "n2", "q4", "q3"),
        act::ps(&p, 7, 1, "n2", "n3", "q4", "q2"),
    ])
}

/// Moves q4 the long way round in five swaps while the short gate runs:
/// makespan 5 * 2 + 4 = 14.
pub fn tradeoff_parallel_route() -> TemporalPlan {
    let p = two_goal_tradeoff();
    TemporalPlan::new(vec![
        act::ps(&p, 0, 1, "n1", "n2", "q1", "q2"),
        act::swap(&p, 0, "n4", "n5", "q4", "q5"),
        act::swap(&p, 2, "n5", "n6", "q4", "q6"),
        act::swap(&p, 4, "n6", "n7", "q4", "q7"),
        act::swap(&p, 6, "n7", "n8", "q4", "q8"),
        act::swap(&p, 8, "n8", "n3", "q4", "q3"),
        act::ps(&p, 10, 1, "n3", "n2", "q4", "q2"),
    ])
}

/// Builders that look qubits and qstates up by name and take durations from
/// the hardware. They panic on unknown names or missing gates.
pub mod act {
    use crate::hardware::{GateKind, Qubit};
    use crate::plan::ScheduledAction;
    use crate::problem::{CompilationProblem, QState};
    use crate::time::Time;

    fn qubit(p: &CompilationProblem, name: &str) -> Qubit {
        p.hardware.qubit(name).unwrap_or_else(|| panic!("unknown qubit {name}"))
    }

    fn qstate(name: &str) -> QState {
        QState::parse(name).unwrap_or_else(|| panic!("bad qstate {name}"))
    }

    fn two(p: &CompilationProblem, kind: GateKind, a: &str, b: &str) -> ([Qubit; 2], Time) {
        let (x, y) = (qubit(p, a), qubit(p, b));
        let d = p
            .hardware
            .gate_duration(x, y, kind)
            .unwrap_or_else(|| panic!("no {kind} gate on {a}-{b}"));
        ([x, y], Time::from(d))
    }

    pub fn swap(p: &CompilationProblem, start: i64, a: &str, b: &str, sa: &str, sb: &str) -> ScheduledAction {
        let (qs, d) = two(p, GateKind::Swap, a, b);
        ScheduledAction::swap(Time::from_int(start), d, qs, [qstate(sa), qstate(sb)])
    }

    #[allow(clippy::too_many_arguments)]
    pub fn ps(
        p: &CompilationProblem,
        start: i64,
        level: u32,
        a: &str,
        b: &str,
        sa: &str,
        sb: &str,
    ) -> ScheduledAction {
        let (qs, d) = two(p, GateKind::Ps, a, b);
        ScheduledAction::ps(Time::from_int(start), d, level, qs, [qstate(sa), qstate(sb)])
    }

    pub fn mix(p: &CompilationProblem, start: i64, level: u32, at: &str, s: &str) -> ScheduledAction {
        let q = qubit(p, at);
        ScheduledAction::mix(Time::from_int(start), Time::from(p.hardware.mix_duration(q)), level, q, qstate(s))
    }
}
