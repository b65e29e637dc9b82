use crate::hardware::GateKind;
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::problem::{CompilationProblem, QState};
use crate::time::Time;
use crate::validator::validate;

use super::PlannerError;

/// Builds a `p`-level plan from a one-level plan by running it forward, then
/// mirrored in time, and so on, with a layer of MIX gates between blocks.
///
/// A mirrored block undoes the SWAPs of the block before it, so every PS
/// meets its qstates in the same places. With one-level makespan `M` and mix
/// duration `t` the result has makespan `p * M + (p - 1) * t`. Every used
/// qstate is mixed; if no qstate has a goal, all instance qstates are.
pub fn replicate_reverse(one_level: &TemporalPlan, problem: &CompilationProblem) -> Result<TemporalPlan, PlannerError> {
    let base = problem.with_levels(1)?;
    let report = validate(one_level, &base);
    if !report.valid {
        let first = report.violations.first().map(|v| v.message.clone()).unwrap_or_default();
        return Err(PlannerError::InvalidInput(first));
    }
    let hw = &problem.hardware;
    let m1 = one_level.makespan();
    let mut mixed: Vec<QState> = problem.used_states().collect();
    if mixed.is_empty() {
        mixed = (0..problem.instance.n_states).map(QState).collect();
    }
    let forward_layout: Vec<_> = problem.initial_layout().to_vec();
    let backward_layout = report.final_layout;

    let mut actions = Vec::new();
    let mut offset = Time::ZERO;
    for level in 1..=problem.p {
        let forward = level % 2 == 1;
        for a in &one_level.actions {
            let moved = if forward {
                a.at(offset + a.start)
            } else {
                let start = offset + (m1 - a.end());
                match a.kind {
                    // At the start of the mirrored swap its qstates have
                    // already traded places.
                    GateKind::Swap => {
                        let qs = a.qubits();
                        let ss = a.qstates();
                        ScheduledAction::swap(start, a.duration, [qs[0], qs[1]], [ss[1], ss[0]])
                    }
                    _ => a.at(start),
                }
            };
            actions.push(if moved.kind == GateKind::Ps { moved.with_level(level) } else { moved });
        }
        offset += m1;
        if level == problem.p {
            break;
        }
        let layout = if forward { &backward_layout } else { &forward_layout };
        let mut longest = Time::ZERO;
        for &s in &mixed {
            let q = layout[s.0];
            let d = Time::from(hw.mix_duration(q));
            longest = longest.max(d);
            actions.push(ScheduledAction::mix(offset, d, level, q, s));
        }
        offset += longest;
    }
    Ok(TemporalPlan::new(actions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::planner::greedy_compile;

    #[test]
    fn doubles_plus_mix() {
        let p1 = fixtures::six_vertex_problem(1);
        let plan = greedy_compile(&p1, 0);
        let m1 = plan.makespan();
        for p in 2..=3u32 {
            let prob = fixtures::six_vertex_problem(p);
            let out = replicate_reverse(&plan, &prob).unwrap();
            let r = validate(&out, &prob);
            assert!(r.valid, "p={p}: {:?}", r.violations);
            let mut expect = Time::from_int(p as i64 - 1);
            for _ in 0..p {
                expect += m1;
            }
            assert_eq!(out.makespan(), expect);
        }
    }

    #[test]
    fn empty_plan_gives_mixes_only() {
        let prob = fixtures::empty_problem(2);
        let out = replicate_reverse(&TemporalPlan::default(), &prob).unwrap();
        assert_eq!(out.makespan(), Time::from_int(1));
        assert!(out.actions.iter().all(|a| a.kind == GateKind::Mix));
        assert!(validate(&out, &prob).valid);
    }

    #[test]
    fn rejects_invalid_input() {
        let (prob, mut plan) = fixtures::single_goal_witness();
        plan.actions.pop();
        assert!(matches!(replicate_reverse(&plan, &prob.with_levels(2).unwrap()), Err(PlannerError::InvalidInput(_))));
    }
}
