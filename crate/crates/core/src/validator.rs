//! Independent plan checker.
//!
//! The validator replays a plan chronologically against the problem, deriving
//! qstate locations from the initial layout and the SWAPs it sees. It does not
//! trust the qstates recorded on each action; those are only cross-checked.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::hardware::{GateKind, Qubit};
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::problem::{CompilationProblem, QPair, QState};
use crate::time::Time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    /// Two actions overlap in time on a shared qubit.
    MutexOverlap,
    /// The gate does not exist on that qubit pair, or breaks a gate pin.
    WrongEdge,
    WrongDuration,
    GoalUnachieved,
    /// A PS of level > 1 before the previous level's PS on the pair, or
    /// before both qstates were mixed.
    #[serde(rename = "PREMATURE_PS2")]
    PrematurePs2,
    PrematureMix,
    DoubleMix,
    DuplicateGoal,
    BadQstateLocation,
    /// PS level outside `1..=p`, or MIX level outside `1..p`.
    BadLevel,
    /// A PS gate between qstates that share no MaxCut edge.
    NonGoalPs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Index into the plan's action list; `None` for end-of-plan checks.
    pub action: Option<usize>,
    pub time: Time,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub makespan: Time,
    pub violations: Vec<Violation>,
    /// Achieved goal pairs per level (index 0 is level 1).
    #[serde(serialize_with = "ser_achieved")]
    pub achieved: Vec<BTreeSet<QPair>>,
    /// Final qstate -> qubit names.
    pub final_locations: BTreeMap<String, String>,
    #[serde(skip)]
    pub final_layout: Vec<Qubit>,
}

fn ser_achieved<S: serde::Serializer>(v: &[BTreeSet<QPair>], s: S) -> Result<S::Ok, S::Error> {
    let levels: Vec<Vec<[String; 2]>> = v
        .iter()
        .map(|set| set.iter().map(|p| [p.lo().to_string(), p.hi().to_string()]).collect())
        .collect();
    levels.serialize(s)
}

impl ValidationReport {
    pub fn kinds(&self) -> BTreeSet<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub use crate::plan::makespan;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    End,
    Start,
}

/// Replays `plan` and reports every constraint violation.
pub fn validate(plan: &TemporalPlan, problem: &CompilationProblem) -> ValidationReport {
    let hw = &problem.hardware;
    let n = problem.n_qstates();
    let p = problem.p;
    let mut violations = Vec::new();
    let mut push = |kind, action: Option<usize>, time: Time, message: String| {
        violations.push(Violation { kind, action, time, message });
    };

    // Static checks; actions that fail them still take part in the mutex check
    // but are replayed only if their qubits exist.
    let mut replayable = vec![true; plan.actions.len()];
    for (i, a) in plan.actions.iter().enumerate() {
        let qs = a.qubits();
        if qs.iter().any(|q| q.0 >= hw.len()) || a.qstates().iter().any(|s| s.0 >= n) {
            push(ViolationKind::WrongEdge, Some(i), a.start, format!("action {i} references an unknown qubit or qstate"));
            replayable[i] = false;
            continue;
        }
        if a.duration <= Time::ZERO {
            push(ViolationKind::WrongDuration, Some(i), a.start, format!("action {i} has non-positive duration"));
            replayable[i] = false;
            continue;
        }
        let expected = match a.kind {
            GateKind::Mix => Some(hw.mix_duration(qs[0])),
            kind if qs[0] != qs[1] => hw.gate_duration(qs[0], qs[1], kind),
            _ => None,
        };
        match expected {
            None => push(
                ViolationKind::WrongEdge,
                Some(i),
                a.start,
                format!("no {} gate between {} and {}", a.kind, hw.name(qs[0]), hw.name(qs[1])),
            ),
            Some(d) if Time::from(d) != a.duration => push(
                ViolationKind::WrongDuration,
                Some(i),
                a.start,
                format!("{} on {} lasts {} but was scheduled for {}", a.kind, names(hw, qs), d, a.duration),
            ),
            _ => {}
        }
        let level_ok = match a.kind {
            GateKind::Swap => true,
            GateKind::Ps => a.level >= 1 && a.level <= p,
            GateKind::Mix => a.level >= 1 && a.level < p,
        };
        if !level_ok {
            push(ViolationKind::BadLevel, Some(i), a.start, format!("{} with level {} in a p={} problem", a.kind, a.level, p));
        }
    }

    // Mutex: half-open intervals per qubit.
    let mut per_qubit: Vec<Vec<(Time, Time, usize)>> = vec![Vec::new(); hw.len()];
    for (i, a) in plan.actions.iter().enumerate() {
        for q in a.qubits().iter().filter(|q| q.0 < hw.len()) {
            per_qubit[q.0].push((a.start, a.end(), i));
        }
    }
    for (q, list) in per_qubit.iter_mut().enumerate() {
        list.sort();
        let mut busy: Option<(Time, usize)> = None;
        for &(s, e, i) in list.iter() {
            if let Some((end, j)) = busy {
                if s < end {
                    push(
                        ViolationKind::MutexOverlap,
                        Some(i),
                        s,
                        format!("actions {j} and {i} overlap on qubit {}", hw.name(Qubit(q))),
                    );
                }
                if e > end {
                    busy = Some((e, i));
                }
            } else {
                busy = Some((e, i));
            }
        }
    }

    // Chronological replay: ends before starts at equal times.
    let mut events: Vec<(Time, Phase, usize)> = Vec::with_capacity(plan.actions.len() * 2);
    for (i, a) in plan.actions.iter().enumerate() {
        if replayable[i] {
            events.push((a.start, Phase::Start, i));
            events.push((a.end(), Phase::End, i));
        }
    }
    events.sort();

    let mut loc: Vec<Qubit> = problem.initial_layout().to_vec();
    let mut occ: Vec<QState> = vec![QState(usize::MAX); hw.len()];
    for (s, q) in loc.iter().enumerate() {
        occ[q.0] = QState(s);
    }
    let levels = p as usize;
    let mut achieved: Vec<BTreeSet<QPair>> = vec![BTreeSet::new(); levels];
    let mut mixed: Vec<Vec<bool>> = vec![vec![false; n]; levels];
    let mut mixing: Vec<Vec<bool>> = vec![vec![false; n]; levels];
    let mut in_progress: BTreeSet<(u32, QPair)> = BTreeSet::new();
    // Pair actually operated on by each started PS, for its end effect.
    let mut ps_pair: BTreeMap<usize, QPair> = BTreeMap::new();

    for (time, phase, i) in events {
        let a = &plan.actions[i];
        let qs = a.qubits();
        match phase {
            Phase::End => match a.kind {
                GateKind::Swap => {
                    let (x, y) = (qs[0], qs[1]);
                    occ.swap(x.0, y.0);
                    for z in [x, y] {
                        if occ[z.0].0 != usize::MAX {
                            loc[occ[z.0].0] = z;
                        }
                    }
                }
                GateKind::Ps => {
                    if let Some(pair) = ps_pair.remove(&i) {
                        in_progress.remove(&(a.level, pair));
                        if a.level >= 1 && a.level <= p {
                            achieved[a.level as usize - 1].insert(pair);
                        }
                    }
                }
                GateKind::Mix => {
                    let s = occ[qs[0].0];
                    if a.level >= 1 && a.level < p && s.0 < n {
                        mixed[a.level as usize - 1][s.0] = true;
                        mixing[a.level as usize - 1][s.0] = false;
                    }
                }
            },
            Phase::Start => {
                let actual: Vec<QState> = qs.iter().map(|q| occ[q.0]).collect();
                for (k, (&claimed, &found)) in a.qstates().iter().zip(&actual).enumerate() {
                    if claimed != found {
                        push(
                            ViolationKind::BadQstateLocation,
                            Some(i),
                            time,
                            format!("{} expected at {} but {} is there", claimed, hw.name(qs[k]), found),
                        );
                    }
                }
                match a.kind {
                    GateKind::Swap => {}
                    GateKind::Ps => {
                        let pair = QPair::new(actual[0], actual[1]);
                        if !problem.goal_pairs().contains(&pair) {
                            push(ViolationKind::NonGoalPs, Some(i), time, format!("PS on {pair}, which is not a MaxCut edge"));
                            continue;
                        }
                        if a.level < 1 || a.level > p {
                            continue;
                        }
                        let lvl = a.level as usize - 1;
                        if achieved[lvl].contains(&pair) || in_progress.contains(&(a.level, pair)) {
                            push(ViolationKind::DuplicateGoal, Some(i), time, format!("level-{} goal {pair} already carried out", a.level));
                        }
                        if a.level >= 2 {
                            let prev = lvl - 1;
                            if !achieved[prev].contains(&pair) {
                                push(
                                    ViolationKind::PrematurePs2,
                                    Some(i),
                                    time,
                                    format!("level-{} PS on {pair} before its level-{} goal", a.level, a.level - 1),
                                );
                            }
                            for s in [pair.lo(), pair.hi()] {
                                if !mixed[prev][s.0] {
                                    push(
                                        ViolationKind::PrematurePs2,
                                        Some(i),
                                        time,
                                        format!("level-{} PS on {pair} before {s} was mixed", a.level),
                                    );
                                }
                            }
                        }
                        if qs[0] != qs[1] {
                            if let Some(d) = hw.gate_duration(qs[0], qs[1], GateKind::Ps) {
                                if !problem.ps_allowed(pair, d) {
                                    push(
                                        ViolationKind::WrongEdge,
                                        Some(i),
                                        time,
                                        format!("{pair} is pinned to a duration-{} gate, {} has {d}", problem.pin(pair).unwrap(), names(hw, qs)),
                                    );
                                }
                            }
                        }
                        in_progress.insert((a.level, pair));
                        ps_pair.insert(i, pair);
                    }
                    GateKind::Mix => {
                        let s = actual[0];
                        if a.level < 1 || a.level >= p || s.0 >= n {
                            continue;
                        }
                        let lvl = a.level as usize - 1;
                        if mixed[lvl][s.0] || mixing[lvl][s.0] {
                            push(ViolationKind::DoubleMix, Some(i), time, format!("{s} mixed twice at level {}", a.level));
                        }
                        let missing: Vec<String> = problem
                            .goals_of(s)
                            .iter()
                            .filter(|g| !achieved[lvl].contains(g))
                            .map(|g| g.to_string())
                            .collect();
                        if !missing.is_empty() {
                            push(
                                ViolationKind::PrematureMix,
                                Some(i),
                                time,
                                format!("{s} mixed before level-{} goals {}", a.level, missing.join(" ")),
                            );
                        }
                        mixing[lvl][s.0] = true;
                    }
                }
            }
        }
    }

    let end = plan.makespan();
    for (lvl, done) in achieved.iter().enumerate() {
        for pair in problem.goal_pairs() {
            if !done.contains(pair) {
                push(ViolationKind::GoalUnachieved, None, end, format!("level-{} goal {pair} never carried out", lvl + 1));
            }
        }
    }
    for lvl in 0..levels.saturating_sub(1) {
        for s in problem.used_states() {
            if !mixed[lvl][s.0] {
                push(ViolationKind::GoalUnachieved, None, end, format!("{s} never mixed after level {}", lvl + 1));
            }
        }
    }

    let final_locations = loc
        .iter()
        .enumerate()
        .map(|(s, q)| (QState(s).to_string(), hw.name(*q).to_string()))
        .collect();
    ValidationReport {
        valid: violations.is_empty(),
        makespan: end,
        violations,
        achieved,
        final_locations,
        final_layout: loc,
    }
}

fn names(hw: &crate::hardware::HardwareGraph, qs: &[Qubit]) -> String {
    qs.iter().map(|q| hw.name(*q)).collect::<Vec<_>>().join("-")
}

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("plan is invalid ({} violations, first: {})", .0.violations.len(), .0.violations.first().map(|v| v.message.as_str()).unwrap_or(""))]
    InvalidPlan(Box<ValidationReport>),
}

/// Deletes actions whose removal keeps the plan valid, until none is left.
///
/// Candidates are tried in this order: MIX gates of qstates without goals,
/// pairs of back-to-back SWAPs on the same edge, then any single action from
/// the latest backwards. Action times are never changed, so the makespan can
/// only shrink. The result is a fixed point, which makes the operation
/// idempotent.
pub fn remove_superfluous(
    plan: &TemporalPlan,
    problem: &CompilationProblem,
) -> Result<TemporalPlan, ValidationError> {
    let report = validate(plan, problem);
    if !report.valid {
        return Err(ValidationError::InvalidPlan(Box::new(report)));
    }
    let mut current = plan.clone();
    let try_remove = |plan: &TemporalPlan, drop: &[usize]| -> Option<TemporalPlan> {
        let kept: Vec<ScheduledAction> = plan
            .actions
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, a)| *a)
            .collect();
        let candidate = TemporalPlan::new(kept);
        validate(&candidate, problem).valid.then_some(candidate)
    };

    'outer: loop {
        for (i, a) in current.actions.iter().enumerate() {
            if a.kind == GateKind::Mix && !problem.is_used(a.qstates()[0]) {
                if let Some(next) = try_remove(&current, &[i]) {
                    current = next;
                    continue 'outer;
                }
            }
        }
        for (i, j) in cancelling_swaps(&current) {
            if let Some(next) = try_remove(&current, &[i, j]) {
                current = next;
                continue 'outer;
            }
        }
        let mut order: Vec<usize> = (0..current.actions.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse((current.actions[i].start, i)));
        for i in order {
            if let Some(next) = try_remove(&current, &[i]) {
                current = next;
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

/// SWAP pairs on the same edge with no other action on either qubit between
/// them.
fn cancelling_swaps(plan: &TemporalPlan) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..plan.actions.len()).collect();
    order.sort_by_key(|&i| (plan.actions[i].start, i));
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let a = &plan.actions[i];
        if a.kind != GateKind::Swap {
            continue;
        }
        let next = order[pos + 1..]
            .iter()
            .copied()
            .find(|&j| plan.actions[j].qubits().iter().any(|q| a.touches(*q)));
        if let Some(j) = next {
            let b = &plan.actions[j];
            let same_edge = b.kind == GateKind::Swap
                && b.touches(a.qubits()[0])
                && b.touches(a.qubits()[1]);
            if same_edge {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("makespans must be positive (best {best}, candidate {candidate})")]
    NonPositive { best: f64, candidate: f64 },
    #[error("candidate makespan {candidate} beats the best known {best}; it should become the new best")]
    BetterThanBest { best: f64, candidate: f64 },
}

/// IPC plan-quality score: best known makespan over the candidate's.
pub fn ipc_score(best_makespan: f64, candidate_makespan: f64) -> Result<f64, ScoreError> {
    let (best, candidate) = (best_makespan, candidate_makespan);
    if !(best > 0.0 && candidate > 0.0) {
        return Err(ScoreError::NonPositive { best, candidate });
    }
    if candidate < best {
        return Err(ScoreError::BetterThanBest { best, candidate });
    }
    Ok(best / candidate)
}

/// One planner's result on one instance, for batch scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub class: String,
    pub instance: String,
    pub planner: String,
    pub makespan: Option<f64>,
}

/// Mean IPC score per (class, planner), taking the best makespan over all
/// planners as reference for each instance. Only solved instances are
/// averaged.
pub fn mean_scores(entries: &[ScoreEntry]) -> BTreeMap<(String, String), f64> {
    let mut best: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for e in entries {
        if let Some(m) = e.makespan.filter(|m| *m > 0.0) {
            let slot = best.entry((&e.class, &e.instance)).or_insert(m);
            *slot = slot.min(m);
        }
    }
    let mut sums: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for e in entries {
        if let Some(m) = e.makespan.filter(|m| *m > 0.0) {
            let b = best[&(e.class.as_str(), e.instance.as_str())];
            let score = ipc_score(b, m).expect("best is a minimum");
            let slot = sums.entry((e.class.clone(), e.planner.clone())).or_default();
            slot.0 += score;
            slot.1 += 1;
        }
    }
    sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, act};

    #[test]
    fn single_goal_witness_is_valid() {
        let (problem, plan) = fixtures::single_goal_witness();
        let r = validate(&plan, &problem);
        assert!(r.valid, "{:?}", r.violations);
        assert_eq!(r.makespan, Time::from_int(8));
        assert_eq!(makespan(&plan), Time::from_int(8));
    }

    #[test]
    fn overlapping_swaps_share_a_qubit() {
        let problem = fixtures::single_goal_problem();
        let plan = TemporalPlan::new(vec![
            act::swap(&problem, 0, "n1", "n2", "q1", "q2"),
            act::swap(&problem, 1, "n2", "n3", "q1", "q3"),
        ]);
        let r = validate(&plan, &problem);
        let mutex: Vec<_> = r.violations.iter().filter(|v| v.kind == ViolationKind::MutexOverlap).collect();
        assert_eq!(mutex.len(), 1);
        assert!(mutex[0].message.contains("n2"), "{}", mutex[0].message);
    }

    #[test]
    fn empty_plan_for_empty_goals() {
        let problem = fixtures::empty_problem(1);
        let r = validate(&TemporalPlan::default(), &problem);
        assert!(r.valid);
        assert_eq!(r.makespan, Time::ZERO);
        let r = validate(&TemporalPlan::default(), &fixtures::single_goal_problem());
        assert!(r.has(ViolationKind::GoalUnachieved));
    }

    #[test]
    fn premature_and_double_mix() {
        // Goals {q1,q2} and {q1,q4} on N8 identity, p = 2.
        let problem = fixtures::problem_on_n8(&[(0, 1), (0, 3)], 2);
        let mut plan = TemporalPlan::new(vec![
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
            act::mix(&problem, 3, 1, "n1", "q1"),
        ]);
        let r = validate(&plan, &problem);
        assert!(r.has(ViolationKind::PrematureMix), "{:?}", r.violations);

        plan = TemporalPlan::new(vec![
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
            act::ps(&problem, 3, 1, "n1", "n4", "q1", "q4"),
            act::mix(&problem, 6, 1, "n1", "q1"),
            act::mix(&problem, 7, 1, "n1", "q1"),
        ]);
        let r = validate(&plan, &problem);
        assert!(r.has(ViolationKind::DoubleMix), "{:?}", r.violations);
    }

    #[test]
    fn premature_second_level_and_duplicates() {
        let problem = fixtures::problem_on_n8(&[(0, 1)], 2);
        let plan = TemporalPlan::new(vec![
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
            act::ps(&problem, 3, 2, "n1", "n2", "q1", "q2"),
        ]);
        let r = validate(&plan, &problem);
        assert!(r.has(ViolationKind::PrematurePs2));

        let plan = TemporalPlan::new(vec![
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
            act::ps(&problem, 3, 1, "n1", "n2", "q2", "q1").with_level(1),
        ]);
        let r = validate(&plan, &problem);
        // second PS has qstates in the wrong slots and repeats the goal
        assert!(r.has(ViolationKind::DuplicateGoal));
        assert!(r.has(ViolationKind::BadQstateLocation));

        let ok = TemporalPlan::new(vec![
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
            act::mix(&problem, 3, 1, "n1", "q1"),
            act::mix(&problem, 3, 1, "n2", "q2"),
            act::ps(&problem, 4, 2, "n1", "n2", "q1", "q2"),
        ]);
        let r = validate(&ok, &problem);
        assert!(r.valid, "{:?}", r.violations);
        assert_eq!(r.makespan, Time::from_int(7));
    }

    #[test]
    fn edge_duration_and_level_checks() {
        let problem = fixtures::problem_on_n8(&[(1, 3)], 1);
        let hw = &problem.hardware;
        let (n2, n4) = (hw.qubit("n2").unwrap(), hw.qubit("n4").unwrap());
        let mut bad = ScheduledAction::ps(Time::ZERO, Time::from_int(3), 1, [n2, n4], [QState(1), QState(3)]);
        let r = validate(&TemporalPlan::new(vec![bad]), &problem);
        assert!(r.has(ViolationKind::WrongEdge));
        bad = act::swap(&problem, 0, "n1", "n2", "q1", "q2");
        bad.duration = Time::from_int(3);
        let r = validate(&TemporalPlan::new(vec![bad]), &problem);
        assert!(r.has(ViolationKind::WrongDuration));
        let r = validate(&TemporalPlan::new(vec![act::mix(&problem, 0, 1, "n2", "q2")]), &problem);
        assert!(r.has(ViolationKind::BadLevel));
        let r = validate(&TemporalPlan::new(vec![act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2")]), &problem);
        assert!(r.has(ViolationKind::NonGoalPs));
    }

    #[test]
    fn pinned_goal_rejects_other_gate_kind() {
        let mut problem = fixtures::problem_on_n8(&[(0, 1)], 1);
        problem.pin_gate(QPair::new(QState(0), QState(1)), 4).unwrap();
        let plan = TemporalPlan::new(vec![act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2")]);
        assert!(validate(&plan, &problem).has(ViolationKind::WrongEdge));
    }

    #[test]
    fn fractional_times_from_external_planners() {
        let problem = fixtures::problem_on_n8(&[(0, 1)], 1);
        let ms = |n| Time::from_ratio(n, 1000);
        let swap = act::swap(&problem, 0, "n1", "n2", "q1", "q2").at(ms(1));
        let ps = act::ps(&problem, 0, 1, "n1", "n2", "q2", "q1");
        let r = validate(&TemporalPlan::new(vec![swap, ps.at(ms(2001))]), &problem);
        assert!(r.valid, "{:?}", r.violations);
        assert_eq!(r.makespan, ms(5001));
        let r = validate(&TemporalPlan::new(vec![swap, ps.at(ms(2000))]), &problem);
        assert!(r.has(ViolationKind::MutexOverlap));
    }

    #[test]
    fn superfluous_gates_are_removed() {
        let (problem, plan) = fixtures::single_goal_witness();
        assert_eq!(remove_superfluous(&plan, &problem).unwrap(), plan);

        let problem = fixtures::problem_on_n8(&[(0, 1)], 1);
        let plan = TemporalPlan::new(vec![
            act::swap(&problem, 0, "n5", "n6", "q5", "q6"),
            act::swap(&problem, 2, "n5", "n6", "q6", "q5"),
            act::ps(&problem, 0, 1, "n1", "n2", "q1", "q2"),
        ]);
        let out = remove_superfluous(&plan, &problem).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.actions[0].kind, GateKind::Ps);
        assert_eq!(remove_superfluous(&out, &problem).unwrap(), out);

        let bad = TemporalPlan::new(vec![act::swap(&problem, 0, "n5", "n6", "q5", "q6")]);
        assert!(remove_superfluous(&bad, &problem).is_err());
    }

    #[test]
    fn ipc_scores() {
        assert_eq!(ipc_score(10.0, 10.0).unwrap(), 1.0);
        assert_eq!(ipc_score(8.0, 10.0).unwrap(), 0.8);
        assert!(matches!(ipc_score(10.0, 8.0), Err(ScoreError::BetterThanBest { .. })));
        assert!(matches!(ipc_score(0.0, 8.0), Err(ScoreError::NonPositive { .. })));
    }

    #[test]
    fn batch_means() {
        let e = |inst: &str, planner: &str, m: f64| ScoreEntry {
            class: "N8".into(),
            instance: inst.into(),
            planner: planner.into(),
            makespan: Some(m),
        };
        let means = mean_scores(&[e("a", "x", 10.0), e("a", "y", 8.0), e("b", "x", 5.0), e("b", "y", 10.0)]);
        let x = means[&("N8".to_string(), "x".to_string())];
        let y = means[&("N8".to_string(), "y".to_string())];
        assert!((x - 0.9).abs() < 1e-12);
        assert!((y - 0.75).abs() < 1e-12);
    }

    #[test]
    fn report_serializes() {
        let (problem, plan) = fixtures::single_goal_witness();
        let json = validate(&plan, &problem).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["valid"], true);
        assert_eq!(v["makespan"], 8);
        assert_eq!(v["achieved"][0][0][0], "q2");
        let bad = TemporalPlan::new(vec![act::swap(&problem, 0, "n1", "n2", "q1", "q2"), act::swap(&problem, 1, "n2", "n3", "q1", "q3")]);
        let v: serde_json::Value = serde_json::from_str(&validate(&bad, &problem).to_json()).unwrap();
        assert_eq!(v["violations"][0]["kind"], "MUTEX_OVERLAP");
    }
}
