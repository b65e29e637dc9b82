//! Scheduled gate applications and temporal plans.

use std::fmt;

use serde::Serialize;

use crate::hardware::{GateKind, Qubit};
use crate::problem::QState;
use crate::time::Time;

/// One gate application. For MIX only the first qubit/qstate slot is
/// meaningful; the second mirrors the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduledAction {
    pub start: Time,
    pub duration: Time,
    pub kind: GateKind,
    qubits: [Qubit; 2],
    qstates: [QState; 2],
    /// QAOA level for PS and MIX; 0 for SWAP.
    pub level: u32,
}

impl ScheduledAction {
    pub fn swap(start: Time, duration: Time, qubits: [Qubit; 2], qstates: [QState; 2]) -> Self {
        ScheduledAction { start, duration, kind: GateKind::Swap, qubits, qstates, level: 0 }
    }

    pub fn ps(start: Time, duration: Time, level: u32, qubits: [Qubit; 2], qstates: [QState; 2]) -> Self {
        ScheduledAction { start, duration, kind: GateKind::Ps, qubits, qstates, level }
    }

    pub fn mix(start: Time, duration: Time, level: u32, qubit: Qubit, qstate: QState) -> Self {
        ScheduledAction {
            start,
            duration,
            kind: GateKind::Mix,
            qubits: [qubit, qubit],
            qstates: [qstate, qstate],
            level,
        }
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits[..self.kind.arity()]
    }

    /// Qstates claimed to sit on [`Self::qubits`] when the action starts.
    pub fn qstates(&self) -> &[QState] {
        &self.qstates[..self.kind.arity()]
    }

    pub fn end(&self) -> Time {
        self.start + self.duration
    }

    pub fn touches(&self, q: Qubit) -> bool {
        self.qubits().contains(&q)
    }

    /// Same action moved to a new start time.
    pub fn at(mut self, start: Time) -> Self {
        self.start = start;
        self
    }

    /// Two-qubit actions with the lower qubit first, qstates kept aligned.
    pub fn canonical(mut self) -> Self {
        if self.qubits[0] > self.qubits[1] {
            self.qubits.swap(0, 1);
            self.qstates.swap(0, 1);
        }
        self
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }
}

impl fmt::Display for ScheduledAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}+{} ", self.kind, self.start, self.duration)?;
        if self.kind != GateKind::Swap {
            write!(f, "L{} ", self.level)?;
        }
        let qs: Vec<String> = self.qstates().iter().map(|q| q.to_string()).collect();
        let ns: Vec<String> = self.qubits().iter().map(|q| format!("#{}", q.0 + 1)).collect();
        write!(f, "({}) at ({})", qs.join(","), ns.join(","))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemporalPlan {
    pub actions: Vec<ScheduledAction>,
}

impl TemporalPlan {
    pub fn new(actions: Vec<ScheduledAction>) -> Self {
        TemporalPlan { actions }
    }

    /// Latest end time over all actions; zero for the empty plan.
    pub fn makespan(&self) -> Time {
        makespan(self)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Actions sorted by start time, ties by original position.
    pub fn sorted(&self) -> TemporalPlan {
        let mut actions = self.actions.clone();
        actions.sort_by_key(|a| a.start);
        TemporalPlan { actions }
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.actions.iter().filter(|a| a.kind == kind).count()
    }

    /// Makespan as an integer, when it lies on the clock grid.
    pub fn makespan_cycles(&self) -> Option<i64> {
        self.makespan().as_int()
    }
}

pub fn makespan(plan: &TemporalPlan) -> Time {
    plan.actions.iter().map(|a| a.end()).max().unwrap_or(Time::ZERO)
}

/// Summary written next to plans in JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct PlanSummary {
    pub makespan: Time,
    pub actions: usize,
    pub swaps: usize,
    pub phase_separations: usize,
    pub mixes: usize,
}

impl From<&TemporalPlan> for PlanSummary {
    fn from(p: &TemporalPlan) -> Self {
        PlanSummary {
            makespan: p.makespan(),
            actions: p.len(),
            swaps: p.count(GateKind::Swap),
            phase_separations: p.count(GateKind::Ps),
            mixes: p.count(GateKind::Mix),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn makespan_of_parallel_gates() {
        let t = Time::from_int;
        let plan = TemporalPlan::new(vec![
            ScheduledAction::ps(t(0), t(3), 1, [Qubit(0), Qubit(1)], [QState(0), QState(1)]),
            ScheduledAction::ps(t(0), t(3), 1, [Qubit(2), Qubit(3)], [QState(2), QState(3)]),
        ]);
        assert_eq!(plan.makespan(), t(3));
        assert_eq!(TemporalPlan::default().makespan(), Time::ZERO);
    }

    #[test]
    fn mix_exposes_single_qubit() {
        let m = ScheduledAction::mix(Time::ZERO, Time::from_int(1), 1, Qubit(4), QState(2));
        assert_eq!(m.qubits(), &[Qubit(4)]);
        assert_eq!(m.qstates(), &[QState(2)]);
    }
}
