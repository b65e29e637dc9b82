//! Exhaustive makespan minimization for tiny problems.
//!
//! The search walks decision epochs: at epoch `t` it may start any subset of
//! the actions whose qubits are free, then jumps to the next time a running
//! action ends. An optimal plan can always be left-shifted so that every
//! action starts at time 0 or when another one ends, so these epochs suffice.
//! Effects are applied when an action starts; its qubits stay locked until it
//! ends, which makes the two views equivalent.

use std::collections::HashMap;

use crate::hardware::{GateKind, HardwareGraph, Qubit};
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::problem::{CompilationProblem, QPair, QState};
use crate::time::Time;

use super::engine::Engine;
use super::greedy::greedy_trace;
use super::PlannerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Longest action sequence explored.
    pub max_actions: usize,
    /// Branches whose lower bound exceeds this are cut.
    pub max_makespan: Option<i64>,
    /// Search nodes before giving up.
    pub node_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_actions: 64, max_makespan: None, node_budget: 20_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct OptimalResult {
    pub plan: TemporalPlan,
    /// The search finished without hitting any limit, so no shorter plan
    /// exists.
    pub proved_optimal: bool,
    pub nodes: u64,
}

impl OptimalResult {
    pub fn makespan(&self) -> Time {
        self.plan.makespan()
    }
}

/// Finds a makespan-optimal plan by depth-first branch and bound, starting
/// from the greedy plan (or `incumbent` if it is shorter).
pub fn optimal_compile(problem: &CompilationProblem, limits: Limits) -> Result<OptimalResult, PlannerError> {
    optimal_compile_from(problem, limits, None)
}

pub fn optimal_compile_from(
    problem: &CompilationProblem,
    limits: Limits,
    incumbent: Option<&TemporalPlan>,
) -> Result<OptimalResult, PlannerError> {
    let n = problem.n_qstates();
    let goals: Vec<QPair> = problem.goal_pairs().iter().copied().collect();
    if n > 64 || goals.len() > 64 || problem.p > 8 {
        return Err(PlannerError::TooLarge(format!(
            "{n} qstates, {} goals, p = {}",
            goals.len(),
            problem.p
        )));
    }
    let engine = Engine::new(problem);
    let (greedy, _) = greedy_trace(&engine);
    let mut best_plan = greedy.into_plan();
    if let Some(inc) = incumbent {
        if inc.makespan() < best_plan.makespan() && crate::validator::validate(inc, problem).valid {
            best_plan = inc.clone();
        }
    }
    let best = best_plan.makespan().ceil();

    let mut search = Search::new(problem, goals, limits);
    search.best = best;
    let root = search.root();
    let mut path = Vec::new();
    search.epoch(root, &mut path);
    let proved = !search.aborted && !search.cut;
    if let Some(plan) = search.found.take() {
        best_plan = plan;
    }
    Ok(OptimalResult { plan: best_plan, proved_optimal: proved, nodes: search.nodes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Act {
    Swap(Qubit, Qubit),
    Ps(Qubit, Qubit, u32, usize),
    Mix(Qubit, u32),
}

#[derive(Clone)]
struct State {
    t: i64,
    occ: Vec<QState>,
    loc: Vec<Qubit>,
    busy: Vec<i64>,
    /// Edge of the swap that last ran on each qubit, if that was its last action.
    last_swap: Vec<Option<(Qubit, Qubit)>>,
    achieved: Vec<u64>,
    mixed: Vec<u64>,
    /// Goals left per level per qstate.
    open: Vec<Vec<u8>>,
    left: usize,
}

struct Search<'a> {
    problem: &'a CompilationProblem,
    hw: &'a HardwareGraph,
    goals: Vec<QPair>,
    goal_index: HashMap<QPair, usize>,
    limits: Limits,
    p: usize,
    min_swap: i64,
    min_mix: i64,
    ps_edges: Vec<(Qubit, Qubit, u32)>,
    /// Cheapest allowed PS duration per goal.
    min_ps: Vec<i64>,
    best: i64,
    found: Option<TemporalPlan>,
    nodes: u64,
    aborted: bool,
    cut: bool,
    memo: HashMap<Vec<u8>, i64>,
}

const MEMO_CAP: usize = 4_000_000;

impl<'a> Search<'a> {
    fn new(problem: &'a CompilationProblem, goals: Vec<QPair>, limits: Limits) -> Self {
        let hw: &HardwareGraph = &problem.hardware;
        let ps_edges: Vec<(Qubit, Qubit, u32)> = hw.edges_of(GateKind::Ps).map(|e| (e.a, e.b, e.duration)).collect();
        let min_ps = goals
            .iter()
            .map(|g| {
                ps_edges
                    .iter()
                    .filter(|e| problem.ps_allowed(*g, e.2))
                    .map(|e| e.2 as i64)
                    .min()
                    .unwrap_or(i64::MAX / 4)
            })
            .collect();
        Search {
            problem,
            hw,
            goal_index: goals.iter().enumerate().map(|(i, g)| (*g, i)).collect(),
            goals,
            limits,
            p: problem.p as usize,
            min_swap: hw.min_swap_duration() as i64,
            min_mix: hw.qubits().map(|q| hw.mix_duration(q)).min().unwrap_or(1) as i64,
            ps_edges,
            min_ps,
            best: i64::MAX,
            found: None,
            nodes: 0,
            aborted: false,
            cut: false,
            memo: HashMap::new(),
        }
    }

    fn root(&self) -> State {
        let loc = self.problem.initial_layout().to_vec();
        let mut occ = vec![QState(0); self.hw.len()];
        for (s, q) in loc.iter().enumerate() {
            occ[q.0] = QState(s);
        }
        let open = (0..self.p)
            .map(|_| (0..loc.len()).map(|s| self.problem.goals_of(QState(s)).len() as u8).collect())
            .collect();
        State {
            t: 0,
            occ,
            loc,
            busy: vec![0; self.hw.len()],
            last_swap: vec![None; self.hw.len()],
            achieved: vec![0; self.p],
            mixed: vec![0; self.p],
            open,
            left: self.goals.len() * self.p,
        }
    }

    fn done(&self, st: &State) -> bool {
        if st.left > 0 {
            return false;
        }
        (0..self.p - 1).all(|l| self.problem.used_states().all(|s| st.mixed[l] >> s.0 & 1 == 1))
    }

    /// Lowest level at which goal `g` is still open, if it can run now.
    fn ready_level(&self, st: &State, g: usize) -> Option<u32> {
        let l = (0..self.p).find(|&l| st.achieved[l] >> g & 1 == 0)?;
        if l > 0 {
            let pair = self.goals[g];
            let m = st.mixed[l - 1];
            if m >> pair.lo().0 & 1 == 0 || m >> pair.hi().0 & 1 == 0 {
                return None;
            }
        }
        Some(l as u32 + 1)
    }

    /// Qstates that still have PS goals to carry out.
    fn needs_routing(&self, st: &State, s: QState) -> bool {
        st.open.iter().any(|o| o[s.0] > 0)
    }

    fn mix_pending(&self, st: &State, s: QState) -> bool {
        self.problem.is_used(s) && (0..self.p - 1).any(|l| st.mixed[l] >> s.0 & 1 == 0)
    }

    fn lower_bound(&self, st: &State) -> i64 {
        let mut lb = st.busy.iter().copied().max().unwrap_or(0).max(st.t);
        let avail = |s: QState| st.busy[st.loc[s.0].0].max(st.t);
        for (g, &pair) in self.goals.iter().enumerate() {
            let Some(first) = (0..self.p).find(|&l| st.achieved[l] >> g & 1 == 0) else { continue };
            let (a, b) = (pair.lo(), pair.hi());
            let (la, lb_) = (st.loc[a.0], st.loc[b.0]);
            let mut meet = i64::MAX;
            for &(u, v, d) in &self.ps_edges {
                if !self.problem.ps_allowed(pair, d) {
                    continue;
                }
                for (x, y) in [(u, v), (v, u)] {
                    let ta = avail(a) + self.min_swap * self.hw.hops(la, x) as i64;
                    let tb = avail(b) + self.min_swap * self.hw.hops(lb_, y) as i64;
                    meet = meet.min(ta.max(tb) + d as i64);
                }
            }
            let later = (self.p - 1 - first) as i64 * (self.min_mix + self.min_ps[g]);
            lb = lb.max(meet + later);
        }
        for s in 0..st.loc.len() {
            let s = QState(s);
            if !self.problem.is_used(s) {
                continue;
            }
            let mut load = avail(s);
            for l in 0..self.p {
                for pair in self.problem.goals_of(s) {
                    let g = self.goal_index[pair];
                    if st.achieved[l] >> g & 1 == 0 {
                        load += self.min_ps[g];
                    }
                }
                if l + 1 < self.p && st.mixed[l] >> s.0 & 1 == 0 {
                    load += self.min_mix;
                }
            }
            lb = lb.max(load);
        }
        lb
    }

    fn actions(&self, st: &State) -> Vec<Act> {
        let hw = self.hw;
        let free = |q: Qubit| st.busy[q.0] <= st.t;
        let mut out = Vec::new();
        for &(x, y, d) in &self.ps_edges {
            if !free(x) || !free(y) {
                continue;
            }
            let pair = QPair::new(st.occ[x.0], st.occ[y.0]);
            if let Some(&g) = self.goal_index.get(&pair) {
                if self.problem.ps_allowed(pair, d) {
                    if let Some(level) = self.ready_level(st, g) {
                        out.push(Act::Ps(x, y, level, g));
                    }
                }
            }
        }
        for q in hw.qubits().filter(|q| free(*q)) {
            let s = st.occ[q.0];
            if !self.problem.is_used(s) {
                continue;
            }
            for l in 0..self.p - 1 {
                if st.mixed[l] >> s.0 & 1 == 0 {
                    if st.open[l][s.0] == 0 {
                        out.push(Act::Mix(q, l as u32 + 1));
                    }
                    break;
                }
            }
        }
        for e in hw.edges_of(GateKind::Swap) {
            let (x, y) = (e.a, e.b);
            if !free(x) || !free(y) {
                continue;
            }
            if !self.needs_routing(st, st.occ[x.0]) && !self.needs_routing(st, st.occ[y.0]) {
                continue;
            }
            if st.last_swap[x.0] == Some((x, y)) && st.last_swap[y.0] == Some((x, y)) {
                continue;
            }
            out.push(Act::Swap(x, y));
        }
        out
    }

    fn apply(&self, st: &mut State, act: Act) -> ScheduledAction {
        let t = st.t;
        match act {
            Act::Swap(x, y) => {
                let d = self.hw.gate_duration(x, y, GateKind::Swap).unwrap() as i64;
                let a = ScheduledAction::swap(Time::from_int(t), Time::from_int(d), [x, y], [st.occ[x.0], st.occ[y.0]]);
                st.occ.swap(x.0, y.0);
                st.loc[st.occ[x.0].0] = x;
                st.loc[st.occ[y.0].0] = y;
                st.busy[x.0] = t + d;
                st.busy[y.0] = t + d;
                st.last_swap[x.0] = Some((x, y));
                st.last_swap[y.0] = Some((x, y));
                a
            }
            Act::Ps(x, y, level, g) => {
                let d = self.hw.gate_duration(x, y, GateKind::Ps).unwrap() as i64;
                let a = ScheduledAction::ps(Time::from_int(t), Time::from_int(d), level, [x, y], [st.occ[x.0], st.occ[y.0]]);
                let l = level as usize - 1;
                st.achieved[l] |= 1 << g;
                st.open[l][st.occ[x.0].0] -= 1;
                st.open[l][st.occ[y.0].0] -= 1;
                st.left -= 1;
                st.busy[x.0] = t + d;
                st.busy[y.0] = t + d;
                st.last_swap[x.0] = None;
                st.last_swap[y.0] = None;
                a
            }
            Act::Mix(q, level) => {
                let d = self.hw.mix_duration(q) as i64;
                let s = st.occ[q.0];
                st.mixed[level as usize - 1] |= 1 << s.0;
                st.busy[q.0] = t + d;
                st.last_swap[q.0] = None;
                ScheduledAction::mix(Time::from_int(t), Time::from_int(d), level, q, s)
            }
        }
    }

    fn memo_key(&self, st: &State) -> Vec<u8> {
        let mut key = Vec::with_capacity(self.hw.len() * 2 + 16 * self.p);
        for q in 0..self.hw.len() {
            let s = st.occ[q];
            let relevant = self.needs_routing(st, s) || self.mix_pending(st, s);
            key.push(if relevant { s.0 as u8 } else { u8::MAX });
            key.push((st.busy[q] - st.t).max(0).min(255) as u8);
        }
        for l in 0..self.p {
            key.extend_from_slice(&st.achieved[l].to_le_bytes());
            key.extend_from_slice(&st.mixed[l].to_le_bytes());
        }
        key
    }

    fn record(&mut self, st: &State, path: &[ScheduledAction]) {
        let ms = st.busy.iter().copied().max().unwrap_or(0).max(st.t);
        if ms < self.best {
            self.best = ms;
            self.found = Some(TemporalPlan::new(path.to_vec()));
        }
    }

    /// True if the branch cannot lead to a plan shorter than the incumbent.
    fn bounded(&mut self, st: &State) -> bool {
        let lb = self.lower_bound(st);
        if lb >= self.best {
            return true;
        }
        if self.limits.max_makespan.is_some_and(|m| lb > m) {
            self.cut = true;
            return true;
        }
        false
    }

    fn epoch(&mut self, st: State, path: &mut Vec<ScheduledAction>) {
        if self.aborted {
            return;
        }
        if self.bounded(&st) {
            return;
        }
        let key = self.memo_key(&st);
        match self.memo.get(&key) {
            Some(&t) if t <= st.t => return,
            _ => {
                if self.memo.len() < MEMO_CAP {
                    self.memo.insert(key, st.t);
                }
            }
        }
        let acts = self.actions(&st);
        self.choose(&st, &acts, 0, path);
    }

    fn choose(&mut self, st: &State, acts: &[Act], from: usize, path: &mut Vec<ScheduledAction>) {
        self.nodes += 1;
        if self.nodes > self.limits.node_budget {
            self.aborted = true;
        }
        if self.aborted {
            return;
        }
        for i in from..acts.len() {
            let qubits: &[Qubit] = match &acts[i] {
                Act::Swap(x, y) | Act::Ps(x, y, _, _) => &[*x, *y],
                Act::Mix(q, _) => std::slice::from_ref(q),
            };
            if qubits.iter().any(|q| st.busy[q.0] > st.t) {
                continue;
            }
            if path.len() >= self.limits.max_actions {
                self.cut = true;
                break;
            }
            let mut child = st.clone();
            let action = self.apply(&mut child, acts[i]);
            path.push(action);
            if self.done(&child) {
                self.record(&child, path);
            } else if !self.bounded(&child) {
                self.choose(&child, acts, i + 1, path);
            }
            path.pop();
            if self.aborted {
                return;
            }
        }
        // Let time run to the next completion.
        let next = st.busy.iter().copied().filter(|&b| b > st.t).min();
        if let Some(t) = next {
            let mut child = st.clone();
            child.t = t;
            self.epoch(child, path);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::validator::validate;

    #[test]
    fn adjacent_goal_is_three() {
        let p = fixtures::problem_on_n8(&[(0, 1)], 1);
        let r = optimal_compile(&p, Limits::default()).unwrap();
        assert!(r.proved_optimal);
        assert_eq!(r.makespan(), Time::from_int(3));
    }

    #[test]
    fn empty_goal_set() {
        let r = optimal_compile(&fixtures::empty_problem(1), Limits::default()).unwrap();
        assert!(r.proved_optimal);
        assert!(r.plan.is_empty());
    }

    #[test]
    fn tradeoff_instance_is_eleven() {
        let p = fixtures::two_goal_tradeoff();
        let r = optimal_compile(&p, Limits::default()).unwrap();
        assert!(r.proved_optimal);
        assert!(validate(&r.plan, &p).valid);
        assert_eq!(r.makespan(), Time::from_int(11));
    }

    #[test]
    fn node_budget_exhaustion_is_reported() {
        let p = fixtures::six_vertex_problem(1);
        let r = optimal_compile(&p, Limits { node_budget: 10, ..Limits::default() }).unwrap();
        assert!(!r.proved_optimal);
        assert!(validate(&r.plan, &p).valid);
    }

    #[test]
    fn two_levels_on_one_pair() {
        let p = fixtures::problem_on_n8(&[(0, 1)], 2);
        let r = optimal_compile(&p, Limits::default()).unwrap();
        assert!(r.proved_optimal);
        assert!(validate(&r.plan, &p).valid);
        // gate, both mixes in parallel, gate again
        assert_eq!(r.makespan(), Time::from_int(7));
    }
}
