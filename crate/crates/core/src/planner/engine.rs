//! Serial list scheduling shared by the greedy and anytime planners.
//!
//! Goals are carried out one at a time: the two qstates are routed onto the
//! ends of a PS edge by a sequence of SWAPs, then the PS gate is appended.
//! Every action starts as soon as its qubits are free. MIX gates are appended
//! as soon as a qstate has finished its goals for a level.

use std::collections::VecDeque;

use crate::hardware::{GateKind, HardwareGraph, Qubit};
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::problem::{CompilationProblem, QPair, QState};
use crate::time::Time;

/// A goal instance: level (1-based) and index into [`Engine::goals`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct GoalRef {
    pub level: u32,
    pub idx: usize,
}

/// SWAPs to perform in order, then the PS edge with the first qstate of the
/// goal pair on `edge.0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Route {
    pub swaps: Vec<(Qubit, Qubit)>,
    pub edge: (Qubit, Qubit),
}

pub(crate) struct Engine<'a> {
    pub problem: &'a CompilationProblem,
    pub hw: &'a HardwareGraph,
    pub goals: Vec<QPair>,
    /// PS edges as (a, b, duration), a < b.
    ps_edges: Vec<(Qubit, Qubit, u32)>,
    min_swap: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct Sched {
    pub loc: Vec<Qubit>,
    pub occ: Vec<QState>,
    pub free: Vec<i64>,
    /// `done[level - 1][goal]`.
    pub done: Vec<Vec<bool>>,
    pub mixed: Vec<Vec<bool>>,
    /// Goals left per level and qstate.
    remaining: Vec<Vec<u32>>,
    pub left: usize,
    pub actions: Vec<ScheduledAction>,
}

impl Sched {
    pub fn makespan(&self) -> i64 {
        self.actions.iter().map(|a| a.end().floor()).max().unwrap_or(0)
    }

    /// Sum of per-qubit finish times, used to break makespan ties.
    pub fn load(&self) -> i64 {
        self.free.iter().sum()
    }

    pub fn into_plan(self) -> TemporalPlan {
        TemporalPlan::new(self.actions)
    }
}

/// Shortest path from `from` to `to` over SWAP edges avoiding the `blocked`
/// qubits (the endpoints excepted). Among shortest paths the
/// lexicographically smallest is chosen.
pub(crate) fn path_avoiding(hw: &HardwareGraph, from: Qubit, to: Qubit, blocked: &[Qubit]) -> Option<Vec<Qubit>> {
    if from == to {
        return Some(vec![from]);
    }
    let n = hw.len();
    let mut dist = vec![u32::MAX; n];
    dist[to.0] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(u) = queue.pop_front() {
        for &v in hw.adjacent(u, GateKind::Swap) {
            if dist[v.0] == u32::MAX && (v == from || !blocked.contains(&v)) {
                dist[v.0] = dist[u.0] + 1;
                queue.push_back(v);
            }
        }
    }
    if dist[from.0] == u32::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        cur = *hw
            .adjacent(cur, GateKind::Swap)
            .iter()
            .find(|v| dist[v.0] != u32::MAX && dist[v.0] + 1 == dist[cur.0])
            .expect("distance labels are consistent");
        path.push(cur);
    }
    Some(path)
}

impl<'a> Engine<'a> {
    pub fn new(problem: &'a CompilationProblem) -> Self {
        let hw: &HardwareGraph = &problem.hardware;
        let ps_edges = hw.edges_of(GateKind::Ps).map(|e| (e.a, e.b, e.duration)).collect();
        Engine {
            problem,
            hw,
            goals: problem.goal_pairs().iter().copied().collect(),
            ps_edges,
            min_swap: hw.min_swap_duration() as i64,
        }
    }

    pub fn all_goals(&self) -> Vec<GoalRef> {
        (1..=self.problem.p)
            .flat_map(|level| (0..self.goals.len()).map(move |idx| GoalRef { level, idx }))
            .collect()
    }

    pub fn start(&self) -> Sched {
        let n = self.problem.n_qstates();
        let levels = self.problem.p as usize;
        let loc = self.problem.initial_layout().to_vec();
        let mut occ = vec![QState(0); self.hw.len()];
        for (s, q) in loc.iter().enumerate() {
            occ[q.0] = QState(s);
        }
        let remaining = (0..levels)
            .map(|_| (0..n).map(|s| self.problem.goals_of(QState(s)).len() as u32).collect())
            .collect();
        Sched {
            loc,
            occ,
            free: vec![0; self.hw.len()],
            done: vec![vec![false; self.goals.len()]; levels],
            mixed: vec![vec![false; n]; levels],
            remaining,
            left: self.goals.len() * levels,
            actions: Vec::new(),
        }
    }

    pub fn available(&self, st: &Sched, g: GoalRef) -> bool {
        let l = g.level as usize - 1;
        if st.done[l][g.idx] {
            return false;
        }
        if l == 0 {
            return true;
        }
        let pair = self.goals[g.idx];
        st.done[l - 1][g.idx] && st.mixed[l - 1][pair.lo().0] && st.mixed[l - 1][pair.hi().0]
    }

    pub fn ps_allowed(&self, pair: QPair, duration: u32) -> bool {
        self.problem.ps_allowed(pair, duration)
    }

    fn swap_duration(&self, x: Qubit, y: Qubit) -> i64 {
        self.hw.gate_duration(x, y, GateKind::Swap).expect("route uses SWAP edges") as i64
    }

    /// Candidate routings for a goal from the current placement.
    ///
    /// For each allowed PS edge and orientation, one qstate walks to its end
    /// first and the other follows while steering clear of it. The first
    /// walker either takes its shortest path or avoids the other qstate.
    /// Edges far above the cheapest hop count are skipped.
    pub fn routes(&self, st: &Sched, pair: QPair) -> Vec<Route> {
        const SLACK: u32 = 2;
        let (a, b) = (pair.lo(), pair.hi());
        let (la, lb) = (st.loc[a.0], st.loc[b.0]);
        let mut targets = Vec::new();
        for &(u, v, d) in &self.ps_edges {
            if !self.ps_allowed(pair, d) {
                continue;
            }
            for (x, y) in [(u, v), (v, u)] {
                targets.push((self.hw.hops(la, x) + self.hw.hops(lb, y), x, y));
            }
        }
        let Some(best) = targets.iter().map(|t| t.0).min() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for &(cost, x, y) in &targets {
            if cost > best + SLACK {
                continue;
            }
            for a_first in [true, false] {
                let (m1, t1, m2, t2) = if a_first { (a, x, b, y) } else { (b, y, a, x) };
                for avoid_other in [false, true] {
                    let mut occ = st.occ.clone();
                    let mut loc = st.loc.clone();
                    let blocked: &[Qubit] = if avoid_other { &[loc[m2.0]] } else { &[] };
                    if avoid_other && loc[m2.0] == t1 {
                        continue;
                    }
                    let Some(p1) = path_avoiding(self.hw, loc[m1.0], t1, blocked) else {
                        continue;
                    };
                    let mut swaps: Vec<(Qubit, Qubit)> = Vec::new();
                    for w in p1.windows(2) {
                        swaps.push((w[0], w[1]));
                        exchange(&mut occ, &mut loc, w[0], w[1]);
                    }
                    let Some(p2) = path_avoiding(self.hw, loc[m2.0], t2, &[t1]) else {
                        continue;
                    };
                    for w in p2.windows(2) {
                        swaps.push((w[0], w[1]));
                        exchange(&mut occ, &mut loc, w[0], w[1]);
                    }
                    debug_assert_eq!(loc[a.0], x);
                    debug_assert_eq!(loc[b.0], y);
                    out.push(Route { swaps, edge: (x, y) });
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// End time of the PS gate if `route` were applied now, and its swap count.
    pub fn evaluate(&self, st: &Sched, route: &Route) -> (i64, usize) {
        let mut free = st.free.clone();
        for &(x, y) in &route.swaps {
            let end = free[x.0].max(free[y.0]) + self.swap_duration(x, y);
            free[x.0] = end;
            free[y.0] = end;
        }
        let (x, y) = route.edge;
        let d = self.hw.gate_duration(x, y, GateKind::Ps).expect("PS edge") as i64;
        (free[x.0].max(free[y.0]) + d, route.swaps.len())
    }

    /// Routes sorted by (PS end time, swap count, route).
    pub fn ranked_routes(&self, st: &Sched, pair: QPair) -> Vec<((i64, usize), Route)> {
        let mut scored: Vec<_> = self.routes(st, pair).into_iter().map(|r| (self.evaluate(st, &r), r)).collect();
        scored.sort();
        scored
    }

    /// Appends the SWAPs and PS gate of `route` for goal `g`, then any MIX
    /// gates this unlocks.
    pub fn apply(&self, st: &mut Sched, g: GoalRef, route: &Route) {
        for &(x, y) in &route.swaps {
            let (x, y) = (x.min(y), x.max(y));
            let start = st.free[x.0].max(st.free[y.0]);
            let d = self.swap_duration(x, y);
            st.actions.push(ScheduledAction::swap(
                Time::from_int(start),
                Time::from_int(d),
                [x, y],
                [st.occ[x.0], st.occ[y.0]],
            ));
            st.free[x.0] = start + d;
            st.free[y.0] = start + d;
            exchange(&mut st.occ, &mut st.loc, x, y);
        }
        let (x, y) = route.edge;
        let (x, y) = (x.min(y), x.max(y));
        let pair = self.goals[g.idx];
        debug_assert_eq!(QPair::new(st.occ[x.0], st.occ[y.0]), pair);
        let start = st.free[x.0].max(st.free[y.0]);
        let d = self.hw.gate_duration(x, y, GateKind::Ps).expect("PS edge") as i64;
        st.actions.push(ScheduledAction::ps(
            Time::from_int(start),
            Time::from_int(d),
            g.level,
            [x, y],
            [st.occ[x.0], st.occ[y.0]],
        ));
        st.free[x.0] = start + d;
        st.free[y.0] = start + d;
        let l = g.level as usize - 1;
        st.done[l][g.idx] = true;
        st.left -= 1;
        if g.level < self.problem.p {
            for s in [pair.lo(), pair.hi()] {
                st.remaining[l][s.0] -= 1;
                if st.remaining[l][s.0] == 0 {
                    let q = st.loc[s.0];
                    let start = st.free[q.0];
                    let d = self.hw.mix_duration(q) as i64;
                    st.actions.push(ScheduledAction::mix(Time::from_int(start), Time::from_int(d), g.level, q, s));
                    st.free[q.0] = start + d;
                    st.mixed[l][s.0] = true;
                }
            }
        }
    }

    /// Decodes a priority order of goals plus a route rank per goal into a
    /// plan. At each step the first available goal in `order` is carried out
    /// with its `rank`-th best route (clamped to the number of routes).
    pub fn decode(&self, order: &[GoalRef], ranks: &[usize]) -> Sched {
        let mut st = self.start();
        let mut pending: Vec<(GoalRef, usize)> = order.iter().copied().zip(ranks.iter().copied()).collect();
        while st.left > 0 {
            let pos = pending
                .iter()
                .position(|(g, _)| self.available(&st, *g))
                .expect("some goal is always available");
            let (g, rank) = pending.remove(pos);
            let routes = self.ranked_routes(&st, self.goals[g.idx]);
            let (_, route) = &routes[rank.min(routes.len() - 1)];
            self.apply(&mut st, g, route);
        }
        st
    }

    /// Lower bound on the makespan of any completion of `st`, ignoring
    /// interactions between goals.
    pub fn lower_bound(&self, st: &Sched) -> i64 {
        let mut lb = st.free.iter().copied().max().unwrap_or(0);
        let avail = |s: QState| st.free[st.loc[s.0].0];
        let min_ps = self.ps_edges.iter().map(|e| e.2).min().unwrap_or(0) as i64;
        let min_mix = self.hw.qubits().map(|q| self.hw.mix_duration(q)).min().unwrap_or(0) as i64;
        let p = self.problem.p as usize;
        for (idx, &pair) in self.goals.iter().enumerate() {
            let Some(first) = (0..p).find(|&l| !st.done[l][idx]) else { continue };
            let (a, b) = (pair.lo(), pair.hi());
            let mut meet = i64::MAX;
            for &(u, v, d) in &self.ps_edges {
                if !self.ps_allowed(pair, d) {
                    continue;
                }
                for (x, y) in [(u, v), (v, u)] {
                    let ta = avail(a) + self.min_swap * self.hw.hops(st.loc[a.0], x) as i64;
                    let tb = avail(b) + self.min_swap * self.hw.hops(st.loc[b.0], y) as i64;
                    meet = meet.min(ta.max(tb) + d as i64);
                }
            }
            // Later levels need at least a mix and another gate each.
            let later = (p - 1 - first) as i64 * (min_mix + self.pinned_or(pair, min_ps));
            lb = lb.max(meet + later);
        }
        // Serial load of each qstate.
        for s in 0..self.problem.n_qstates() {
            let s = QState(s);
            let mut load = avail(s);
            for l in 0..p {
                let mut any = false;
                for pair in self.problem.goals_of(s) {
                    let idx = self.goals.binary_search(pair).expect("goal pair");
                    if !st.done[l][idx] {
                        load += self.pinned_or(*pair, min_ps);
                        any = true;
                    }
                }
                if l + 1 < p && !st.mixed[l][s.0] && (any || self.problem.is_used(s)) {
                    load += min_mix;
                }
            }
            lb = lb.max(load);
        }
        lb
    }

    fn pinned_or(&self, pair: QPair, default: i64) -> i64 {
        self.problem.pin(pair).map_or(default, |d| d as i64)
    }
}

pub(crate) fn exchange(occ: &mut [QState], loc: &mut [Qubit], x: Qubit, y: Qubit) {
    occ.swap(x.0, y.0);
    loc[occ[x.0].0] = x;
    loc[occ[y.0].0] = y;
}
