use crate::plan::TemporalPlan;
use crate::problem::CompilationProblem;

use super::engine::{Engine, GoalRef, Sched};

/// Order in which goals were carried out, with the route rank used for each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Encoding {
    pub order: Vec<GoalRef>,
    pub ranks: Vec<usize>,
}

/// Dispatch heuristic: repeatedly takes the available goal of the lowest
/// level whose qstates are fewest SWAP hops apart (ties: earliest PS end,
/// then smallest pair) and routes it along its best route.
///
/// The result does not depend on `seed`; the parameter keeps the signature in
/// line with the other planners.
pub fn greedy_compile(problem: &CompilationProblem, seed: u64) -> TemporalPlan {
    let _ = seed;
    let engine = Engine::new(problem);
    greedy_trace(&engine).0.into_plan()
}

pub(crate) fn greedy_trace(engine: &Engine) -> (Sched, Encoding) {
    let hw = engine.hw;
    let mut st = engine.start();
    let mut enc = Encoding { order: Vec::new(), ranks: Vec::new() };
    let all = engine.all_goals();
    while st.left > 0 {
        let avail: Vec<GoalRef> = all.iter().copied().filter(|g| engine.available(&st, *g)).collect();
        let level = avail.iter().map(|g| g.level).min().expect("some goal is available");
        let hops = |g: &GoalRef| {
            let pair = engine.goals[g.idx];
            hw.hops(st.loc[pair.lo().0], st.loc[pair.hi().0])
        };
        let closest = avail.iter().filter(|g| g.level == level).map(hops).min().unwrap();
        let mut best = None;
        for g in avail.iter().filter(|g| g.level == level && hops(g) == closest) {
            let pair = engine.goals[g.idx];
            let routes = engine.ranked_routes(&st, pair);
            let (score, route) = routes.into_iter().next().expect("a PS edge is always reachable");
            let key = (score.0, pair);
            if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
                best = Some((key, *g, route));
            }
        }
        let (_, g, route) = best.unwrap();
        engine.apply(&mut st, g, &route);
        enc.order.push(g);
        enc.ranks.push(0);
    }
    (st, enc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::time::Time;
    use crate::validator::validate;

    #[test]
    fn single_goal_within_witness_cost() {
        let p = fixtures::single_goal_problem();
        let plan = greedy_compile(&p, 0);
        assert!(validate(&plan, &p).valid);
        assert!(plan.makespan() <= Time::from_int(8));
    }

    #[test]
    fn adjacent_goal_is_one_gate() {
        let p = fixtures::problem_on_n8(&[(0, 1)], 1);
        let plan = greedy_compile(&p, 0);
        assert_eq!(plan.len(), 1);
        assert_eq!(plan.makespan(), Time::from_int(3));
    }

    #[test]
    fn empty_goals_give_empty_plan() {
        let plan = greedy_compile(&fixtures::empty_problem(2), 0);
        assert!(plan.is_empty());
    }

    #[test]
    fn six_vertex_levels_validate() {
        for p in 1..=3 {
            let prob = fixtures::six_vertex_problem(p);
            let plan = greedy_compile(&prob, 0);
            let r = validate(&plan, &prob);
            assert!(r.valid, "p={p}: {:?}", r.violations);
        }
    }

    #[test]
    fn pinned_goals_use_matching_edges() {
        let p = fixtures::two_goal_tradeoff();
        let plan = greedy_compile(&p, 0);
        let r = validate(&plan, &p);
        assert!(r.valid, "{:?}", r.violations);
    }

    #[test]
    fn decoding_the_trace_reproduces_the_plan() {
        let p = fixtures::six_vertex_problem(2);
        let engine = Engine::new(&p);
        let (st, enc) = greedy_trace(&engine);
        let again = engine.decode(&enc.order, &enc.ranks);
        assert_eq!(st.actions, again.actions);
    }
}
