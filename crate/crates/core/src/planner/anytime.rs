use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::plan::TemporalPlan;
use crate::problem::{seeded_rng, CompilationProblem};
use crate::time::Time;

use super::engine::{Engine, Sched};
use super::greedy::{greedy_trace, Encoding};
use super::replicate::replicate_reverse;

/// RNG stream reserved for the local search.
const SEARCH_STREAM: u64 = 2;

/// Search budget. The search stops at whichever limit is hit first; with
/// only an iteration limit the result is fully determined by the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub iterations: Option<u64>,
    pub time: Option<Duration>,
    /// Stop after this many iterations without improvement.
    pub patience: Option<u64>,
}

impl Budget {
    pub fn iterations(n: u64) -> Self {
        Budget { iterations: Some(n), ..Budget::default() }
    }

    pub fn time(d: Duration) -> Self {
        Budget { time: Some(d), ..Budget::default() }
    }

    pub fn with_patience(mut self, n: u64) -> Self {
        self.patience = Some(n);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.iterations == Some(0) || self.time == Some(Duration::ZERO)
    }

    fn split(&self) -> Self {
        Budget { time: self.time.map(|t| t / 2), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Improvement {
    pub iteration: u64,
    #[serde(serialize_with = "ser_secs")]
    pub elapsed: Duration,
    pub makespan: Time,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone)]
pub struct AnytimeResult {
    pub plan: TemporalPlan,
    /// Every improvement of the incumbent, the greedy plan first. Makespans
    /// are strictly decreasing.
    pub history: Vec<Improvement>,
    pub iterations: u64,
    /// The search stopped early because it reached this lower bound.
    pub lower_bound: i64,
}

impl AnytimeResult {
    pub fn makespan(&self) -> Time {
        self.plan.makespan()
    }

    pub fn reached_bound(&self) -> bool {
        self.plan.makespan() <= Time::from_int(self.lower_bound)
    }
}

/// Improves on the greedy plan by randomized local search over goal orders
/// and route choices, with restarts.
///
/// A solution is a priority list of goals plus a route rank per goal, decoded
/// by the serial scheduler. Moves swap two goals, move one goal, or change
/// one route rank. Equal-or-better neighbors are accepted; after a stretch
/// without progress the search restarts from a random solution. For `p > 1`
/// the one-level problem is solved first with the same seed and budget and
/// its mirrored replication seeds the incumbent.
pub fn anytime_compile(problem: &CompilationProblem, seed: u64, budget: Budget) -> AnytimeResult {
    let started = Instant::now();
    let engine = Engine::new(problem);
    let (greedy, enc) = greedy_trace(&engine);
    let lower_bound = engine.lower_bound(&engine.start());
    let mut best = greedy.clone().into_plan();
    let mut history = vec![Improvement { iteration: 0, elapsed: started.elapsed(), makespan: best.makespan() }];
    if budget.is_zero() {
        return AnytimeResult { plan: best, history, iterations: 0, lower_bound };
    }

    let phase_budget = budget.split();
    if problem.p > 1 && !problem.goal_pairs().is_empty() {
        let one = problem.with_levels(1).expect("p >= 1");
        let base = anytime_compile(&one, seed, phase_budget);
        let mirrored = replicate_reverse(&base.plan, problem).expect("one-level plan is valid");
        if mirrored.makespan() < best.makespan() {
            best = mirrored;
            history.push(Improvement { iteration: 0, elapsed: started.elapsed(), makespan: best.makespan() });
        }
    }
    let deadline = budget.time.map(|t| started + t);

    let mut rng = seeded_rng(seed, SEARCH_STREAM);
    let key = |s: &Sched| (s.makespan(), s.load());
    let mut cur = enc;
    let mut cur_key = key(&greedy);
    let mut stall = 0u64;
    let mut since_best = 0u64;
    let n = cur.order.len();
    let restart_after = 50 + 10 * n as u64;
    let mut iterations = 0u64;

    while n > 0 && best.makespan() > Time::from_int(lower_bound) {
        if budget.iterations.is_some_and(|max| iterations >= max) {
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        if budget.patience.is_some_and(|p| since_best >= p) {
            break;
        }
        iterations += 1;

        let cand = if stall >= restart_after {
            stall = 0;
            let mut order = cur.order.clone();
            order.shuffle(&mut rng);
            let ranks = (0..n).map(|_| random_rank(&mut rng)).collect();
            cur_key = (i64::MAX, i64::MAX);
            Encoding { order, ranks }
        } else {
            mutate(&cur, &mut rng)
        };
        let st = engine.decode(&cand.order, &cand.ranks);
        let k = key(&st);
        if k < cur_key {
            stall = 0;
        } else {
            stall += 1;
        }
        if k <= cur_key {
            cur = cand;
            cur_key = k;
        }
        if Time::from_int(k.0) < best.makespan() {
            best = st.into_plan();
            since_best = 0;
            history.push(Improvement { iteration: iterations, elapsed: started.elapsed(), makespan: best.makespan() });
        } else {
            since_best += 1;
        }
    }
    AnytimeResult { plan: best, history, iterations, lower_bound }
}

fn random_rank<R: Rng>(rng: &mut R) -> usize {
    if rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(1..4)
    }
}

fn mutate<R: Rng>(enc: &Encoding, rng: &mut R) -> Encoding {
    let mut out = enc.clone();
    let n = out.order.len();
    match rng.gen_range(0..3) {
        0 if n > 1 => {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            out.order.swap(i, j);
            out.ranks.swap(i, j);
        }
        1 if n > 1 => {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let g = out.order.remove(i);
            let r = out.ranks.remove(i);
            out.order.insert(j, g);
            out.ranks.insert(j, r);
        }
        _ => {
            let i = rng.gen_range(0..n);
            out.ranks[i] = random_rank(rng);
        }
    }
    out
}
