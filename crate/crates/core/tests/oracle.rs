//! Cross-checks the branch and bound against a brute-force enumerator.
//!
//! The enumerator steps the clock one cycle at a time and, at every cycle,
//! starts every possible set of qubit-disjoint gates. States are deduplicated
//! per cycle, treating qstates without goals as interchangeable.

use std::collections::HashSet;

use qcc_core::fixtures;
use qcc_core::hardware::GateKind;
use qcc_core::planner::{optimal_compile, Limits};
use qcc_core::problem::{build_problem, seeded_rng, Assignment, CompilationProblem, MaxCutInstance, QPair, QState};
use qcc_core::time::Time;
use qcc_core::validator::validate;
use rand::seq::index::sample;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node {
    /// Occupant per qubit; `u8::MAX` for qstates without goals.
    occ: Vec<u8>,
    busy: Vec<u8>,
    achieved: u64,
}

enum Gate {
    Swap(usize, usize, u8),
    Ps(usize, usize, u8),
}

/// Minimum makespan of a one-level problem, searching up to `horizon`.
fn brute_force(problem: &CompilationProblem, horizon: u32) -> Option<u32> {
    assert_eq!(problem.p, 1);
    let hw = &problem.hardware;
    let n = hw.len();
    let goals: Vec<QPair> = problem.goal_pairs().iter().copied().collect();
    let full = (1u64 << goals.len()) - 1;
    if goals.is_empty() {
        return Some(0);
    }
    let mut occ = vec![u8::MAX; n];
    for (s, q) in problem.initial_layout().iter().enumerate() {
        if problem.is_used(QState(s)) {
            occ[q.0] = s as u8;
        }
    }
    let mut gates = Vec::new();
    for e in hw.edges() {
        let g = match e.kind {
            GateKind::Swap => Gate::Swap(e.a.0, e.b.0, e.duration as u8),
            GateKind::Ps => Gate::Ps(e.a.0, e.b.0, e.duration as u8),
            GateKind::Mix => unreachable!(),
        };
        gates.push(g);
    }
    let mut layer: HashSet<Node> = HashSet::from([Node { occ, busy: vec![0; n], achieved: 0 }]);
    let mut best: Option<u32> = None;
    for t in 0..=horizon {
        if best.is_some_and(|b| t >= b) {
            break;
        }
        let mut next = HashSet::new();
        for node in &layer {
            let mut out = Vec::new();
            expand(node, &gates, 0, &goals, problem, &mut node.clone(), &mut out);
            for child in out {
                if child.achieved == full {
                    let end = t + *child.busy.iter().max().unwrap() as u32;
                    if end <= horizon && best.map_or(true, |b| end < b) {
                        best = Some(end);
                    }
                    continue;
                }
                let mut c = child;
                for b in c.busy.iter_mut() {
                    *b = b.saturating_sub(1);
                }
                next.insert(c);
            }
        }
        layer = next;
    }
    best
}

/// Every way of starting a set of disjoint gates on free qubits.
fn expand(
    base: &Node,
    gates: &[Gate],
    from: usize,
    goals: &[QPair],
    problem: &CompilationProblem,
    cur: &mut Node,
    out: &mut Vec<Node>,
) {
    out.push(cur.clone());
    for i in from..gates.len() {
        match gates[i] {
            Gate::Swap(a, b, d) => {
                if cur.busy[a] > 0 || cur.busy[b] > 0 {
                    continue;
                }
                let saved = cur.clone();
                cur.occ.swap(a, b);
                cur.busy[a] = d;
                cur.busy[b] = d;
                expand(base, gates, i + 1, goals, problem, cur, out);
                *cur = saved;
            }
            Gate::Ps(a, b, d) => {
                if cur.busy[a] > 0 || cur.busy[b] > 0 || cur.occ[a] == u8::MAX || cur.occ[b] == u8::MAX {
                    continue;
                }
                let pair = QPair::new(QState(cur.occ[a] as usize), QState(cur.occ[b] as usize));
                let Some(g) = goals.iter().position(|x| *x == pair) else { continue };
                if cur.achieved >> g & 1 == 1 || !problem.ps_allowed(pair, d as u32) {
                    continue;
                }
                let saved = cur.clone();
                cur.achieved |= 1 << g;
                cur.busy[a] = d;
                cur.busy[b] = d;
                expand(base, gates, i + 1, goals, problem, cur, out);
                *cur = saved;
            }
        }
    }
}

#[test]
fn single_goal_optimum_agrees() {
    let p = fixtures::single_goal_problem();
    let brute = brute_force(&p, 8).expect("witness bounds the optimum by 8");
    let r = optimal_compile(&p, Limits::default()).unwrap();
    assert!(r.proved_optimal);
    assert_eq!(r.makespan(), Time::from_int(brute as i64));
    assert!(validate(&r.plan, &p).valid);
}

#[test]
fn tradeoff_optimum_is_eleven() {
    let p = fixtures::two_goal_tradeoff();
    assert_eq!(brute_force(&p, 11), Some(11));
    assert_eq!(brute_force(&p, 10), None);
    let r = optimal_compile(&p, Limits::default()).unwrap();
    assert!(r.proved_optimal);
    assert_eq!(r.makespan(), Time::from_int(11));
}

#[test]
fn random_small_instances_agree() {
    let hw = fixtures::n8();
    let pairs: Vec<(usize, usize)> = (0..8).flat_map(|i| (i + 1..8).map(move |j| (i, j))).collect();
    for seed in 0..12u64 {
        let mut rng = seeded_rng(seed, 77);
        let k = 1 + (seed % 3) as usize;
        let edges: Vec<_> = sample(&mut rng, pairs.len(), k).iter().map(|i| pairs[i]).collect();
        let inst = MaxCutInstance::new(8, &edges).unwrap();
        let p = build_problem(inst, hw.clone(), 1, Assignment::Random, seed).unwrap();
        let r = optimal_compile(&p, Limits::default()).unwrap();
        assert!(r.proved_optimal);
        let ms = r.makespan().as_int().unwrap() as u32;
        assert_eq!(brute_force(&p, ms), Some(ms), "seed {seed}");
        if ms > 0 {
            assert_eq!(brute_force(&p, ms - 1), None, "seed {seed}");
        }
    }
}
