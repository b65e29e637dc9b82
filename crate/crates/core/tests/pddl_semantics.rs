//! Executes emitted PDDL on sampled plans with a small durative-action
//! simulator, and checks that both condition styles agree with each other
//! and with the validator.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use qcc_core::pddl::sexpr::{parse, Sexpr};
use qcc_core::pddl::{emit_domain, emit_problem, render_plan, Variant};
use qcc_core::planner::{anytime_compile, Budget};
use qcc_core::problem::{build_problem, seeded_rng, Assignment, CompilationProblem, MaxCutInstance};
use qcc_core::time::Time;
use qcc_core::validator::validate;
use qcc_core::{fixtures, preset, TemporalPlan};
use rand::seq::index::sample;
use rand::Rng;

type Fact = Vec<String>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum When {
    Start,
    End,
    OverAll,
}

struct Literal {
    when: When,
    positive: bool,
    atom: Fact,
}

struct Action {
    params: Vec<String>,
    conditions: Vec<Literal>,
    effects: Vec<Literal>,
}

struct Model {
    actions: HashMap<String, Action>,
    init: BTreeSet<Fact>,
    goal: Vec<Fact>,
}

fn atoms(s: &Sexpr) -> Fact {
    s.list().unwrap().iter().map(|a| a.atom().unwrap().to_string()).collect()
}

fn literals(s: &Sexpr) -> Vec<Literal> {
    let items: Vec<&Sexpr> = if s.is("and") { s.list().unwrap()[1..].iter().collect() } else { vec![s] };
    items
        .into_iter()
        .map(|timed| {
            let l = timed.list().unwrap();
            let when = match (l[0].atom().unwrap(), l[1].atom()) {
                ("at", Some("start")) => When::Start,
                ("at", Some("end")) => When::End,
                ("over", Some("all")) => When::OverAll,
                other => panic!("unexpected time specifier {other:?}"),
            };
            let body = &l[2];
            if body.is("not") {
                Literal { when, positive: false, atom: atoms(&body.list().unwrap()[1]) }
            } else {
                Literal { when, positive: true, atom: atoms(body) }
            }
        })
        .collect()
}

fn load(problem: &CompilationProblem, variant: Variant) -> Model {
    let domain = parse(&emit_domain(problem, variant).unwrap()).unwrap();
    let mut actions = HashMap::new();
    for a in domain.list().unwrap().iter().filter(|s| s.is(":durative-action")) {
        let l = a.list().unwrap();
        let name = l[1].atom().unwrap().to_string();
        let field = |key: &str| &l[l.iter().position(|s| s.atom() == Some(key)).unwrap() + 1];
        let params = field(":parameters")
            .list()
            .unwrap()
            .iter()
            .filter_map(|s| s.atom())
            .filter(|s| s.starts_with('?'))
            .map(str::to_string)
            .collect();
        let action = Action { params, conditions: literals(field(":condition")), effects: literals(field(":effect")) };
        actions.insert(name, action);
    }
    let prob = parse(&emit_problem(problem, variant).unwrap()).unwrap();
    let section = |key: &str| {
        prob.list().unwrap().iter().find(|s| s.is(key)).unwrap().list().unwrap()[1..].to_vec()
    };
    let init = section(":init").iter().map(atoms).collect();
    let goal_and = &section(":goal")[0];
    let goal = goal_and.list().unwrap()[1..].iter().map(atoms).collect();
    Model { actions, init, goal }
}

/// Whether each action's conditions held when checked, and whether the goal
/// holds at the end. Effects are applied even when conditions fail, so both
/// variants see the same sequence of location facts.
fn simulate(model: &Model, plan_text: &str) -> (Vec<bool>, bool) {
    struct Step {
        start: Time,
        end: Time,
        name: String,
        args: Vec<String>,
    }
    let steps: Vec<Step> = plan_text
        .lines()
        .map(|line| {
            let (t, rest) = line.split_once(": (").unwrap();
            let (call, dur) = rest.split_once(") [").unwrap();
            let start: Time = t.parse().unwrap();
            let duration: Time = dur.trim_end_matches(']').parse().unwrap();
            let mut words = call.split_whitespace().map(str::to_string);
            Step { start, end: start + duration, name: words.next().unwrap(), args: words.collect() }
        })
        .collect();
    // Ends are processed before starts at equal times.
    let mut events: Vec<(Time, u8, usize)> = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        events.push((s.start, 1, i));
        events.push((s.end, 0, i));
    }
    events.sort();
    let mut state = model.init.clone();
    let mut ok = vec![true; steps.len()];
    let ground = |a: &Action, args: &[String], atom: &Fact| -> Fact {
        atom.iter()
            .map(|w| match a.params.iter().position(|p| p == w) {
                Some(i) => args[i].clone(),
                None => w.clone(),
            })
            .collect()
    };
    for (_, phase, i) in events {
        let step = &steps[i];
        let action = &model.actions[&step.name];
        let check = |state: &BTreeSet<Fact>, when: When| {
            action
                .conditions
                .iter()
                .filter(|c| c.when == when)
                .all(|c| state.contains(&ground(action, &step.args, &c.atom)) == c.positive)
        };
        let when = if phase == 1 { When::Start } else { When::End };
        if phase == 0 && !check(&state, When::OverAll) {
            ok[i] = false;
        }
        if !check(&state, when) {
            ok[i] = false;
        }
        // Deletes first, then adds.
        for positive in [false, true] {
            for e in action.effects.iter().filter(|e| e.when == when && e.positive == positive) {
                let fact = ground(action, &step.args, &e.atom);
                if positive {
                    state.insert(fact);
                } else {
                    state.remove(&fact);
                }
            }
        }
        if phase == 1 && !check(&state, When::OverAll) {
            ok[i] = false;
        }
    }
    let reached = model.goal.iter().all(|g| state.contains(g));
    (ok, reached)
}

fn random_problem(n_states: usize, k: usize, p: u32, seed: u64) -> CompilationProblem {
    let pairs: Vec<(usize, usize)> = (0..n_states).flat_map(|i| (i + 1..n_states).map(move |j| (i, j))).collect();
    let mut rng = seeded_rng(seed, 31);
    let edges: Vec<_> = sample(&mut rng, pairs.len(), k).iter().map(|i| pairs[i]).collect();
    let inst = MaxCutInstance::new(n_states, &edges).unwrap();
    build_problem(inst, Arc::new(preset("N8").unwrap()), p, Assignment::Random, seed).unwrap()
}

/// The planner's plan and copies with one action dropped or one PS repeated.
fn samples(problem: &CompilationProblem, seed: u64) -> Vec<TemporalPlan> {
    let plan = anytime_compile(problem, seed, Budget::iterations(20)).plan;
    let mut rng = seeded_rng(seed, 32);
    let mut out = vec![plan.clone()];
    for _ in 0..4 {
        if plan.is_empty() {
            break;
        }
        let mut dropped = plan.clone();
        dropped.actions.remove(rng.gen_range(0..plan.len()));
        out.push(dropped);
    }
    if let Some(ps) = plan.actions.iter().find(|a| a.kind == qcc_core::GateKind::Ps) {
        let mut repeated = plan.clone();
        repeated.actions.push(ps.at(plan.makespan()));
        out.push(repeated);
    }
    out
}

#[test]
fn condition_styles_agree_and_match_the_validator() {
    let mut checked = 0;
    for seed in 0..60u64 {
        let n_states = if seed % 2 == 0 { 8 } else { 7 };
        let k = 1 + (seed as usize % 6);
        let p = 1 + (seed as u32 % 3);
        let problem = random_problem(n_states, k, p, seed);
        let neg = load(&problem, Variant::Negative);
        let pos = load(&problem, Variant::Positive);
        for plan in samples(&problem, seed) {
            let text = render_plan(&plan, &problem);
            let (ok_neg, goal_neg) = simulate(&neg, &text);
            let (ok_pos, goal_pos) = simulate(&pos, &text);
            assert_eq!(ok_neg, ok_pos, "seed {seed}\n{text}");
            assert_eq!(goal_neg, goal_pos, "seed {seed}");
            let valid = validate(&plan, &problem).valid;
            let executes = ok_neg.iter().all(|&b| b) && goal_neg;
            assert_eq!(valid, executes, "seed {seed}\n{text}");
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn witness_executes_in_both_variants() {
    let (problem, plan) = fixtures::single_goal_witness();
    let text = render_plan(&plan, &problem);
    for variant in [Variant::Negative, Variant::Positive] {
        let (ok, goal) = simulate(&load(&problem, variant), &text);
        assert!(ok.iter().all(|&b| b) && goal);
    }
}

#[test]
fn premature_second_level_fails_in_both_variants() {
    let problem = fixtures::problem_on_n8(&[(0, 1)], 2);
    // Second-level PS without the mixes in between.
    let text = "0.000: (P-S_1stPhaseSeparation_at_1-2 q1 q2) [3.000]\n3.000: (P-S_2ndPhaseSeparation_at_1-2 q1 q2) [3.000]\n";
    for variant in [Variant::Negative, Variant::Positive] {
        let (ok, goal) = simulate(&load(&problem, variant), text);
        assert_eq!(ok, [true, false]);
        assert!(!goal);
    }
}
