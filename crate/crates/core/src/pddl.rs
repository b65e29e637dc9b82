//! PDDL 2.1 encodings for external temporal planners, and IPC plan I/O.
//!
//! Qubit locations are baked into action names (`swap_1_2`,
//! `P-S_1stPhaseSeparation_at_6-7`, `mix_q5_at_1`) so that 2-qubit actions
//! only take the two qstates as parameters. Qubits are referred to by their
//! 1-based canonical index.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::hardware::{GateKind, Qubit};
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::problem::{CompilationProblem, QState};
use crate::time::{ipc_decimal, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Negated conditions, as most temporal planners accept.
    #[default]
    Negative,
    /// Negated conditions replaced by complement predicates (`not_mixed`,
    /// `not_GOAL_PS1`, ...) for planners without negative preconditions.
    Positive,
}

impl FromStr for Variant {
    type Err = PddlError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Variant::Negative),
            "positive" => Ok(Variant::Positive),
            other => Err(PddlError::UnknownVariant(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PddlError {
    #[error("unknown PDDL variant `{0}` (expected negative or positive)")]
    UnknownVariant(String),
    #[error("problems with gate pins cannot be encoded in this domain")]
    PinnedGates,
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown action `{name}`")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: action `{name}` takes {expected} arguments, got {found}")]
    Arity { line: usize, name: String, expected: usize, found: usize },
    #[error("line {line}: unknown qstate `{name}`")]
    UnknownQState { line: usize, name: String },
}

/// English ordinal used in phase-separation action names: 1st, 2nd, 3rd, 4th,
/// 11th, 21st, ...
pub fn ordinal(n: u32) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

/// `mixed` for level 1, `mixed2`, `mixed3`, ... above.
fn mixed_pred(level: u32) -> String {
    if level == 1 {
        "mixed".to_string()
    } else {
        format!("mixed{level}")
    }
}

pub fn swap_name(a: usize, b: usize) -> String {
    format!("swap_{a}_{b}")
}

pub fn ps_name(level: u32, a: usize, b: usize) -> String {
    format!("P-S_{}PhaseSeparation_at_{a}-{b}", ordinal(level))
}

pub fn mix_name(level: u32, q: QState, at: usize) -> String {
    if level == 1 {
        format!("mix_{q}_at_{at}")
    } else {
        format!("mix{level}_{q}_at_{at}")
    }
}

const DOMAIN_NAME: &str = "qaoa-compilation";

struct Cond<'a> {
    out: &'a mut String,
    first: bool,
    indent: &'static str,
}

impl Cond<'_> {
    fn item(&mut self, s: &str) {
        if self.first {
            self.out.push_str(s);
            self.first = false;
        } else {
            let _ = write!(self.out, "\n{}{}", self.indent, s);
        }
    }
}

/// Emits the domain: one durative action per SWAP edge, per PS edge and
/// level, and per (used qstate, qubit) for every level below `p`.
pub fn emit_domain(problem: &CompilationProblem, variant: Variant) -> Result<String, PddlError> {
    if !problem.pins().is_empty() {
        return Err(PddlError::PinnedGates);
    }
    let hw = &problem.hardware;
    let p = problem.p;
    let neg = variant == Variant::Negative;
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {DOMAIN_NAME})");
    if neg {
        out.push_str("  (:requirements :typing :durative-actions :negative-preconditions)\n");
    } else {
        out.push_str("  (:requirements :typing :durative-actions)\n");
    }
    out.push_str("  (:types qstate)\n");
    let consts: Vec<String> = (0..problem.n_qstates()).map(|i| QState(i).to_string()).collect();
    let _ = writeln!(out, "  (:constants {} - qstate)", consts.join(" "));
    out.push_str("  (:predicates\n");
    for q in hw.qubits() {
        let _ = writeln!(out, "    (located_at_{} ?q - qstate)", hw.label(q));
    }
    for level in 1..=p {
        let _ = writeln!(out, "    (GOAL_PS{level} ?q1 - qstate ?q2 - qstate)");
        if !neg {
            let _ = writeln!(out, "    (not_GOAL_PS{level} ?q1 - qstate ?q2 - qstate)");
        }
    }
    for level in 1..p {
        let _ = writeln!(out, "    ({} ?q - qstate)", mixed_pred(level));
        if !neg {
            let _ = writeln!(out, "    (not_{} ?q - qstate)", mixed_pred(level));
        }
    }
    out.push_str("  )\n");

    let cond_indent = "                    ";
    let eff_indent = "                 ";
    for e in hw.edges_of(GateKind::Swap) {
        let (a, b) = (hw.label(e.a), hw.label(e.b));
        let _ = write!(
            out,
            "\n  (:durative-action {}\n    :parameters (?q1 - qstate ?q2 - qstate)\n    :duration (= ?duration {})\n",
            swap_name(a, b),
            e.duration
        );
        let _ = write!(
            out,
            "    :condition (and (at start (located_at_{a} ?q1))\n{cond_indent}(at start (located_at_{b} ?q2)))\n"
        );
        let _ = write!(
            out,
            "    :effect (and (at start (not (located_at_{a} ?q1)))\n{eff_indent}(at start (not (located_at_{b} ?q2)))\n{eff_indent}(at end (located_at_{a} ?q2))\n{eff_indent}(at end (located_at_{b} ?q1))))\n"
        );
    }

    for level in 1..=p {
        for e in hw.edges_of(GateKind::Ps) {
            let (a, b) = (hw.label(e.a), hw.label(e.b));
            let _ = write!(
                out,
                "\n  (:durative-action {}\n    :parameters (?q1 - qstate ?q2 - qstate)\n    :duration (= ?duration {})\n    :condition (and ",
                ps_name(level, a, b),
                e.duration
            );
            let mut c = Cond { out: &mut out, first: true, indent: cond_indent };
            c.item(&format!("(at start (located_at_{a} ?q1))"));
            c.item(&format!("(at start (located_at_{b} ?q2))"));
            if neg {
                c.item(&format!("(at start (not (GOAL_PS{level} ?q1 ?q2)))"));
            } else {
                c.item(&format!("(at start (not_GOAL_PS{level} ?q1 ?q2))"));
            }
            if level > 1 {
                let prev = level - 1;
                c.item(&format!("(at start (GOAL_PS{prev} ?q1 ?q2))"));
                c.item(&format!("(at start ({} ?q1))", mixed_pred(prev)));
                c.item(&format!("(at start ({} ?q2))", mixed_pred(prev)));
            }
            out.push_str(")\n    :effect (and ");
            let mut c = Cond { out: &mut out, first: true, indent: eff_indent };
            c.item(&format!("(at start (not (located_at_{a} ?q1)))"));
            c.item(&format!("(at start (not (located_at_{b} ?q2)))"));
            c.item(&format!("(at end (located_at_{a} ?q1))"));
            c.item(&format!("(at end (located_at_{b} ?q2))"));
            c.item(&format!("(at end (GOAL_PS{level} ?q1 ?q2))"));
            c.item(&format!("(at end (GOAL_PS{level} ?q2 ?q1))"));
            if !neg {
                c.item(&format!("(at end (not (not_GOAL_PS{level} ?q1 ?q2)))"));
                c.item(&format!("(at end (not (not_GOAL_PS{level} ?q2 ?q1)))"));
            }
            out.push_str("))\n");
        }
        if level == p {
            continue;
        }
        for s in problem.used_states() {
            for q in hw.qubits() {
                let x = hw.label(q);
                let _ = write!(
                    out,
                    "\n  (:durative-action {}\n    :parameters ( )\n    :duration (= ?duration {})\n    :condition (and ",
                    mix_name(level, s, x),
                    hw.mix_duration(q)
                );
                let mut c = Cond { out: &mut out, first: true, indent: cond_indent };
                c.item(&format!("(at start (located_at_{x} {s}))"));
                for pair in problem.goals_of(s) {
                    c.item(&format!("(at start (GOAL_PS{level} {} {}))", pair.lo(), pair.hi()));
                }
                let m = mixed_pred(level);
                if neg {
                    c.item(&format!("(over all (not ({m} {s})))"));
                } else {
                    c.item(&format!("(over all (not_{m} {s}))"));
                }
                out.push_str(")\n    :effect (and ");
                let mut c = Cond { out: &mut out, first: true, indent: eff_indent };
                c.item(&format!("(at start (not (located_at_{x} {s})))"));
                c.item(&format!("(at end (located_at_{x} {s}))"));
                c.item(&format!("(at end ({m} {s}))"));
                if !neg {
                    c.item(&format!("(at end (not (not_{m} {s})))"));
                }
                out.push_str("))\n");
            }
        }
    }
    out.push_str(")\n");
    Ok(out)
}

/// Emits the problem file: initial placement of every qstate, and the goal
/// conjunction of all PS goals per level plus the mixes of used qstates for
/// levels below `p`. The positive variant also seeds the complement facts.
pub fn emit_problem(problem: &CompilationProblem, variant: Variant) -> Result<String, PddlError> {
    if !problem.pins().is_empty() {
        return Err(PddlError::PinnedGates);
    }
    let hw = &problem.hardware;
    let n = problem.n_qstates();
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem qaoa-instance)");
    let _ = writeln!(out, "  (:domain {DOMAIN_NAME})");
    out.push_str("  (:init\n");
    for (s, q) in problem.initial_layout().iter().enumerate() {
        let _ = writeln!(out, "    (located_at_{} {})", hw.label(*q), QState(s));
    }
    if variant == Variant::Positive {
        for level in 1..=problem.p {
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    let _ = writeln!(out, "    (not_GOAL_PS{level} {} {})", QState(i), QState(j));
                }
            }
        }
        for level in 1..problem.p {
            for s in problem.used_states() {
                let _ = writeln!(out, "    (not_{} {s})", mixed_pred(level));
            }
        }
    }
    out.push_str("  )\n  (:goal (and");
    for level in 1..=problem.p {
        for pair in problem.goal_pairs() {
            let _ = write!(out, "\n    (GOAL_PS{level} {} {})", pair.lo(), pair.hi());
        }
    }
    for level in 1..problem.p {
        for s in problem.used_states() {
            let _ = write!(out, "\n    ({} {s})", mixed_pred(level));
        }
    }
    out.push_str("))\n  (:metric minimize (total-time))\n)\n");
    Ok(out)
}

/// Renders a plan in the IPC temporal plan format, one action per line.
/// Two-qubit actions are written with the lower-labelled qubit first.
pub fn render_plan(plan: &TemporalPlan, problem: &CompilationProblem) -> String {
    let hw = &problem.hardware;
    let mut out = String::new();
    for a in &plan.actions {
        let a = a.canonical();
        let qs = a.qubits();
        let ss = a.qstates();
        let call = match a.kind {
            GateKind::Swap => format!("{} {} {}", swap_name(hw.label(qs[0]), hw.label(qs[1])), ss[0], ss[1]),
            GateKind::Ps => format!("{} {} {}", ps_name(a.level, hw.label(qs[0]), hw.label(qs[1])), ss[0], ss[1]),
            GateKind::Mix => mix_name(a.level, ss[0], hw.label(qs[0])),
        };
        let _ = writeln!(out, "{}: ({}) [{}]", ipc_decimal(a.start), call, ipc_decimal(a.duration));
    }
    out
}

/// Parses an IPC plan. Action names are matched case-insensitively; times
/// within 1e-3 of an integer are snapped onto the clock grid.
pub fn parse_plan(text: &str, problem: &CompilationProblem) -> Result<TemporalPlan, PddlError> {
    let mut actions = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        actions.push(parse_line(body, line, problem)?);
    }
    Ok(TemporalPlan::new(actions))
}

fn parse_line(body: &str, line: usize, problem: &CompilationProblem) -> Result<ScheduledAction, PddlError> {
    let syntax = |message: &str| PddlError::Syntax { line, message: message.to_string() };
    let (start_txt, rest) = body.split_once(':').ok_or_else(|| syntax("expected `<start>: (...)`"))?;
    let start = parse_time(start_txt.trim(), line)?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('(').ok_or_else(|| syntax("expected `(` after start time"))?;
    let (call, rest) = rest.split_once(')').ok_or_else(|| syntax("unclosed action"))?;
    let rest = rest.trim();
    let dur_txt = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| syntax("expected `[<duration>]` after action"))?;
    let duration = parse_time(dur_txt.trim(), line)?;

    let mut words = call.split_whitespace();
    let name = words.next().ok_or_else(|| syntax("empty action"))?;
    let args: Vec<&str> = words.collect();
    let lower = name.to_ascii_lowercase();
    let unknown = || PddlError::UnknownAction { line, name: name.to_string() };
    let hw = &problem.hardware;
    let qubit = |label: &str| -> Result<Qubit, PddlError> {
        let n: usize = label.parse().map_err(|_| unknown())?;
        if label.starts_with('0') || label.starts_with('+') {
            return Err(unknown());
        }
        hw.from_label(n).ok_or_else(unknown)
    };
    let qstate = |s: &str| -> Result<QState, PddlError> {
        QState::parse(&s.to_ascii_lowercase())
            .filter(|q| q.0 < problem.n_qstates())
            .ok_or_else(|| PddlError::UnknownQState { line, name: s.to_string() })
    };
    let arity = |expected: usize| -> Result<(), PddlError> {
        if args.len() == expected {
            Ok(())
        } else {
            Err(PddlError::Arity { line, name: name.to_string(), expected, found: args.len() })
        }
    };

    if let Some(rest) = lower.strip_prefix("swap_") {
        let (a, b) = rest.split_once('_').ok_or_else(unknown)?;
        let (a, b) = (qubit(a)?, qubit(b)?);
        arity(2)?;
        return Ok(ScheduledAction::swap(start, duration, [a, b], [qstate(args[0])?, qstate(args[1])?]));
    }
    if let Some(rest) = lower.strip_prefix("p-s_") {
        let (ord, at) = rest.split_once("phaseseparation_at_").ok_or_else(unknown)?;
        let level = parse_ordinal(ord).ok_or_else(unknown)?;
        let (a, b) = at.split_once('-').ok_or_else(unknown)?;
        let (a, b) = (qubit(a)?, qubit(b)?);
        arity(2)?;
        return Ok(ScheduledAction::ps(start, duration, level, [a, b], [qstate(args[0])?, qstate(args[1])?]));
    }
    if let Some(rest) = lower.strip_prefix("mix") {
        let (lvl, rest) = rest.split_once('_').ok_or_else(unknown)?;
        let level = match lvl {
            "" => 1,
            digits => match digits.parse::<u32>() {
                Ok(k) if k >= 2 && !digits.starts_with('0') => k,
                _ => return Err(unknown()),
            },
        };
        let (s, at) = rest.split_once("_at_").ok_or_else(unknown)?;
        let s = QState::parse(s).ok_or_else(unknown)?;
        if s.0 >= problem.n_qstates() {
            return Err(unknown());
        }
        let q = qubit(at)?;
        arity(0)?;
        return Ok(ScheduledAction::mix(start, duration, level, q, s));
    }
    Err(unknown())
}

fn parse_ordinal(s: &str) -> Option<u32> {
    let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
    let n: u32 = digits.parse().ok()?;
    (n >= 1 && ordinal(n) == s).then_some(n)
}

fn parse_time(s: &str, line: usize) -> Result<Time, PddlError> {
    s.parse::<Time>()
        .map(Time::snapped)
        .map_err(|e| PddlError::Syntax { line, message: e.to_string() })
}

/// Minimal s-expression reader, enough to check that emitted files are well
/// formed and to inspect their structure.
pub mod sexpr {
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum Sexpr {
        Atom(String),
        List(Vec<Sexpr>),
    }

    impl Sexpr {
        pub fn atom(&self) -> Option<&str> {
            match self {
                Sexpr::Atom(a) => Some(a),
                Sexpr::List(_) => None,
            }
        }

        pub fn list(&self) -> Option<&[Sexpr]> {
            match self {
                Sexpr::List(l) => Some(l),
                Sexpr::Atom(_) => None,
            }
        }

        /// Whether this is a list whose head atom equals `head`.
        pub fn is(&self, head: &str) -> bool {
            self.list().and_then(|l| l.first()).and_then(Sexpr::atom) == Some(head)
        }
    }

    impl std::fmt::Display for Sexpr {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            match self {
                Sexpr::Atom(a) => f.write_str(a),
                Sexpr::List(items) => {
                    f.write_str("(")?;
                    for (i, it) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" ")?;
                        }
                        write!(f, "{it}")?;
                    }
                    f.write_str(")")
                }
            }
        }
    }

    /// Parses exactly one top-level expression; `;` starts a comment.
    pub fn parse(text: &str) -> Result<Sexpr, String> {
        let mut stack: Vec<Vec<Sexpr>> = vec![Vec::new()];
        let mut atom = String::new();
        let flush = |atom: &mut String, stack: &mut Vec<Vec<Sexpr>>| {
            if !atom.is_empty() {
                stack.last_mut().unwrap().push(Sexpr::Atom(std::mem::take(atom)));
            }
        };
        for line in text.lines() {
            let line = line.split(';').next().unwrap_or("");
            for c in line.chars() {
                match c {
                    '(' => {
                        flush(&mut atom, &mut stack);
                        stack.push(Vec::new());
                    }
                    ')' => {
                        flush(&mut atom, &mut stack);
                        let done = stack.pop().unwrap();
                        match stack.last_mut() {
                            Some(parent) => parent.push(Sexpr::List(done)),
                            None => return Err("unbalanced `)`".into()),
                        }
                    }
                    c if c.is_whitespace() => flush(&mut atom, &mut stack),
                    c => atom.push(c),
                }
            }
            flush(&mut atom, &mut stack);
        }
        if stack.len() != 1 {
            return Err("unclosed `(`".into());
        }
        let mut top = stack.pop().unwrap();
        if top.len() != 1 {
            return Err(format!("expected one expression, found {}", top.len()));
        }
        Ok(top.pop().unwrap())
    }
}
