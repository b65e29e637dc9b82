//! Gantt charts and batch benchmark runs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hardware::{preset, GateKind, HardwareGraph};
use crate::plan::{ScheduledAction, TemporalPlan};
use crate::planner::{anytime_compile, greedy_compile, Budget};
use crate::problem::{build_problem, generate_instance, states_for, Assignment, CompilationProblem, QPair};
use crate::time::{ipc_decimal, Time};
use crate::validator::{ipc_score, remove_superfluous, validate, ValidationError};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("unknown chart format `{0}` (expected text or svg)")]
    UnknownFormat(String),
    #[error("bench config: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GanttFormat {
    Text,
    Svg,
}

impl std::str::FromStr for GanttFormat {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(GanttFormat::Text),
            "svg" => Ok(GanttFormat::Svg),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

/// One bar of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub row: usize,
    pub action: ScheduledAction,
    /// Deleting the action keeps the plan valid.
    pub superfluous: bool,
}

/// Bars per qubit for a valid plan, marking the actions that
/// `remove_superfluous` would delete.
pub fn gantt_blocks(plan: &TemporalPlan, problem: &CompilationProblem) -> Result<Vec<Block>, ReportError> {
    let kept = remove_superfluous(plan, problem)?;
    let mut left: Vec<ScheduledAction> = kept.actions;
    let mut blocks = Vec::new();
    for a in plan.sorted().actions {
        let superfluous = match left.iter().position(|k| *k == a) {
            Some(i) => {
                left.swap_remove(i);
                false
            }
            None => true,
        };
        let rows: BTreeSet<usize> = a.qubits().iter().map(|q| q.0).collect();
        for row in rows {
            blocks.push(Block { row, action: a, superfluous });
        }
    }
    Ok(blocks)
}

pub fn gantt(plan: &TemporalPlan, problem: &CompilationProblem, format: GanttFormat) -> Result<String, ReportError> {
    let blocks = gantt_blocks(plan, problem)?;
    Ok(match format {
        GanttFormat::Text => text_chart(&blocks, plan.makespan(), problem),
        GanttFormat::Svg => svg_chart(&blocks, plan.makespan(), problem),
    })
}

fn block_label(a: &ScheduledAction) -> String {
    let qs = a.qstates();
    match a.kind {
        GateKind::Swap => format!("SWAP {}<>{}", qs[0], qs[1]),
        GateKind::Ps => format!("PS{} {}-{}", a.level, qs[0], qs[1]),
        GateKind::Mix => format!("MIX{} {}", a.level, qs[0]),
    }
}

fn cell_char(b: &Block) -> char {
    if b.superfluous {
        return '+';
    }
    match b.action.kind {
        GateKind::Swap => 'S',
        GateKind::Ps => 'P',
        GateKind::Mix => 'M',
    }
}

/// One line per qubit with one character per cycle, followed by a legend
/// listing every block. Rows start with the qubit name; the grid between the
/// bars is exactly `ceil(makespan)` columns wide.
fn text_chart(blocks: &[Block], makespan: Time, problem: &CompilationProblem) -> String {
    let hw = &problem.hardware;
    let width = makespan.ceil().max(0) as usize;
    let name_w = hw.qubit_names().iter().map(|n| n.len()).max().unwrap_or(0);
    let mut grid = vec![vec!['.'; width]; hw.len()];
    for b in blocks {
        let lo = b.action.start.floor().max(0) as usize;
        let hi = (b.action.end().ceil().max(0) as usize).min(width);
        for cell in &mut grid[b.row][lo..hi] {
            *cell = cell_char(b);
        }
    }
    let mut out = String::new();
    let mut ruler = String::new();
    for t in 0..width {
        ruler.push(if t % 10 == 0 { char::from_digit(((t / 10) % 10) as u32, 10).unwrap() } else { ' ' });
    }
    let units: String = (0..width).map(|t| char::from_digit((t % 10) as u32, 10).unwrap()).collect();
    let _ = writeln!(out, "{:name_w$} |{ruler}|", "");
    let _ = writeln!(out, "{:name_w$} |{units}|", "");
    for (q, row) in grid.iter().enumerate() {
        let cells: String = row.iter().collect();
        let _ = writeln!(out, "{:name_w$} |{cells}|", hw.name(crate::hardware::Qubit(q)));
    }
    let _ = writeln!(out, "makespan {}", ipc_decimal(makespan));
    let _ = writeln!(out, "S swap, P phase separation, M mix, + superfluous");
    // Blocks of one action are adjacent.
    let mut last = None;
    for b in blocks {
        if last.replace(b.action) == Some(b.action) {
            continue;
        }
        let a = &b.action;
        let names: Vec<&str> = a.qubits().iter().map(|q| hw.name(*q)).collect();
        let _ = writeln!(
            out,
            "{:>8} {:>8}  {:<14} at {}{}",
            ipc_decimal(a.start),
            ipc_decimal(a.end()),
            block_label(a),
            if a.kind == GateKind::Mix { names[0].to_string() } else { names.join("-") },
            if b.superfluous { " +" } else { "" },
        );
    }
    out
}

const CELL: f64 = 24.0;
const ROW: f64 = 22.0;
const LEFT: f64 = 48.0;
const TOP: f64 = 28.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Fill color of a PS goal pair: hues spread by the golden angle over the
/// problem's goal list.
fn pair_color(problem: &CompilationProblem, pair: QPair) -> String {
    let idx = problem.goal_pairs().iter().position(|p| *p == pair).unwrap_or(0);
    let hue = (idx as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},70%,65%)")
}

/// Self-contained SVG: time on the x axis, one row per qubit. PS blocks are
/// colored by goal pair, SWAP blocks are white and MIX blocks black with the
/// qstate number. Superfluous blocks carry a `+`.
fn svg_chart(blocks: &[Block], makespan: Time, problem: &CompilationProblem) -> String {
    let hw = &problem.hardware;
    let span = makespan.to_f64();
    let width = LEFT + span * CELL + 16.0;
    let height = TOP + hw.len() as f64 * ROW + 8.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" style="fill:#ffffff"/>"#);
    let axis_y = TOP - 6.0;
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{axis_y}" x2="{:.1}" y2="{axis_y}" style="stroke:#000000;stroke-width:1"/>"#,
        LEFT + span * CELL
    );
    for t in 0..=makespan.floor().max(0) {
        let x = LEFT + t as f64 * CELL;
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{axis_y}" style="stroke:#000000"/>"#, axis_y - 3.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#, axis_y - 6.0);
    }
    for q in hw.qubits() {
        let y = TOP + q.0 as f64 * ROW;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + ROW / 2.0 + 3.0,
            escape(hw.name(q))
        );
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" style="stroke:#dddddd"/>"#,
            y + ROW,
            LEFT + span * CELL,
            y + ROW
        );
    }
    for b in blocks {
        let a = &b.action;
        let x = LEFT + a.start.to_f64() * CELL;
        let w = a.duration.to_f64() * CELL;
        let y = TOP + b.row as f64 * ROW + 2.0;
        let h = ROW - 4.0;
        let qs = a.qstates();
        let (fill, ink, label) = match a.kind {
            GateKind::Swap => ("#ffffff".to_string(), "#000000", format!("{}{}", qs[0], qs[1])),
            GateKind::Ps => (pair_color(problem, QPair::new(qs[0], qs[1])), "#000000", format!("{}{}", qs[0], qs[1])),
            GateKind::Mix => ("#000000".to_string(), "#ffffff", (qs[0].0 + 1).to_string()),
        };
        let label = if b.superfluous { format!("+{label}") } else { label };
        let _ = writeln!(s, "<g><title>{}</title>", escape(&block_label(a)));
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" style="fill:{fill};stroke:#000000;stroke-width:1"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" style="fill:{ink}">{}</text></g>"#,
            x + w / 2.0,
            y + h / 2.0 + 3.0,
            escape(&label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// A batch of generated instances: every combination of size, utilization,
/// level count and seed, in that nesting order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Preset chip names.
    pub sizes: Vec<String>,
    pub utilizations: Vec<f64>,
    #[serde(default = "one_level")]
    pub p: Vec<u32>,
    pub seeds: Vec<u64>,
    /// Local search iterations per instance; 0 keeps the greedy plan.
    #[serde(default)]
    pub iterations: Option<u64>,
    /// Wall-clock seconds per instance. Makes results timing dependent.
    #[serde(default)]
    pub seconds: Option<f64>,
    #[serde(default)]
    pub patience: Option<u64>,
}

fn one_level() -> Vec<u32> {
    vec![1]
}

impl BenchConfig {
    /// The generation protocol used for the published benchmarks: 50 seeds at
    /// each of u = 0.9 and u = 1.0 per chip.
    pub fn standard(sizes: &[&str], p: u32, iterations: u64) -> Self {
        BenchConfig {
            sizes: sizes.iter().map(|s| s.to_string()).collect(),
            utilizations: vec![0.9, 1.0],
            p: vec![p],
            seeds: (0..50).collect(),
            iterations: Some(iterations),
            seconds: None,
            patience: None,
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            iterations: self.iterations,
            time: self.seconds.map(Duration::from_secs_f64),
            patience: self.patience,
        }
    }

    pub fn cells(&self) -> Vec<(String, f64, u32, u64)> {
        let mut out = Vec::new();
        for size in &self.sizes {
            for &u in &self.utilizations {
                for &p in &self.p {
                    for &seed in &self.seeds {
                        out.push((size.clone(), u, p, seed));
                    }
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), ReportError> {
        if self.iterations.is_none() && self.seconds.is_none() && self.patience.is_none() {
            return Err(ReportError::Config("set at least one of iterations, seconds, patience".into()));
        }
        if self.seconds.is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
            return Err(ReportError::Config("seconds must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// One CSV line. Failed instances keep their coordinates and an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: String,
    pub u: f64,
    pub p: u32,
    pub seed: u64,
    pub makespan: Option<String>,
    /// The plan meets the lower bound, so it is optimal.
    pub proved_optimal: Option<bool>,
    pub wall_time: String,
    pub actions: Option<usize>,
    pub n_states: Option<usize>,
    pub edges: Option<usize>,
    pub valid: Option<bool>,
    pub lower_bound: Option<i64>,
    pub greedy_makespan: Option<String>,
    /// IPC score of the greedy plan against the final plan.
    pub greedy_score: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(size: &str, u: f64, p: u32, seed: u64, wall: Duration, error: String) -> Self {
        BenchRow {
            size: size.to_string(),
            u,
            p,
            seed,
            makespan: None,
            proved_optimal: None,
            wall_time: format!("{:.3}", wall.as_secs_f64()),
            actions: None,
            n_states: None,
            edges: None,
            valid: None,
            lower_bound: None,
            greedy_makespan: None,
            greedy_score: None,
            error: Some(error),
        }
    }
}

fn run_cell(hw: &Result<Arc<HardwareGraph>, String>, size: &str, u: f64, p: u32, seed: u64, budget: Budget) -> BenchRow {
    let started = Instant::now();
    let attempt = || -> Result<BenchRow, String> {
        let hw = hw.clone()?;
        let inst = generate_instance(hw.len(), u, seed).map_err(|e| e.to_string())?;
        let (n_states, edges) = (inst.n_states, inst.edges.len());
        let problem = build_problem(inst, hw, p, Assignment::Random, seed).map_err(|e| e.to_string())?;
        let greedy = greedy_compile(&problem, seed).makespan();
        let result = anytime_compile(&problem, seed, budget);
        let report = validate(&result.plan, &problem);
        let ms = result.makespan();
        Ok(BenchRow {
            size: size.to_string(),
            u,
            p,
            seed,
            makespan: Some(ipc_decimal(ms)),
            proved_optimal: Some(result.reached_bound()),
            wall_time: format!("{:.3}", started.elapsed().as_secs_f64()),
            actions: Some(result.plan.len()),
            n_states: Some(n_states),
            edges: Some(edges),
            valid: Some(report.valid),
            lower_bound: Some(result.lower_bound),
            greedy_makespan: Some(ipc_decimal(greedy)),
            greedy_score: ipc_score(ms.to_f64(), greedy.to_f64()).ok(),
            error: None,
        })
    };
    match catch_unwind(AssertUnwindSafe(attempt)) {
        Ok(Ok(row)) => row,
        Ok(Err(e)) => BenchRow::failed(size, u, p, seed, started.elapsed(), e),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "planner panicked".into());
            BenchRow::failed(size, u, p, seed, started.elapsed(), msg)
        }
    }
}

/// Worker count from `QCC_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("QCC_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every cell of `config`, in parallel, and returns rows in config
/// order. Instance failures become rows with an error; they never stop the
/// batch.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, ReportError> {
    config.check()?;
    let budget = config.budget();
    let chips: Vec<(String, Result<Arc<HardwareGraph>, String>)> = config
        .sizes
        .iter()
        .map(|s| (s.clone(), preset(s).map(Arc::new).map_err(|e| e.to_string())))
        .collect();
    let cells = config.cells();
    let work = || {
        cells
            .par_iter()
            .map(|(size, u, p, seed)| {
                let hw = &chips.iter().find(|(n, _)| n == size).expect("chip loaded").1;
                run_cell(hw, size, *u, *p, *seed, budget)
            })
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| ReportError::Config(e.to_string()))?;
    Ok(pool.install(work))
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>, ReportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Expected qstate count for a chip at utilization `u`.
pub fn expected_states(size: &str, u: f64) -> Option<usize> {
    preset(size).ok().map(|hw| states_for(hw.len(), u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn witness_chart_touches_four_rows() {
        let (p, plan) = fixtures::single_goal_witness();
        let blocks = gantt_blocks(&plan, &p).unwrap();
        let rows: BTreeSet<usize> = blocks.iter().map(|b| b.row).collect();
        let names: Vec<&str> = rows.iter().map(|&r| p.hardware.name(crate::hardware::Qubit(r))).collect();
        assert_eq!(names, ["n1", "n2", "n3", "n4"]);
        let end = blocks.iter().map(|b| b.action.end()).max().unwrap();
        assert_eq!(end, Time::from_int(8));
        assert!(blocks.iter().all(|b| !b.superfluous));
    }

    #[test]
    fn text_width_is_makespan() {
        let (p, plan) = fixtures::single_goal_witness();
        let text = gantt(&plan, &p, GanttFormat::Text).unwrap();
        let n1 = text.lines().find(|l| l.starts_with("n1 ")).unwrap();
        let cells = n1.split('|').nth(1).unwrap();
        assert_eq!(cells.chars().count(), 8);
        assert_eq!(cells, "SSSS....");
        let n2 = text.lines().find(|l| l.starts_with("n2 ")).unwrap();
        assert_eq!(n2.split('|').nth(1).unwrap(), "SSSSPPPP");
    }

    #[test]
    fn empty_plan_has_axes_only() {
        let p = fixtures::empty_problem(1);
        let text = gantt(&TemporalPlan::default(), &p, GanttFormat::Text).unwrap();
        assert_eq!(text.lines().filter(|l| l.ends_with("||")).count(), p.hardware.len() + 2);
        let svg = gantt(&TemporalPlan::default(), &p, GanttFormat::Svg).unwrap();
        assert!(svg.contains("<line"));
        assert!(!svg.contains("<title>"));
    }

    #[test]
    fn superfluous_marked() {
        let (p, mut plan) = fixtures::single_goal_witness();
        // A swap pair that cancels out.
        plan.actions.push(fixtures::act::swap(&p, 0, "n6", "n7", "q6", "q7"));
        plan.actions.push(fixtures::act::swap(&p, 2, "n6", "n7", "q7", "q6"));
        let text = gantt(&plan, &p, GanttFormat::Text).unwrap();
        assert_eq!(text.lines().filter(|l| l.ends_with(" +")).count(), 2);
        assert!(text.lines().any(|l| l.starts_with("n6 ") && l.contains("|++++....|")));
        let svg = gantt(&plan, &p, GanttFormat::Svg).unwrap();
        assert!(svg.contains(">+q6q7<"));
    }

    #[test]
    fn invalid_plan_refused() {
        let (p, mut plan) = fixtures::single_goal_witness();
        plan.actions.pop();
        assert!(matches!(gantt(&plan, &p, GanttFormat::Svg), Err(ReportError::Invalid(_))));
    }

    #[test]
    fn svg_colors_by_kind() {
        let (p, plan) = fixtures::single_goal_witness();
        let svg = gantt(&plan, &p, GanttFormat::Svg).unwrap();
        assert!(svg.starts_with("<svg xmlns="));
        assert!(svg.contains("fill:#ffffff;stroke"));
        assert!(svg.contains("fill:hsl("));
        assert_eq!(svg.matches("<g>").count(), 2 * 3 + 2);
    }

    #[test]
    fn one_seed_one_row_and_reruns_match() {
        let cfg = BenchConfig {
            sizes: vec!["N8".into()],
            utilizations: vec![1.0],
            p: vec![1],
            seeds: vec![4],
            iterations: Some(50),
            seconds: None,
            patience: None,
        };
        let a = run_bench(&cfg).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].valid, Some(true));
        let strip = |rows: &[BenchRow]| {
            let mut rows = rows.to_vec();
            rows.iter_mut().for_each(|r| r.wall_time.clear());
            rows_to_csv(&rows).unwrap()
        };
        assert_eq!(strip(&a), strip(&run_bench(&cfg).unwrap()));
        assert_eq!(rows_from_csv(&rows_to_csv(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn failures_become_rows() {
        let cfg = BenchConfig {
            sizes: vec!["N8".into(), "N99".into()],
            utilizations: vec![0.1, 1.0],
            p: vec![1],
            seeds: vec![0],
            iterations: Some(0),
            seconds: None,
            patience: None,
        };
        let rows = run_bench(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_some(), "0.1 of 8 qubits cannot hold 8 edges");
        assert!(rows[1].error.is_none());
        assert!(rows[2..].iter().all(|r| r.error.is_some()));
        let header = rows_to_csv(&rows).unwrap();
        assert!(header.starts_with("size,u,p,seed,makespan,proved_optimal,wall_time,actions,"));
    }
}
