//! `qcc`: generate, compile, export, check, score and chart QAOA compilation
//! problems.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qcc_core::hardware::{load_hardware, presets, HardwareGraph};
use qcc_core::pddl::{emit_domain, emit_problem, parse_plan, render_plan, Variant};
use qcc_core::plan::{PlanSummary, TemporalPlan};
use qcc_core::planner::{anytime_compile, greedy_compile, optimal_compile_from, Budget, Limits};
use qcc_core::problem::{build_problem, generate_instance, Assignment, CompilationProblem};
use qcc_core::report::{gantt, rows_to_csv, run_bench, BenchConfig, GanttFormat};
use qcc_core::validator::{ipc_score, mean_scores, validate, ScoreEntry, ValidationReport};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qcc", version, about = "Compile QAOA MaxCut circuits onto nearest-neighbor chips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random benchmark problems.
    Gen(GenArgs),
    /// Compile a problem into a temporal plan.
    Compile(CompileArgs),
    /// Write the PDDL domain and problem files.
    EmitPddl(EmitArgs),
    /// Validate plan files; exits 0 iff every plan is valid.
    Check(CheckArgs),
    /// IPC scores: one pair of makespans, or a results table.
    Score(ScoreArgs),
    /// Render a plan as a Gantt chart.
    Gantt(GanttArgs),
    /// Run a benchmark batch from a TOML config.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Svg,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlannerKind {
    Greedy,
    Anytime,
    Optimal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Negative,
    Positive,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Preset name (N8, N21, N40) or hardware JSON file.
    #[arg(long, default_value = "N8")]
    hardware: String,
    /// Fraction of qubits carrying qstates.
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Seed of the first problem; later ones use the following seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value = "random")]
    assignment: String,
    /// Output file, or directory when generating several problems.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompileArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value = "anytime")]
    planner: PlannerKind,
    /// Override the number of levels.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds (`5s`, `0.5s`) or iterations (`2000`, `2000it`).
    #[arg(long, default_value = "2000")]
    budget: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write the validation report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EmitArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value = "negative")]
    variant: VariantArg,
    #[arg(long)]
    p: Option<u32>,
    /// Directory for domain.pddl and problem.pddl.
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(clap::Args)]
struct CheckArgs {
    problem: PathBuf,
    #[arg(required = true)]
    plans: Vec<PathBuf>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the validation report(s) as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ScoreArgs {
    /// CSV with columns class,instance,planner,makespan (empty when unsolved).
    table: Option<PathBuf>,
    #[arg(long, requires = "candidate", conflicts_with = "table")]
    best: Option<f64>,
    #[arg(long, requires = "best")]
    candidate: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(clap::Args)]
struct GanttArgs {
    problem: PathBuf,
    plan: PathBuf,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    config: PathBuf,
    /// Override the per-instance budget of the config.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn parse_budget(s: &str) -> Result<Budget> {
    let s = s.trim();
    if let Some(secs) = s.strip_suffix('s') {
        let secs: f64 = secs.parse().with_context(|| format!("bad budget `{s}`"))?;
        if !(secs >= 0.0 && secs.is_finite()) {
            bail!("budget seconds must be non-negative");
        }
        return Ok(Budget::time(Duration::from_secs_f64(secs)));
    }
    let iters = s.strip_suffix("it").unwrap_or(s);
    let n: u64 = iters.parse().with_context(|| format!("bad budget `{s}` (use `5s` or `2000`)"))?;
    Ok(Budget::iterations(n))
}

fn load_chip(spec: &str) -> Result<(HardwareGraph, Option<String>)> {
    if presets::NAMES.contains(&spec) {
        return Ok((presets::preset(spec)?, Some(spec.to_string())));
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading hardware file {spec}"))?;
    Ok((load_hardware(&text)?, None))
}

fn load_problem(path: &Path, p: Option<u32>) -> Result<CompilationProblem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem = CompilationProblem::from_json(&text, path.parent())
        .with_context(|| format!("loading problem {}", path.display()))?;
    Ok(match p {
        Some(p) => problem.with_levels(p)?,
        None => problem,
    })
}

fn load_plan(path: &Path, problem: &CompilationProblem) -> Result<TemporalPlan> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_plan(&text, problem).with_context(|| format!("parsing plan {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_text(r: &ValidationReport) -> String {
    let mut s = if r.valid {
        format!("valid, makespan {}\n", r.makespan)
    } else {
        format!("INVALID, {} violation(s)\n", r.violations.len())
    };
    for v in &r.violations {
        let at = v.action.map(|i| format!(" action {}", i + 1)).unwrap_or_default();
        let kind = serde_json::to_value(v.kind).ok().and_then(|k| k.as_str().map(str::to_string)).unwrap_or_default();
        s.push_str(&format!("  {kind} at t={}{at}: {}\n", v.time, v.message));
    }
    s
}

fn gen(a: GenArgs) -> Result<bool> {
    let (hw, reference) = load_chip(&a.hardware)?;
    let hw = Arc::new(hw);
    let assignment: Assignment = a.assignment.parse()?;
    let label = reference.clone().unwrap_or_else(|| format!("{}q", hw.len()));
    if a.count > 1 {
        let dir = a.out.ok_or_else(|| anyhow!("--out <dir> is required with --count"))?;
        fs::create_dir_all(&dir)?;
        for seed in a.seed..a.seed + a.count {
            let inst = generate_instance(hw.len(), a.u, seed)?;
            let problem = build_problem(inst, hw.clone(), a.p, assignment, seed)?;
            let path = dir.join(format!("{label}_u{}_p{}_s{seed}.json", a.u, a.p));
            fs::write(&path, problem.to_json(reference.as_deref()))?;
        }
        return Ok(true);
    }
    let inst = generate_instance(hw.len(), a.u, a.seed)?;
    let problem = build_problem(inst, hw, a.p, assignment, a.seed)?;
    emit(a.out.as_deref(), &problem.to_json(reference.as_deref()))?;
    Ok(true)
}

fn compile(a: CompileArgs) -> Result<bool> {
    let problem = load_problem(&a.problem, a.p)?;
    let budget = parse_budget(&a.budget)?;
    let (plan, extra) = match a.planner {
        PlannerKind::Greedy => (greedy_compile(&problem, a.seed), json!({})),
        PlannerKind::Anytime => {
            let r = anytime_compile(&problem, a.seed, budget);
            let extra = json!({
                "iterations": r.iterations,
                "lower_bound": r.lower_bound,
                "proved_optimal": r.reached_bound(),
                "history": r.history,
            });
            (r.plan, extra)
        }
        PlannerKind::Optimal => {
            // The anytime result seeds the bound.
            let start = anytime_compile(&problem, a.seed, budget);
            let r = optimal_compile_from(&problem, Limits::default(), Some(&start.plan))?;
            let extra = json!({ "proved_optimal": r.proved_optimal, "nodes": r.nodes });
            (r.plan, extra)
        }
    };
    let report = validate(&plan, &problem);
    let text = render_plan(&plan.sorted(), &problem);
    match a.format {
        Format::Text => emit(a.out.as_deref(), &text)?,
        Format::Json => {
            let doc = json!({
                "summary": PlanSummary::from(&plan),
                "planner": extra,
                "plan": text.lines().collect::<Vec<_>>(),
                "report": report,
            });
            emit(a.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
        _ => bail!("compile writes text or json"),
    }
    if let Some(path) = &a.report {
        fs::write(path, report.to_json() + "\n")?;
    }
    Ok(report.valid)
}

fn emit_pddl(a: EmitArgs) -> Result<bool> {
    let problem = load_problem(&a.problem, a.p)?;
    let variant = match a.variant {
        VariantArg::Negative => Variant::Negative,
        VariantArg::Positive => Variant::Positive,
    };
    fs::create_dir_all(&a.out_dir)?;
    fs::write(a.out_dir.join("domain.pddl"), emit_domain(&problem, variant)?)?;
    fs::write(a.out_dir.join("problem.pddl"), emit_problem(&problem, variant)?)?;
    Ok(true)
}

fn check(a: CheckArgs) -> Result<bool> {
    let problem = load_problem(&a.problem, a.p)?;
    let mut reports = Vec::new();
    for path in &a.plans {
        let plan = load_plan(path, &problem)?;
        reports.push((path, validate(&plan, &problem)));
    }
    match a.format {
        Format::Text => {
            for (path, r) in &reports {
                print!("{}: {}", path.display(), report_text(r));
            }
        }
        Format::Json => {
            let all: Vec<_> = reports.iter().map(|(_, r)| r).collect();
            println!("{}", serde_json::to_string_pretty(&all)?);
        }
        _ => bail!("check writes text or json"),
    }
    if let Some(out) = &a.report {
        let text = match reports.as_slice() {
            [(_, r)] => r.to_json(),
            many => serde_json::to_string_pretty(&many.iter().map(|(_, r)| r).collect::<Vec<_>>())?,
        };
        fs::write(out, text + "\n")?;
    }
    Ok(reports.iter().all(|(_, r)| r.valid))
}

#[derive(serde::Deserialize)]
struct ScoreRow {
    class: String,
    instance: String,
    planner: String,
    makespan: Option<f64>,
}

fn score(a: ScoreArgs) -> Result<bool> {
    if let (Some(best), Some(cand)) = (a.best, a.candidate) {
        println!("{:.3}", ipc_score(best, cand)?);
        return Ok(true);
    }
    let path = a.table.ok_or_else(|| anyhow!("give a results table or --best/--candidate"))?;
    let mut reader = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut entries = Vec::new();
    for row in reader.deserialize() {
        let r: ScoreRow = row?;
        entries.push(ScoreEntry { class: r.class, instance: r.instance, planner: r.planner, makespan: r.makespan });
    }
    let means = mean_scores(&entries);
    match a.format {
        Format::Text => {
            for ((class, planner), s) in &means {
                println!("{class:<12} {planner:<16} {s:.3}");
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["class", "planner", "score"])?;
            for ((class, planner), s) in &means {
                w.write_record([class.as_str(), planner.as_str(), &format!("{s:.6}")])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut by_class: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
            for ((class, planner), s) in &means {
                by_class.entry(class).or_default().insert(planner, *s);
            }
            println!("{}", serde_json::to_string_pretty(&by_class)?);
        }
        Format::Svg => bail!("score writes text, csv or json"),
    }
    Ok(true)
}

fn gantt_cmd(a: GanttArgs) -> Result<bool> {
    let problem = load_problem(&a.problem, a.p)?;
    let plan = load_plan(&a.plan, &problem)?;
    let format = match a.format {
        Format::Text => GanttFormat::Text,
        Format::Svg => GanttFormat::Svg,
        _ => bail!("gantt writes text or svg"),
    };
    emit(a.out.as_deref(), &gantt(&plan, &problem, format)?)?;
    Ok(true)
}

fn bench(a: BenchArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut config: BenchConfig = toml::from_str(&text).context("parsing bench config")?;
    if let Some(b) = &a.budget {
        let b = parse_budget(b)?;
        config.iterations = b.iterations;
        config.seconds = b.time.map(|d| d.as_secs_f64());
    }
    let rows = run_bench(&config)?;
    match a.format {
        Format::Csv => emit(a.out.as_deref(), &rows_to_csv(&rows)?)?,
        Format::Json => emit(a.out.as_deref(), &(serde_json::to_string_pretty(&rows)? + "\n"))?,
        _ => bail!("bench writes csv or json"),
    }
    Ok(rows.iter().all(|r| r.valid == Some(true)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Compile(a) => compile(a),
        Command::EmitPddl(a) => emit_pddl(a),
        Command::Check(a) => check(a),
        Command::Score(a) => score(a),
        Command::Gantt(a) => gantt_cmd(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
