//! Command-line entry point: planning, evaluation, oracle runs, convergence
//! studies and rendering.
//!
//! Exit codes: 0 success, 2 validation or query errors, 3 no path, 1
//! internal errors. Every error prints as a one-line diagnostic of the form
//! `error[Code]: message` on stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::cost::{path_cost, CostFunction};
use crate::geometry::{Point, Scene, SegmentEvent};
use crate::graph::{build_graph, BuildError, SamplingParams};
use crate::io::{self, LoadedScene};
use crate::oracle::{grid_plan, GridParams, OracleError};
use crate::search::{plan, PlanError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_PATH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "riskpath", version, about = "Risk-aware path planning in the plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan a path for the scene's start/goal query and write a plan file.
    Plan(PlanArgs),
    /// Re-evaluate a plan file's polyline against a scene.
    Eval(EvalArgs),
    /// Run the brute-force grid oracle and print its cost.
    Oracle(OracleArgs),
    /// Plan at successive dyadic refinement levels and print a cost table.
    Converge(ConvergeArgs),
    /// Render a scene (no planning) to SVG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Output plan file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also render scene + path to this SVG file.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Boundary sample spacing; default scene diameter / 64.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Dyadic refinement level (effective spacing = delta / 2^level).
    #[arg(long, default_value_t = 0)]
    pub level: u32,
    /// Seed recorded for reproducibility of randomized wrappers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Plan file to evaluate (as written by `plan`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Grid cell size; default scene diameter / 200.
    #[arg(long)]
    pub h: Option<f64>,
    /// Exposure quantum; default equal to the cell size.
    #[arg(long = "lambda-step")]
    pub lambda_step: Option<f64>,
    /// Seed recorded for reproducibility of randomized wrappers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Base boundary sample spacing; default scene diameter / 64.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Number of dyadic levels to run.
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    /// Seed recorded for reproducibility of randomized wrappers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Output SVG file.
    #[arg(long)]
    pub svg: PathBuf,
}

/// A one-line diagnostic with a stable code and an exit class.
#[derive(Debug)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl Diagnostic {
    fn invalid(code: &'static str, message: String) -> Self {
        Diagnostic { code, message, exit: EXIT_INVALID }
    }

    fn internal(code: &'static str, message: String) -> Self {
        Diagnostic { code, message, exit: EXIT_INTERNAL }
    }
}

type CliResult<T> = Result<T, Vec<Diagnostic>>;

fn from_parse_errors(errors: Vec<io::ParseError>) -> Vec<Diagnostic> {
    errors
        .into_iter()
        .map(|e| Diagnostic::invalid(e.code(), e.to_string()))
        .collect()
}

fn from_build_error(e: BuildError) -> Vec<Diagnostic> {
    let code = match &e {
        BuildError::InvalidDelta { .. } => "InvalidDelta",
        BuildError::InvalidQuery { .. } => "InvalidQuery",
        BuildError::DegenerateQuery { .. } => "DegenerateQuery",
    };
    vec![Diagnostic::invalid(code, e.to_string())]
}

fn from_plan_error(e: PlanError) -> Vec<Diagnostic> {
    let d = match &e {
        PlanError::NoPath => Diagnostic { code: "NoPath", message: e.to_string(), exit: EXIT_NO_PATH },
        PlanError::GraphTooLarge { .. } => Diagnostic::internal("GraphTooLarge", e.to_string()),
        PlanError::Cost(_) => Diagnostic::internal("CostError", e.to_string()),
        PlanError::SelfCheck(_) => Diagnostic::internal("SelfCheck", e.to_string()),
    };
    vec![d]
}

fn from_oracle_error(e: OracleError) -> Vec<Diagnostic> {
    let d = match &e {
        OracleError::NoPath => Diagnostic { code: "NoPath", message: e.to_string(), exit: EXIT_NO_PATH },
        OracleError::InvalidQuery { .. } => Diagnostic::invalid("InvalidQuery", e.to_string()),
        OracleError::InvalidParams { .. } => Diagnostic::invalid("InvalidParams", e.to_string()),
        OracleError::StateBudgetExceeded { .. } => {
            Diagnostic::internal("StateBudgetExceeded", e.to_string())
        }
        OracleError::Cost(_) => Diagnostic::internal("CostError", e.to_string()),
    };
    vec![d]
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        vec![Diagnostic::invalid("FileRead", format!("cannot read {}: {e}", path.display()))]
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| {
        vec![Diagnostic::internal("FileWrite", format!("cannot write {}: {e}", path.display()))]
    })
}

fn load(path: &Path) -> CliResult<(io::SceneFile, LoadedScene)> {
    let text = read_file(path)?;
    let (file, loaded) = io::load_scene(&text).map_err(from_parse_errors)?;
    for w in loaded.scene.warnings() {
        eprintln!("warning[RiskRiskSharedBorder]: {w}");
    }
    Ok((file, loaded))
}

fn query_of(loaded: &LoadedScene) -> CliResult<(Point, Point)> {
    match (loaded.start, loaded.goal) {
        (Some(s), Some(g)) => Ok((s, g)),
        _ => Err(vec![Diagnostic::invalid(
            "MissingQuery",
            "scene file must provide both start and goal for this command".to_string(),
        )]),
    }
}

fn sampling(scene: &Scene, delta: Option<f64>, level: u32) -> CliResult<SamplingParams> {
    let base = match delta {
        Some(d) => SamplingParams::new(d, level).map_err(from_build_error)?,
        None => SamplingParams::for_scene(scene).refined(level),
    };
    Ok(base)
}

fn log_seed(seed: Option<u64>) {
    if let Some(seed) = seed {
        eprintln!("seed: {seed}");
    }
}

/// One row of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergeRow {
    pub level: u32,
    pub nodes: usize,
    pub edges: usize,
    pub cost: f64,
    pub build_time: Duration,
    pub search_time: Duration,
}

/// Plan the same query at levels `0..levels`, returning one row per level.
/// Sample sets nest across levels, so the cost column is non-increasing.
pub fn converge(
    scene: &Scene,
    start: Point,
    goal: Point,
    base: &SamplingParams,
    levels: u32,
    f: &CostFunction,
) -> Result<Vec<ConvergeRow>, ConvergeError> {
    let mut rows = Vec::new();
    for level in 0..levels.max(1) {
        let graph = build_graph(scene, start, goal, &base.refined(level), f)
            .map_err(ConvergeError::Build)?;
        let result = plan(&graph).map_err(ConvergeError::Plan)?;
        rows.push(ConvergeRow {
            level,
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            cost: result.cost,
            build_time: graph.build_time(),
            search_time: result.stats.wall_time,
        });
    }
    Ok(rows)
}

#[derive(Debug, thiserror::Error)]
pub enum ConvergeError {
    #[error(transparent)]
    Build(BuildError),
    #[error(transparent)]
    Plan(PlanError),
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Plan(args) => run_plan(args),
        Command::Eval(args) => run_eval(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Converge(args) => run_converge(args),
        Command::Render(args) => run_render(args),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(diags) => {
            for d in &diags {
                eprintln!("error[{}]: {}", d.code, d.message);
            }
            // Validation problems outrank NoPath, which outranks internal
            // errors; in practice the classes do not co-occur.
            if diags.iter().any(|d| d.exit == EXIT_INVALID) {
                EXIT_INVALID
            } else if diags.iter().any(|d| d.exit == EXIT_NO_PATH) {
                EXIT_NO_PATH
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

fn cost_of(file: &io::SceneFile) -> CostFunction {
    // The file schema currently admits only the exponential cost.
    let _ = file.cost;
    CostFunction::Exp
}

fn run_plan(args: &PlanArgs) -> CliResult<()> {
    log_seed(args.seed);
    let (file, loaded) = load(&args.scene)?;
    let (start, goal) = query_of(&loaded)?;
    let params = sampling(&loaded.scene, args.delta, args.level)?;
    let f = cost_of(&file);
    let graph = build_graph(&loaded.scene, start, goal, &params, &f).map_err(from_build_error)?;
    let result = plan(&graph).map_err(from_plan_error)?;
    write_file(&args.out, &io::write_plan(&result))?;
    if let Some(svg_path) = &args.svg {
        let svg = io::render_svg(&loaded.scene, Some(&result.polyline), Some((start, goal)));
        write_file(svg_path, &svg)?;
    }
    println!(
        "cost {} nodes {} edges {} labels {} expanded {} dominated {} time_ms {:.1}",
        io::round_sig(result.cost),
        result.stats.nodes,
        result.stats.edges,
        result.stats.labels_created,
        result.stats.labels_expanded,
        result.stats.labels_dominated,
        (graph.build_time() + result.stats.wall_time).as_secs_f64() * 1e3
    );
    Ok(())
}

fn describe_event(event: &SegmentEvent) -> String {
    match event {
        SegmentEvent::Run { class, length, .. } => {
            format!("{} {}", format!("{class:?}").to_lowercase(), io::round_sig(*length))
        }
        SegmentEvent::SafeTouch { at, .. } => format!("touch at ({}, {})", at.x, at.y),
    }
}

fn run_eval(args: &EvalArgs) -> CliResult<()> {
    let (file, loaded) = load(&args.scene)?;
    let text = read_file(&args.out)?;
    let plan_file = io::parse_plan(&text).map_err(from_parse_errors)?;
    let polyline: Vec<Point> =
        plan_file.polyline.iter().map(|p| Point::new(p[0], p[1])).collect();
    let f = cost_of(&file);
    let breakdown = path_cost(&loaded.scene, &polyline, &f).map_err(|e| {
        vec![Diagnostic::invalid("InvalidPolyline", e.to_string())]
    })?;
    let mut out = String::new();
    for (event, contribution) in &breakdown.per_event {
        let _ = writeln!(out, "event {} cost {}", describe_event(event), io::round_sig(*contribution));
    }
    let _ = writeln!(out, "total {}", io::round_sig(breakdown.total));
    let _ = writeln!(out, "stored {}", io::round_sig(plan_file.cost));
    print!("{out}");
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> CliResult<()> {
    log_seed(args.seed);
    let (file, loaded) = load(&args.scene)?;
    let (start, goal) = query_of(&loaded)?;
    let d = loaded.scene.diameter();
    let h = args.h.unwrap_or(if d > 0.0 { d / 200.0 } else { start.distance(goal) / 200.0 });
    let lambda_step = args.lambda_step.unwrap_or(h);
    let params = GridParams::for_query(&loaded.scene, start, goal, h, lambda_step)
        .map_err(from_oracle_error)?;
    let f = cost_of(&file);
    let out = grid_plan(&loaded.scene, start, goal, &params, &f).map_err(from_oracle_error)?;
    println!("cost {} states {} h {} lambda_step {}", io::round_sig(out.cost), out.states, h, lambda_step);
    Ok(())
}

fn run_converge(args: &ConvergeArgs) -> CliResult<()> {
    log_seed(args.seed);
    let (file, loaded) = load(&args.scene)?;
    let (start, goal) = query_of(&loaded)?;
    let base = sampling(&loaded.scene, args.delta, 0)?;
    let f = cost_of(&file);
    let rows = converge(&loaded.scene, start, goal, &base, args.levels, &f).map_err(|e| match e {
        ConvergeError::Build(b) => from_build_error(b),
        ConvergeError::Plan(p) => from_plan_error(p),
    })?;
    println!("{:>5} {:>8} {:>10} {:>18} {:>10}", "level", "nodes", "edges", "cost", "time_ms");
    for row in rows {
        println!(
            "{:>5} {:>8} {:>10} {:>18} {:>10.1}",
            row.level,
            row.nodes,
            row.edges,
            io::round_sig(row.cost),
            (row.build_time + row.search_time).as_secs_f64() * 1e3
        );
    }
    Ok(())
}

fn run_render(args: &RenderArgs) -> CliResult<()> {
    let (_, loaded) = load(&args.scene)?;
    let query = match (loaded.start, loaded.goal) {
        (Some(s), Some(g)) => Some((s, g)),
        _ => None,
    };
    let svg = io::render_svg(&loaded.scene, None, query);
    write_file(&args.svg, &svg)?;
    Ok(())
}
