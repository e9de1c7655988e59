//! Command-line interface: builds Crocker diagrams from point-cloud CSV,
//! computes clearance and stability reports, noise bounds, churn budgets,
//! and emits CSV/JSON/SVG outputs.
//!
//! Machine-readable JSON goes to stdout (or a file); a short human summary
//! goes to stderr. Exit codes: 0 success, 1 computation or domain error,
//! 2 usage error.

use clap::{Args, Parser, Subcommand};
use crocker::churn::{apply_event, global_churn_bound, ChurnEvent};
use crocker::diagram::{build_crocker, diff_map, l1_distance, ScaleGrid};
use crocker::geometry::PointCloudSeries;
use crocker::harness::{bound_dominance_suite, certificate_soundness_suite, DEFAULT_MASTER_SEED};
use crocker::io::{
    emit_heatmap_svg, parse_crocker_json, parse_point_cloud_csv, serialize_crocker,
    serialize_point_cloud_csv, CrockerFormat, HeatmapData,
};
use crocker::models::{
    breathing_polygon, epithelial_feasibility, pentagon_insertion_scenario, BreathingPolygonSpec,
    FeasibilitySpec,
};
use crocker::noise::{
    global_prob_bound, mc_stability_experiment, required_tau_for_confidence, tau_star, NoiseModel,
};
use crocker::stability::{
    certify_exact, clearance_report, global_change_budget, local_density,
};
use serde_json::json;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "crocker", version, about = "Crocker diagrams with stability certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build Crocker diagrams from a point-cloud CSV.
    Crocker(CrockerArgs),
    /// Compute the clearance report (per-cell clearances, gamma, gaps).
    Clearance(ClearanceArgs),
    /// Certify exact stability for a displacement bound delta.
    Certify(CertifyArgs),
    /// Worst-case l1 change budget for bounded perturbations.
    Budget(BudgetArgs),
    /// Gaussian-noise stability bound (tau*, pair and global bounds).
    NoiseBound(NoiseBoundArgs),
    /// Monte Carlo noise experiment against the theoretical bound.
    Mc(McArgs),
    /// Insertion/deletion change budget for a single event.
    ChurnBound(ChurnBoundArgs),
    /// Apply an insertion/deletion event to a series.
    ChurnApply(ChurnApplyArgs),
    /// Generate built-in example data.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Imaging feasibility arithmetic (hexagonal packing densities).
    Feasibility(FeasibilityArgs),
    /// Entrywise difference of two Crocker diagrams (JSON inputs).
    Diff(DiffArgs),
    /// Randomized validation suites (soundness and bound dominance).
    Validate(ValidateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Point-cloud CSV path, or '-' for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Scale grid: 'start:stop:count' (inclusive) or a comma list.
    #[arg(long)]
    grid: String,
    /// Merge tolerance for near-equal critical distances.
    #[arg(long, default_value_t = 1e-9)]
    dedup_tol: f64,
}

#[derive(Args)]
struct CrockerArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Highest homology dimension to tabulate.
    #[arg(long, default_value_t = 1)]
    k_max: usize,
    /// Output directory for per-dimension artifacts.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma list of artifact formats to write: csv,json,svg.
    #[arg(long, default_value = "json")]
    emit: String,
}

#[derive(Args)]
struct ClearanceArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Displacement bound to certify against.
    #[arg(long)]
    delta: f64,
}

#[derive(Args)]
struct BudgetArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Displacement bound entering the density inflation.
    #[arg(long)]
    delta: f64,
    /// Number of perturbed points.
    #[arg(long)]
    m_star: u64,
    /// Homology dimension.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct NoiseBoundArgs {
    /// Grid-threshold clearance; computed from --input/--grid when absent.
    #[arg(long)]
    gamma_grid: Option<f64>,
    /// Point-cloud CSV path or '-' (used when --gamma-grid is absent).
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    sigma: f64,
    /// Ambient dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Point count (per frame).
    #[arg(long)]
    m: Option<u64>,
    /// Frame count.
    #[arg(long)]
    n_t: Option<u64>,
    /// Also report the tau needed to reach this failure probability.
    #[arg(long)]
    target_prob: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    k_max: usize,
}

#[derive(Args)]
struct ChurnBoundArgs {
    /// Frame count.
    #[arg(long)]
    n_t: u64,
    /// 1-based frame position of the event.
    #[arg(long)]
    event_index: u64,
    /// Number of inserted or deleted points.
    #[arg(long)]
    q: u64,
    /// Per-scale local densities, comma separated; computed from
    /// --input/--grid (optionally with --event applied) when absent.
    #[arg(long)]
    lambdas: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// Event JSON; when given, densities are maximized over the pre- and
    /// post-event clouds.
    #[arg(long)]
    event: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct ChurnApplyArgs {
    /// Point-cloud CSV path, or '-' for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Event JSON file.
    #[arg(long)]
    event: PathBuf,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Breathing regular polygon series (CSV on stdout or --out).
    Polygon {
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 51)]
        n_t: usize,
    },
    /// Pentagon-insertion scenario: base CSV, event JSON, and the expected
    /// transition bands, written into a directory.
    PentagonInsertion {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct FeasibilityArgs {
    #[arg(long, default_value_t = 500)]
    m: u64,
    #[arg(long, default_value_t = 51)]
    n_t: u64,
    /// Number of hexagonal rings (scales are ring indices 1..=rings).
    #[arg(long, default_value_t = 6)]
    rings: u64,
    #[arg(long, default_value_t = 0.44)]
    pixel_size: f64,
    #[arg(long, default_value_t = 3.0)]
    pixel_error: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Also report budgets with displacement-inflated ring indices.
    #[arg(long)]
    inflate: bool,
}

#[derive(Args)]
struct DiffArgs {
    /// Baseline diagram (JSON).
    #[arg(long)]
    a: PathBuf,
    /// Comparison diagram (JSON).
    #[arg(long)]
    b: PathBuf,
    /// Write a diverging heatmap of the difference here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    soundness_cases: usize,
    #[arg(long, default_value_t = 100)]
    dominance_scenarios: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn compute(msg: impl Into<String>) -> Self {
        Failure { code: 1, message: msg.into() }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }
}

impl From<crocker::Error> for Failure {
    fn from(e: crocker::Error) -> Self {
        Failure::compute(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::compute(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::compute(format!("reading {path}: {e}")))
    }
}

fn load_series(path: &str) -> Result<PointCloudSeries, Failure> {
    Ok(parse_point_cloud_csv(&read_input(path)?)?)
}

fn parse_grid(spec: &str) -> Result<ScaleGrid, Failure> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::usage(format!("grid spec {spec:?} is not start:stop:count")));
        }
        let start: f64 =
            parts[0].parse().map_err(|_| Failure::usage(format!("bad grid start {:?}", parts[0])))?;
        let stop: f64 =
            parts[1].parse().map_err(|_| Failure::usage(format!("bad grid stop {:?}", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Failure::usage(format!("bad grid count {:?}", parts[2])))?;
        Ok(ScaleGrid::linspace(start, stop, count)?)
    } else {
        let vals = spec
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::usage(format!("bad grid value {v:?}"))))
            .collect::<Result<Vec<f64>, Failure>>()?;
        Ok(ScaleGrid::new(vals)?)
    }
}

/// Output-directory override via environment; flags take precedence.
fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("CROCKER_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_report(out: &Option<PathBuf>, report: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::compute(format!("serializing report: {e}")))?;
    match out {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Failure::compute(format!("writing {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::compute(format!("creating {}: {e}", dir.display())))?;
    }
    fs::write(path, contents.as_bytes())
        .map_err(|e| Failure::compute(format!("writing {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Crocker(args) => cmd_crocker(args, &cli.out),
        Command::Clearance(args) => cmd_clearance(args, &cli.out),
        Command::Certify(args) => cmd_certify(args, &cli.out),
        Command::Budget(args) => cmd_budget(args, &cli.out),
        Command::NoiseBound(args) => cmd_noise_bound(args, &cli.out),
        Command::Mc(args) => cmd_mc(args, &cli.out),
        Command::ChurnBound(args) => cmd_churn_bound(args, &cli.out),
        Command::ChurnApply(args) => cmd_churn_apply(args, &cli.out),
        Command::Gen(args) => cmd_gen(args, &cli.out),
        Command::Feasibility(args) => cmd_feasibility(args, &cli.out),
        Command::Diff(args) => cmd_diff(args, &cli.out),
        Command::Validate(args) => cmd_validate(args, &cli.out),
    }
}

fn cmd_crocker(args: CrockerArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input.input)?;
    let grid = parse_grid(&args.input.grid)?;
    let diagrams = build_crocker(&series, &grid, args.k_max)?;

    let out_dir = resolve_out_dir(args.out_dir);
    let formats: Vec<&str> = args.emit.split(',').map(str::trim).collect();
    let mut artifacts = Vec::new();
    for d in &diagrams {
        for fmt in &formats {
            let (name, contents) = match *fmt {
                "csv" => (format!("crocker_k{}.csv", d.k), serialize_crocker(d, CrockerFormat::Csv)?),
                "json" => {
                    (format!("crocker_k{}.json", d.k), serialize_crocker(d, CrockerFormat::Json)?)
                }
                "svg" => {
                    (format!("crocker_k{}.svg", d.k), emit_heatmap_svg(&HeatmapData::Counts(d)))
                }
                other => return Err(Failure::usage(format!("unknown emit format {other:?}"))),
            };
            let path = out_dir.join(name);
            write_file(&path, &contents)?;
            artifacts.push(path.display().to_string());
        }
    }

    eprintln!(
        "built {} diagrams ({} scales x {} times); wrote {}",
        diagrams.len(),
        grid.len(),
        series.len(),
        artifacts.join(", ")
    );
    write_report(
        out,
        &json!({
            "command": "crocker",
            "params": {
                "input": args.input.input,
                "grid": grid.thresholds(),
                "k_max": args.k_max,
                "dedup_tol": args.input.dedup_tol,
            },
            "result": { "diagrams": diagrams, "artifacts": artifacts },
        }),
    )
}

fn cmd_clearance(args: ClearanceArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input.input)?;
    let grid = parse_grid(&args.input.grid)?;
    let report = clearance_report(&series, &grid, args.input.dedup_tol)?;
    eprintln!(
        "gamma = {:.6}, gamma_grid = {:.6}, in-gap {}",
        report.gamma,
        report.gamma_grid,
        if report.in_gap_ok { "ok" } else { "VIOLATED" }
    );
    write_report(
        out,
        &json!({
            "command": "clearance",
            "params": {
                "input": args.input.input,
                "grid": grid.thresholds(),
                "dedup_tol": args.input.dedup_tol,
            },
            "result": {
                "gamma": report.gamma,
                "gamma_grid": report.gamma_grid,
                "delta_gap": report.delta_gap,
                "delta_grid_gap": report.delta_grid_gap,
                "in_gap_ok": report.in_gap_ok,
                "violations": report.violations(),
                "tightest_cells": report.tightest_cells(),
                "per_cell": report.per_cell,
            },
        }),
    )
}

fn cmd_certify(args: CertifyArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input.input)?;
    let grid = parse_grid(&args.input.grid)?;
    let report = clearance_report(&series, &grid, args.input.dedup_tol)?;
    let cert = certify_exact(&report, args.delta);
    let density = local_density(&series, &grid, args.delta)?;
    let m = series.frames().iter().map(|f| f.len()).max().unwrap_or(0) as u64;
    let budget = global_change_budget(&series, &grid, args.delta, m, 1)?;
    eprintln!(
        "verdict: {:?} (delta = {}, gamma/2 = {:.6})",
        cert.verdict, cert.delta_input, cert.threshold
    );
    write_report(
        out,
        &json!({
            "command": "certify",
            "params": {
                "input": args.input.input,
                "grid": grid.thresholds(),
                "delta": args.delta,
                "dedup_tol": args.input.dedup_tol,
            },
            "result": {
                "certificate": cert,
                "gamma": report.gamma,
                "gamma_grid": report.gamma_grid,
                "delta_gap": report.delta_gap,
                "delta_grid_gap": report.delta_grid_gap,
                "density": density,
                "fallback_budget_all_points_k1": budget,
                "violations": report.violations(),
            },
        }),
    )
}

fn cmd_budget(args: BudgetArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input.input)?;
    let grid = parse_grid(&args.input.grid)?;
    let profile = local_density(&series, &grid, args.delta)?;
    let budget = global_change_budget(&series, &grid, args.delta, args.m_star, args.k)?;
    eprintln!("global change budget (k = {}): {}", args.k, budget);
    write_report(
        out,
        &json!({
            "command": "budget",
            "params": {
                "input": args.input.input,
                "grid": grid.thresholds(),
                "delta": args.delta,
                "m_star": args.m_star,
                "k": args.k,
                "n_t": series.len(),
            },
            "result": { "budget": budget, "density": profile },
        }),
    )
}

fn cmd_noise_bound(args: NoiseBoundArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let (gamma_grid, m, n_t, grid_vals) = match args.gamma_grid {
        Some(g) => {
            let m = args.m.ok_or_else(|| Failure::usage("--m required with --gamma-grid"))?;
            let n_t =
                args.n_t.ok_or_else(|| Failure::usage("--n-t required with --gamma-grid"))?;
            (g, m, n_t, None)
        }
        None => {
            let input = args
                .input
                .as_deref()
                .ok_or_else(|| Failure::usage("need --gamma-grid or --input/--grid"))?;
            let grid_spec = args
                .grid
                .as_deref()
                .ok_or_else(|| Failure::usage("need --grid with --input"))?;
            let series = load_series(input)?;
            let grid = parse_grid(grid_spec)?;
            let g = crocker::stability::grid_threshold_clearance(&series, &grid);
            let m = args
                .m
                .unwrap_or_else(|| series.frames().iter().map(|f| f.len()).max().unwrap_or(2) as u64);
            let n_t = args.n_t.unwrap_or(series.len() as u64);
            (g, m, n_t, Some(grid.thresholds().to_vec()))
        }
    };
    let tau = tau_star(gamma_grid, args.sigma, args.dim)?;
    let mut bound = global_prob_bound(m, n_t, tau)?;
    bound.gamma_grid = Some(gamma_grid);
    let required = match args.target_prob {
        Some(p) => Some(required_tau_for_confidence(m, n_t, p)?),
        None => None,
    };
    eprintln!(
        "tau* = {:.4}, global bound = {:.3e}{}",
        tau,
        bound.global_bound,
        if bound.vacuous { " (vacuous)" } else { "" }
    );
    write_report(
        out,
        &json!({
            "command": "noise-bound",
            "params": {
                "gamma_grid": gamma_grid,
                "sigma": args.sigma,
                "dim": args.dim,
                "m": m,
                "n_t": n_t,
                "grid": grid_vals,
                "target_prob": args.target_prob,
            },
            "result": { "bound": bound, "required_tau": required },
        }),
    )
}

fn cmd_mc(args: McArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input.input)?;
    let grid = parse_grid(&args.input.grid)?;
    let model = NoiseModel::new(args.sigma, series.dim(), args.seed)?;
    let report = mc_stability_experiment(&series, &grid, &model, args.trials, args.k_max)?;
    eprintln!(
        "change rate {:.4}, crossing rate {:.4}, mean l1 {:.4}, bound {:.3e}",
        report.change_rate, report.crossing_rate, report.mean_l1, report.theoretical_bound
    );
    write_report(
        out,
        &json!({
            "command": "mc",
            "params": {
                "input": args.input.input,
                "grid": grid.thresholds(),
                "sigma": args.sigma,
                "seed": args.seed,
                "trials": args.trials,
                "k_max": args.k_max,
            },
            "result": report,
        }),
    )
}

fn cmd_churn_bound(args: ChurnBoundArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let lambdas: Vec<u64> = match (&args.lambdas, &args.input, &args.grid) {
        (Some(list), _, _) => list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Failure::usage(format!("bad lambda value {v:?}")))
            })
            .collect::<Result<Vec<u64>, Failure>>()?,
        (None, Some(input), Some(grid_spec)) => {
            let series = load_series(input)?;
            let grid = parse_grid(grid_spec)?;
            match &args.event {
                Some(event_path) => {
                    let event: ChurnEvent = serde_json::from_str(&read_input(
                        &event_path.display().to_string(),
                    )?)
                    .map_err(|e| Failure::compute(format!("bad event json: {e}")))?;
                    let modified = apply_event(&series, &event)?;
                    crocker::churn::churn_lambdas(&series, &modified, &grid)?
                }
                None => local_density(&series, &grid, 0.0)?.lambdas(),
            }
        }
        _ => return Err(Failure::usage("need --lambdas or --input/--grid")),
    };
    let bound = global_churn_bound(args.n_t, args.event_index, args.q, &lambdas, args.k)?;
    eprintln!("global churn bound (k = {}): {}", args.k, bound);
    write_report(
        out,
        &json!({
            "command": "churn-bound",
            "params": {
                "n_t": args.n_t,
                "event_index": args.event_index,
                "q": args.q,
                "lambdas": lambdas,
                "k": args.k,
            },
            "result": { "bound": bound },
        }),
    )
}

fn cmd_churn_apply(args: ChurnApplyArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let series = load_series(&args.input)?;
    let event: ChurnEvent =
        serde_json::from_str(&read_input(&args.event.display().to_string())?)
            .map_err(|e| Failure::compute(format!("bad event json: {e}")))?;
    let modified = apply_event(&series, &event)?;
    let csv = serialize_point_cloud_csv(&modified);
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    eprintln!(
        "applied {:?} of {} point(s) from frame {}",
        event.kind,
        event.q(),
        event.time_index
    );
    Ok(())
}

fn cmd_gen(cmd: GenCommand, out: &Option<PathBuf>) -> Result<(), Failure> {
    match cmd {
        GenCommand::Polygon { m, n_t } => {
            if m < 3 {
                return Err(Failure::usage("polygon needs at least 3 vertices"));
            }
            if n_t < 1 {
                return Err(Failure::usage("need at least one frame"));
            }
            let series = breathing_polygon(&BreathingPolygonSpec { m, n_t });
            let csv = serialize_point_cloud_csv(&series);
            match out {
                Some(path) => write_file(path, &csv)?,
                None => print!("{csv}"),
            }
            eprintln!("generated breathing polygon: m = {m}, frames = {n_t}");
            Ok(())
        }
        GenCommand::PentagonInsertion { out_dir } => {
            let dir = resolve_out_dir(Some(out_dir));
            let scenario = pentagon_insertion_scenario();
            let base_path = dir.join("pentagon_base.csv");
            let event_path = dir.join("pentagon_event.json");
            let bands_path = dir.join("pentagon_transitions.json");
            write_file(&base_path, &serialize_point_cloud_csv(&scenario.base))?;
            write_file(
                &event_path,
                &serde_json::to_string_pretty(&scenario.event)
                    .map_err(|e| Failure::compute(e.to_string()))?,
            )?;
            write_file(
                &bands_path,
                &serde_json::to_string_pretty(&scenario.expected_transitions)
                    .map_err(|e| Failure::compute(e.to_string()))?,
            )?;
            eprintln!(
                "wrote {}, {}, {}",
                base_path.display(),
                event_path.display(),
                bands_path.display()
            );
            Ok(())
        }
    }
}

fn cmd_feasibility(args: FeasibilityArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    if args.rings < 1 {
        return Err(Failure::usage("need at least one ring"));
    }
    let spec = FeasibilitySpec {
        m: args.m,
        n_t: args.n_t,
        ring_scales: (1..=args.rings).collect(),
        pixel_size_um: args.pixel_size,
        pixel_error_px: args.pixel_error,
        k: args.k,
        scale_pitch_um: 20.0,
    };
    let report = epithelial_feasibility(&spec, args.inflate);
    eprintln!(
        "delta = {:.3} um, inner sum = {}, global budget = {}",
        report.delta_um, report.inner_sum, report.global_budget
    );
    write_report(
        out,
        &json!({
            "command": "feasibility",
            "params": spec,
            "result": report,
        }),
    )
}

fn cmd_diff(args: DiffArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let a = parse_crocker_json(&read_input(&args.a.display().to_string())?)?;
    let b = parse_crocker_json(&read_input(&args.b.display().to_string())?)?;
    let l1 = l1_distance(&a, &b)?;
    let map = diff_map(&a, &b)?;
    if let Some(svg_path) = &args.svg {
        write_file(svg_path, &emit_heatmap_svg(&HeatmapData::Diff(&map)))?;
    }
    eprintln!("l1 distance = {l1}");
    write_report(
        out,
        &json!({
            "command": "diff",
            "params": { "a": args.a.display().to_string(), "b": args.b.display().to_string() },
            "result": { "l1": l1, "diff": map },
        }),
    )
}

fn cmd_validate(args: ValidateArgs, out: &Option<PathBuf>) -> Result<(), Failure> {
    let soundness = certificate_soundness_suite(args.seed, args.soundness_cases);
    let dominance = bound_dominance_suite(args.seed, args.dominance_scenarios);
    eprintln!(
        "soundness: {}/{} clean; dominance: {}/{} within bounds, {} witnesses",
        soundness.cases - soundness.violations,
        soundness.cases,
        dominance.scenarios - dominance.dominance_violations,
        dominance.scenarios,
        dominance.nonzero_witnesses
    );
    let passed = soundness.passed && dominance.passed;
    write_report(
        out,
        &json!({
            "command": "validate",
            "params": {
                "seed": args.seed,
                "soundness_cases": args.soundness_cases,
                "dominance_scenarios": args.dominance_scenarios,
            },
            "result": { "soundness": soundness, "dominance": dominance, "passed": passed },
        }),
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::compute("validation suites reported violations"))
    }
}
