//! `mctrace` command-line front end.
//!
//! Exit codes: 0 success or verified, 1 verification failure, 2 usage or I/O
//! error, 3 timeout.

mod surface;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mctrace::collision::SceneFile;
use mctrace::manifold::{sample_seeds, ImplicitManifold};
use mctrace::mesh::EdgeMesh;
use mctrace::pipeline::{PipelineError, RunStats};
use mctrace::subdivision::{build_template, coarse_cells, refine, NoObstacles};
use mctrace::tracer::{trace, TraceConfig};
use mctrace::{
    scenes, solve, verify_proof, BoxRegion, InfeasibilityProof, LatticeConfig, Outcome, Problem,
    RefineConfig, SolveParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::surface::{default_extent, parse_surface};

#[derive(Debug, Parser)]
#[command(
    name = "mctrace",
    version,
    about = "Manifold tracing and motion-planning infeasibility certificates"
)]
struct Cli {
    /// Repeat for more log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace an analytic surface and write an EDGEMESH.
    Trace(TraceArgs),
    /// Solve a planning query: writes a PLAN or an INFPROOF certificate.
    Prove(ProveArgs),
    /// Re-check an INFPROOF certificate against a scene.
    Verify(VerifyArgs),
    /// Run a parameter sweep and write per-run statistics as CSV.
    Bench(BenchArgs),
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn factor(s: &str) -> Result<i64, String> {
    match s.parse::<i64>() {
        Ok(x) if (1..=64).contains(&x) => Ok(x),
        _ => Err(format!("expected an integer in 1..=64, got {s:?}")),
    }
}

/// Joint values given as one comma-separated argument.
#[derive(Debug, Clone)]
struct Joints(Vec<f64>);

fn configuration(s: &str) -> Result<Joints, String> {
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("cannot parse coordinate {t:?}")),
        })
        .collect::<Result<_, _>>()
        .map(Joints)
}

/// Parameters shared by every subcommand.
#[derive(Debug, Clone, Args)]
struct Common {
    /// Fine lattice scale.
    #[arg(long, value_parser = positive_f64)]
    lambda: Option<f64>,
    /// Subdivision factor; coarse cells are k times the fine scale.
    #[arg(long, value_parser = factor)]
    k: Option<i64>,
    /// Bisection bracket length [default: lambda * 1e-4].
    #[arg(long, value_parser = positive_f64)]
    eps: Option<f64>,
    /// Memory budget for one refinement batch, in bytes.
    #[arg(long, default_value_t = 64 << 20, value_parser = positive_usize)]
    mem_budget: usize,
    /// Number of projected seed points.
    #[arg(long, value_parser = positive_usize)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, env = "MC_WORKERS", default_value_t = 1, value_parser = positive_usize)]
    workers: usize,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 300.0, value_parser = positive_f64)]
    timeout: f64,
    /// Output file [default: standard output].
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn solve_params(&self) -> SolveParams {
        let d = SolveParams::default();
        SolveParams {
            lambda: self.lambda.unwrap_or(d.lambda),
            k: self.k.unwrap_or(d.k),
            eps: self.eps,
            mem_budget: self.mem_budget,
            seeds: self.seeds.unwrap_or(d.seeds),
            rng_seed: self.rng_seed,
            workers: self.workers,
            timeout: Duration::from_secs_f64(self.timeout),
            ..d
        }
    }
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Surface description, e.g. `sphere:r=1` or `ellipsoid:a=1;0.5;2`.
    #[arg(long)]
    manifold: String,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=63))]
    dim: u32,
    /// Half-width of the centered tracing box [default: fits the surface].
    #[arg(long, value_parser = positive_f64)]
    extent: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ProveArgs {
    /// Scene file, or the name of a bundled scene (wall2d, gap2d, arm3_wall).
    scene: String,
    /// Start configuration as comma-separated joint values.
    #[arg(long, value_parser = configuration, allow_hyphen_values = true)]
    start: Option<Joints>,
    #[arg(long, value_parser = configuration, allow_hyphen_values = true)]
    goal: Option<Joints>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    proof: PathBuf,
    /// Scene file or bundled scene name.
    scene: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Scene file or bundled scene name.
    scene: String,
    /// Comma-separated fine scales to sweep.
    #[arg(long, value_delimiter = ',', value_parser = positive_f64, default_value = "0.05")]
    lambdas: Vec<f64>,
    /// Runs per scale; run `i` uses seed `rng-seed + i`.
    #[arg(long, default_value_t = 1, value_parser = positive_usize)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

/// A failure that maps to a specific exit code.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Verification,
    Timeout,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Trace(a) => cmd_trace(&a),
        Command::Prove(a) => cmd_prove(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Timeout) => {
            eprintln!("timeout: no plan or certificate within the limits");
            ExitCode::from(3)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn distinct_paths(output: Option<&Path>, inputs: &[&Path]) -> Result<()> {
    if let Some(out) = output {
        if inputs.contains(&out) {
            bail!("output path {} is also an input", out.display());
        }
    }
    Ok(())
}

/// Reads a scene file, falling back to a bundled scene of that name.
fn load_scene(scene: &str) -> Result<SceneFile> {
    let path = Path::new(scene);
    let text = if path.exists() {
        std::fs::read_to_string(path).with_context(|| format!("cannot read scene {scene}"))?
    } else if let Some(text) = scenes::bundled(scene) {
        text.to_string()
    } else {
        let names: Vec<&str> = scenes::BUNDLED.iter().map(|(n, _)| *n).collect();
        bail!(
            "scene file {scene} not found and not a bundled scene ({})",
            names.join(", ")
        );
    };
    SceneFile::parse(&text).with_context(|| format!("cannot parse scene {scene}"))
}

fn cmd_trace(args: &TraceArgs) -> Result<(), Failure> {
    let c = &args.common;
    let n = args.dim as usize;
    let m = parse_surface(&args.manifold, n).context("--manifold")?;
    let lambda = c.lambda.unwrap_or(0.25);
    let eps = c.eps.unwrap_or(lambda * 1e-4);
    let half = args.extent.unwrap_or_else(|| default_extent(&m));
    let region = BoxRegion::cube(n, half);
    let fine = LatticeConfig::new(n, lambda).context("lattice")?;
    let refine_cfg = c.k.map(|k| RefineConfig {
        eps,
        budget_bytes: c.mem_budget,
        workers: c.workers,
        bounds: Some(region.clone()),
        ..RefineConfig::new(fine.clone(), k)
    });
    let lattice = refine_cfg.as_ref().map_or(fine, RefineConfig::coarse);

    let mut rng = ChaCha8Rng::seed_from_u64(c.rng_seed);
    let seeds = sample_seeds(
        &m,
        &region,
        c.seeds.unwrap_or(8),
        eps,
        lattice.scale() / 2.0,
        &mut rng,
    )
    .context("seed sampling")?;
    if seeds.is_empty() {
        return Err(anyhow::anyhow!(
            "no seed point found on the surface inside the box of half-width {half}"
        )
        .into());
    }
    let cfg = TraceConfig::new(lattice)
        .with_bounds(region)
        .with_workers(c.workers)
        .with_eps(eps);
    let traced = trace(&seeds, &m, &cfg).context("trace")?;
    let closure = *traced.closure();
    eprintln!(
        "coarse edges {}, open ends {}, box ends {}, two-edge violations {}, closure {}",
        traced.len(),
        closure.open_ends,
        closure.box_ends,
        closure.two_edge_violations,
        if closure.is_closed() { "pass" } else { "FAIL" }
    );
    let mesh = match &refine_cfg {
        None => EdgeMesh {
            dim: n,
            points: traced.points().to_vec(),
            adjacency: traced.adjacency().to_vec(),
        },
        Some(rcfg) => {
            let template = build_template(n, rcfg.k).context("subdivision template")?;
            let refined = refine(&coarse_cells(&traced), &template, &m, &NoObstacles, rcfg)
                .context("refine")?;
            eprintln!(
                "refined points {}, batches {}, gap cells {}, triangulation {:.3}s",
                refined.len(),
                refined.batches.len(),
                refined.gap_cells,
                refined.triangulate_time().as_secs_f64()
            );
            EdgeMesh {
                dim: n,
                adjacency: refined.adjacency(),
                points: refined.points().to_vec(),
            }
        }
    };
    let worst = mesh
        .points
        .iter()
        .map(|p| m.value(p).abs())
        .fold(0.0f64, f64::max);
    eprintln!(
        "V {} E {}, max |F| {worst:e}",
        mesh.points.len(),
        mesh.adjacency.len()
    );
    emit(c.output.as_deref(), &mesh.to_text())?;
    Ok(())
}

fn build_problem(
    file: &SceneFile,
    start: Option<Vec<f64>>,
    goal: Option<Vec<f64>>,
) -> Result<Problem> {
    Problem::from_scene_file(file, start, goal).context("invalid problem")
}

fn plan_text(path: &[Vec<f64>]) -> String {
    let dim = path.first().map_or(0, Vec::len);
    let mut s = format!("PLAN v1\ndim {dim} waypoints {}\n", path.len());
    for q in path {
        let row: Vec<String> = q.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

fn stats_line(stats: &RunStats) -> String {
    format!(
        "iterations {}, roadmap {}, coarse edges {}, fine points {}, free points {}, tri {:.3}s, check {:.3}s, total {:.3}s",
        stats.iterations,
        stats.roadmap_vertices,
        stats.coarse_edges,
        stats.fine_points,
        stats.free_points,
        stats.triangulation_time().as_secs_f64(),
        stats.check_time.as_secs_f64(),
        stats.total_time.as_secs_f64()
    )
}

fn run_solve(problem: &Problem, params: &SolveParams) -> Result<Outcome> {
    solve(problem, params).map_err(|e| match e {
        PipelineError::Params(msg) => anyhow::anyhow!("invalid parameters: {msg}"),
        other => anyhow::Error::new(other).context("solve failed"),
    })
}

fn cmd_prove(args: &ProveArgs) -> Result<(), Failure> {
    let c = &args.common;
    distinct_paths(c.output.as_deref(), &[Path::new(&args.scene)])?;
    let file = load_scene(&args.scene)?;
    let problem = build_problem(
        &file,
        args.start.as_ref().map(|j| j.0.clone()),
        args.goal.as_ref().map(|j| j.0.clone()),
    )?;
    let outcome = run_solve(&problem, &c.solve_params())?;
    eprintln!("{}", stats_line(outcome.stats()));
    match outcome {
        Outcome::Plan { path, .. } => {
            eprintln!("plan found with {} waypoints", path.len());
            emit(c.output.as_deref(), &plan_text(&path))?;
            Ok(())
        }
        Outcome::Proof { proof, .. } => {
            eprintln!(
                "infeasibility certificate with {} points",
                proof.points.len()
            );
            emit(c.output.as_deref(), &proof.to_text())?;
            Ok(())
        }
        Outcome::Timeout { .. } => Err(Failure::Timeout),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let c = &args.common;
    distinct_paths(
        c.output.as_deref(),
        &[args.proof.as_path(), Path::new(&args.scene)],
    )?;
    let text = std::fs::read_to_string(&args.proof)
        .with_context(|| format!("cannot read {}", args.proof.display()))?;
    let proof = InfeasibilityProof::from_text(&text)
        .with_context(|| format!("cannot parse {}", args.proof.display()))?;
    let file = load_scene(&args.scene)?;
    let (start, goal) = match file.problem {
        Some(_) => (None, None),
        None => (Some(proof.start.clone()), Some(proof.goal.clone())),
    };
    let problem = build_problem(&file, start, goal)?;
    let report = verify_proof(&proof, &problem);
    let mut out = report.to_text();
    out.push_str(if report.passed() {
        "verified\n"
    } else {
        "NOT verified\n"
    });
    emit(c.output.as_deref(), &out)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Debug, Serialize)]
struct BenchRow {
    lambda: f64,
    k: i64,
    trial: usize,
    rng_seed: u64,
    outcome: &'static str,
    iterations: usize,
    roadmap_vertices: usize,
    coarse_edges: usize,
    coarse_cells: usize,
    fine_points: usize,
    free_points: usize,
    certificate_points: usize,
    batches: usize,
    plan_time: f64,
    train_time: f64,
    trace_time: f64,
    tri_time: f64,
    check_time: f64,
    total_time: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let c = &args.common;
    distinct_paths(c.output.as_deref(), &[Path::new(&args.scene)])?;
    let file = load_scene(&args.scene)?;
    let problem = build_problem(&file, None, None)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for &lambda in &args.lambdas {
        let mut totals = Vec::with_capacity(args.trials);
        for trial in 0..args.trials {
            let params = SolveParams {
                lambda,
                rng_seed: c.rng_seed.wrapping_add(trial as u64),
                ..c.solve_params()
            };
            let outcome = run_solve(&problem, &params)?;
            let (name, points) = match &outcome {
                Outcome::Plan { .. } => ("plan", 0),
                Outcome::Proof { proof, .. } => ("proof", proof.points.len()),
                Outcome::Timeout { .. } => ("timeout", 0),
            };
            let s = outcome.stats();
            totals.push(s.total_time.as_secs_f64());
            csv.serialize(BenchRow {
                lambda,
                k: params.k,
                trial,
                rng_seed: params.rng_seed,
                outcome: name,
                iterations: s.iterations,
                roadmap_vertices: s.roadmap_vertices,
                coarse_edges: s.coarse_edges,
                coarse_cells: s.coarse_cells,
                fine_points: s.fine_points,
                free_points: s.free_points,
                certificate_points: points,
                batches: s.batches,
                plan_time: s.plan_time.as_secs_f64(),
                train_time: s.train_time.as_secs_f64(),
                trace_time: s.trace_time.as_secs_f64(),
                tri_time: s.triangulation_time().as_secs_f64(),
                check_time: s.check_time.as_secs_f64(),
                total_time: s.total_time.as_secs_f64(),
            })
            .context("csv")?;
        }
        let (mean, std) = mean_std(&totals);
        eprintln!(
            "lambda {lambda}: total {mean:.3} s ± {std:.3} over {} trials",
            totals.len()
        );
    }
    let bytes = csv.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    emit(
        c.output.as_deref(),
        &String::from_utf8(bytes).context("csv")?,
    )?;
    Ok(())
}
