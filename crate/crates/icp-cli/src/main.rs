//! `icp`: ideal circle packings of angle-weighted planar maps.
//!
//! Subcommands form a pipeline: `generate` emits a map+angle document,
//! `validate` checks Rivin's conditions, `solve` computes a flat packing
//! metric, `layout` develops it in the plane (optionally normalized into the
//! unit disk, with SVG export), `walk` runs seeded random-walk ensembles on
//! a layout, and `analyze` bundles the verification suites (mass transport,
//! dichotomy, ring bounds, dyadic counting).
//!
//! Every command writes a `manifest.json` listing inputs, parameters, the
//! seed, and every output file; re-running with identical inputs reproduces
//! all data artifacts byte for byte (solver timing logs are listed
//! separately as logs).

mod manifest;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use icp_core::analysis::{
    count_radii_check, dichotomy_experiment, lemma2_check, ring_check, DichotomyConfig,
    TypeDiagnosis,
};
use icp_core::angle::{
    mass_transport_check, perturb_theta_on_c1, rivin_report, AngleAssignment, DEFAULT_C1_TOL,
};
use icp_core::error::Error as CoreError;
use icp_core::io;
use icp_core::layout::{
    consistency_check, export_svg, layout_embed_with, normalize_to_disk, ConsistencyOptions,
    Frame, LayoutOptions, SvgOptions,
};
use icp_core::map::Topology;
use icp_core::packing::{solve, BoundaryMode, PackingMetric, SolverConfig, SolverMethod};
use icp_core::tessellation::{generate_regular_patch, generate_torus_quotient};
use icp_core::walk::{
    ensemble_speed, exit_histogram, radii_decay_series, srw_walk_stream, WalkTrace,
};

use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(
    name = "icp",
    version,
    about = "Ideal circle packings: Rivin conditions, curvature solvers, layouts, random walks",
    after_help = "Exit codes: 0 success/pass, 1 assertion failed, 2 input error, 3 no convergence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a {p,q} patch or torus quotient with its angle assignment.
    Generate(GenerateArgs),
    /// Check Rivin's conditions (C1) and (C2') on a map+angle document.
    Validate(ValidateArgs),
    /// Solve for the flat circle packing metric.
    Solve(SolveArgs),
    /// Develop a flat metric into the plane; optionally into the unit disk.
    Layout(LayoutArgs),
    /// Run seeded random-walk ensembles over a unit-disk layout.
    Walk(WalkArgs),
    /// Verification suites.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Args)]
struct GenerateArgs {
    /// Face degree p.
    #[arg(long)]
    p: usize,
    /// Vertex degree q.
    #[arg(long)]
    q: usize,
    /// Patch generations (ignored with --torus-period).
    #[arg(long, default_value_t = 3)]
    generations: usize,
    /// Build the n x n torus quotient instead of a disk patch.
    #[arg(long)]
    torus_period: Option<usize>,
    /// Sup-norm of a C1-preserving random angle perturbation.
    #[arg(long, default_value_t = 0.0)]
    theta_perturb: f64,
    /// Seed for the angle perturbation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output document path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// C1 residual tolerance.
    #[arg(long, default_value_t = DEFAULT_C1_TOL)]
    tol: f64,
    /// Cap on the length (edge count) of cycles searched for (C2').
    #[arg(long)]
    max_cycle_len: Option<usize>,
    /// Directory for reports and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Curvature-zeroing method.
    #[arg(long, value_enum, default_value_t = MethodArg::RicciFlow)]
    method: MethodArg,
    /// Target max |K| at interior vertices.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration budget (flow steps or Gauss-Seidel sweeps).
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Initial Ricci flow step size.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Boundary handling on disk patches.
    #[arg(long, value_enum, default_value_t = BoundaryArg::FixedRadii)]
    boundary: BoundaryArg,
    /// Initial metric: "uniform:R" or "random:LO,HI" (seeded).
    #[arg(long, default_value = "uniform:1")]
    r0: String,
    /// Seed for the random initial metric.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output metric document.
    #[arg(short, long)]
    output: PathBuf,
    /// Iteration log CSV (contains wall-clock timings).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    RicciFlow,
    FixedPoint,
}

#[derive(Copy, Clone, ValueEnum)]
enum BoundaryArg {
    FixedRadii,
    Free,
}

#[derive(Args)]
struct LayoutArgs {
    /// Map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Metric document from `icp solve`.
    #[arg(long)]
    metric: PathBuf,
    /// Normalize into the unit disk.
    #[arg(long)]
    disk: bool,
    /// SVG output path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Draw center-to-center edges in the SVG.
    #[arg(long)]
    edges: bool,
    /// Draw dual points in the SVG.
    #[arg(long)]
    duals: bool,
    /// Layout CSV (vertex,x,y,r).
    #[arg(long)]
    layout_csv: Option<PathBuf>,
    /// Dual point CSV (face,x,y).
    #[arg(long)]
    duals_csv: Option<PathBuf>,
    /// Holonomy tolerance relative to the local radius.
    #[arg(long, default_value_t = 1e-6)]
    holonomy_tol: f64,
    /// Check every pair of edge kites for overlap (quadratic).
    #[arg(long)]
    full_overlap_check: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct WalkArgs {
    /// Map document (JSON).
    input: PathBuf,
    /// Layout CSV from `icp layout` (unit-disk frame).
    #[arg(long)]
    layout: PathBuf,
    /// Number of independent walks.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Step cap per walk (walks stop earlier at the boundary).
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    /// Base seed; walk i uses stream i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Angular bins of the exit histogram.
    #[arg(long, default_value_t = 16)]
    bins: usize,
    /// Directory for reports and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Mass-transport identity on a torus quotient.
    Mtp(MtpArgs),
    /// Type diagnosis of a {p,q} family across generations.
    Dichotomy(DichotomyArgs),
    /// Ring-lemma ratio statistics of a converged metric.
    Ring(RingArgs),
    /// Dyadic counting bound N(tau) tau^2 <= 100 on the disk layout.
    Count(CountArgs),
}

#[derive(Args)]
struct MtpArgs {
    /// Torus map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Apply a C1-preserving perturbation before checking.
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    /// Seed for the perturbation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pass threshold on the identity deviations.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Directory for the report and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DichotomyArgs {
    /// Face degree p.
    #[arg(long)]
    p: usize,
    /// Vertex degree q.
    #[arg(long)]
    q: usize,
    /// Constant edge angle; defaults to the C1 angle (p-2)pi/p.
    #[arg(long)]
    theta: Option<f64>,
    /// Comma-separated generation list.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5])]
    generations: Vec<usize>,
    /// Solver tolerance per generation.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Directory for the report and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RingArgs {
    /// Map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Metric document from `icp solve`.
    #[arg(long)]
    metric: PathBuf,
    /// Interior depth restriction for the ratio statistics.
    #[arg(long, default_value_t = 2)]
    min_depth: usize,
    /// Directory for the report and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CountArgs {
    /// Disk-patch map document (JSON); may carry theta inline.
    input: PathBuf,
    /// Separate theta document when the map file has none.
    #[arg(long)]
    theta: Option<PathBuf>,
    /// Metric document from `icp solve`.
    #[arg(long)]
    metric: PathBuf,
    /// Directory for the report and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(cli, started) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}

/// 2 for input problems, 3 for non-convergence, 1 for failed geometric
/// assertions discovered while processing.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::NoConvergence { .. }) => 3,
        Some(CoreError::InconsistentHolonomy { .. }) => 1,
        Some(_) => 2,
        None => 2,
    }
}

fn run(cli: Cli, started: Instant) -> anyhow::Result<i32> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args, started),
        Command::Validate(args) => cmd_validate(args, started),
        Command::Solve(args) => cmd_solve(args, started),
        Command::Layout(args) => cmd_layout(args, started),
        Command::Walk(args) => cmd_walk(args, started),
        Command::Analyze(cmd) => match cmd {
            AnalyzeCommand::Mtp(args) => cmd_analyze_mtp(args, started),
            AnalyzeCommand::Dichotomy(args) => cmd_analyze_dichotomy(args, started),
            AnalyzeCommand::Ring(args) => cmd_analyze_ring(args, started),
            AnalyzeCommand::Count(args) => cmd_analyze_count(args, started),
        },
    }
}

/// Loads the map document plus theta, either inline or from a second file.
fn load_input(input: &Path, theta: Option<&Path>) -> anyhow::Result<(io::MapBundle, AngleAssignment)> {
    let mut bundle = io::read_map_file(input)
        .with_context(|| format!("reading map document {}", input.display()))?;
    if let Some(theta_path) = theta {
        let other = io::read_map_file(theta_path)
            .with_context(|| format!("reading theta document {}", theta_path.display()))?;
        anyhow::ensure!(
            other.map.canonical_code() == bundle.map.canonical_code(),
            "theta document describes a different map"
        );
        bundle.theta = other.theta;
    }
    let theta = bundle.theta_or_err()?.clone();
    Ok((bundle, theta))
}

fn cmd_generate(args: GenerateArgs, started: Instant) -> anyhow::Result<i32> {
    let map = match args.torus_period {
        Some(n) => generate_torus_quotient(args.p, args.q, n)?,
        None => generate_regular_patch(args.p, args.q, args.generations)?,
    };
    let base = AngleAssignment::uniform(&map, AngleAssignment::regular_angle(args.p))?;
    let theta = if args.theta_perturb > 0.0 {
        perturb_theta_on_c1(&map, &base, args.theta_perturb, args.seed)?
    } else {
        base
    };
    let doc = io::document_from_parts(&map, None, Some(&theta));
    io::write_map_file(&args.output, &doc)?;

    let mut manifest = ManifestBuilder::new("generate", args.seed);
    manifest
        .param("p", args.p)
        .param("q", args.q)
        .param("generations", args.generations)
        .param("torus_period", args.torus_period)
        .param("theta_perturb", args.theta_perturb);
    manifest.output(&args.output);
    manifest.write_next_to(&args.output, started)?;
    println!(
        "generated {} vertices, {} edges, {} faces -> {}",
        map.vertex_count(),
        map.edge_count(),
        map.face_count(),
        args.output.display()
    );
    Ok(0)
}

fn cmd_validate(args: ValidateArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, theta) = load_input(&args.input, args.theta.as_deref())?;
    let report = rivin_report(&bundle.map, &theta, args.tol, args.max_cycle_len);

    std::fs::create_dir_all(&args.out_dir)?;
    let report_path = args.out_dir.join("rivin_report.json");
    std::fs::write(&report_path, io::to_canonical_json(&report)?)?;
    let residuals_path = args.out_dir.join("c1_residuals.csv");
    let mut csv = String::from("face,residual\n");
    for (f, r) in report.c1.residuals.iter().enumerate() {
        csv.push_str(&format!("{f},{r}\n"));
    }
    std::fs::write(&residuals_path, csv)?;

    let mut manifest = ManifestBuilder::new("validate", 0);
    manifest.input(&args.input);
    if let Some(t) = &args.theta {
        manifest.input(t);
    }
    manifest
        .param("tol", args.tol)
        .param("max_cycle_len", args.max_cycle_len);
    manifest.output(&report_path);
    manifest.output(&residuals_path);
    manifest.write_into(&args.out_dir, started)?;

    println!(
        "C1 {} (max residual {:.3e}); C2' {} (epsilon0 = {})",
        if report.c1.pass { "pass" } else { "FAIL" },
        report.c1.max_abs_residual,
        if report.c2_pass { "pass" } else { "FAIL" },
        report
            .epsilon0
            .map_or("inf (no non-facial cycle)".to_string(), |e| format!("{e:.6}"))
    );
    Ok(if report.c1.pass && report.c2_pass { 0 } else { 1 })
}

fn parse_r0(spec: &str, map: &icp_core::PlanarMap, seed: u64) -> anyhow::Result<PackingMetric> {
    if let Some(r) = spec.strip_prefix("uniform:") {
        let r: f64 = r.parse().context("bad uniform radius")?;
        return Ok(PackingMetric::uniform(map, r)?);
    }
    if let Some(range) = spec.strip_prefix("random:") {
        let (lo, hi) = range
            .split_once(',')
            .context("random spec needs LO,HI")?;
        let lo: f64 = lo.parse().context("bad lower radius")?;
        let hi: f64 = hi.parse().context("bad upper radius")?;
        anyhow::ensure!(lo > 0.0 && hi > lo, "need 0 < LO < HI");
        use rand::Rng;
        let mut rng = rand_chacha_rng(seed);
        let values = map
            .vertices()
            .map(|_| rng.random_range(lo..hi))
            .collect();
        return Ok(PackingMetric::from_values(map, values)?);
    }
    anyhow::bail!("r0 must be uniform:R or random:LO,HI, got {spec:?}")
}

fn rand_chacha_rng(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn cmd_solve(args: SolveArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, theta) = load_input(&args.input, args.theta.as_deref())?;
    let r0 = parse_r0(&args.r0, &bundle.map, args.seed)?;
    let cfg = SolverConfig {
        method: match args.method {
            MethodArg::RicciFlow => SolverMethod::RicciFlow,
            MethodArg::FixedPoint => SolverMethod::FixedPoint,
        },
        step: args.step,
        tol: args.tol,
        max_iters: args.max_iters,
        boundary_mode: match args.boundary {
            BoundaryArg::FixedRadii => BoundaryMode::FixedRadii,
            BoundaryArg::Free => BoundaryMode::Free,
        },
        c1_tol: DEFAULT_C1_TOL,
    };
    let out = solve(&bundle.map, &theta, &r0, &cfg)?;
    io::write_metric_file(&args.output, &out.metric, &bundle.labels)?;
    let mut manifest = ManifestBuilder::new("solve", args.seed);
    manifest.input(&args.input);
    manifest
        .param("method", format!("{:?}", cfg.method))
        .param("tol", cfg.tol)
        .param("step", cfg.step)
        .param("max_iters", cfg.max_iters)
        .param("r0", &args.r0)
        .param("converged", out.converged)
        .param("iterations", out.iterations)
        .param("final_max_abs_k", out.curvature.max_abs_k());
    manifest.output(&args.output);
    if let Some(log_path) = &args.log {
        std::fs::write(log_path, io::solver_log_to_csv(&out.log))?;
        manifest.log(log_path);
    }
    manifest.write_next_to(&args.output, started)?;
    println!(
        "{} after {} iterations, max |K| = {:.3e} -> {}",
        if out.converged { "converged" } else { "NOT CONVERGED" },
        out.iterations,
        out.curvature.max_abs_k(),
        args.output.display()
    );
    Ok(if out.converged { 0 } else { 3 })
}

fn cmd_layout(args: LayoutArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, theta) = load_input(&args.input, args.theta.as_deref())?;
    let metric = io::read_metric_file(&args.metric, &bundle.map, &bundle.labels)?;
    let opts = LayoutOptions {
        holonomy_tol: args.holonomy_tol,
    };
    let mut layout = layout_embed_with(&bundle.map, &theta, &metric, &opts)?;
    if args.disk {
        layout = normalize_to_disk(&layout);
    }
    let report = consistency_check(
        &layout,
        &bundle.map,
        &theta,
        &ConsistencyOptions {
            full_overlap_check: args.full_overlap_check,
        },
    )?;

    std::fs::create_dir_all(&args.out_dir)?;
    let mut manifest = ManifestBuilder::new("layout", 0);
    manifest.input(&args.input);
    manifest.input(&args.metric);
    manifest
        .param("disk", args.disk)
        .param("holonomy_tol", args.holonomy_tol)
        .param("max_edge_deviation_rel", report.max_edge_deviation_rel)
        .param("max_dual_spread_abs", report.max_dual_spread_abs)
        .param("overlap_count", report.overlap_count);

    if let Some(svg_path) = &args.svg {
        let svg = export_svg(
            &layout,
            &bundle.map,
            &SvgOptions {
                draw_edges: args.edges,
                draw_dual_points: args.duals,
                ..Default::default()
            },
        );
        std::fs::write(svg_path, svg)?;
        manifest.output(svg_path);
    }
    if let Some(csv_path) = &args.layout_csv {
        std::fs::write(csv_path, io::layout_to_csv(&layout, &bundle.labels))?;
        manifest.output(csv_path);
    }
    if let Some(duals_path) = &args.duals_csv {
        std::fs::write(duals_path, io::dual_points_to_csv(&layout))?;
        manifest.output(duals_path);
    }
    let report_path = args.out_dir.join("layout_report.json");
    std::fs::write(&report_path, io::to_canonical_json(&report)?)?;
    manifest.output(&report_path);
    manifest.write_into(&args.out_dir, started)?;
    println!(
        "layout {}: edge dev {:.3e}, dual spread {:.3e}, overlaps {}/{}",
        match layout.frame {
            Frame::Plane => "plane",
            Frame::UnitDisk => "unit-disk",
        },
        report.max_edge_deviation_rel,
        report.max_dual_spread_abs,
        report.overlap_count,
        report.overlap_pairs_checked
    );
    Ok(if report.overlap_count == 0 { 0 } else { 1 })
}

fn cmd_walk(args: WalkArgs, started: Instant) -> anyhow::Result<i32> {
    anyhow::ensure!(args.samples > 0, "need at least one sample");
    let (bundle, _theta) = load_input(&args.input, None)?;
    let layout_text = std::fs::read_to_string(&args.layout)?;
    let layout = io::layout_from_csv(&layout_text, &bundle.map, &bundle.labels)?;
    anyhow::ensure!(
        layout.frame == Frame::UnitDisk,
        "walk observables need a unit-disk layout (run `icp layout --disk`)"
    );

    std::fs::create_dir_all(&args.out_dir)?;
    let mut traces: Vec<WalkTrace> = Vec::with_capacity(args.samples);
    for s in 0..args.samples {
        let mut t = srw_walk_stream(&bundle.map, bundle.map.root(), args.steps, args.seed, s as u64)?;
        t.observe_layout(&layout)?;
        traces.push(t);
    }
    let hist = exit_histogram(
        &bundle.map,
        &layout,
        args.samples,
        args.steps,
        args.bins,
        args.seed,
    )?;
    let decay = radii_decay_series(&traces)?;
    let speed = ensemble_speed(&traces);

    let trace_path = args.out_dir.join("trace_000.csv");
    std::fs::write(&trace_path, io::trace_to_csv(&traces[0], &bundle.labels))?;
    let hist_path = args.out_dir.join("histogram.csv");
    std::fs::write(&hist_path, io::histogram_to_csv(&hist))?;
    let decay_path = args.out_dir.join("decay.csv");
    std::fs::write(&decay_path, io::decay_series_to_csv(&decay))?;
    let speed_path = args.out_dir.join("speed.json");
    match &speed {
        Ok(s) => std::fs::write(&speed_path, io::to_canonical_json(s)?)?,
        Err(e) => std::fs::write(
            &speed_path,
            format!("{{\n  \"error\": \"{e}\"\n}}\n"),
        )?,
    }

    let mut manifest = ManifestBuilder::new("walk", args.seed);
    manifest.input(&args.input);
    manifest.input(&args.layout);
    manifest
        .param("samples", args.samples)
        .param("steps", args.steps)
        .param("bins", args.bins)
        .param("rng", icp_core::walk::RNG_ALGORITHM);
    for p in [&trace_path, &hist_path, &decay_path, &speed_path] {
        manifest.output(p);
    }
    manifest.write_into(&args.out_dir, started)?;

    match &speed {
        Ok(s) => println!(
            "{} walks; pooled lambda_radius = {:.4}, lambda_hyp = {}",
            args.samples,
            s.lambda_radius,
            s.lambda_hyp
                .map_or("n/a".to_string(), |l| format!("{l:.4}"))
        ),
        Err(e) => println!("{} walks; speed estimate unavailable: {e}", args.samples),
    }
    Ok(0)
}

fn cmd_analyze_mtp(args: MtpArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, mut theta) = load_input(&args.input, args.theta.as_deref())?;
    if args.perturb > 0.0 {
        theta = perturb_theta_on_c1(&bundle.map, &theta, args.perturb, args.seed)?;
    }
    let report = mass_transport_check(&bundle.map, &theta, DEFAULT_C1_TOL)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("mtp_report.json");
    std::fs::write(&path, io::to_canonical_json(&report)?)?;
    let mut manifest = ManifestBuilder::new("analyze mtp", args.seed);
    manifest.input(&args.input);
    manifest.param("perturb", args.perturb).param("tol", args.tol);
    manifest.output(&path);
    manifest.write_into(&args.out_dir, started)?;
    let pass = report.max_outgoing_deviation <= args.tol
        && report.max_incoming_deviation <= args.tol
        && report.global_deviation <= args.tol * bundle.map.vertex_count() as f64;
    println!(
        "transport identities: out dev {:.3e}, in dev {:.3e}, mean T = {:.9}, mean theta = {:.9} -> {}",
        report.max_outgoing_deviation,
        report.max_incoming_deviation,
        report.mean_t,
        report.mean_theta,
        if pass { "pass" } else { "FAIL" }
    );
    Ok(if pass { 0 } else { 1 })
}

fn cmd_analyze_dichotomy(args: DichotomyArgs, started: Instant) -> anyhow::Result<i32> {
    let theta_value = args
        .theta
        .unwrap_or_else(|| AngleAssignment::regular_angle(args.p));
    let mut cfg = DichotomyConfig::default();
    cfg.solver.tol = args.tol;
    let report = dichotomy_experiment(args.p, args.q, theta_value, &args.generations, &cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("dichotomy_report.json");
    std::fs::write(&path, io::to_canonical_json(&report)?)?;
    let mut manifest = ManifestBuilder::new("analyze dichotomy", 0);
    manifest
        .param("p", args.p)
        .param("q", args.q)
        .param("theta", theta_value)
        .param("generations", &args.generations);
    manifest.output(&path);
    manifest.write_into(&args.out_dir, started)?;
    println!(
        "mean T = {:.6} ({}x 2pi), decay rate = {:.4}/generation -> {:?}",
        report.mean_t,
        report.mean_t / (2.0 * std::f64::consts::PI),
        report.decay_rate,
        report.diagnosis
    );
    Ok(if report.diagnosis == TypeDiagnosis::Inconclusive {
        1
    } else {
        0
    })
}

fn cmd_analyze_ring(args: RingArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, theta) = load_input(&args.input, args.theta.as_deref())?;
    let metric = io::read_metric_file(&args.metric, &bundle.map, &bundle.labels)?;
    let ring = ring_check(&bundle.map, &metric, args.min_depth)?;
    let lemma2 = lemma2_check(&bundle.map, &theta, &metric)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("ring_report.json");
    #[derive(serde::Serialize)]
    struct Combined<'a> {
        ring: &'a icp_core::analysis::RingReport,
        lemma2: &'a icp_core::analysis::Lemma2Report,
    }
    std::fs::write(
        &path,
        io::to_canonical_json(&Combined {
            ring: &ring,
            lemma2: &lemma2,
        })?,
    )?;
    let mut manifest = ManifestBuilder::new("analyze ring", 0);
    manifest.input(&args.input);
    manifest.input(&args.metric);
    manifest.param("min_depth", args.min_depth);
    manifest.output(&path);
    manifest.write_into(&args.out_dir, started)?;
    println!(
        "empirical C = {:.6} over {} pairs; lemma2 margin = {:.6} (vs 2eps1/pi = {:.6})",
        ring.empirical_c, ring.qualified_pairs, lemma2.margin_subtracted, lemma2.two_eps1_over_pi
    );
    Ok(if lemma2.margin_subtracted > 0.0 { 0 } else { 1 })
}

fn cmd_analyze_count(args: CountArgs, started: Instant) -> anyhow::Result<i32> {
    let (bundle, theta) = load_input(&args.input, args.theta.as_deref())?;
    let metric = io::read_metric_file(&args.metric, &bundle.map, &bundle.labels)?;
    anyhow::ensure!(
        bundle.map.topology() == Topology::DiskPatch,
        "counting bound needs a disk patch"
    );
    let layout = normalize_to_disk(&layout_embed_with(
        &bundle.map,
        &theta,
        &metric,
        &LayoutOptions::default(),
    )?);
    let report = count_radii_check(&layout)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("counting.csv");
    let mut csv = String::from("tau,count,product\n");
    for row in &report.rows {
        csv.push_str(&format!("{},{},{}\n", row.tau, row.count, row.product));
    }
    std::fs::write(&path, csv)?;
    let json_path = args.out_dir.join("counting_report.json");
    std::fs::write(&json_path, io::to_canonical_json(&report)?)?;
    let mut manifest = ManifestBuilder::new("analyze count", 0);
    manifest.input(&args.input);
    manifest.input(&args.metric);
    manifest.output(&path);
    manifest.output(&json_path);
    manifest.write_into(&args.out_dir, started)?;
    println!(
        "max N(tau) tau^2 = {:.4} (bound {}) -> {}",
        report.max_product,
        report.bound,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(if report.pass { 0 } else { 1 })
}
