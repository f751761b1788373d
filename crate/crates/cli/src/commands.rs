//! Command implementations. Every command prints one JSON report to stdout
//! with a fixed field order and no timestamps, so a rerun with the same
//! arguments is byte-identical regardless of worker count. Sweeps and
//! reduction traces additionally write file outputs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use planepolar::bodies::{is_symmetric, normalize_area, realize, BodyKind, BodySpec};
use planepolar::functionals::{
    centroid_body_exact, empirical_polar_centroid_volume, estimate_sylvester, estimate_w,
    estimate_w_gap, estimate_w_santalo, estimate_w_santalo_gap, mahler_product,
    polar_centroid_volume, polar_volume_quadrature, random_polytope, santalo_point,
    CoefficientBody, EstimatorResult, MahlerCenter, McConfig, RandomPolytope, DEFAULT_CI_LEVEL,
    DEFAULT_PANELS, DEFAULT_THETA_NODES,
};
use planepolar::geom2::{hausdorff, ConvexPolygon, Point2};
use planepolar::sampling::{derive_seed, sample_matrix, SeededStream, Triangulation};
use planepolar::shadow::{
    couple_sample, make_flat_movement, make_movement, midpoint_violations, reduce_to_extremizer,
    sample_convexity_profile, sweep_w, uniform_grid, MovementMode, ReduceStep,
};

use crate::parse::{parse_body, parse_coeff};
use crate::svg;

#[derive(Parser)]
#[command(
    name = "planepolar",
    version,
    about = "Polar volumes of random polytopes in the plane: exact anchors and seeded Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check the closed-form anchors against their computed values
    VerifyConstants(VerifyArgs),
    /// Estimate one functional on one body
    Estimate(EstimateArgs),
    /// Paired comparison of two area-matched bodies
    Dominance(DominanceArgs),
    /// Sweep the functional along a vertex movement, writing a CSV profile
    Sweep(SweepArgs),
    /// Convergence ladder for empirical bodies as the sample count grows
    Converge(ConvergeArgs),
    /// Greedy vertex reduction toward the extremal shape
    Reduce(ReduceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    W,
    Santalo,
    Sylvester,
    Empirical,
}

impl Functional {
    fn name(self) -> &'static str {
        match self {
            Functional::W => "w",
            Functional::Santalo => "santalo",
            Functional::Sylvester => "sylvester",
            Functional::Empirical => "empirical",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Symmetric,
    General,
}

impl Mode {
    fn movement(self) -> MovementMode {
        match self {
            Mode::Symmetric => MovementMode::Symmetric,
            Mode::General => MovementMode::General,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Symmetric => "symmetric",
            Mode::General => "general",
        }
    }
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Quadrature panel count for the centroid-body polar volume
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    /// Also write the JSON report here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub functional: Functional,
    /// Body descriptor, e.g. `square:4`, `kgon:6:2`, `file:poly.json`
    #[arg(long)]
    pub body: String,
    /// Coefficient body (`cross`, `lq:Q`, `simplex`); required for `w`
    #[arg(long)]
    pub coeff: Option<String>,
    /// Number of sampled points per draw
    #[arg(long, default_value_t = 3)]
    pub n_points: usize,
    /// Moment order
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Exponent of the empirical centroid body (`empirical` only)
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Quadrature panel count
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DominanceArgs {
    /// Competitor body
    #[arg(long)]
    pub body: String,
    /// Reference body expected to dominate; rescaled to the competitor's area
    #[arg(long)]
    pub vs: String,
    #[arg(long, value_enum, default_value = "w")]
    pub functional: Functional,
    #[arg(long)]
    pub coeff: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub body: String,
    /// Vertex to move
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub mode: Mode,
    #[arg(long)]
    pub coeff: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    /// Number of grid points across the movement range
    #[arg(long, default_value_t = 21)]
    pub t_grid: usize,
    /// Freeze the movement (control run; the profile must be flat)
    #[arg(long)]
    pub flat: bool,
    /// CSV output path
    #[arg(long)]
    pub out: PathBuf,
    /// Also render the profile as an SVG plot
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub body: String,
    /// Empirical centroid-body exponent; without it the ladder tracks
    /// cross-polytope hulls in Hausdorff distance
    #[arg(long)]
    pub p: Option<f64>,
    /// Sample counts per rung
    #[arg(long, value_delimiter = ',', default_values_t = vec![8, 32, 128, 512])]
    pub ladder: Vec<usize>,
    /// Trials per rung for the Hausdorff medians
    #[arg(long, default_value_t = 201)]
    pub trials: usize,
    /// Monte Carlo samples per rung for the polar-volume drift
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub body: String,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub mode: Mode,
    /// Coefficient body; defaults to `cross` (symmetric) or `simplex` (general)
    #[arg(long)]
    pub coeff: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub n_points: usize,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    pub nodes: usize,
    /// Write the step trace here as JSON lines instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::VerifyConstants(a) => cmd_verify_constants(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Dominance(a) => cmd_dominance(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Converge(a) => cmd_converge(&a),
        Command::Reduce(a) => cmd_reduce(&a),
    }
}

fn mc(samples: usize, seed: u64, nodes: usize) -> McConfig {
    McConfig {
        n_samples: samples,
        seed,
        panels: nodes,
        ci_level: DEFAULT_CI_LEVEL,
    }
}

fn emit(report: &impl Serialize, out: Option<&PathBuf>) -> Result<()> {
    let json = serde_json::to_string(report)?;
    if let Some(path) = out {
        fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct ConstantRow {
    name: &'static str,
    expected: f64,
    computed: f64,
    error: f64,
    tol: f64,
    pass: bool,
}

/// Deviation relative to the anchor, absolute for anchors below one.
fn anchor_row(name: &'static str, expected: f64, computed: f64, tol: f64) -> ConstantRow {
    let error = (computed - expected).abs() / expected.abs().max(1.0);
    ConstantRow {
        name,
        expected,
        computed,
        error,
        tol,
        pass: error <= tol,
    }
}

#[derive(Serialize)]
struct ConstantsReport {
    command: &'static str,
    nodes: usize,
    rows: Vec<ConstantRow>,
    pass: bool,
}

fn cmd_verify_constants(args: &VerifyArgs) -> Result<()> {
    let sqrt3 = 3.0_f64.sqrt();
    let square4 = realize(&BodySpec::new(BodyKind::Square, 4.0))?;
    let triangle = realize(&BodySpec::new(BodyKind::TriangleCentroidOrigin, 1.0))?;
    let hexagon = realize(&BodySpec::new(BodyKind::RegularKGon(6), 2.0))?;

    let z_square = polar_volume_quadrature(
        &centroid_body_exact(&square4, 1.0, DEFAULT_THETA_NODES),
        args.nodes,
    )?;
    let s = santalo_point(&triangle);

    let rows = vec![
        anchor_row(
            "square centroid polar volume",
            4.0 * PI / sqrt3 + 6.0,
            z_square,
            1e-6,
        ),
        anchor_row(
            "square centroid volume product",
            16.0 * PI / sqrt3 + 24.0,
            z_square * square4.area(),
            1e-6,
        ),
        anchor_row("triangle santalo polar volume", 27.0 / 4.0, s.polar_area, 1e-6),
        anchor_row("triangle santalo point at centroid", 0.0, s.point.norm(), 1e-7),
        anchor_row(
            "square mahler product",
            8.0,
            mahler_product(&square4, MahlerCenter::Origin)?,
            1e-12,
        ),
        anchor_row(
            "hexagon mahler product",
            9.0,
            mahler_product(&hexagon, MahlerCenter::Origin)?,
            1e-9,
        ),
    ];
    let pass = rows.iter().all(|r| r.pass);
    emit(
        &ConstantsReport {
            command: "verify-constants",
            nodes: args.nodes,
            rows,
            pass,
        },
        args.out.as_ref(),
    )
}

#[derive(Serialize)]
struct EstimateReport {
    functional: &'static str,
    body: String,
    #[serde(rename = "C")]
    coeff: Option<String>,
    #[serde(rename = "N")]
    n_points: usize,
    r: Option<f64>,
    p: Option<f64>,
    mean: f64,
    std_error: f64,
    ci: [f64; 2],
    n_samples: usize,
    seed: u64,
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let body = parse_body(&args.body)?;
    let cfg = mc(args.samples, args.seed, args.nodes);
    if args.samples == 0 {
        bail!("--samples must be positive");
    }

    let (est, coeff_echo, r_echo, p_echo) = match args.functional {
        Functional::W => {
            let desc = args
                .coeff
                .clone()
                .context("--coeff is required for the w functional")?;
            let coeff = parse_coeff(&desc, args.n_points)?;
            check_w_inputs(&body, &coeff, args.r)?;
            (
                estimate_w(&body, &coeff, args.r, &cfg),
                Some(desc),
                Some(args.r),
                None,
            )
        }
        Functional::Santalo => {
            check_moment(args.r)?;
            check_hull_count(args.n_points)?;
            (
                estimate_w_santalo(&body, args.n_points, args.r, &cfg),
                Some("simplex".to_string()),
                Some(args.r),
                None,
            )
        }
        Functional::Sylvester => {
            check_hull_count(args.n_points)?;
            (estimate_sylvester(&body, args.n_points, &cfg), None, None, None)
        }
        Functional::Empirical => {
            let p = args.p.context("--p is required for the empirical functional")?;
            if !(p >= 1.0) {
                bail!("--p must lie in [1, inf]");
            }
            check_moment(args.r)?;
            if !is_symmetric(&body) {
                bail!("the empirical centroid functional needs an origin-symmetric body");
            }
            (
                empirical_polar_centroid_volume(&body, p, args.n_points, args.r, &cfg),
                None,
                Some(args.r),
                Some(p),
            )
        }
    };

    emit(
        &EstimateReport {
            functional: args.functional.name(),
            body: args.body.clone(),
            coeff: coeff_echo,
            n_points: args.n_points,
            r: r_echo,
            p: p_echo,
            mean: est.mean,
            std_error: est.std_error,
            ci: [est.ci_low, est.ci_high],
            n_samples: est.n_samples,
            seed: est.master_seed,
        },
        args.out.as_ref(),
    )
}

#[derive(Serialize)]
struct DominanceReport {
    command: &'static str,
    functional: &'static str,
    body: String,
    vs: String,
    coeff: Option<String>,
    n_points: usize,
    r: f64,
    samples: usize,
    seed: u64,
    body_mean: f64,
    body_std_error: f64,
    vs_mean: f64,
    vs_std_error: f64,
    gap_mean: f64,
    gap_std_error: f64,
    gap_one_sided_lower: f64,
    level: f64,
    dominates: bool,
}

fn cmd_dominance(args: &DominanceArgs) -> Result<()> {
    let body = parse_body(&args.body)?;
    let vs = normalize_area(&parse_body(&args.vs)?, body.area());
    let cfg = mc(args.samples, args.seed, args.nodes);
    if args.samples == 0 {
        bail!("--samples must be positive");
    }

    let (est_body, est_vs, gap, coeff_echo) = match args.functional {
        Functional::W => {
            let desc = args
                .coeff
                .clone()
                .context("--coeff is required for the w functional")?;
            let coeff = parse_coeff(&desc, args.n_points)?;
            check_w_inputs(&body, &coeff, args.r)?;
            check_w_inputs(&vs, &coeff, args.r)?;
            (
                estimate_w(&body, &coeff, args.r, &cfg),
                estimate_w(&vs, &coeff, args.r, &cfg),
                estimate_w_gap(&vs, &body, &coeff, args.r, &cfg),
                Some(desc),
            )
        }
        Functional::Santalo => {
            check_moment(args.r)?;
            check_hull_count(args.n_points)?;
            (
                estimate_w_santalo(&body, args.n_points, args.r, &cfg),
                estimate_w_santalo(&vs, args.n_points, args.r, &cfg),
                estimate_w_santalo_gap(&vs, &body, args.n_points, args.r, &cfg),
                Some("simplex".to_string()),
            )
        }
        _ => bail!("dominance compares the w or santalo functionals"),
    };

    let lower = gap.one_sided_lower(DEFAULT_CI_LEVEL);
    emit(
        &DominanceReport {
            command: "dominance",
            functional: args.functional.name(),
            body: args.body.clone(),
            vs: args.vs.clone(),
            coeff: coeff_echo,
            n_points: args.n_points,
            r: args.r,
            samples: args.samples,
            seed: args.seed,
            body_mean: est_body.mean,
            body_std_error: est_body.std_error,
            vs_mean: est_vs.mean,
            vs_std_error: est_vs.std_error,
            gap_mean: gap.mean,
            gap_std_error: gap.std_error,
            gap_one_sided_lower: lower,
            level: DEFAULT_CI_LEVEL,
            dominates: lower > 0.0,
        },
        args.out.as_ref(),
    )
}

#[derive(Serialize)]
struct SweepReport {
    command: &'static str,
    body: String,
    vertex: usize,
    mode: &'static str,
    flat: bool,
    coeff: String,
    n_points: usize,
    r: f64,
    samples: usize,
    seed: u64,
    nodes: usize,
    t_min: f64,
    t_max: f64,
    grid_points: usize,
    violations: usize,
    slack: f64,
    out: String,
    svg: Option<String>,
}

/// CSV rows for a sweep; floats print in shortest round-trip form so the
/// file replays byte for byte.
pub fn sweep_csv(grid: &[f64], estimates: &[EstimatorResult]) -> String {
    let mut out = String::from("t,mean,std_error,ci_low,ci_high\n");
    for (t, e) in grid.iter().zip(estimates) {
        writeln!(
            out,
            "{t},{},{},{},{}",
            e.mean, e.std_error, e.ci_low, e.ci_high
        )
        .unwrap();
    }
    out
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let body = parse_body(&args.body)?;
    let symmetric = args.mode == Mode::Symmetric;
    let movement = if args.flat {
        make_flat_movement(&body, args.vertex, symmetric)?
    } else {
        make_movement(&body, args.vertex, symmetric)?
    };
    let coeff_desc = default_coeff(&args.coeff, args.mode);
    let coeff = parse_coeff(&coeff_desc, args.n_points)?;
    check_movement_coeff(args.mode, &coeff, args.r)?;
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    if args.t_grid < 3 {
        bail!("--t-grid needs at least three points for the midpoint test");
    }

    let cfg = mc(args.samples, args.seed, args.nodes);
    let grid = uniform_grid(movement.t_min(), movement.t_max(), args.t_grid);
    let estimates = sweep_w(&movement, &coeff, args.r, &cfg, &grid)?;

    // midpoint test runs per sample on the same coupled draws the sweep used
    let slack = if symmetric { 1e-9 } else { 1e-7 };
    let tri = Triangulation::new(movement.base());
    let mut violations = 0;
    for i in 0..args.samples as u64 {
        let sample = couple_sample(&movement, &tri, cfg.seed, i, args.n_points);
        let profile =
            sample_convexity_profile(&movement, &coeff, args.r, &sample, &grid, cfg.panels)?;
        violations += midpoint_violations(&profile, slack);
    }

    fs::write(&args.out, sweep_csv(&grid, &estimates))
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(path) = &args.svg {
        let mean: Vec<f64> = estimates.iter().map(|e| e.mean).collect();
        let lo: Vec<f64> = estimates.iter().map(|e| e.ci_low).collect();
        let hi: Vec<f64> = estimates.iter().map(|e| e.ci_high).collect();
        fs::write(path, svg::sweep_plot(&grid, &mean, &lo, &hi))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    emit(
        &SweepReport {
            command: "sweep",
            body: args.body.clone(),
            vertex: args.vertex,
            mode: args.mode.name(),
            flat: args.flat,
            coeff: coeff_desc,
            n_points: args.n_points,
            r: args.r,
            samples: args.samples,
            seed: args.seed,
            nodes: args.nodes,
            t_min: movement.t_min(),
            t_max: movement.t_max(),
            grid_points: args.t_grid,
            violations,
            slack,
            out: args.out.display().to_string(),
            svg: args.svg.as_ref().map(|p| p.display().to_string()),
        },
        None,
    )
}

#[derive(Serialize)]
struct ConvergeRung {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_hausdorff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_polar_hausdorff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimate_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift: Option<f64>,
}

#[derive(Serialize)]
struct ConvergeReport {
    command: &'static str,
    body: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    ladder: Vec<usize>,
    trials: usize,
    samples: usize,
    seed: u64,
    rungs: Vec<ConvergeRung>,
    #[serde(skip_serializing_if = "Option::is_none")]
    primal_decreasing: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polar_decreasing: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_inverse_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift_tolerance: Option<f64>,
    pass: bool,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn cmd_converge(args: &ConvergeArgs) -> Result<()> {
    let body = parse_body(&args.body)?;
    if !is_symmetric(&body) {
        bail!("convergence ladders need an origin-symmetric body");
    }
    if args.ladder.len() < 2 {
        bail!("--ladder needs at least two rungs");
    }
    if args.trials == 0 || args.samples == 0 {
        bail!("--trials and --samples must be positive");
    }

    let mut rungs = Vec::new();
    let report = if let Some(p) = args.p {
        if !(p >= 1.0) {
            bail!("--p must lie in [1, inf]");
        }
        let exact = polar_centroid_volume(&body, p)?;
        let target = 1.0 / exact;
        let mut final_drift = 0.0;
        for &n in &args.ladder {
            let cfg = mc(args.samples, derive_seed(args.seed, n as u64), args.nodes);
            let est = empirical_polar_centroid_volume(&body, p, n, 1.0, &cfg);
            let drift = (est.mean - target).abs() / target;
            final_drift = drift;
            rungs.push(ConvergeRung {
                n,
                median_hausdorff: None,
                median_polar_hausdorff: None,
                estimate_mean: Some(est.mean),
                drift: Some(drift),
            });
        }
        let tol = 0.02;
        ConvergeReport {
            command: "converge",
            body: args.body.clone(),
            p: Some(p),
            ladder: args.ladder.clone(),
            trials: args.trials,
            samples: args.samples,
            seed: args.seed,
            rungs,
            primal_decreasing: None,
            polar_decreasing: None,
            target_inverse_volume: Some(target),
            final_drift: Some(final_drift),
            drift_tolerance: Some(tol),
            pass: final_drift <= tol,
        }
    } else {
        let body_polar = body.polar()?;
        let mut primal_medians = Vec::new();
        let mut polar_medians = Vec::new();
        for &n in &args.ladder {
            let coeff = CoefficientBody::cross_polytope(n)?;
            let rung_seed = derive_seed(args.seed, n as u64);
            let mut primal = Vec::with_capacity(args.trials);
            let mut polar = Vec::with_capacity(args.trials);
            for trial in 0..args.trials as u64 {
                let points = sample_matrix(&body, n, &SeededStream::new(rung_seed, trial));
                match random_polytope(&points, &coeff) {
                    RandomPolytope::Polygon(hull) => {
                        primal.push(hausdorff(&hull, &body));
                        match hull.polar() {
                            Ok(hp) => polar.push(hausdorff(&hp, &body_polar)),
                            Err(_) => polar.push(f64::INFINITY),
                        }
                    }
                    _ => {
                        primal.push(f64::INFINITY);
                        polar.push(f64::INFINITY);
                    }
                }
            }
            let (mp, mq) = (median(primal), median(polar));
            primal_medians.push(mp);
            polar_medians.push(mq);
            rungs.push(ConvergeRung {
                n,
                median_hausdorff: Some(mp),
                median_polar_hausdorff: Some(mq),
                estimate_mean: None,
                drift: None,
            });
        }
        let primal_ok = strictly_decreasing(&primal_medians);
        let polar_ok = strictly_decreasing(&polar_medians);
        ConvergeReport {
            command: "converge",
            body: args.body.clone(),
            p: None,
            ladder: args.ladder.clone(),
            trials: args.trials,
            samples: args.samples,
            seed: args.seed,
            rungs,
            primal_decreasing: Some(primal_ok),
            polar_decreasing: Some(polar_ok),
            target_inverse_volume: None,
            final_drift: None,
            drift_tolerance: None,
            pass: primal_ok && polar_ok,
        }
    };
    emit(&report, args.out.as_ref())
}

#[derive(Serialize)]
struct ReduceReport {
    command: &'static str,
    body: String,
    mode: &'static str,
    coeff: String,
    n_points: usize,
    r: f64,
    samples: usize,
    seed: u64,
    steps: usize,
    classification: &'static str,
    monotone: bool,
    final_vertices: Vec<Point2>,
}

/// Shape of a reduction endpoint. Opposite-edge parallelism is checked by
/// the sine of the edge angle, so the threshold is scale free.
pub fn classify_final(p: &ConvexPolygon) -> &'static str {
    match p.len() {
        3 => "triangle",
        4 => {
            let v = p.vertices();
            let sin = |a: Point2, b: Point2| a.cross(b).abs() / (a.norm() * b.norm());
            let e: Vec<Point2> = (0..4).map(|i| v[(i + 1) % 4] - v[i]).collect();
            if sin(e[0], e[2]) <= 1e-9 && sin(e[1], e[3]) <= 1e-9 {
                "parallelogram"
            } else {
                "quadrilateral"
            }
        }
        _ => "other",
    }
}

/// Whether each step's chosen endpoint estimate is at least the previous
/// one's, within three pooled standard errors.
pub fn trace_is_monotone(trace: &[ReduceStep]) -> bool {
    let chosen = |s: &ReduceStep| {
        if s.plus.mean >= s.minus.mean {
            (s.plus.mean, s.plus.std_error)
        } else {
            (s.minus.mean, s.minus.std_error)
        }
    };
    trace.windows(2).all(|w| {
        let (m0, s0) = chosen(&w[0]);
        let (m1, s1) = chosen(&w[1]);
        m1 >= m0 - 3.0 * (s0 * s0 + s1 * s1).sqrt()
    })
}

fn default_coeff(coeff: &Option<String>, mode: Mode) -> String {
    coeff.clone().unwrap_or_else(|| {
        match mode {
            Mode::Symmetric => "cross",
            Mode::General => "simplex",
        }
        .to_string()
    })
}

fn cmd_reduce(args: &ReduceArgs) -> Result<()> {
    let body = parse_body(&args.body)?;
    let coeff_desc = default_coeff(&args.coeff, args.mode);
    let coeff = parse_coeff(&coeff_desc, args.n_points)?;
    check_movement_coeff(args.mode, &coeff, args.r)?;
    if args.samples == 0 {
        bail!("--samples must be positive");
    }

    let cfg = mc(args.samples, args.seed, args.nodes);
    let (final_body, trace) =
        reduce_to_extremizer(&body, args.mode.movement(), &coeff, args.r, &cfg)?;

    let mut lines = String::new();
    for step in &trace {
        writeln!(lines, "{}", serde_json::to_string(step)?).unwrap();
    }
    if let Some(path) = &args.out {
        fs::write(path, &lines).with_context(|| format!("writing {}", path.display()))?;
    } else {
        print!("{lines}");
    }

    emit(
        &ReduceReport {
            command: "reduce",
            body: args.body.clone(),
            mode: args.mode.name(),
            coeff: coeff_desc,
            n_points: args.n_points,
            r: args.r,
            samples: args.samples,
            seed: args.seed,
            steps: trace.len(),
            classification: classify_final(&final_body),
            monotone: trace_is_monotone(&trace),
            final_vertices: final_body.vertices().to_vec(),
        },
        None,
    )
}

fn check_moment(r: f64) -> Result<()> {
    if !(r >= 1.0) {
        bail!("--r must be at least one");
    }
    Ok(())
}

fn check_hull_count(n: usize) -> Result<()> {
    if n < 3 {
        bail!("--n-points must be at least three for hull functionals");
    }
    Ok(())
}

fn check_w_inputs(body: &ConvexPolygon, coeff: &CoefficientBody, r: f64) -> Result<()> {
    check_moment(r)?;
    if !coeff.is_origin_symmetric() {
        bail!("the w functional needs an origin-symmetric coefficient body");
    }
    if !is_symmetric(body) {
        bail!("the w functional needs an origin-symmetric body");
    }
    Ok(())
}

fn check_movement_coeff(mode: Mode, coeff: &CoefficientBody, r: f64) -> Result<()> {
    check_moment(r)?;
    match mode {
        Mode::Symmetric if !coeff.is_origin_symmetric() => {
            bail!("symmetric movements need an origin-symmetric coefficient body")
        }
        Mode::General if coeff.is_origin_symmetric() => {
            bail!("general movements take Santalo polars; use --coeff simplex")
        }
        _ => Ok(()),
    }
}
