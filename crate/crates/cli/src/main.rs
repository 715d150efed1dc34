//! `henon`: command-line front end for the manifold, homoclinic, continuation
//! and figure-data pipelines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use henon_core::continuation::MapKind;

use config::{ConfigError, Overrides, RunConfig, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "henon", version, about = "Invariant manifolds, homoclinic points and tangencies of the cubic Henon map and its coupled 4-D extension")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Run configuration flags. They override the `--config` file, which
/// overrides the built-in defaults.
#[derive(Debug, Args)]
struct Common {
    /// Map: 2d or 4d [default: 2d]
    #[arg(long, global = true)]
    map: Option<String>,
    /// Linear coefficient c [default: -2.5]
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
    /// Jacobian determinant delta [default: 1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Coupling b of the 4d map [default: 0.1]
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Series order N [default: 100 for 2d, 50 for 4d]
    #[arg(long, global = true)]
    order: Option<String>,
    /// Defining-equation error bound for validity radii [default: 1e-15]
    #[arg(long, global = true)]
    epsilon: Option<String>,
    /// Newton residual tolerance [default: 1e-13]
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Newton iteration cap [default: 50]
    #[arg(long, global = true)]
    max_iters: Option<String>,
    /// Random seed for sampled starting points and property checks [default: 0]
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Worker threads for parallel sections [default: all cores]
    #[arg(long, global = true)]
    threads: Option<String>,
    /// File of `key = value` lines with any of the flags above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $HENON_OUT_DIR, else ./henon-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, ConfigError> {
        let mut o = Overrides::default();
        let flags = [
            ("map", &self.map),
            ("c", &self.c),
            ("delta", &self.delta),
            ("b", &self.b),
            ("order", &self.order),
            ("epsilon", &self.epsilon),
            ("tol", &self.tol),
            ("max_iters", &self.max_iters),
            ("seed", &self.seed),
            ("threads", &self.threads),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                o.set(key, v)?;
            }
        }
        o.out.clone_from(&self.out);
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Unstable,
    Stable,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    Delta,
    B,
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("not a number: {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("not a number: {hi:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err("need finite lo <= hi".into());
    }
    Ok((lo, hi))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Series coefficients and validity profile
    Manifold(ManifoldArgs),
    /// Homoclinic point and distance profile
    Homoclinic(HomoclinicArgs),
    /// Parameter continuation of the homoclinic point and tangency fit
    Continue(ContinueArgs),
    /// Orbits with escape detection
    Orbit(OrbitArgs),
    /// Horseshoe strip point sets
    Horseshoe(HorseshoeArgs),
    /// Three-dimensional phase-space slice of the 4d map
    Slice(SliceArgs),
    /// Manifold sampled on a uniform parameter grid
    Mesh(MeshArgs),
    /// Run every reference check and print a pass/fail table
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ManifoldArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub branch: BranchArg,
    /// Largest |t| (2d) or polar radius (4d) sampled for the profile
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Profile samples per ray [default: 1000 for 2d, 201 for 4d]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Polar rays of the 4d profile
    #[arg(long, default_value_t = henon_core::manifold4d::DEFAULT_THETA_COUNT)]
    pub thetas: usize,
}

#[derive(Debug, Args)]
pub struct HomoclinicArgs {
    /// Forward iterations of the unstable side
    #[arg(long, default_value_t = 0)]
    pub n_u: usize,
    /// Backward iterations of the stable side
    #[arg(long, default_value_t = 0)]
    pub n_s: usize,
    /// Newton start (comma-separated root parameters) instead of the default search
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub guess: Option<std::vec::Vec<f64>>,
    #[arg(long, default_value_t = -20, allow_hyphen_values = true)]
    pub n_min: i64,
    #[arg(long, default_value_t = 20, allow_hyphen_values = true)]
    pub n_max: i64,
    #[arg(long, default_value_t = henon_core::homoclinic::DEFAULT_ESCAPE_RADIUS)]
    pub escape: f64,
}

#[derive(Debug, Args)]
pub struct ContinueArgs {
    #[arg(long, value_enum, default_value = "delta")]
    pub param: ParamArg,
    /// Start value [default: the configured value of the parameter]
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    /// Initial step [default: 1e-3 for delta, 5e-3 for b]
    #[arg(long)]
    pub step: Option<f64>,
    /// Smallest step before the run stops [default: 1e-6]
    #[arg(long)]
    pub min_step: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub n_u: usize,
    #[arg(long, default_value_t = 1)]
    pub n_s: usize,
    /// Width of the delta window, ending at the last success, used for the fit
    #[arg(long, default_value_t = henon_core::continuation::DEFAULT_FIT_WINDOW)]
    pub fit_window: f64,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Starting point, comma-separated; repeatable
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub start: Vec<Vec<f64>>,
    /// Additional random starts drawn uniformly around --center
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    /// Centre of random starts [default: the period-2 point]
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<std::vec::Vec<f64>>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = henon_core::dynamics::DEFAULT_ESCAPE_RADIUS)]
    pub escape: f64,
}

#[derive(Debug, Args)]
pub struct HorseshoeArgs {
    #[arg(long, default_value_t = henon_core::dynamics::DEFAULT_HORSESHOE_A)]
    pub a: f64,
    #[arg(long, default_value_t = henon_core::dynamics::DEFAULT_HORSESHOE_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Seed point (x1,y1,x2,y2); repeatable
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub start: Vec<Vec<f64>>,
    /// Random seeds around the period-2 point, used when no --start is given
    #[arg(long, default_value_t = 20)]
    pub random: usize,
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    #[arg(long, default_value_t = 10000)]
    pub steps: usize,
    #[arg(long, default_value_t = henon_core::dynamics::DEFAULT_SLICE_TOLERANCE)]
    pub tolerance: f64,
    /// Slice level [default: -1/sqrt(6)]
    #[arg(long, allow_hyphen_values = true)]
    pub y2_star: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, value_enum, default_value = "unstable")]
    pub branch: BranchArg,
    /// Parameter range lo:hi; once for 2d, twice (u then v) for 4d
    /// [default: -1.5:1.5 for 2d, -1:1 twice for 4d]
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Vec<(f64, f64)>,
    /// Nodes per parameter axis
    #[arg(long, default_value_t = henon_core::dynamics::DEFAULT_MESH_RESOLUTION)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Exit with status 1 when any check fails
    #[arg(long)]
    pub strict: bool,
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let base = match &cli.common.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let mut o = cli.common.overrides()?.over(base);
    if matches!(cli.command, Command::Slice(_)) {
        match o.map {
            Some(MapKind::Planar) => return Err(ConfigError("slice needs the 4d map".into())),
            _ => o.map = Some(MapKind::Coupled),
        }
    }
    RunConfig::resolve(o, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = resolve(&cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Manifold(a) => commands::manifold(&cfg, a),
        Command::Homoclinic(a) => commands::homoclinic(&cfg, a),
        Command::Continue(a) => commands::continuation(&cfg, a),
        Command::Orbit(a) => commands::orbit(&cfg, a),
        Command::Horseshoe(a) => commands::horseshoe(&cfg, a),
        Command::Slice(a) => commands::slice(&cfg, a),
        Command::Mesh(a) => commands::mesh(&cfg, a),
        Command::ReproducePaper(a) => commands::reproduce(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("henon: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
