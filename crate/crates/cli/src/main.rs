//! Batch front end: length sweeps, saddle-profile export, critical-exponent
//! fits and Langevin first-passage ensembles, written as CSV or JSON.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use twofield::forman::{self, Side};
use twofield::langevin::{LatticeConfig, Simulator};
use twofield::model::{critical_length, FieldPair, Instanton, ModelParams};
use twofield::sweep;

use output::{resolve_output_path, write_atomic, Format};

/// Version string embedded in run manifests.
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-g", env!("GIT_COMMIT"));

#[derive(Parser)]
#[command(
    name = "twofield",
    version = VERSION,
    about = "Escape rates for two coupled Ginzburg-Landau fields on a finite interval",
    after_help = "Output directory override: if TWOFIELD_OUTPUT_DIR is set, relative \
                  --output paths are resolved against it.\n\
                  Exit codes: 0 success, 1 computation error, 2 usage error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Curvature of field 1 (must exceed --mu2)
    #[arg(long, default_value_t = 3.0)]
    mu1: f64,
    /// Curvature of field 2
    #[arg(long, default_value_t = 2.0)]
    mu2: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file path (written atomically: temp file + rename)
    #[arg(short, long)]
    output: PathBuf,
    /// Output format; defaults to csv (fit defaults to json)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps and ensembles (default: all cores).
    /// Only meaningful in builds with the `parallel` feature.
    #[arg(short, long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RangeArgs {
    /// Smallest interval length in the sweep
    #[arg(long)]
    l_min: f64,
    /// Largest interval length in the sweep
    #[arg(long)]
    l_max: f64,
    /// Number of grid points
    #[arg(short, long)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the nonuniform saddle profile on a grid (CSV: z, phi1, phi2)
    Instanton {
        #[command(flatten)]
        model: ModelArgs,
        /// Interval length; must exceed the critical length
        #[arg(long)]
        l: f64,
        /// Number of grid points
        #[arg(short, long, default_value_t = 1024)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Activation barrier over a length range (CSV: L, delta_e, regime)
    Barrier {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rate prefactor over a length range (CSV: L, gamma0, regime)
    Prefactor {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full rate table (CSV: L, delta_e, gamma0, lambda_neg, regime)
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Langevin first-passage ensemble (CSV: run_index,
    /// first_passage_time, censored; plus a JSON run manifest)
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Interval length
        #[arg(long)]
        l: f64,
        /// Lattice sites
        #[arg(long, default_value_t = 32)]
        n_sites: usize,
        /// Noise strength ε
        #[arg(long)]
        epsilon: f64,
        /// Base RNG seed; run i uses substream i
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        /// Number of independent first-passage runs
        #[arg(long, default_value_t = 100)]
        n_runs: usize,
        /// Censoring horizon in simulation time
        #[arg(long, default_value_t = 1e6)]
        max_time: f64,
        /// Time step; defaults to 0.4·dz²
        #[arg(long)]
        dt: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Critical-exponent fit of log Γ0 vs log|L−L_c| (JSON by default)
    Fit {
        #[command(flatten)]
        model: ModelArgs,
        /// Side of the critical length
        #[arg(long, value_enum)]
        side: CliSide,
        /// Smallest |L − L_c| in the fit window
        #[arg(long)]
        window_min: Option<f64>,
        /// Largest |L − L_c| in the fit window
        #[arg(long)]
        window_max: Option<f64>,
        /// Number of sample points
        #[arg(long, default_value_t = 12)]
        n_points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliSide {
    Below,
    Above,
}

impl From<CliSide> for Side {
    fn from(s: CliSide) -> Side {
        match s {
            CliSide::Below => Side::Below,
            CliSide::Above => Side::Above,
        }
    }
}

enum AppError {
    Usage(String),
    Module(twofield::Error),
    Io(std::io::Error),
}

impl From<twofield::Error> for AppError {
    fn from(e: twofield::Error) -> Self {
        AppError::Module(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Module(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(AppError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Run `f` on a bounded rayon pool when --jobs is given; otherwise on the
/// default pool (or inline in sequential builds).
#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AppError> {
    match jobs {
        Some(0) => Err(AppError::Usage("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| AppError::Usage(format!("cannot build a {j}-thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, AppError> {
    if jobs.is_some() {
        eprintln!("note: sequential build; --jobs is ignored");
    }
    Ok(f())
}

#[derive(Serialize)]
struct ProfileRow {
    z: f64,
    phi1: f64,
    phi2: f64,
}

#[derive(Serialize)]
struct SimRow {
    run_index: usize,
    first_passage_time: f64,
    censored: bool,
}

#[derive(Serialize)]
struct SimManifest<'a> {
    version: &'a str,
    params: ModelParams,
    lattice: LatticeConfig,
    n_runs: usize,
    n_escaped: usize,
    n_censored: usize,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct FitReport {
    side: Side,
    slope: f64,
    intercept: f64,
    window_min: f64,
    window_max: f64,
    n_points: usize,
    critical_length: f64,
}

fn model_params(m: &ModelArgs) -> Result<ModelParams, AppError> {
    ModelParams::new(m.mu1, m.mu2)
        .map_err(|e| AppError::Usage(format!("invalid model parameters: {e}")))
}

fn check_range(r: &RangeArgs) -> Result<Vec<f64>, AppError> {
    if !(r.l_min > 0.0 && r.l_max > r.l_min) {
        return Err(AppError::Usage(format!(
            "need 0 < --l-min < --l-max, got {} and {}",
            r.l_min, r.l_max
        )));
    }
    if r.n < 2 {
        return Err(AppError::Usage("need --n >= 2 grid points".into()));
    }
    Ok(sweep::linspace(r.l_min, r.l_max, r.n))
}

fn run(cmd: Command) -> Result<String, AppError> {
    match cmd {
        Command::Instanton { model, l, n, out } => {
            let p = model_params(&model)?;
            if n < 2 {
                return Err(AppError::Usage("need --n >= 2 grid points".into()));
            }
            let inst = Instanton::from_length(l, &p)?;
            let fp = FieldPair::sample(&inst, l, n);
            let rows: Vec<ProfileRow> = (0..fp.len())
                .map(|i| ProfileRow {
                    z: fp.z()[i],
                    phi1: fp.phi1()[i],
                    phi2: fp.phi2()[i],
                })
                .collect();
            let path = resolve_output_path(&out.output);
            let format = out.format.unwrap_or(Format::Csv);
            write_atomic(&path, format, &rows)?;
            Ok(format!(
                "instanton: L = {l}, m = {:.12}, {n} rows -> {}",
                inst.m().get(),
                path.display()
            ))
        }
        Command::Barrier { model, range, out } => {
            let p = model_params(&model)?;
            let ls = check_range(&range)?;
            let rows = with_jobs(out.jobs, || sweep::barrier_curve(&p, &ls))??;
            let path = resolve_output_path(&out.output);
            write_atomic(&path, out.format.unwrap_or(Format::Csv), &rows)?;
            Ok(format!(
                "barrier: {} rows over L in [{}, {}] -> {}",
                rows.len(),
                range.l_min,
                range.l_max,
                path.display()
            ))
        }
        Command::Prefactor { model, range, out } => {
            let p = model_params(&model)?;
            let ls = check_range(&range)?;
            let rows = with_jobs(out.jobs, || sweep::prefactor_curve(&p, &ls))??;
            let path = resolve_output_path(&out.output);
            write_atomic(&path, out.format.unwrap_or(Format::Csv), &rows)?;
            Ok(format!(
                "prefactor: {} rows over L in [{}, {}] -> {}",
                rows.len(),
                range.l_min,
                range.l_max,
                path.display()
            ))
        }
        Command::Sweep { model, range, out } => {
            let p = model_params(&model)?;
            let ls = check_range(&range)?;
            let rows = with_jobs(out.jobs, || sweep::rate_table(&p, &ls))??;
            let path = resolve_output_path(&out.output);
            write_atomic(&path, out.format.unwrap_or(Format::Csv), &rows)?;
            Ok(format!(
                "sweep: {} rows over L in [{}, {}] -> {}",
                rows.len(),
                range.l_min,
                range.l_max,
                path.display()
            ))
        }
        Command::Simulate {
            model,
            l,
            n_sites,
            epsilon,
            seed,
            n_runs,
            max_time,
            dt,
            out,
        } => {
            let p = model_params(&model)?;
            if n_runs == 0 {
                return Err(AppError::Usage("need --n-runs >= 1".into()));
            }
            let cfg = match dt {
                Some(dt) => LatticeConfig::new(n_sites, l, dt, epsilon, seed, max_time)?,
                None => LatticeConfig::with_default_dt(n_sites, l, epsilon, seed, max_time)?,
            };
            let sim = Simulator::new(cfg, p);
            let started = Instant::now();
            let runs = with_jobs(out.jobs, || sim.run_ensemble(n_runs))??;
            let wall = started.elapsed().as_secs_f64();
            let rows: Vec<SimRow> = runs
                .iter()
                .enumerate()
                .map(|(i, r)| SimRow {
                    run_index: i,
                    first_passage_time: r.time,
                    censored: r.censored,
                })
                .collect();
            let n_censored = runs.iter().filter(|r| r.censored).count();
            let path = resolve_output_path(&out.output);
            write_atomic(&path, out.format.unwrap_or(Format::Csv), &rows)?;
            let manifest = SimManifest {
                version: VERSION,
                params: p,
                lattice: cfg,
                n_runs,
                n_escaped: n_runs - n_censored,
                n_censored,
                wall_time_s: wall,
            };
            let manifest_path = output::manifest_path(&path);
            output::write_atomic_json(&manifest_path, &manifest)?;
            Ok(format!(
                "simulate: {n_runs} runs ({n_censored} censored) in {wall:.1}s -> {} (manifest {})",
                path.display(),
                manifest_path.display()
            ))
        }
        Command::Fit {
            model,
            side,
            window_min,
            window_max,
            n_points,
            out,
        } => {
            let p = model_params(&model)?;
            let side: Side = side.into();
            let (w0, w1) = match side {
                Side::Below => (window_min.unwrap_or(1e-4), window_max.unwrap_or(1e-2)),
                Side::Above => (window_min.unwrap_or(1e-3), window_max.unwrap_or(1e-1)),
            };
            let fit = with_jobs(out.jobs, || {
                forman::fit_critical_exponent(&p, side, (w0, w1), n_points)
            })??;
            let report = FitReport {
                side,
                slope: fit.slope,
                intercept: fit.intercept,
                window_min: w0,
                window_max: w1,
                n_points,
                critical_length: critical_length(&p),
            };
            let path = resolve_output_path(&out.output);
            let format = out.format.unwrap_or(Format::Json);
            match format {
                Format::Json => output::write_atomic_json(&path, &report)?,
                Format::Csv => write_atomic(&path, Format::Csv, &[report])?,
            }
            Ok(format!(
                "fit: slope = {:.4}, intercept = {:.4} ({} points) -> {}",
                fit.slope,
                fit.intercept,
                n_points,
                path.display()
            ))
        }
    }
}
