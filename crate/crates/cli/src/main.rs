//! `dbr`: construct, verify, and sample de Branges-Rovnyak space models
//! defined by local Dirichlet norm specs.
//!
//! Exit codes: 0 all checks pass, 1 a named check failed, 2 input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use dbr_core::report::Report;
use dbr_core::spectral::mate_from_spec;
use dbr_core::verify::{run_verification, VerifyOptions};
use dbr_core::{KernelModel, SpaceSpec};

#[derive(Parser)]
#[command(name = "dbr", version, about = "de Branges-Rovnyak spaces from local Dirichlet norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Spec file: {"points": [{"theta": .., "m": .., "weights": [[[re, im], ..], ..]}, ..]}
    spec: PathBuf,
    /// Output path (stdout when absent)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Residual tolerance for the named checks
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Circle samples for quadrature and factorization checks
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// Probe degree cap for the beta-form sweeps (auto when absent)
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Seed for the randomized probes
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline (mate, dual basis, Grammian, kernel, Schur
    /// recovery, operator models) and write the report
    Construct(CommonFlags),
    /// Run the full invariant suite with seeded random probes
    Verify(CommonFlags),
    /// Write kernel samples K_w(z) on a polar grid as CSV
    Sample {
        spec: PathBuf,
        /// Grid points per axis; the file gets grid*grid rows
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compute only the mate data (p_A, q, a)
    Mate {
        spec: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Unreadable or invalid input: exit 2.
    Input(String),
    /// A named verification check failed: exit 1.
    Checks(Vec<String>),
    /// The pipeline itself broke down: exit 1.
    Internal(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DBR_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(names)) => {
            eprintln!("check failure: {}", names.join(", "));
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Construct(flags) | Command::Verify(flags) => {
            let spec = load_spec(&flags.spec)?;
            let opts = VerifyOptions {
                seed: flags.seed,
                samples: flags.samples.max(16),
                tol: flags.tol,
                degree_cap: flags.degree_cap,
            };
            log::info!("running verification battery (seed {})", opts.seed);
            let outcome = run_verification(&spec, &opts)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            let report = Report::from_outcome(&outcome);
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            write_output(flags.out.as_deref(), &(json + "\n"))?;
            for warning in &report.warnings {
                log::warn!("{warning}");
            }
            if !report.overall_pass {
                let failing: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.clone())
                    .collect();
                return Err(Failure::Checks(failing));
            }
            Ok(())
        }
        Command::Sample { spec, grid, out } => {
            if grid == 0 {
                return Err(Failure::Input("grid must be positive".into()));
            }
            let spec = load_spec(&spec)?;
            let (spec, _notes) = spec.reduced();
            let model =
                KernelModel::build(spec).map_err(|e| Failure::Internal(e.to_string()))?;
            let mut csv = String::from("re(z),im(z),re(w),im(w),re(K),im(K)\n");
            let points: Vec<Complex64> = (0..grid)
                .map(|t| {
                    Complex64::from_polar(
                        0.95 * t as f64 / grid as f64,
                        2.0 * std::f64::consts::PI * t as f64 / grid as f64,
                    )
                })
                .collect();
            for &z in &points {
                for &w in &points {
                    let k = model
                        .kernel_at(w, z)
                        .map_err(|e| Failure::Internal(e.to_string()))?;
                    csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        z.re, z.im, w.re, w.im, k.re, k.im
                    ));
                }
            }
            write_output(out.as_deref(), &csv)
        }
        Command::Mate { spec, out } => {
            let spec = load_spec(&spec)?;
            let (spec, notes) = spec.reduced();
            let mut mate =
                mate_from_spec(&spec).map_err(|e| Failure::Internal(e.to_string()))?;
            mate.warnings.extend(notes);
            let json = serde_json::to_string_pretty(&mate)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            write_output(out.as_deref(), &(json + "\n"))
        }
    }
}

fn load_spec(path: &std::path::Path) -> Result<SpaceSpec, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&std::path::Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
