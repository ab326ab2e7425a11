//! `qhb`: conformal barycenters in the quaternionic hyperbolic ball.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when the solver did not
//! converge (the result is still printed).

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qhb_core::verify::{self, Fault, VerifyConfig};
use qhb_core::{ball_volume, distance, energy, region_barycenter, solve, Region, RegionFile, SolverConfig};

use crate::io::{format_g17, parse_point, PointSetFile, ResultFile};

#[derive(Parser)]
#[command(
    name = "qhb",
    version,
    about = "Conformal barycenters in the quaternionic hyperbolic ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Barycenter of a weighted point set.
    Barycenter {
        /// Point-set JSON file.
        input: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Barycenter of a region, discretized by Monte-Carlo sampling.
    RegionBarycenter {
        /// Region JSON file.
        region: PathBuf,
        /// Number of uniform proposals.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Hyperbolic volume of a geodesic ball of radius RHO in the n-ball.
    Volume {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Hyperbolic distance between two points.
    Distance {
        /// A number, a flat list of reals, or a list of [w,x,y,z] arrays.
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Barycentric energy of a point set at a given point.
    Energy {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Run the randomized identity checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Print the machine-readable report on stdout (the text report goes to stderr).
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FlipRankOneTerm,
}

#[derive(Args)]
struct SolverFlags {
    /// Chart step in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Stop when |R(c)| <= tol * total weight.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    no_line_search: bool,
}

impl SolverFlags {
    fn config(&self) -> anyhow::Result<SolverConfig> {
        let config = SolverConfig {
            step: self.step,
            max_iters: self.max_iters,
            tol: self.tol,
            line_search: !self.no_line_search,
        };
        config.validate()?;
        Ok(config)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))
}

fn emit(result: &ResultFile) -> anyhow::Result<ExitCode> {
    println!("{}", serde_json::to_string_pretty(result)?);
    if result.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "NotConverged: residual norm {} after {} iterations",
            format_g17(result.residual_norm),
            result.iterations
        );
        Ok(ExitCode::from(2))
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("QHB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .with_context(|| format!("QHB_THREADS must be a non-negative integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Barycenter { input, solver } => {
            let config = solver.config()?;
            let data = read_json::<PointSetFile>(&input)?.into_points()?;
            let result = solve(&data, &config)?;
            emit(&ResultFile::from_solver(result, &config))
        }
        Command::RegionBarycenter {
            region,
            samples,
            seed,
            solver,
        } => {
            let config = solver.config()?;
            let region = Region::try_from(read_json::<RegionFile>(&region)?)?;
            let result = region_barycenter(&region, samples, seed, &config)?;
            emit(&ResultFile::from_region(result, &config))
        }
        Command::Volume { rho, dim } => {
            println!("{}", format_g17(ball_volume(rho, dim)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance { p, q } => {
            println!("{}", format_g17(distance(&parse_point(&p)?, &parse_point(&q)?)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Energy { input, at } => {
            let data = read_json::<PointSetFile>(&input)?.into_points()?;
            println!("{}", format_g17(energy(&data, &parse_point(&at)?)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            seed,
            trials,
            json,
            inject_fault,
        } => {
            let report = verify::run(&VerifyConfig {
                seed,
                trials,
                fault: inject_fault.map(|FaultArg::FlipRankOneTerm| Fault::FlipRankOneTerm),
            });
            if json {
                eprintln!("{report}");
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            // usage errors are input errors; 2 is reserved for non-convergence
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
