use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ecbs::WeightEvaluation;
use ecbs_cli::commands::{simulate, sweep, table_cmd};
use ecbs_cli::{CliError, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "ecbs",
    version,
    about = "Exponential cubic B-spline solver for Boussinesq systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Stable,
    ClosedForm,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation and write snapshot CSVs plus summary.json
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config's `output`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute one of the four reference error tables
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Weight evaluation; the reference tables were produced with the raw closed forms
        #[arg(long, value_enum, default_value = "closed-form")]
        weights: Weights,
    },
    /// Run every (zeta, dt) combination of a base config in parallel
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        zeta: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        dt: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = simulate(&cfg, out.as_deref())?;
            for s in &summary.snapshots {
                match (s.linf_u, s.linf_v) {
                    (Some(u), Some(v)) => println!(
                        "t = {:<8} linf_u = {u:.6e}  linf_v = {v:.6e}  peak_x = {:.4}",
                        s.time, s.peak_x
                    ),
                    _ => println!("t = {:<8} peak_x = {:.4}", s.time, s.peak_x),
                }
            }
            Ok(())
        }
        Command::Table {
            which,
            out,
            weights,
        } => {
            let weights = match weights {
                Weights::Stable => WeightEvaluation::Stable,
                Weights::ClosedForm => WeightEvaluation::ClosedForm,
            };
            let report = table_cmd(which, weights, out.as_deref())?;
            print!("{}", report.text);
            Ok(())
        }
        Command::Sweep {
            config,
            zeta,
            dt,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            for r in sweep(&cfg, &zeta, &dt, out.as_deref())? {
                println!(
                    "zeta = {:e}  dt = {}  linf_u = {:.6e}  linf_v = {:.6e}  {:.3}s",
                    r.zeta,
                    r.dt,
                    r.linf_u.unwrap_or(f64::NAN),
                    r.linf_v.unwrap_or(f64::NAN),
                    r.runtime
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecbs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
