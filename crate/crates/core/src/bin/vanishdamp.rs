use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vanishdamp::analysis::{fit_decay_rate, tail_decay, AnalysisError};
use vanishdamp::cli::{run, sweep_file, CliError, Group, Suite};
use vanishdamp::dynamics::Trajectory;

/// Damped evolution with vanishing friction, from single runs to the acceptance suite.
#[derive(Parser)]
#[command(name = "vanishdamp", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configured run and write its artifacts.
    Simulate { config: PathBuf },
    /// Run a parameter grid concurrently and aggregate the summary rows.
    Sweep { config: PathBuf },
    /// Run the acceptance criteria; exit 0 iff all pass.
    Verify {
        #[arg(long)]
        only: Option<Group>,
    },
    /// Fit the energy decay rate of a trajectory csv.
    Rates {
        trajectory: PathBuf,
        /// Decades of log-time in the fit window.
        #[arg(long, default_value_t = 1.0)]
        decades: f64,
        /// Exponents s whose t^s·E tail is reported.
        #[arg(long = "probe", default_values_t = [1.0])]
        probes: Vec<f64>,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn rates(path: &PathBuf, decades: f64, probes: &[f64]) -> Result<(), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    let traj = Trajectory::read_csv(file)?;
    match fit_decay_rate(&traj, decades, probes) {
        Ok(r) => {
            println!("fitted_exponent={} window=[{}, {}] residual={:e} samples={}", r.fitted_exponent, r.window[0], r.window[1], r.residual, r.samples);
            for (s, v) in &r.tail_sup {
                println!("tail_sup s={s} max_t^s_E={v:e}");
            }
        }
        Err(AnalysisError::EnergyUnderflow { t, energy }) => println!("superpolynomial: E = {energy:e} at t = {t}"),
        Err(e) => return Err(e.into()),
    }
    for &s in probes {
        let d = tail_decay(&traj, s, 1.0)?;
        println!(
            "tail s={s} decade_ratio={:e} nonincreasing={} superpolynomial={}",
            d.decade_ratio, d.nonincreasing, d.superpolynomial
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // Usage errors follow the configuration-error code; help and version exit 0.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match args.command {
        Command::Simulate { config } => match run(&config) {
            Ok(outcome) => {
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
                println!("status {}", outcome.status.label());
                ExitCode::from(outcome.status.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
        Command::Sweep { config } => match sweep_file(&config) {
            Ok(outcome) => {
                println!(
                    "wrote {} ({} cells, {} not ok)",
                    outcome.summary_path.display(),
                    outcome.rows.len(),
                    outcome.failed_cells
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Verify { only } => {
            let report = Suite::default().run(only);
            println!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Rates { trajectory, decades, probes } => match rates(&trajectory, decades, &probes) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(e),
        },
    }
}
