use std::path::PathBuf;
use std::process::ExitCode;

use capsule_bim::harness::{self, RunConfig};
use capsule_bim::Error;
use clap::{Parser, Subcommand};

/// Boundary integral simulation of capsules and drops in 2D Stokes flow.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write snapshots, diagnostics and a manifest.
    Simulate { config: PathBuf },
    /// Self-refinement study over a doubling chain of grid sizes.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
        resolutions: Vec<usize>,
    },
    /// Filtered run next to the run with `diagnose.disable` sites switched off.
    Diagnose { config: PathBuf },
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_FAILURE: u8 = 3;

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. } | Error::InvalidInput(_) | Error::InvalidShape(_) | Error::TimeStepTooLarge { .. }
    )
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if is_config_error(&e) { CONFIG_ERROR } else { RUNTIME_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let root = harness::output_root();
    let path = match &cli.command {
        Command::Simulate { config } | Command::Converge { config, .. } | Command::Diagnose { config } => config,
    };
    let cfg = match RunConfig::from_file(path) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match cli.command {
        Command::Simulate { .. } => match harness::simulate(&cfg, &root) {
            Ok(out) => {
                let status = &out.manifest.status;
                println!("{}: {} steps, dt {:e}", out.dir.display(), status.steps, status.dt);
                match &status.failure {
                    None => ExitCode::SUCCESS,
                    Some(msg) => {
                        eprintln!("run failed after t = {}: {msg}", status.last_good_time);
                        ExitCode::from(RUNTIME_FAILURE)
                    }
                }
            }
            Err(e) => fail(e),
        },
        Command::Converge { resolutions, .. } => match harness::converge(&cfg, &resolutions, &root) {
            Ok(report) => {
                println!("n_coarse n_fine d_theta");
                for row in &report.differences {
                    println!("{} {} {:e}", row.n_coarse, row.n_fine, row.theta);
                }
                for p in &report.observed_order {
                    println!("observed order {p:.2}");
                }
                if report.all_completed() {
                    ExitCode::SUCCESS
                } else {
                    for (n, r) in report.resolutions.iter().zip(&report.runs) {
                        if let Some(msg) = &r.failure {
                            eprintln!("N = {n} failed after t = {}: {msg}", r.last_good_time);
                        }
                    }
                    ExitCode::from(RUNTIME_FAILURE)
                }
            }
            Err(e) => fail(e),
        },
        Command::Diagnose { .. } => match harness::diagnose(&cfg, &root) {
            Ok(report) => {
                for s in [&report.filtered, &report.variant] {
                    let flag = if s.non_analyzed { " (non-analyzed)" } else { "" };
                    let end = match s.blow_up_time() {
                        Some(t) => format!("failed after t = {t}"),
                        None => "completed".into(),
                    };
                    println!("{}{flag}: tail growth {:.3e}, {end}", s.label, s.growth());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
