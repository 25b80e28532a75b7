//! Configuration, simulation driver, convergence and stability studies, and file output.

pub mod config;
pub mod output;
pub mod study;

pub use config::RunConfig;
pub use study::{converge, diagnose, simulate, ConvergenceReport, DiagnoseReport, SimulationOutcome};

/// Environment variable that overrides the output root directory.
pub const OUTPUT_ROOT_ENV: &str = "CAPSULE_BIM_OUTPUT_ROOT";

/// `$CAPSULE_BIM_OUTPUT_ROOT`, or the working directory.
pub fn output_root() -> std::path::PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(Into::into)
        .unwrap_or_else(|| std::path::PathBuf::from("."))
}
