//! `simulate`, `converge` and `diagnose`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{self, num};
use crate::error::{Error, Result};
use crate::evolution::{resolve_dt, run, Model, TimeStep, Trajectory};
use crate::spectral::SpectralGrid;

#[derive(Clone, Debug, Serialize)]
pub struct RunStatus {
    pub completed: bool,
    pub failure: Option<String>,
    /// Time of the last accepted state.
    pub last_good_time: f64,
    pub steps: usize,
    pub dt: f64,
}

impl RunStatus {
    fn of(tr: &Trajectory) -> Self {
        Self {
            completed: tr.completed(),
            failure: tr.failure.as_ref().map(|e| e.to_string()),
            last_good_time: tr.last_state.time,
            steps: tr.steps,
            dt: tr.dt,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    /// Filter placement or kernel input filter outside the analyzed scheme.
    pub non_analyzed: bool,
    pub beta: f64,
    pub chi: f64,
    pub sigma0: f64,
    pub status: RunStatus,
    pub snapshots: Vec<String>,
}

fn manifest(command: &str, cfg: &RunConfig, model: &Model, tr: &Trajectory, snapshots: Vec<String>) -> Manifest {
    Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: cfg.clone(),
        non_analyzed: model.is_non_analyzed(),
        beta: model.flow.beta(),
        chi: model.flow.chi(),
        sigma0: model.membrane.sigma0,
        status: RunStatus::of(tr),
        snapshots,
    }
}

pub struct SimulationOutcome {
    pub dir: PathBuf,
    pub model: Model,
    pub trajectory: Trajectory,
    pub manifest: Manifest,
}

/// Runs the configuration and writes snapshot CSVs, `diagnostics.csv` and
/// `manifest.json` under `root/output.dir`. Nothing is written unless the
/// configuration builds and the run starts; a run that fails later still writes
/// everything up to the last snapshot and records the failure in the manifest.
pub fn simulate(cfg: &RunConfig, root: &Path) -> Result<SimulationOutcome> {
    let (model, initial) = cfg.build()?;
    let tr = run(&model, &initial, &cfg.integrator)?;
    let dir = root.join(&cfg.output.dir);
    fs::create_dir_all(&dir)?;
    let mut names = Vec::with_capacity(tr.snapshots.len());
    for (k, snap) in tr.snapshots.iter().enumerate() {
        let name = output::snapshot_name(k);
        fs::write(dir.join(&name), output::snapshot_csv(&model.grid, snap)?)?;
        names.push(name);
    }
    fs::write(
        dir.join("diagnostics.csv"),
        output::diagnostics_csv(tr.snapshots.iter().map(|s| &s.diagnostics)),
    )?;
    let manifest = manifest("simulate", cfg, &model, &tr, names);
    output::write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(SimulationOutcome {
        dir,
        model,
        trajectory: tr,
        manifest,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub theta: f64,
    pub sigma: f64,
    pub alpha0: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub t_end: f64,
    /// Step used at every resolution, chosen for the finest grid.
    pub dt: f64,
    pub runs: Vec<RunStatus>,
    pub differences: Vec<ConvergenceRow>,
    /// `log2` of successive ratios of the `theta` differences.
    pub observed_order: Vec<f64>,
    pub non_analyzed: bool,
}

impl ConvergenceReport {
    pub fn all_completed(&self) -> bool {
        self.runs.iter().all(|r| r.completed)
    }
}

/// Checks that `resolutions` is `N, 2N, 4N, ...` with at least two members.
pub fn check_doubling(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 2 {
        return Err(Error::InvalidInput("need at least two resolutions".into()));
    }
    if let Some(w) = resolutions.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidInput(format!(
            "resolutions must double successively, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn grid_diff(coarse: &SpectralGrid, fine: &SpectralGrid, a: &[f64], b: &[f64]) -> Result<f64> {
    let r = coarse.restrict_from(b, fine)?;
    let d: Vec<f64> = a.iter().zip(&r).map(|(x, y)| x - y).collect();
    Ok(coarse.l2_norm(&d))
}

/// Runs every resolution to the common `t_end` with one shared step and compares
/// successive pairs after restricting the finer solution to the coarser grid.
pub fn converge(cfg: &RunConfig, resolutions: &[usize], root: &Path) -> Result<ConvergenceReport> {
    check_doubling(resolutions)?;
    let finest = *resolutions.last().unwrap();
    let (fine_model, fine_initial) = cfg.build_at(finest)?;
    let mut integ = cfg.integrator;
    integ.snapshot_interval = Some(integ.t_end.max(f64::MIN_POSITIVE));
    let (dt, _) = resolve_dt(&fine_model, &fine_initial, &integ)?;
    integ.dt = TimeStep::Fixed { dt };

    let built: Vec<(Model, _)> = resolutions.iter().map(|&n| cfg.build_at(n)).collect::<Result<_>>()?;
    let runs: Vec<Trajectory> = built
        .par_iter()
        .map(|(model, initial)| run(model, initial, &integ))
        .collect::<Result<_>>()?;

    let mut differences = Vec::new();
    for k in 0..runs.len() - 1 {
        let (gc, gf) = (&built[k].0.grid, &built[k + 1].0.grid);
        if !(runs[k].completed() && runs[k + 1].completed()) {
            break;
        }
        let (a, b) = (&runs[k].last_state, &runs[k + 1].last_state);
        let tau_a = a.reconstruct_tau(gc)?;
        let tau_b = gc.restrict_from(&b.reconstruct_tau(gf)?, gf)?;
        let dtau: Vec<_> = tau_a.iter().zip(&tau_b).map(|(x, y)| x - y).collect();
        differences.push(ConvergenceRow {
            n_coarse: gc.n(),
            n_fine: gf.n(),
            theta: grid_diff(gc, gf, &a.theta, &b.theta)?,
            sigma: (a.sigma - b.sigma).abs(),
            alpha0: grid_diff(gc, gf, &a.alpha0, &b.alpha0)?,
            tau: gc.l2_norm(&dtau),
        });
    }
    let observed_order = differences.windows(2).map(|w| (w[0].theta / w[1].theta).log2()).collect();
    let report = ConvergenceReport {
        resolutions: resolutions.to_vec(),
        t_end: integ.t_end,
        dt,
        runs: runs.iter().map(RunStatus::of).collect(),
        differences,
        observed_order,
        non_analyzed: fine_model.is_non_analyzed(),
    };

    let dir = root.join(&cfg.output.dir);
    fs::create_dir_all(&dir)?;
    let mut csv = String::from("n_coarse,n_fine,d_theta,d_sigma,d_alpha0,d_tau,order_theta\n");
    for (k, row) in report.differences.iter().enumerate() {
        let order = if k == 0 { String::new() } else { num(report.observed_order[k - 1]) };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n_coarse,
            row.n_fine,
            num(row.theta),
            num(row.sigma),
            num(row.alpha0),
            num(row.tau),
            order
        ));
    }
    fs::write(dir.join("convergence.csv"), csv)?;
    output::write_json(&dir.join("convergence.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnoseSeries {
    pub label: String,
    pub non_analyzed: bool,
    pub status: RunStatus,
    pub times: Vec<f64>,
    pub high_mode_max: Vec<f64>,
}

impl DiagnoseSeries {
    /// Largest tail amplitude over the run relative to its initial value.
    pub fn growth(&self) -> f64 {
        let first = self.high_mode_max.first().copied().unwrap_or(0.0);
        let peak = self.high_mode_max.iter().cloned().fold(0.0, f64::max);
        if first > 0.0 {
            peak / first
        } else if peak > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    }

    /// Time of failure, if the run stopped early.
    pub fn blow_up_time(&self) -> Option<f64> {
        (!self.status.completed).then_some(self.status.last_good_time)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnoseReport {
    pub disabled: Vec<String>,
    pub filtered: DiagnoseSeries,
    pub variant: DiagnoseSeries,
}

fn series(label: &str, cfg: &RunConfig) -> Result<DiagnoseSeries> {
    let (model, initial) = cfg.build()?;
    let tr = run(&model, &initial, &cfg.integrator)?;
    Ok(DiagnoseSeries {
        label: label.into(),
        non_analyzed: model.is_non_analyzed(),
        status: RunStatus::of(&tr),
        times: tr.snapshots.iter().map(|s| s.diagnostics.time).collect(),
        high_mode_max: tr.snapshots.iter().map(|s| s.diagnostics.high_mode_max).collect(),
    })
}

/// Runs the configuration as given and with the `diagnose.disable` sites off, side by side.
pub fn diagnose(cfg: &RunConfig, root: &Path) -> Result<DiagnoseReport> {
    let variant_cfg = cfg.comparison_variant();
    let (a, b) = rayon::join(|| series("filtered", cfg), || series("variant", &variant_cfg));
    let report = DiagnoseReport {
        disabled: cfg.diagnose.disable.clone(),
        filtered: a?,
        variant: b?,
    };
    let dir = root.join(&cfg.output.dir);
    fs::create_dir_all(&dir)?;
    let mut csv = String::from("time,high_mode_filtered,high_mode_variant\n");
    let times = if report.filtered.times.len() >= report.variant.times.len() {
        &report.filtered.times
    } else {
        &report.variant.times
    };
    let cell = |s: &DiagnoseSeries, k: usize| s.high_mode_max.get(k).map(|v| num(*v)).unwrap_or_default();
    for (k, t) in times.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", num(*t), cell(&report.filtered, k), cell(&report.variant, k)));
    }
    fs::write(dir.join("diagnose.csv"), csv)?;
    output::write_json(&dir.join("diagnose.json"), &report)?;
    Ok(report)
}
