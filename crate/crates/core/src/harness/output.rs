//! CSV and JSON writers. Floats are printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::evolution::{Diagnostics, Snapshot};
use crate::spectral::SpectralGrid;

/// Round-trippable float formatting.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Interface CSV of one snapshot: `t,j,x,y,theta,tension,alpha0`.
pub fn snapshot_csv(grid: &SpectralGrid, snap: &Snapshot) -> Result<String> {
    let state = &snap.state;
    let tau = state.reconstruct_tau(grid)?;
    let theta = state.theta_values(grid);
    let mut out = String::from("t,j,x,y,theta,tension,alpha0\n");
    for j in 0..grid.n() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(state.time),
            j,
            num(tau[j].re),
            num(tau[j].im),
            num(theta[j]),
            num(snap.tension[j]),
            num(grid.node(j) + state.alpha0[j])
        );
    }
    Ok(out)
}

pub const DIAGNOSTICS_HEADER: &str =
    "time,area,perimeter,sigma,high_mode_max,density_residual,alpha0_min_slope,imag_residue_alpha0,arclength_defect";

pub fn diagnostics_row(d: &Diagnostics) -> String {
    [
        d.time,
        d.area,
        d.perimeter,
        d.sigma,
        d.high_mode_max,
        d.density_residual,
        d.alpha0_min_slope,
        d.imag_residue_alpha0,
        d.arclength_defect,
    ]
    .iter()
    .map(|v| num(*v))
    .collect::<Vec<_>>()
    .join(",")
}

pub fn diagnostics_csv<'a>(rows: impl IntoIterator<Item = &'a Diagnostics>) -> String {
    let mut out = format!("{DIAGNOSTICS_HEADER}\n");
    for d in rows {
        out.push_str(&diagnostics_row(d));
        out.push('\n');
    }
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| crate::Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Name of snapshot `k`.
pub fn snapshot_name(k: usize) -> String {
    format!("snapshot_{k:04}.csv")
}
