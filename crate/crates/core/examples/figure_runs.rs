//! Capsule and drop in planar strain and simple shear, driven from the files in
//! `configs/`. Pass config names to run a subset, e.g.
//! `cargo run --release --example figure_runs -- capsule_shear`.
//! Output goes under `$CAPSULE_BIM_OUTPUT_ROOT` (default: working directory).

use capsule_bim::harness::{self, RunConfig};
use capsule_bim::spectral::C64;

const ALL: [&str; 4] = ["capsule_strain", "capsule_shear", "drop_strain", "drop_shear"];

/// Taylor deformation `(L - B) / (L + B)` from the extreme node distances to the centroid,
/// and the angle of the longest radius.
fn deformation(tau: &[C64]) -> (f64, f64) {
    let c = tau.iter().sum::<C64>() / tau.len() as f64;
    let r: Vec<C64> = tau.iter().map(|t| t - c).collect();
    let (long, short) = r.iter().fold((C64::new(0.0, 0.0), f64::INFINITY), |(l, s), z| {
        (if z.norm() > l.norm() { *z } else { l }, s.min(z.norm()))
    });
    let angle = long.arg().rem_euclid(std::f64::consts::PI);
    ((long.norm() - short) / (long.norm() + short), angle)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let names: Vec<&str> = if names.is_empty() { ALL.to_vec() } else { names.iter().map(String::as_str).collect() };
    let root = harness::output_root();
    for name in names {
        let path = format!("{}/../../configs/{name}.cfg", env!("CARGO_MANIFEST_DIR"));
        let cfg = RunConfig::from_file(path.as_ref())?;
        let out = harness::simulate(&cfg, &root)?;
        println!("{name}: N = {}, {} steps", cfg.n, out.trajectory.steps);
        for snap in &out.trajectory.snapshots {
            let tau = snap.state.reconstruct_tau(&out.model.grid)?;
            let (d, angle) = deformation(&tau);
            println!(
                "  t = {:5.2}  D = {d:.4}  angle = {:6.2} deg  area = {:.10}",
                snap.state.time,
                angle.to_degrees(),
                snap.diagnostics.area
            );
        }
        match &out.manifest.status.failure {
            None => println!("  reached t_end = {}", cfg.integrator.t_end),
            Some(msg) => println!("  stopped after t = {}: {msg}", out.manifest.status.last_good_time),
        }
    }
    Ok(())
}
