//! Self-refinement of a bending capsule in planar strain over N = 32, 64, 128.

use capsule_bim::harness::{self, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/convergence.cfg");
    let cfg = RunConfig::from_file(path.as_ref())?;
    let report = harness::converge(&cfg, &[32, 64, 128], &harness::output_root())?;
    println!("dt = {:e}, t_end = {}", report.dt, report.t_end);
    println!("N_c  N_f   d_theta    d_sigma    d_alpha0   d_tau");
    for r in &report.differences {
        println!(
            "{:<4} {:<4} {:.3e}  {:.3e}  {:.3e}  {:.3e}",
            r.n_coarse, r.n_fine, r.theta, r.sigma, r.alpha0, r.tau
        );
    }
    for p in &report.observed_order {
        println!("observed order {p:.2}");
    }
    Ok(())
}
