//! Solves for the single-layer density on an ellipse across viscosity ratios and
//! reports the path taken (fixed point, LU, minimum norm).

use capsule_bim::density::{solve_density, BoundaryGeometry, FlowConfig, SolverConfig};
use capsule_bim::interface::{resample_equal_arclength, ShapeSpec};
use capsule_bim::membrane::{Forcing, MembraneParams};
use capsule_bim::spectral::{SpectralGrid, C64};

fn main() -> capsule_bim::Result<()> {
    let grid = SpectralGrid::new(128)?;
    let state = resample_equal_arclength(&ShapeSpec::ellipse(1.3, 0.8), &grid)?;
    let membrane = MembraneParams::hookean(vec![1.0; grid.n()], 0.1, state.sigma);
    let cfg = SolverConfig::default();
    println!("lambda    beta      method        iterations  residual");
    for lambda in [1.0, 0.9 / 1.1, 0.5, 0.1, 0.01, 0.0] {
        let flow = FlowConfig::new(1.0, 0.0, 0.0, lambda)?;
        let beta = flow.beta();
        let geom = BoundaryGeometry::new(&state, &grid, cfg.deflation.enabled(beta))?;
        let geom = if cfg.kernel_filter.enabled(beta) { geom.with_filtered_input(&grid) } else { geom };
        let forcing = Forcing::assemble(&state, &grid, &geom.tau, &membrane, &flow, C64::new(0.0, 0.0), true, true)?;
        let sol = solve_density(&geom, &forcing, &flow, &cfg)?;
        println!(
            "{lambda:<9.4} {beta:<9.4} {:<13} {:>10}  {:.2e}",
            format!("{:?}", sol.method),
            sol.iterations,
            sol.residual
        );
    }
    Ok(())
}
