//! A circular drop with constant tension in quiescent fluid stays put.

use capsule_bim::evolution::{run, FilterSites, IntegratorConfig, Model, Scheme};
use capsule_bim::density::{FlowConfig, SolverConfig};
use capsule_bim::interface::InterfaceState;
use capsule_bim::membrane::MembraneParams;
use capsule_bim::spectral::{SpectralGrid, C64};

fn main() -> capsule_bim::Result<()> {
    let grid = SpectralGrid::new(64)?;
    let state = InterfaceState::circle(&grid, 1.0, C64::new(0.0, 0.0), -1, 0.0);
    let model = Model {
        membrane: MembraneParams::constant(1.0, 0.0, state.sigma),
        flow: FlowConfig::quiescent(1.0),
        solver: SolverConfig::default(),
        filters: FilterSites::default(),
        grid,
    };
    let cfg = IntegratorConfig::new(Scheme::Rk4, 1.0).with_dt(2e-3).with_snapshots(0.25);
    let tr = run(&model, &state, &cfg)?;
    let a0 = tr.snapshots[0].diagnostics.area;
    for s in &tr.snapshots {
        let d = &s.diagnostics;
        println!(
            "t = {:.2}  area drift {:.2e}  sigma {:.15}  tail {:.1e}",
            d.time,
            (d.area - a0).abs() / a0,
            d.sigma,
            d.high_mode_max
        );
    }
    println!("{} steps, completed: {}", tr.steps, tr.completed());
    Ok(())
}
