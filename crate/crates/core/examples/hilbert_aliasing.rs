//! Aliasing in an alternate-point sum with a smooth kernel: the unfiltered
//! top mode `N/2 - 1` comes back at `-N/2 + 1` with an O(1) coefficient.

use std::f64::consts::PI;

use capsule_bim::spectral::{SpectralGrid, C64};

fn main() -> capsule_bim::Result<()> {
    let n = 32;
    let grid = SpectralGrid::new(n)?;
    let alpha = grid.nodes();
    let g = |a: f64| C64::from_polar(1.0, 2.0 * a);
    let kernel = |i: usize, j: usize| (g(alpha[i]) - g(alpha[j])) * grid.cot_offset(i, j) / (2.0 * PI);
    let top = (n / 2 - 1) as f64;
    let phi: Vec<C64> = alpha.iter().map(|a| C64::from_polar(1.0, top * a)).collect();
    let phi_p = grid.apply_filter(&phi)?;

    let mut worst = 0.0f64;
    let mut filtered = 0.0f64;
    for i in 0..n {
        let r = grid.alternate_point_sum(kernel, &phi, i)?;
        let expect = C64::new(0.0, -2.0) * C64::from_polar(1.0, -top * alpha[i]);
        worst = worst.max((r - expect).norm());
        filtered = filtered.max(grid.alternate_point_sum(kernel, &phi_p, i)?.norm());
    }
    println!("N = {n}: max |R_h phi - (-2i) e^(-i(N/2-1) alpha)| = {worst:.2e}");
    println!("after the filter: max |R_h phi^p| = {filtered:.2e}");
    Ok(())
}
