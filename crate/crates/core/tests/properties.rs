//! Invariants checked over random inputs.

mod common;

use std::f64::consts::PI;

use capsule_bim::density::{solve_density, BoundaryGeometry, FlowConfig, SolverConfig};
use capsule_bim::evolution::{assemble_rhs, step, FilterSites, Model, Scheme};
use capsule_bim::interface::{resample_equal_arclength, FourierMode, ShapeSpec};
use capsule_bim::membrane::{stretch_tension, Forcing, MembraneParams};
use capsule_bim::spectral::{SpectralGrid, C64};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid_size() -> impl Strategy<Value = usize> {
    prop_oneof![Just(16usize), Just(32), Just(64), Just(128)]
}

fn zero_mean(seed: u64, n: usize) -> Vec<C64> {
    random_zero_mean(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

/// A circle with two small bumps, flat enough to stay resolved on 64 points.
fn bumpy_shape() -> impl Strategy<Value = ShapeSpec> {
    (2i32..6, -1.0f64..1.0, -1.0f64..1.0, 0.7f64..1.5).prop_map(|(k, a, b, r)| {
        let scale = 0.1 / (k * k) as f64;
        let (a, b) = (a * scale, b * scale);
        ShapeSpec::fourier(vec![
            FourierMode { k: 1, coeff: (r, 0.0) },
            FourierMode { k: -k, coeff: (a * r, b * r) },
            FourierMode { k: k + 1, coeff: (b * r, -a * r) },
        ])
    })
}

fn drop_model(grid: SpectralGrid, sigma: f64, lambda: f64) -> Model {
    Model {
        membrane: MembraneParams::constant(1.0, 0.0, sigma),
        flow: FlowConfig::new(0.3, 0.0, 0.0, lambda).unwrap(),
        solver: SolverConfig::default(),
        filters: FilterSites::default(),
        grid,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hilbert_squares_to_minus_identity(n in grid_size(), seed in any::<u64>()) {
        let grid = SpectralGrid::new(n).unwrap();
        let f = zero_mean(seed, n);
        let hh = grid.hilbert_transform(&grid.hilbert_transform(&f).unwrap()).unwrap();
        let sum: Vec<C64> = hh.iter().zip(&f).map(|(a, b)| a + b).collect();
        prop_assert!(grid.l2_norm(&sum) < 1e-12 * grid.l2_norm(&f).max(1.0));
    }

    #[test]
    fn hilbert_cot_sum_matches_its_symbol(n in grid_size(), seed in any::<u64>()) {
        let grid = SpectralGrid::new(n).unwrap();
        let f = zero_mean(seed, n);
        let a = grid.hilbert_transform(&f).unwrap();
        let b = naive_multiplier(&f, |k| C64::new(0.0, -(k.signum() as f64)));
        prop_assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn antiderivative_inverts_derivative(n in grid_size(), seed in any::<u64>()) {
        let grid = SpectralGrid::new(n).unwrap();
        let f = zero_mean(seed, n);
        let back = grid.antiderivative(&grid.spectral_derivative(&f).unwrap()).unwrap();
        prop_assert!(max_diff(&back, &f) < 1e-12);
        let fwd = grid.spectral_derivative(&grid.antiderivative(&f).unwrap()).unwrap();
        prop_assert!(max_diff(&fwd, &f) < 1e-12);
    }

    #[test]
    fn filter_is_a_contraction_that_keeps_low_modes(n in grid_size(), seed in any::<u64>()) {
        let grid = SpectralGrid::new(n).unwrap();
        let f = zero_mean(seed, n);
        let pf = grid.apply_filter(&f).unwrap();
        prop_assert!(grid.l2_norm(&pf) <= grid.l2_norm(&f) * (1.0 + 1e-14));
        for (s, r) in grid.rho_table().iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(r));
            let x = (grid.wavenumber(s) as f64 * grid.h()).abs();
            if x <= grid.filter().mu() * PI {
                prop_assert_eq!(*r, 1.0);
            }
        }
        // low-mode content passes unchanged and D_h agrees with S_h there
        let low = naive_multiplier(&f, |k| {
            let keep = (k as f64 * grid.h()).abs() <= grid.filter().mu() * PI;
            C64::new(if keep { 1.0 } else { 0.0 }, 0.0)
        });
        prop_assert!(max_diff(&grid.apply_filter(&low).unwrap(), &low) < 1e-13);
        let d1 = grid.filtered_derivative(&low).unwrap();
        let d2 = grid.spectral_derivative(&low).unwrap();
        prop_assert!(max_diff(&d1, &d2) < 1e-11 * n as f64);
    }

    #[test]
    fn restriction_of_band_limited_data_is_sampling(n in prop_oneof![Just(16usize), Just(32), Just(64)], seed in any::<u64>()) {
        let coarse = SpectralGrid::new(n).unwrap();
        let fine = SpectralGrid::new(4 * n).unwrap();
        let f = zero_mean(seed, n);
        let interp = Interpolant::new(&f);
        let on_fine: Vec<C64> = fine.nodes().iter().map(|a| interp.eval(*a)).collect();
        let back = coarse.restrict_from(&on_fine, &fine).unwrap();
        prop_assert!(max_diff(&back, &f) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resampled_shapes_wind_once_clockwise_at_equal_arclength(shape in bumpy_shape()) {
        let grid = SpectralGrid::new(128).unwrap();
        let state = resample_equal_arclength(&shape, &grid).unwrap();
        prop_assert_eq!(state.winding, -1);
        let mean_slope = grid.discrete_mean(&state.theta_alpha(&grid).unwrap());
        prop_assert!((mean_slope + 1.0).abs() < 1e-12);
        let defect = state.arclength_defect(&grid).unwrap();
        prop_assert!(defect < 1e-9);
        prop_assert!(state.sigma > 0.0);
        prop_assert!(state.enclosed_area(&grid).unwrap() > 0.0);
    }

    #[test]
    fn hookean_tension_equals_prestress_on_the_initial_map(shape in bumpy_shape(), seed in any::<u64>()) {
        let grid = SpectralGrid::new(64).unwrap();
        let state = resample_equal_arclength(&shape, &grid).unwrap();
        let s0: Vec<f64> = zero_mean(seed, 64).iter().map(|c| 0.1 * c.re).collect();
        let params = MembraneParams::hookean(s0.clone(), 0.0, state.sigma);
        for filtered in [false, true] {
            let s = stretch_tension(&state, &params, &grid, filtered).unwrap();
            let err = s.iter().zip(&s0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(err < 1e-13);
        }
    }

    #[test]
    fn equal_viscosities_need_no_density_correction(shape in bumpy_shape()) {
        let grid = SpectralGrid::new(64).unwrap();
        let state = resample_equal_arclength(&shape, &grid).unwrap();
        let model = drop_model(grid.clone(), state.sigma, 1.0);
        let geom = BoundaryGeometry::new(&state, &grid, false).unwrap();
        let forcing = Forcing::assemble(&state, &grid, &geom.tau, &model.membrane, &model.flow, C64::new(0.0, 0.0), true, true).unwrap();
        let sol = solve_density(&geom, &forcing, &model.flow, &model.solver).unwrap();
        prop_assert!(sol.omega_tilde.iter().all(|w| w.norm() == 0.0));
        prop_assert_eq!(&sol.omega, &forcing.g);
    }

    #[test]
    fn one_step_keeps_the_frame(shape in bumpy_shape(), lambda in prop_oneof![Just(0.2f64), Just(1.0), Just(4.0)]) {
        let grid = SpectralGrid::new(64).unwrap();
        let state = resample_equal_arclength(&shape, &grid).unwrap();
        let model = drop_model(grid.clone(), state.sigma, lambda);
        let dt = 1e-3;
        let next = step(&state, dt, Scheme::Rk4, &model, |s| assemble_rhs(&model, s).map(|(d, _)| d)).unwrap();
        prop_assert!(next.sigma > 0.0);
        prop_assert_eq!(next.winding, state.winding);
        prop_assert!((next.time - dt).abs() < 1e-15);
        let a0 = state.enclosed_area(&grid).unwrap();
        let a1 = next.enclosed_area(&grid).unwrap();
        prop_assert!((a1 - a0).abs() < 1e-8 * a0);
        prop_assert!(next.arclength_defect(&grid).unwrap() < 1e-8);
    }
}
