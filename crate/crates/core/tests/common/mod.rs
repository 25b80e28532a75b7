//! Reference computations used as oracles. Nothing here calls the FFT or the
//! alternate-point code of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

use capsule_bim::spectral::C64;
use rand::Rng;

/// Signed wavenumber of FFT slot `s` on `N` points, in `-N/2+1..=N/2`.
pub fn wavenumber(s: usize, n: usize) -> i64 {
    if s <= n / 2 {
        s as i64
    } else {
        s as i64 - n as i64
    }
}

/// `f_hat_k = (1/N) sum_j f_j e^{-i k alpha_j}` by direct summation, in FFT slot order.
pub fn naive_dft(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    (0..n)
        .map(|s| {
            let k = wavenumber(s, n) as f64;
            f.iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -k * 2.0 * PI * j as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

pub fn naive_idft(c: &[C64]) -> Vec<C64> {
    let n = c.len();
    (0..n)
        .map(|j| {
            c.iter()
                .enumerate()
                .map(|(s, v)| v * C64::from_polar(1.0, wavenumber(s, n) as f64 * 2.0 * PI * j as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Applies a Fourier multiplier `m(k)` by direct summation.
pub fn naive_multiplier(f: &[C64], m: impl Fn(i64) -> C64) -> Vec<C64> {
    let n = f.len();
    let c: Vec<C64> = naive_dft(f)
        .iter()
        .enumerate()
        .map(|(s, v)| v * m(wavenumber(s, n)))
        .collect();
    naive_idft(&c)
}

pub fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|x| C64::new(*x, 0.0)).collect()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random complex sequence with zero mean and zero `N/2` mode.
pub fn random_zero_mean(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let raw: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    naive_multiplier(&raw, |k| if k == 0 || k == n as i64 / 2 { C64::new(0.0, 0.0) } else { C64::new(1.0, 0.0) })
}

/// Band-limited periodic curve through given nodes, evaluated anywhere.
pub struct Interpolant {
    coeffs: Vec<(f64, C64)>,
}

impl Interpolant {
    /// Drops the `N/2` coefficient.
    pub fn new(values: &[C64]) -> Self {
        let n = values.len();
        let coeffs = naive_dft(values)
            .into_iter()
            .enumerate()
            .filter(|(s, _)| *s != n / 2)
            .map(|(s, c)| (wavenumber(s, n) as f64, c))
            .collect();
        Self { coeffs }
    }

    pub fn eval(&self, a: f64) -> C64 {
        self.coeffs.iter().map(|(k, c)| c * C64::from_polar(1.0, k * a)).sum()
    }

    pub fn deriv(&self, a: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|(k, c)| c * C64::new(0.0, *k) * C64::from_polar(1.0, k * a))
            .sum()
    }
}
