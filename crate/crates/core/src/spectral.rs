//! Periodic grid calculus on the uniform mesh `alpha_j = j h`, `h = 2 pi / N`.
//!
//! Sequences are stored in FFT order: slot `j` holds the value at `alpha_j = j h`
//! for `j = 0..N`. Since values are periodic, slot `j` for `j > N/2` is the same
//! node as `j - N`, so this is just a relabeling of the symmetric index range
//! `-N/2+1..=N/2`. Fourier coefficients live on the asymmetric band
//! `k = -N/2+1..=N/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Scalar types that can be stored on the grid.
pub trait GridScalar: Copy + Send + Sync {
    fn to_complex(self) -> C64;
    fn from_complex(c: C64) -> Self;
}

impl GridScalar for f64 {
    #[inline]
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
    #[inline]
    fn from_complex(c: C64) -> Self {
        c.re
    }
}

impl GridScalar for C64 {
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
    #[inline]
    fn from_complex(c: C64) -> Self {
        c
    }
}

/// Even, compactly tapered cutoff used for dealiasing.
///
/// `rho(x) = 1` for `|x| <= mu pi`. On the taper `s = (|x| - mu pi) / ((1 - mu) pi)`
/// and `rho = 1 - s^4 (35 - 84 s + 70 s^2 - 20 s^3)`, which is `C^3` and vanishes
/// with zero slope at `|x| = pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    mu: f64,
}

impl FilterSpec {
    pub const DEFAULT_MU: f64 = 2.0 / 3.0;

    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidInput(format!(
                "filter cutoff mu must lie in (0, 1), got {mu}"
            )));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho(&self, x: f64) -> f64 {
        let ax = x.abs();
        let flat = self.mu * PI;
        if ax <= flat {
            return 1.0;
        }
        if ax >= PI {
            return 0.0;
        }
        let s = (ax - flat) / ((1.0 - self.mu) * PI);
        let s4 = s * s * s * s;
        1.0 - s4 * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s)
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            mu: Self::DEFAULT_MU,
        }
    }
}

/// Discrete Fourier coefficients `f_hat_k` on the band `k = -N/2+1..=N/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<C64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    fn slot(&self, k: i64) -> usize {
        let n = self.coeffs.len() as i64;
        assert!(
            k > -n / 2 && k <= n / 2,
            "wavenumber {k} outside band of N = {n}"
        );
        k.rem_euclid(n) as usize
    }

    /// Coefficient of `e^{i k alpha}`.
    pub fn get(&self, k: i64) -> C64 {
        self.coeffs[self.slot(k)]
    }

    pub fn set(&mut self, k: i64, value: C64) {
        let s = self.slot(k);
        self.coeffs[s] = value;
    }

    /// `(k, f_hat_k)` pairs in ascending `k`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let n = self.coeffs.len() as i64;
        (-n / 2 + 1..=n / 2).map(move |k| (k, self.get(k)))
    }

    /// Raw coefficients in FFT order (slot `s` holds wavenumber `s` or `s - N`).
    pub fn as_fft_order(&self) -> &[C64] {
        &self.coeffs
    }
}

/// Uniform periodic grid with cached transforms, filter table and quadrature weights.
#[derive(Clone)]
pub struct SpectralGrid {
    n: usize,
    h: f64,
    filter: FilterSpec,
    wavenumbers: Vec<f64>,
    rho: Vec<f64>,
    /// `cot(m h / 2)` for odd `m`, zero for even `m`.
    cot: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("h", &self.h)
            .field("filter", &self.filter)
            .finish()
    }
}

impl SpectralGrid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n: usize) -> Result<Self> {
        Self::with_filter(n, FilterSpec::default())
    }

    pub fn with_filter(n: usize, filter: FilterSpec) -> Result<Self> {
        if n < Self::MIN_POINTS || n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "grid size must be even and at least {}, got {n}",
                Self::MIN_POINTS
            )));
        }
        let h = 2.0 * PI / n as f64;
        let wavenumbers: Vec<f64> = (0..n).map(|s| wavenumber_of_slot(s, n) as f64).collect();
        let rho = wavenumbers.iter().map(|&k| filter.rho(k * h)).collect();
        let cot = (0..n)
            .map(|m| {
                if m % 2 == 1 {
                    1.0 / (0.5 * m as f64 * h).tan()
                } else {
                    0.0
                }
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            n,
            h,
            filter,
            wavenumbers,
            rho,
            cot,
            forward,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn filter(&self) -> &FilterSpec {
        &self.filter
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Wavenumber held in FFT slot `s`.
    pub fn wavenumber(&self, slot: usize) -> i64 {
        wavenumber_of_slot(slot, self.n)
    }

    /// Cached `rho(k h)` in FFT order.
    pub fn rho_table(&self) -> &[f64] {
        &self.rho
    }

    /// Whether FFT slot `s` lies in the tapered band `|k h| > mu pi`.
    pub fn is_high_mode(&self, slot: usize) -> bool {
        (self.wavenumbers[slot] * self.h).abs() > self.filter.mu() * PI
    }

    pub fn check_len<T>(&self, f: &[T]) -> Result<()> {
        if f.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: f.len(),
            });
        }
        Ok(())
    }

    fn forward_raw<T: GridScalar>(&self, f: &[T]) -> Vec<C64> {
        let mut buf: Vec<C64> = f.iter().map(|v| v.to_complex()).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn inverse_raw<T: GridScalar>(&self, mut coeffs: Vec<C64>) -> Vec<T> {
        self.inverse.process(&mut coeffs);
        coeffs.into_iter().map(T::from_complex).collect()
    }

    /// Applies the Fourier multiplier `symbol(slot)`.
    fn apply_symbol<T, F>(&self, f: &[T], symbol: F) -> Result<Vec<T>>
    where
        T: GridScalar,
        F: Fn(usize) -> C64,
    {
        self.check_len(f)?;
        let mut coeffs = self.forward_raw(f);
        for (s, c) in coeffs.iter_mut().enumerate() {
            *c *= symbol(s);
        }
        Ok(self.inverse_raw(coeffs))
    }

    /// `f_hat_k = (1/N) sum_j f_j e^{-i k alpha_j}`.
    pub fn dft<T: GridScalar>(&self, f: &[T]) -> Result<Spectrum> {
        self.check_len(f)?;
        Ok(Spectrum {
            coeffs: self.forward_raw(f),
        })
    }

    pub fn idft(&self, spectrum: &Spectrum) -> Result<Vec<C64>> {
        if spectrum.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: spectrum.n(),
            });
        }
        Ok(self.inverse_raw(spectrum.coeffs.clone()))
    }

    /// Multiplies the Fourier coefficients by a real table indexed by FFT slot.
    pub fn apply_real_symbol<T: GridScalar>(&self, f: &[T], table: &[f64]) -> Result<Vec<T>> {
        self.check_len(table)?;
        self.apply_symbol(f, |s| C64::new(table[s], 0.0))
    }

    /// Integer wavenumbers in FFT slot order.
    pub fn wavenumber_table(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Pseudo-spectral derivative `S_h`; the `k = N/2` coefficient is zeroed.
    pub fn spectral_derivative<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        let half = self.n / 2;
        self.apply_symbol(f, |s| {
            if s == half {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, self.wavenumbers[s])
            }
        })
    }

    /// `S_h^2`, with the Nyquist mode removed.
    pub fn spectral_second_derivative<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        let half = self.n / 2;
        self.apply_symbol(f, |s| {
            if s == half {
                C64::new(0.0, 0.0)
            } else {
                let k = self.wavenumbers[s];
                C64::new(-k * k, 0.0)
            }
        })
    }

    /// Filtered derivative `D_h`: multiplier `i k rho(k h)` over the full band.
    pub fn filtered_derivative<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.apply_symbol(f, |s| C64::new(0.0, self.wavenumbers[s] * self.rho[s]))
    }

    /// `D_h^2`.
    pub fn filtered_second_derivative<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.apply_symbol(f, |s| {
            let k = self.wavenumbers[s] * self.rho[s];
            C64::new(-k * k, 0.0)
        })
    }

    /// `f^p`: multiplier `rho(k h)`.
    pub fn apply_filter<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.apply_symbol(f, |s| C64::new(self.rho[s], 0.0))
    }

    /// Trapezoid-rule mean `(1/N) sum_j f_j`.
    pub fn discrete_mean<T: GridScalar>(&self, f: &[T]) -> T {
        let sum: C64 = f.iter().map(|v| v.to_complex()).sum();
        T::from_complex(sum / self.n as f64)
    }

    /// Discrete l2 norm `(h sum_j |f_j|^2)^{1/2}`.
    pub fn l2_norm<T: GridScalar>(&self, f: &[T]) -> f64 {
        (self.h * f.iter().map(|v| v.to_complex().norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete inner product `(f, g)_h = h sum_j conj(f_j) g_j`.
    pub fn inner_product<T: GridScalar>(&self, f: &[T], g: &[T]) -> C64 {
        let sum: C64 = f
            .iter()
            .zip(g)
            .map(|(a, b)| a.to_complex().conj() * b.to_complex())
            .sum();
        sum * self.h
    }

    /// Pseudo-spectral antiderivative `S_h^{-1}` of a zero-mean sequence.
    pub fn antiderivative<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.check_len(f)?;
        let mean = self.discrete_mean(f).to_complex();
        let gate = 1e-12 * self.l2_norm(f).max(1.0);
        if mean.norm() > gate {
            return Err(Error::InvalidInput(format!(
                "antiderivative requires zero mean, got |mean| = {:e}",
                mean.norm()
            )));
        }
        self.antiderivative_of_fluctuation(f)
    }

    /// `S_h^{-1}(f - <f>_h)`; the mean is discarded rather than checked.
    pub fn antiderivative_of_fluctuation<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.apply_symbol(f, |s| {
            let k = self.wavenumbers[s];
            if s == 0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, -1.0 / k)
            }
        })
    }

    /// Discrete Hilbert transform as the alternate-point cotangent sum
    /// `H_h f_i = (h / pi) sum_{(j-i) odd} f_j cot((alpha_i - alpha_j) / 2)`.
    ///
    /// Its symbol is `-i sgn(k)` on `0 < |k| < N/2`; both the mean and the
    /// Nyquist mode are annihilated.
    pub fn hilbert_transform<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        self.check_len(f)?;
        let n = self.n;
        let scale = self.h / PI;
        let vals: Vec<C64> = f.iter().map(|v| v.to_complex()).collect();
        Ok((0..n)
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                let mut j = (i + 1) % n;
                for _ in 0..n / 2 {
                    let m = (i + n - j) % n;
                    acc += vals[j] * self.cot[m];
                    j = (j + 2) % n;
                }
                T::from_complex(acc * scale)
            })
            .collect())
    }

    /// Same operator through its Fourier symbol `-i sgn(k)` with `k = 0, N/2` removed.
    pub fn hilbert_transform_spectral<T: GridScalar>(&self, f: &[T]) -> Result<Vec<T>> {
        let half = self.n / 2;
        self.apply_symbol(f, |s| {
            if s == 0 || s == half {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, -self.wavenumbers[s].signum())
            }
        })
    }

    /// `[H_h, phi](psi) = H_h(phi psi) - phi H_h(psi)`.
    pub fn hilbert_commutator(&self, phi: &[C64], psi: &[C64]) -> Result<Vec<C64>> {
        self.check_len(phi)?;
        self.check_len(psi)?;
        let product: Vec<C64> = phi.iter().zip(psi).map(|(a, b)| a * b).collect();
        let h_product = self.hilbert_transform(&product)?;
        let h_psi = self.hilbert_transform(psi)?;
        Ok(h_product
            .iter()
            .zip(phi.iter().zip(&h_psi))
            .map(|(hp, (p, hq))| hp - p * hq)
            .collect())
    }

    /// Alternate-point trapezoidal sum `sum_{(j-i) odd} K(i, j) f_j (2h)` for one target `i`.
    pub fn alternate_point_sum<T, K>(&self, kernel: K, f: &[T], i: usize) -> Result<C64>
    where
        T: GridScalar,
        K: Fn(usize, usize) -> C64,
    {
        self.check_len(f)?;
        if i >= self.n {
            return Err(Error::InvalidInput(format!(
                "target index {i} outside grid of size {}",
                self.n
            )));
        }
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        let mut j = (i + 1) % n;
        for _ in 0..n / 2 {
            let k = kernel(i, j);
            if !(k.re.is_finite() && k.im.is_finite()) {
                return Err(Error::NumericalSingularity { i, j });
            }
            acc += k * f[j].to_complex();
            j = (j + 2) % n;
        }
        Ok(acc * (2.0 * self.h))
    }

    /// `cot((alpha_i - alpha_j) / 2)` for `(i - j)` odd, else zero.
    #[inline]
    pub fn cot_offset(&self, i: usize, j: usize) -> f64 {
        self.cot[(i + self.n - j) % self.n]
    }

    /// Evaluates the trigonometric interpolant of `f` at `f`'s nodes shifted by `shift_j`.
    ///
    /// The Nyquist mode is split symmetrically so that real data stays real.
    /// Computed as `f_j + sum_k f_hat_k e^{i k alpha_j}(e^{i k shift_j} - 1)`, which is
    /// exact for zero shifts.
    pub fn interpolate_shifted(&self, f: &[f64], shift: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        self.check_len(shift)?;
        let coeffs = self.forward_raw(f);
        let half = self.n / 2;
        Ok((0..self.n)
            .map(|j| {
                let alpha = self.node(j);
                let dx = shift[j];
                if dx == 0.0 {
                    return f[j];
                }
                let mut corr = 0.0;
                for (s, c) in coeffs.iter().enumerate() {
                    if s == 0 {
                        continue;
                    }
                    let k = self.wavenumbers[s];
                    if s == half {
                        let a = c.re;
                        corr += a * ((k * (alpha + dx)).cos() - (k * alpha).cos());
                    } else {
                        let e0 = C64::from_polar(1.0, k * alpha);
                        let e1 = C64::from_polar(1.0, k * dx) - 1.0;
                        corr += (c * e0 * e1).re;
                    }
                }
                f[j] + corr
            })
            .collect())
    }

    /// Truncates the finer-grid sequence `fine` to this grid's band and samples it here.
    pub fn restrict_from<T: GridScalar>(&self, fine: &[T], fine_grid: &SpectralGrid) -> Result<Vec<T>> {
        fine_grid.check_len(fine)?;
        if fine_grid.n < self.n {
            return Err(Error::InvalidInput(format!(
                "cannot restrict from N = {} to N = {}",
                fine_grid.n, self.n
            )));
        }
        let fine_coeffs = fine_grid.forward_raw(fine);
        let mut coeffs = vec![C64::new(0.0, 0.0); self.n];
        let half = self.n as i64 / 2;
        for (s, c) in fine_coeffs.iter().enumerate() {
            let k = fine_grid.wavenumber(s);
            if k.abs() < half {
                coeffs[k.rem_euclid(self.n as i64) as usize] = *c;
            }
        }
        Ok(self.inverse_raw(coeffs))
    }
}

fn wavenumber_of_slot(slot: usize, n: usize) -> i64 {
    if slot <= n / 2 {
        slot as i64
    } else {
        slot as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(n).unwrap()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_odd_or_small_grids() {
        assert!(SpectralGrid::new(7).is_err());
        assert!(SpectralGrid::new(6).is_err());
        assert!(SpectralGrid::new(8).is_ok());
    }

    #[test]
    fn filter_profile_conditions() {
        let f = FilterSpec::default();
        assert_eq!(f.rho(0.0), 1.0);
        assert_eq!(f.rho(f.mu() * PI), 1.0);
        assert!(f.rho(PI).abs() < 1e-15);
        assert_eq!(f.rho(-PI), f.rho(PI));
        let d = 1e-6;
        let slope = (f.rho(PI) - f.rho(PI - d)) / d;
        assert!(slope.abs() < 1e-6);
        for i in 0..=1000 {
            let x = -PI + 2.0 * PI * i as f64 / 1000.0;
            let r = f.rho(x);
            assert!((0.0..=1.0).contains(&r));
            assert!((r - f.rho(-x)).abs() < 1e-15);
        }
        assert!(FilterSpec::new(0.0).is_err());
        assert!(FilterSpec::new(1.0).is_err());
    }

    #[test]
    fn dft_of_constant_and_cosine() {
        let g = grid(8);
        let ones = vec![1.0; 8];
        let s = g.dft(&ones).unwrap();
        for (k, c) in s.modes() {
            let expect = if k == 0 { 1.0 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-15);
        }
        let cosine: Vec<f64> = g.nodes().iter().map(|a| a.cos()).collect();
        let s = g.dft(&cosine).unwrap();
        for (k, c) in s.modes() {
            let expect = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((c - C64::new(expect, 0.0)).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn dft_rejects_wrong_length() {
        let g = grid(8);
        assert!(matches!(
            g.dft(&[1.0; 7]),
            Err(Error::LengthMismatch { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn derivative_of_band_limited_sine() {
        let g = grid(16);
        let f: Vec<f64> = g.nodes().iter().map(|a| (3.0 * a).sin()).collect();
        let exact: Vec<f64> = g.nodes().iter().map(|a| 3.0 * (3.0 * a).cos()).collect();
        assert!(max_err(&g.spectral_derivative(&f).unwrap(), &exact) < 1e-13);
        let c = vec![2.5; 16];
        assert!(g.spectral_derivative(&c).unwrap().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn derivative_zeroes_nyquist_mode() {
        let g = grid(16);
        let f: Vec<f64> = g.nodes().iter().map(|a| (8.0 * a).cos()).collect();
        assert!(g.spectral_derivative(&f).unwrap().iter().all(|v| v.abs() < 1e-13));
        assert!(g.filtered_derivative(&f).unwrap().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn filtered_derivative_is_exact_on_low_modes() {
        let g = grid(32);
        // |k h| <= mu pi  <=>  |k| <= 10 for N = 32, mu = 2/3
        for k in [1.0, 5.0, 10.0] {
            let f: Vec<C64> = g.nodes().iter().map(|a| C64::from_polar(1.0, k * a)).collect();
            let d = g.filtered_derivative(&f).unwrap();
            for (df, fv) in d.iter().zip(&f) {
                assert!((df - C64::new(0.0, k) * fv).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn filter_leaves_low_band_and_kills_nyquist() {
        let g = grid(32);
        let f: Vec<f64> = g.nodes().iter().map(|a| (4.0 * a).sin() + 0.3 * (9.0 * a).cos()).collect();
        assert!(max_err(&g.apply_filter(&f).unwrap(), &f) < 1e-14);
        let nyq: Vec<C64> = g.nodes().iter().map(|a| C64::from_polar(1.0, 16.0 * a)).collect();
        assert!(g.apply_filter(&nyq).unwrap().iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn antiderivative_cases() {
        let g = grid(32);
        let c: Vec<f64> = g.nodes().iter().map(|a| a.cos()).collect();
        let s: Vec<f64> = g.nodes().iter().map(|a| a.sin()).collect();
        assert!(max_err(&g.antiderivative(&c).unwrap(), &s) < 1e-14);
        assert!(g.antiderivative(&vec![1.0; 32]).is_err());
    }

    #[test]
    fn hilbert_maps_cosine_to_sine() {
        let g = grid(32);
        for k in 1..16 {
            let c: Vec<f64> = g.nodes().iter().map(|a| (k as f64 * a).cos()).collect();
            let s: Vec<f64> = g.nodes().iter().map(|a| (k as f64 * a).sin()).collect();
            assert!(max_err(&g.hilbert_transform(&c).unwrap(), &s) < 1e-12, "k={k}");
        }
        assert!(g.hilbert_transform(&vec![3.0; 32]).unwrap().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn commutator_with_constant_vanishes() {
        let g = grid(16);
        let phi = vec![C64::new(1.0, 0.0); 16];
        let psi: Vec<C64> = g.nodes().iter().map(|a| C64::new(a.sin(), (2.0 * a).cos())).collect();
        assert!(g.hilbert_commutator(&phi, &psi).unwrap().iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn alternate_point_sum_of_cosine_kernel() {
        let g = grid(32);
        let nodes = g.nodes();
        let ones = vec![1.0; 32];
        for i in 0..32 {
            let v = g
                .alternate_point_sum(|i, j| C64::new((nodes[i] - nodes[j]).cos(), 0.0), &ones, i)
                .unwrap();
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn alternate_point_sum_reports_singular_kernel() {
        let g = grid(8);
        let err = g
            .alternate_point_sum(|_, j| if j == 3 { C64::new(f64::INFINITY, 0.0) } else { C64::new(1.0, 0.0) }, &[1.0; 8], 0)
            .unwrap_err();
        assert_eq!(err, Error::NumericalSingularity { i: 0, j: 3 });
    }

    #[test]
    fn shifted_interpolation_matches_band_limited_function() {
        let g = grid(16);
        let f: Vec<f64> = g.nodes().iter().map(|a| 1.0 + 0.5 * (2.0 * a).cos() + 0.2 * (3.0 * a).sin()).collect();
        let shift: Vec<f64> = (0..16).map(|j| 0.1 * (j as f64).sin()).collect();
        let got = g.interpolate_shifted(&f, &shift).unwrap();
        for j in 0..16 {
            let x = g.node(j) + shift[j];
            let exact = 1.0 + 0.5 * (2.0 * x).cos() + 0.2 * (3.0 * x).sin();
            assert!((got[j] - exact).abs() < 1e-13);
        }
        assert_eq!(g.interpolate_shifted(&f, &[0.0; 16]).unwrap(), f);
    }

    #[test]
    fn restriction_of_band_limited_data_is_sampling() {
        let fine = grid(64);
        let coarse = grid(32);
        let f: Vec<f64> = fine.nodes().iter().map(|a| (5.0 * a).sin() + (2.0 * a).cos()).collect();
        let r = coarse.restrict_from(&f, &fine).unwrap();
        let direct: Vec<f64> = coarse.nodes().iter().map(|a| (5.0 * a).sin() + (2.0 * a).cos()).collect();
        assert!(max_err(&r, &direct) < 1e-14);
    }
}
