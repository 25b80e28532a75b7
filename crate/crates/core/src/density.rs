//! Discrete single-layer density: kernel tables, the operator `K` and the
//! solve of `(I + beta K) w~ = -beta K g^p`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::InterfaceState;
use crate::membrane::Forcing;
use crate::spectral::{SpectralGrid, C64};

/// Far-field linear flow `(Q + iB) conj(z) - i G z / 2` and viscosity ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub q: f64,
    pub b: f64,
    pub g: f64,
    pub lambda: f64,
}

impl FlowConfig {
    pub fn new(q: f64, b: f64, g: f64, lambda: f64) -> Result<Self> {
        let flow = Self { q, b, g, lambda };
        flow.validate()?;
        Ok(flow)
    }

    pub fn quiescent(lambda: f64) -> Self {
        Self {
            q: 0.0,
            b: 0.0,
            g: 0.0,
            lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.b.is_finite() && self.g.is_finite()) {
            return Err(Error::InvalidInput("far-field coefficients must be finite".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "viscosity ratio must be nonnegative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// `beta = (1 - lambda) / (1 + lambda)`.
    pub fn beta(&self) -> f64 {
        (1.0 - self.lambda) / (1.0 + self.lambda)
    }

    /// `chi = 1 / (1 + lambda)`.
    pub fn chi(&self) -> f64 {
        1.0 / (1.0 + self.lambda)
    }

    /// Far-field velocity at `z`.
    pub fn far_field(&self, z: C64) -> C64 {
        C64::new(self.q, self.b) * z.conj() - C64::new(0.0, 0.5 * self.g) * z
    }

    /// Largest far-field rate, used for time-step selection.
    pub fn rate_scale(&self) -> f64 {
        self.q.abs().max(self.b.abs()).max(self.g.abs())
    }
}

/// Node positions and the alternate-point kernel tables of one configuration.
///
/// Row `i` of each table lists the sources `j = i + 1, i + 3, ...` (mod N) in that
/// order, so every quadrature sum is accumulated in a fixed sequence.
#[derive(Clone, Debug)]
pub struct BoundaryGeometry {
    pub n: usize,
    pub h: f64,
    pub sigma: f64,
    pub tau: Vec<C64>,
    /// `S_h tau`.
    pub dtau: Vec<C64>,
    /// `S_h tau_j / (tau_j - tau_i)`.
    cauchy: Vec<C64>,
    /// `S_h tau_j / conj(tau_j - tau_i) - (tau_j - tau_i) conj(S_h tau_j) / conj(tau_j - tau_i)^2`.
    g2: Vec<C64>,
    /// Constant added to the real kernel `K_R1`: `sigma` when deflated, else zero.
    shift: f64,
    /// When set, `K` sees `P w` instead of `w`.
    input_filter: Option<SpectralGrid>,
}

impl BoundaryGeometry {
    pub fn new(state: &InterfaceState, grid: &SpectralGrid, deflation: bool) -> Result<Self> {
        let tau = state.reconstruct_tau(grid)?;
        // S_h tau rather than sigma e^{i theta}: the two differ by the mean and the
        // N/2 mode of e^{i theta}, and keeping the N/2 mode destabilizes the top mode of theta
        let dtau = grid.spectral_derivative(&tau)?;
        Self::from_nodes(grid, tau, dtau, state.sigma, deflation)
    }

    /// Builds the tables from explicit positions and tangents.
    pub fn from_nodes(
        grid: &SpectralGrid,
        tau: Vec<C64>,
        dtau: Vec<C64>,
        sigma: f64,
        deflation: bool,
    ) -> Result<Self> {
        grid.check_len(&tau)?;
        grid.check_len(&dtau)?;
        let n = grid.n();
        let m = n / 2;
        let rows: Vec<Result<Vec<(C64, C64)>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = Vec::with_capacity(m);
                let mut j = (i + 1) % n;
                for _ in 0..m {
                    let d = tau[j] - tau[i];
                    if d.norm_sqr() == 0.0 || !(d.re.is_finite() && d.im.is_finite()) {
                        return Err(Error::GeometryDegeneracy { i, j });
                    }
                    let dc = d.conj();
                    let cauchy = dtau[j] / d;
                    let g2 = dtau[j] / dc - d * dtau[j].conj() / (dc * dc);
                    if !(cauchy.re.is_finite() && cauchy.im.is_finite() && g2.re.is_finite() && g2.im.is_finite()) {
                        return Err(Error::GeometryDegeneracy { i, j });
                    }
                    row.push((cauchy, g2));
                    j = (j + 2) % n;
                }
                Ok(row)
            })
            .collect();
        let mut cauchy = Vec::with_capacity(n * m);
        let mut g2 = Vec::with_capacity(n * m);
        for row in rows {
            for (c, g) in row? {
                cauchy.push(c);
                g2.push(g);
            }
        }
        Ok(Self {
            n,
            h: grid.h(),
            sigma,
            tau,
            dtau,
            cauchy,
            g2,
            shift: if deflation { sigma } else { 0.0 },
            input_filter: None,
        })
    }

    /// Applies the grid filter to every density before `K` acts on it.
    pub fn with_filtered_input(mut self, grid: &SpectralGrid) -> Self {
        self.input_filter = Some(grid.clone());
        self
    }

    pub fn filters_input(&self) -> bool {
        self.input_filter.is_some()
    }

    /// Source index of entry `t` in row `i`.
    #[inline]
    pub fn source(&self, i: usize, t: usize) -> usize {
        (i + 1 + 2 * t) % self.n
    }

    #[inline]
    fn row(&self, i: usize) -> std::ops::Range<usize> {
        let m = self.n / 2;
        i * m..(i + 1) * m
    }

    /// `S_h tau_j / (tau_j - tau_i)` over the sources of row `i`.
    pub fn cauchy_row(&self, i: usize) -> &[C64] {
        &self.cauchy[self.row(i)]
    }

    /// `G2_ij` over the sources of row `i`.
    pub fn g2_row(&self, i: usize) -> &[C64] {
        &self.g2[self.row(i)]
    }

    /// Scalar kernels `(K_R1, K_R2 + i K_I2)` at row `i`, entry `t`.
    #[inline]
    fn k_entry(&self, i: usize, t: usize) -> (f64, C64) {
        let idx = i * (self.n / 2) + t;
        let a = self.cauchy[idx].im / PI + self.shift;
        let c = self.g2[idx] / C64::new(0.0, 2.0 * PI);
        (a, c)
    }

    /// `(K w)_i = 2h sum_{(j-i) odd} [K_R1 w_j + (K_R2 + i K_I2) conj(w_j)]`,
    /// the complex form of the real 2x2 block kernel acting on `(Re w, Im w)`.
    pub fn apply_k(&self, w: &[C64]) -> Result<Vec<C64>> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let m = self.n / 2;
        let weight = 2.0 * self.h;
        let filtered;
        let w = match &self.input_filter {
            Some(grid) => {
                filtered = grid.apply_filter(w)?;
                &filtered[..]
            }
            None => w,
        };
        Ok((0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..m {
                    let j = self.source(i, t);
                    let (a, c) = self.k_entry(i, t);
                    acc += w[j] * a + c * w[j].conj();
                }
                acc * weight
            })
            .collect())
    }

    /// Dense real matrix of `I + beta K` acting on `[Re w_0, Im w_0, Re w_1, ...]`.
    pub fn system_matrix(&self, beta: f64) -> DMatrix<f64> {
        let n = self.n;
        let weight = 2.0 * self.h * beta;
        let mut mat = DMatrix::<f64>::identity(2 * n, 2 * n);
        for i in 0..n {
            for t in 0..n / 2 {
                let j = self.source(i, t);
                let (a, c) = self.k_entry(i, t);
                mat[(2 * i, 2 * j)] += weight * (a + c.re);
                mat[(2 * i, 2 * j + 1)] += weight * c.im;
                mat[(2 * i + 1, 2 * j)] += weight * c.im;
                mat[(2 * i + 1, 2 * j + 1)] += weight * (a - c.re);
            }
        }
        let Some(grid) = &self.input_filter else { return mat };
        // P is real and acts on Re w and Im w alike
        let mut pm = DMatrix::<f64>::zeros(2 * n, 2 * n);
        let mut unit = vec![0.0; n];
        for j in 0..n {
            unit[j] = 1.0;
            let col = grid.apply_filter(&unit).expect("grid and geometry sizes agree");
            unit[j] = 0.0;
            for (i, v) in col.iter().enumerate() {
                pm[(2 * i, 2 * j)] = *v;
                pm[(2 * i + 1, 2 * j + 1)] = *v;
            }
        }
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        &id + (mat - &id) * pm
    }
}

/// Whether `sigma` is added to `K_R1`.
///
/// On a clockwise curve `K` maps a constant density to about `-1`, so `I + beta K`
/// becomes singular as `beta -> 1`; the shift moves that eigenvalue to `-1 + 2 pi sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deflation {
    /// On exactly when `|beta| >= 0.5`, i.e. in the direct-solve regime.
    Auto,
    On,
    Off,
}

impl Deflation {
    pub fn enabled(self, beta: f64) -> bool {
        match self {
            Deflation::Auto => beta.abs() >= FIXED_POINT_BETA_LIMIT,
            Deflation::On => true,
            Deflation::Off => false,
        }
    }
}

/// Whether `K` acts on the filtered density, i.e. `(I + beta K P) w~ = -beta K P g^p`.
///
/// Not part of the analyzed scheme. Near `beta = 1` the alternate-point `K` has
/// spurious near-null directions at the top of the spectrum that amplify high-mode
/// errors once the interface is strongly deformed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFilter {
    /// On exactly when `|beta| >= 0.5`.
    Auto,
    On,
    Off,
}

impl KernelFilter {
    pub fn enabled(self, beta: f64) -> bool {
        match self {
            KernelFilter::Auto => beta.abs() >= FIXED_POINT_BETA_LIMIT,
            KernelFilter::On => true,
            KernelFilter::Off => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Residual gate, relative to `max(1, ||beta K g^p||)`.
    pub tol: f64,
    pub max_iter: usize,
    pub deflation: Deflation,
    pub kernel_filter: KernelFilter,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 200,
            deflation: Deflation::Auto,
            kernel_filter: KernelFilter::Auto,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput(format!("solver tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    FixedPoint,
    Direct,
    /// Bordered solve at `beta = 1`, where `I + K` has a known null space.
    MinimumNorm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySolution {
    pub omega_tilde: Vec<C64>,
    /// `w = w~ + g`.
    pub omega: Vec<C64>,
    /// `w^p = w~ + g^p`.
    pub omega_filtered: Vec<C64>,
    /// `||(I + beta K) w~ + beta K g^p||` in the grid `l2` norm.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Below this `|beta|` the fixed-point iteration is tried first.
pub const FIXED_POINT_BETA_LIMIT: f64 = 0.5;
const STALL_LIMIT: usize = 5;
/// The factored paths accept residuals up to this multiple of the gate; LU rounding
/// grows with the condition number, which reaches `1e3` and more as `beta -> 1`.
const DIRECT_GATE_SLACK: f64 = 100.0;
const REFINEMENT_STEPS: usize = 3;

fn l2(h: f64, w: &[C64]) -> f64 {
    (h * w.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

fn residual_of(geom: &BoundaryGeometry, beta: f64, omega_tilde: &[C64], g_filtered: &[C64]) -> Result<Vec<C64>> {
    let total: Vec<C64> = omega_tilde.iter().zip(g_filtered).map(|(a, b)| a + b).collect();
    let k = geom.apply_k(&total)?;
    Ok(omega_tilde.iter().zip(&k).map(|(w, kw)| w + kw * beta).collect())
}

/// Solves `(I + beta K) w~ = -beta K g^p`.
///
/// Successive approximation `w~ <- -beta K (w~ + g^p)` is used when `|beta| < 0.5`;
/// otherwise, after `max_iter` sweeps, or after five sweeps without residual decrease,
/// the dense real system is factored instead.
pub fn solve_density(
    geom: &BoundaryGeometry,
    forcing: &Forcing,
    flow: &FlowConfig,
    cfg: &SolverConfig,
) -> Result<DensitySolution> {
    let n = geom.n;
    if forcing.g.len() != n || forcing.g_filtered.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: forcing.g.len().min(forcing.g_filtered.len()),
        });
    }
    let beta = flow.beta();
    let assemble = |omega_tilde: Vec<C64>, residual: f64, iterations: usize, method: SolveMethod| {
        let omega = omega_tilde.iter().zip(&forcing.g).map(|(a, b)| a + b).collect();
        let omega_filtered = omega_tilde.iter().zip(&forcing.g_filtered).map(|(a, b)| a + b).collect();
        DensitySolution {
            omega_tilde,
            omega,
            omega_filtered,
            residual,
            iterations,
            method,
        }
    };
    if beta == 0.0 {
        return Ok(assemble(vec![C64::new(0.0, 0.0); n], 0.0, 0, SolveMethod::FixedPoint));
    }

    let rhs: Vec<C64> = geom.apply_k(&forcing.g_filtered)?.into_iter().map(|v| -v * beta).collect();
    let gate = cfg.tol * l2(geom.h, &rhs).max(1.0);

    if beta.abs() < FIXED_POINT_BETA_LIMIT {
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut best = f64::INFINITY;
        let mut stalled = 0;
        for it in 0..cfg.max_iter {
            let total: Vec<C64> = w.iter().zip(&forcing.g_filtered).map(|(a, b)| a + b).collect();
            let next: Vec<C64> = geom.apply_k(&total)?.into_iter().map(|v| -v * beta).collect();
            let diff: Vec<C64> = w.iter().zip(&next).map(|(a, b)| a - b).collect();
            let res = l2(geom.h, &diff);
            if !res.is_finite() {
                break;
            }
            if res <= gate {
                return Ok(assemble(w, res, it, SolveMethod::FixedPoint));
            }
            if res < best {
                best = res;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    break;
                }
            }
            w = next;
        }
    }

    let nullity = null_space_dimension(beta, geom.shift != 0.0, geom.filters_input());
    if nullity > 0 {
        let (w, res) = minimum_norm_solve(geom, beta, &rhs, nullity, gate * DIRECT_GATE_SLACK)?;
        return Ok(assemble(w, res, 0, SolveMethod::MinimumNorm));
    }
    let (w, res) = direct_solve(geom, beta, &forcing.g_filtered, &rhs, gate, cfg.tol)?;
    Ok(assemble(w, res, 0, SolveMethod::Direct))
}

/// Dimension of the null space of `I + beta K` on a smooth closed curve.
///
/// At `beta = 1` it is four, two of which the deflation removes. The alternate-point
/// sum also carries a mirror image near `k = N/2` of each low-mode null vector; the
/// input filter removes those, leaving the rigid rotation.
pub fn null_space_dimension(beta: f64, deflated: bool, filtered_input: bool) -> usize {
    if beta != 1.0 {
        return 0;
    }
    match (deflated, filtered_input) {
        (true, true) => 1,
        (false, true) | (true, false) => 2,
        (false, false) => 4,
    }
}

/// Solution at `beta = 1` orthogonal to the `nullity`-dimensional null space.
///
/// Right and left null vectors `N`, `L` come from the symmetric eigenproblems of
/// `A^T A` and `A A^T`. The part of the right-hand side outside the range is removed
/// along `N`, as `b - N (L^T N)^{-1} L^T b`, which is what the solutions for `beta < 1`
/// converge to; removing it along `L` instead changes the velocity. The bordered
/// system `[A L; N^T 0]` is then regular and the residual is measured against the
/// projected right-hand side.
fn minimum_norm_solve(
    geom: &BoundaryGeometry,
    beta: f64,
    rhs: &[C64],
    nullity: usize,
    gate: f64,
) -> Result<(Vec<C64>, f64)> {
    let mat = geom.system_matrix(beta);
    let dim = mat.nrows();
    let (right, spectrum) = smallest_eigenvectors(mat.transpose() * &mat, nullity);
    let (left, _) = smallest_eigenvectors(&mat * mat.transpose(), nullity);
    let condition = {
        let kept = spectrum.get(nullity).copied().unwrap_or(0.0);
        let max = spectrum.last().copied().unwrap_or(0.0);
        if kept > 0.0 {
            (max / kept).sqrt()
        } else {
            f64::INFINITY
        }
    };
    let mut bordered = DMatrix::<f64>::zeros(dim + nullity, dim + nullity);
    bordered.view_mut((0, 0), (dim, dim)).copy_from(&mat);
    bordered.view_mut((0, dim), (dim, nullity)).copy_from(&left);
    bordered.view_mut((dim, 0), (nullity, dim)).copy_from(&right.transpose());
    let b = pack(rhs);
    let coupling = left.transpose() * &right;
    let Some(inv) = coupling.clone().try_inverse() else {
        return Err(Error::SolverFailure {
            residual: f64::INFINITY,
            condition,
        });
    };
    let b = &b - &right * (inv * (left.transpose() * &b));
    let mut full = DVector::<f64>::zeros(dim + nullity);
    full.rows_mut(0, dim).copy_from(&b);
    let lu = bordered.lu();
    let Some(sol) = lu.solve(&full) else {
        return Err(Error::SolverFailure {
            residual: f64::INFINITY,
            condition,
        });
    };
    let x = sol.rows(0, dim).into_owned();
    let r = &mat * &x - &b;
    let res = l2(geom.h, &unpack(&r));
    if !(res <= gate) {
        return Err(Error::SolverFailure { residual: res, condition });
    }
    Ok((unpack(&x), res))
}

/// The `count` eigenvectors of a symmetric matrix with smallest eigenvalues, and the
/// full spectrum in ascending order.
fn smallest_eigenvectors(sym: DMatrix<f64>, count: usize) -> (DMatrix<f64>, Vec<f64>) {
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let mut vecs = DMatrix::<f64>::zeros(eig.eigenvectors.nrows(), count);
    for (c, &k) in order.iter().take(count).enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(k));
    }
    (vecs, order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect())
}

fn pack(w: &[C64]) -> DVector<f64> {
    DVector::from_iterator(2 * w.len(), w.iter().flat_map(|c| [c.re, c.im]))
}

fn unpack(v: &DVector<f64>) -> Vec<C64> {
    v.as_slice().chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

fn direct_solve(
    geom: &BoundaryGeometry,
    beta: f64,
    g_filtered: &[C64],
    rhs: &[C64],
    gate: f64,
    tol: f64,
) -> Result<(Vec<C64>, f64)> {
    let mat = geom.system_matrix(beta);
    let lu = mat.clone().lu();
    let failure = |residual: f64| Error::SolverFailure {
        residual,
        condition: condition_estimate(&mat),
    };
    let Some(mut x) = lu.solve(&pack(rhs)) else {
        return Err(failure(f64::INFINITY));
    };
    let mut w = unpack(&x);
    let mut r = residual_of(geom, beta, &w, g_filtered)?;
    let mut res = l2(geom.h, &r);
    for _ in 0..REFINEMENT_STEPS {
        if res <= gate {
            break;
        }
        let Some(dx) = lu.solve(&pack(&r)) else { break };
        x -= dx;
        w = unpack(&x);
        r = residual_of(geom, beta, &w, g_filtered)?;
        res = l2(geom.h, &r);
    }
    // near beta = 1 the solution grows like 1 / (1 - beta) along the near-null direction,
    // and rounding in the residual grows with it
    let accept = gate.max(tol * l2(geom.h, &w)) * DIRECT_GATE_SLACK;
    if !(res <= accept) {
        return Err(failure(res));
    }
    Ok((w, res))
}

fn condition_estimate(mat: &DMatrix<f64>) -> f64 {
    let sv = mat.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Residual `||(I + beta K) w~ + beta K g^p||` of a given solution.
pub fn density_residual(geom: &BoundaryGeometry, flow: &FlowConfig, sol: &DensitySolution, g_filtered: &[C64]) -> Result<f64> {
    let r = residual_of(geom, flow.beta(), &sol.omega_tilde, g_filtered)?;
    Ok(l2(geom.h, &r))
}
