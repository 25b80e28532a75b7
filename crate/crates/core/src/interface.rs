//! Discrete interface in the equal-arclength frame.
//!
//! The tangent angle is stored as `theta_j = W alpha_j + p_j` with integer winding
//! `W` and periodic part `p`. The backward map is stored as `alpha0_j = alpha_j + q_j`.
//! Physical runs use clockwise traversal (`W = -1`): the unit normal `i e^{i theta}`
//! then points into the exterior fluid and `kappa = -theta_s` is positive on
//! convex shapes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralGrid, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceState {
    /// Periodic part `p` of the tangent angle.
    pub theta: Vec<f64>,
    pub winding: i32,
    /// Arclength per unit `alpha`; constant along the interface.
    pub sigma: f64,
    /// Periodic part `q` of the backward map `alpha0 = alpha + q`.
    pub alpha0: Vec<f64>,
    /// Zero Fourier mode of the node positions.
    pub tau_c: C64,
    pub time: f64,
}

impl InterfaceState {
    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        grid.check_len(&self.theta)?;
        grid.check_len(&self.alpha0)?;
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.winding == 0 {
            return Err(Error::InvalidInput("winding number must be nonzero".into()));
        }
        Ok(())
    }

    /// Circle of the given radius and center traversed with winding `winding`,
    /// starting from the angle `phase`.
    pub fn circle(grid: &SpectralGrid, radius: f64, center: C64, winding: i32, phase: f64) -> Self {
        let w = winding as f64;
        // tau = center + r e^{i(w alpha + phase)}, tau_alpha = r w i e^{i(...)}
        let p0 = phase + if winding > 0 { PI / 2.0 } else { -PI / 2.0 };
        Self {
            theta: vec![p0; grid.n()],
            winding,
            sigma: radius * w.abs(),
            alpha0: vec![0.0; grid.n()],
            tau_c: center,
            time: 0.0,
        }
    }

    /// Full tangent angle `W alpha_j + p_j`.
    pub fn theta_values(&self, grid: &SpectralGrid) -> Vec<f64> {
        self.theta
            .iter()
            .enumerate()
            .map(|(j, p)| self.winding as f64 * grid.node(j) + p)
            .collect()
    }

    /// `S_h theta = W + S_h p`.
    pub fn theta_alpha(&self, grid: &SpectralGrid) -> Result<Vec<f64>> {
        let w = self.winding as f64;
        Ok(grid
            .spectral_derivative(&self.theta)?
            .into_iter()
            .map(|d| w + d)
            .collect())
    }

    /// Unit tangent `e^{i theta_j}`.
    pub fn unit_tangent(&self, grid: &SpectralGrid) -> Vec<C64> {
        self.theta_values(grid)
            .into_iter()
            .map(|t| C64::from_polar(1.0, t))
            .collect()
    }

    /// `tau_i = tau_c + S_h^{-1}(sigma e^{i theta} - <sigma e^{i theta}>_h)_i`.
    pub fn reconstruct_tau(&self, grid: &SpectralGrid) -> Result<Vec<C64>> {
        self.validate(grid)?;
        let dtau: Vec<C64> = self
            .unit_tangent(grid)
            .into_iter()
            .map(|e| e * self.sigma)
            .collect();
        Ok(grid
            .antiderivative_of_fluctuation(&dtau)?
            .into_iter()
            .map(|z| z + self.tau_c)
            .collect())
    }

    /// `kappa_i = -S_h theta_i / sigma`.
    pub fn curvature(&self, grid: &SpectralGrid) -> Result<Vec<f64>> {
        self.validate(grid)?;
        Ok(self
            .theta_alpha(grid)?
            .into_iter()
            .map(|t| -t / self.sigma)
            .collect())
    }

    /// Enclosed area `|Im sum_i conj(tau_i) (S_h tau)_i h| / 2`.
    pub fn enclosed_area(&self, grid: &SpectralGrid) -> Result<f64> {
        let tau = self.reconstruct_tau(grid)?;
        let dtau = grid.spectral_derivative(&tau)?;
        let s: C64 = tau.iter().zip(&dtau).map(|(t, d)| t.conj() * d).sum();
        Ok(0.5 * (s.im * grid.h()).abs())
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.sigma
    }

    /// `D_h alpha0 = 1 + D_h q` (or `S_h` when `filtered` is false).
    pub fn alpha0_slope(&self, grid: &SpectralGrid, filtered: bool) -> Result<Vec<f64>> {
        let d = if filtered {
            grid.filtered_derivative(&self.alpha0)?
        } else {
            grid.spectral_derivative(&self.alpha0)?
        };
        Ok(d.into_iter().map(|v| 1.0 + v).collect())
    }

    /// Largest relative departure of `|S_h tau|` from `sigma`.
    ///
    /// Zero for an exactly closed equal-arclength curve; picks up the closure
    /// defect `<e^{i theta}>_h` and unresolved Nyquist content.
    pub fn arclength_defect(&self, grid: &SpectralGrid) -> Result<f64> {
        let tau = self.reconstruct_tau(grid)?;
        let dtau = grid.spectral_derivative(&tau)?;
        Ok(dtau
            .iter()
            .map(|d| (d.norm() / self.sigma - 1.0).abs())
            .fold(0.0, f64::max))
    }

    /// Max modulus of the tangent-angle Fourier coefficients in the tapered band
    /// `|k h| > mu pi`.
    pub fn high_mode_max(&self, grid: &SpectralGrid) -> Result<f64> {
        let spec = grid.dft(&self.theta)?;
        Ok(spec
            .as_fft_order()
            .iter()
            .enumerate()
            .filter(|(s, _)| grid.is_high_mode(*s))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

impl Orientation {
    pub fn winding(self) -> i32 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Counterclockwise => 1,
        }
    }
}

/// One term `c e^{i k t}` of a Fourier-described closed curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: i32,
    pub coeff: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeKind {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Fourier { modes: Vec<FourierMode> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub orientation: Orientation,
}

impl ShapeSpec {
    pub fn circle(radius: f64) -> Self {
        Self {
            kind: ShapeKind::Circle { radius },
            orientation: Orientation::Clockwise,
        }
    }

    pub fn ellipse(a: f64, b: f64) -> Self {
        Self {
            kind: ShapeKind::Ellipse { a, b },
            orientation: Orientation::Clockwise,
        }
    }

    pub fn fourier(modes: Vec<FourierMode>) -> Self {
        Self {
            kind: ShapeKind::Fourier { modes },
            orientation: Orientation::Clockwise,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    fn check(&self) -> Result<()> {
        let ok = match &self.kind {
            ShapeKind::Circle { radius } => *radius > 0.0 && radius.is_finite(),
            ShapeKind::Ellipse { a, b } => *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite(),
            ShapeKind::Fourier { modes } => modes
                .iter()
                .any(|m| m.k != 0 && (m.coeff.0 != 0.0 || m.coeff.1 != 0.0))
                && modes.iter().all(|m| m.coeff.0.is_finite() && m.coeff.1.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidShape(format!("degenerate shape parameters: {:?}", self.kind)))
        }
    }

    /// Position and derivative of the natural parameterization at `t`.
    fn natural(&self, t: f64) -> (C64, C64) {
        match &self.kind {
            ShapeKind::Circle { radius } => {
                let e = C64::from_polar(1.0, t);
                (e * radius, C64::new(0.0, *radius) * e)
            }
            ShapeKind::Ellipse { a, b } => (
                C64::new(a * t.cos(), b * t.sin()),
                C64::new(-a * t.sin(), b * t.cos()),
            ),
            ShapeKind::Fourier { modes } => {
                let mut z = C64::new(0.0, 0.0);
                let mut dz = C64::new(0.0, 0.0);
                for m in modes {
                    let c = C64::new(m.coeff.0, m.coeff.1);
                    let e = C64::from_polar(1.0, m.k as f64 * t);
                    z += c * e;
                    dz += c * e * C64::new(0.0, m.k as f64);
                }
                (z, dz)
            }
        }
    }
}

/// Closed parametric curve traversed in a fixed orientation.
struct OrientedCurve<'a> {
    shape: &'a ShapeSpec,
    reversed: bool,
}

impl OrientedCurve<'_> {
    fn eval(&self, t: f64) -> (C64, C64) {
        if self.reversed {
            let (z, dz) = self.shape.natural(-t);
            (z, -dz)
        } else {
            self.shape.natural(t)
        }
    }
}

/// Pieces of the spectral arclength function `s(t) = L t / (2 pi) + periodic(t)`.
struct ArclengthMap {
    mean_speed: f64,
    /// `(k, c_k / (i k))` for the periodic part.
    terms: Vec<(f64, C64)>,
    offset: f64,
}

impl ArclengthMap {
    fn new(speed: &[f64], grid: &SpectralGrid) -> Result<Self> {
        let spec = grid.dft(speed)?;
        let mean_speed = spec.get(0).re;
        let n = grid.n() as i64;
        let terms: Vec<(f64, C64)> = spec
            .modes()
            .filter(|(k, _)| *k != 0 && *k != n / 2)
            .map(|(k, c)| (k as f64, c / C64::new(0.0, k as f64)))
            .collect();
        let mut map = Self {
            mean_speed,
            terms,
            offset: 0.0,
        };
        map.offset = -map.periodic(0.0);
        Ok(map)
    }

    fn periodic(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| (c * C64::from_polar(1.0, k * t)).re)
            .sum()
    }

    fn eval(&self, t: f64) -> f64 {
        self.mean_speed * t + self.periodic(t) + self.offset
    }

    fn length(&self) -> f64 {
        2.0 * PI * self.mean_speed
    }
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let cross = |o: C64, p: C64, q: C64| ((p - o).conj() * (q - o)).im;
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn polygon_self_intersects(pts: &[C64]) -> bool {
    let m = pts.len();
    for i in 0..m {
        let (a, b) = (pts[i], pts[(i + 1) % m]);
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            if segments_cross(a, b, pts[j], pts[(j + 1) % m]) {
                return true;
            }
        }
    }
    false
}

/// Places `N` nodes at equal arclength along `shape` starting from its `t = 0` point.
///
/// The arclength function is built spectrally from a dense sampling of the speed
/// and inverted node by node with Newton's method.
pub fn resample_equal_arclength(shape: &ShapeSpec, grid: &SpectralGrid) -> Result<InterfaceState> {
    const MAX_ITER: usize = 50;
    const SPACING_TOL: f64 = 1e-10;

    shape.check()?;
    let n = grid.n();
    let m = (8 * n).max(512);
    let dense = SpectralGrid::new(m)?;

    let natural_area: f64 = {
        let pts: Vec<(C64, C64)> = dense.nodes().iter().map(|&t| shape.natural(t)).collect();
        0.5 * dense.h() * pts.iter().map(|(z, dz)| (z.conj() * dz).im).sum::<f64>()
    };
    if natural_area.abs() < 1e-14 {
        return Err(Error::InvalidShape("curve encloses no area".into()));
    }
    let winding = shape.orientation.winding();
    let curve = OrientedCurve {
        shape,
        reversed: (natural_area > 0.0) != (winding > 0),
    };

    let samples: Vec<(C64, C64)> = dense.nodes().iter().map(|&t| curve.eval(t)).collect();
    if samples.iter().any(|(_, dz)| dz.norm() < 1e-12) {
        return Err(Error::InvalidShape("curve has a stationary point".into()));
    }
    let polygon: Vec<C64> = samples.iter().map(|(z, _)| *z).collect();
    if polygon_self_intersects(&polygon) {
        return Err(Error::InvalidShape("curve self-intersects".into()));
    }

    let speed: Vec<f64> = samples.iter().map(|(_, dz)| dz.norm()).collect();
    let arclength = ArclengthMap::new(&speed, &dense)?;
    let length = arclength.length();
    let spacing = length / n as f64;

    let mut params = Vec::with_capacity(n);
    let mut worst = 0usize;
    for j in 0..n {
        let target = j as f64 * spacing;
        let mut t = 2.0 * PI * j as f64 / n as f64;
        let mut converged = false;
        for it in 0..MAX_ITER {
            let resid = arclength.eval(t) - target;
            if resid.abs() <= 1e-15 * length {
                converged = true;
                worst = worst.max(it);
                break;
            }
            t -= resid / curve.eval(t).1.norm();
        }
        if !converged {
            let resid = (arclength.eval(t) - target).abs();
            if resid > 1e-13 * length {
                return Err(Error::ResamplingFailure {
                    iterations: MAX_ITER,
                    nonuniformity: resid / spacing,
                });
            }
        }
        params.push(t);
    }

    let nonuniformity = (0..n)
        .map(|j| {
            let next = if j + 1 < n {
                arclength.eval(params[j + 1])
            } else {
                length + arclength.eval(params[0])
            };
            ((next - arclength.eval(params[j])) / spacing - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if nonuniformity > SPACING_TOL {
        return Err(Error::ResamplingFailure {
            iterations: worst,
            nonuniformity,
        });
    }

    let w = winding as f64;
    let mut theta = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    let mut prev: Option<f64> = None;
    for (j, &t) in params.iter().enumerate() {
        let (z, dz) = curve.eval(t);
        positions.push(z);
        let raw = dz.arg() - w * grid.node(j);
        let p = match prev {
            None => raw,
            Some(q) => raw + 2.0 * PI * ((q - raw) / (2.0 * PI)).round(),
        };
        prev = Some(p);
        theta.push(p);
    }
    let closure = theta[n - 1] - theta[0];
    if closure.abs() > PI {
        return Err(Error::InvalidShape(
            "tangent angle does not close with the requested winding".into(),
        ));
    }

    let tau_c = positions.iter().sum::<C64>() / n as f64;
    Ok(InterfaceState {
        theta,
        winding,
        sigma: length / (2.0 * PI),
        alpha0: vec![0.0; n],
        tau_c,
        time: 0.0,
    })
}
