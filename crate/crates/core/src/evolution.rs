//! Right-hand side of the semi-discrete system and time integration.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::{solve_density, BoundaryGeometry, FlowConfig, SolveMethod, SolverConfig};
use crate::error::{Error, Result};
use crate::interface::InterfaceState;
use crate::membrane::{stretch_tension, Forcing, MembraneParams};
use crate::spectral::{SpectralGrid, C64};
use crate::velocity::VelocityField;

/// Which of the filtering sites are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSites {
    /// `g^p`: bending term of the forcing with `D_h^2`.
    pub forcing: bool,
    /// `w^p` in the regular kernels and in the commutator.
    pub density: bool,
    /// `D_h alpha0` in the tension and the backward-map transport.
    pub transport: bool,
    /// `w^p` also in the leading Hilbert term. Not part of the analyzed scheme.
    pub hilbert: bool,
    /// Filter applied to `theta_t` itself. Not part of the analyzed scheme either; it
    /// damps the aliased top modes that the alternate-point kernels amplify as
    /// `beta -> 1` when there is no bending stiffness to hold them down.
    pub rate: bool,
}

impl Default for FilterSites {
    fn default() -> Self {
        Self {
            forcing: true,
            density: true,
            transport: true,
            hilbert: false,
            rate: false,
        }
    }
}

impl FilterSites {
    pub fn none() -> Self {
        Self {
            forcing: false,
            density: false,
            transport: false,
            hilbert: false,
            rate: false,
        }
    }

    /// True for any combination that deviates from the analyzed placement.
    pub fn is_non_analyzed(&self) -> bool {
        self.hilbert || self.rate
    }
}

/// Everything except the state that the right-hand side depends on.
#[derive(Clone, Debug)]
pub struct Model {
    pub grid: SpectralGrid,
    pub membrane: MembraneParams,
    pub flow: FlowConfig,
    pub solver: SolverConfig,
    pub filters: FilterSites,
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        self.membrane.validate(&self.grid)?;
        self.flow.validate()?;
        self.solver.validate()
    }

    /// True when the filter placement or the kernel input filter departs from the analyzed scheme.
    pub fn is_non_analyzed(&self) -> bool {
        self.filters.is_non_analyzed() || self.solver.kernel_filter.enabled(self.flow.beta())
    }

    /// `chi kappa_B / (2 sigma^3)`: coefficient of `|k|^3` in the leading tangent-angle term.
    pub fn bending_rate(&self, sigma: f64) -> f64 {
        self.flow.chi() * self.membrane.kappa_b / (2.0 * sigma.powi(3))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateDerivative {
    pub dtheta: Vec<f64>,
    pub dsigma: f64,
    pub dalpha0: Vec<f64>,
    pub dtau_c: C64,
}

impl StateDerivative {
    fn combine(parts: &[(f64, &StateDerivative)]) -> StateDerivative {
        let n = parts[0].1.dtheta.len();
        let mut out = StateDerivative {
            dtheta: vec![0.0; n],
            dsigma: 0.0,
            dalpha0: vec![0.0; n],
            dtau_c: C64::new(0.0, 0.0),
        };
        for (w, d) in parts {
            for (o, v) in out.dtheta.iter_mut().zip(&d.dtheta) {
                *o += w * v;
            }
            for (o, v) in out.dalpha0.iter_mut().zip(&d.dalpha0) {
                *o += w * v;
            }
            out.dsigma += w * d.dsigma;
            out.dtau_c += d.dtau_c * *w;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.dtheta
            .iter()
            .chain(&self.dalpha0)
            .map(|v| v.abs())
            .chain([self.dsigma.abs(), self.dtau_c.norm()])
            .fold(0.0, f64::max)
    }
}

/// By-products of one right-hand-side evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsReport {
    pub density_residual: f64,
    pub density_method: SolveMethod,
    pub density_iterations: usize,
    pub tension: Vec<f64>,
    pub max_normal_velocity: f64,
    /// Largest `|Im|` of the complex backward-map bracket before the real part is taken.
    pub imag_residue_alpha0: f64,
    pub alpha0_min_slope: f64,
}

fn ensure_clockwise(state: &InterfaceState) -> Result<()> {
    if state.winding != -1 {
        return Err(Error::InvalidInput(format!(
            "the evolution requires clockwise traversal (winding -1), got {}",
            state.winding
        )));
    }
    Ok(())
}

/// Tension, forcing, density, velocity and finally the time derivatives
/// `theta_t = (S_h u_n + phi_s S_h theta) / sigma`, `sigma_t = -<u_n S_h theta>`,
/// `alpha0_t = D alpha0 (phi_s - u_s) / sigma`, `tau_c' = <v>`.
pub fn assemble_rhs(model: &Model, state: &InterfaceState) -> Result<(StateDerivative, RhsReport)> {
    let grid = &model.grid;
    state.validate(grid)?;
    ensure_clockwise(state)?;
    let filters = model.filters;
    let beta = model.flow.beta();
    let mut geom = BoundaryGeometry::new(state, grid, model.solver.deflation.enabled(beta))?;
    if model.solver.kernel_filter.enabled(beta) {
        geom = geom.with_filtered_input(grid);
    }
    let forcing = Forcing::assemble(
        state,
        grid,
        &geom.tau,
        &model.membrane,
        &model.flow,
        C64::new(0.0, 0.0),
        filters.forcing,
        filters.transport,
    )?;
    let mut density = solve_density(&geom, &forcing, &model.flow, &model.solver)?;
    if !filters.density {
        density.omega_filtered = density.omega.clone();
    }
    let vel = VelocityField::evaluate(grid, state, &geom, &density, &model.flow, filters.hilbert)?;

    let theta_a = state.theta_alpha(grid)?;
    let dun = grid.spectral_derivative(&vel.u_n)?;
    let sigma = state.sigma;
    let dtheta: Vec<f64> = (0..grid.n())
        .map(|i| (dun[i] + vel.phi_s[i] * theta_a[i]) / sigma)
        .collect();
    let dtheta = if filters.rate { grid.apply_filter(&dtheta)? } else { dtheta };
    let stretch: Vec<f64> = vel.u_n.iter().zip(&theta_a).map(|(a, b)| a * b).collect();
    let dsigma = -grid.discrete_mean(&stretch);

    let slope = state.alpha0_slope(grid, filters.transport)?;
    let tangent = state.unit_tangent(grid);
    let mut imag_residue: f64 = 0.0;
    let dalpha0: Vec<f64> = (0..grid.n())
        .map(|i| {
            let z = slope[i] * ((vel.phi_s[i] - vel.u_s[i]) * tangent[i]) / (tangent[i] * sigma);
            imag_residue = imag_residue.max(z.im.abs());
            z.re
        })
        .collect();

    let report = RhsReport {
        density_residual: density.residual,
        density_method: density.method,
        density_iterations: density.iterations,
        tension: forcing.tension,
        max_normal_velocity: vel.u_n.iter().map(|v| v.abs()).fold(0.0, f64::max),
        imag_residue_alpha0: imag_residue,
        alpha0_min_slope: slope.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    Ok((
        StateDerivative {
            dtheta,
            dsigma,
            dalpha0,
            dtau_c: vel.v0_hat,
        },
        report,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Classical four-stage Runge-Kutta on all unknowns.
    Rk4,
    /// Runge-Kutta with an integrating factor for the `|k|^3` bending symbol.
    ImexBending,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TimeStep {
    /// Largest stable step scaled by `cfl`.
    Auto { cfl: f64 },
    Fixed { dt: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: TimeStep,
    pub t_end: f64,
    /// Spacing of the recorded snapshots; `t_end` when absent.
    pub snapshot_interval: Option<f64>,
}

impl IntegratorConfig {
    pub const DEFAULT_CFL: f64 = 0.25;

    pub fn new(scheme: Scheme, t_end: f64) -> Self {
        Self {
            scheme,
            dt: TimeStep::Auto { cfl: Self::DEFAULT_CFL },
            t_end,
            snapshot_interval: None,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = TimeStep::Fixed { dt };
        self
    }

    pub fn with_snapshots(mut self, interval: f64) -> Self {
        self.snapshot_interval = Some(interval);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok_dt = match self.dt {
            TimeStep::Auto { cfl } => cfl > 0.0 && cfl.is_finite(),
            TimeStep::Fixed { dt } => dt > 0.0 && dt.is_finite(),
        };
        if !ok_dt {
            return Err(Error::InvalidInput(format!("invalid time step setting {:?}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if let Some(iv) = self.snapshot_interval {
            if !(iv > 0.0 && iv.is_finite()) {
                return Err(Error::InvalidInput(format!("snapshot interval must be positive, got {iv}")));
            }
        }
        Ok(())
    }
}

/// Negative real-axis extent of the classical RK4 stability region.
pub const RK4_REAL_AXIS_LIMIT: f64 = 2.785;

/// Largest RK4 step for which the bending symbol stays inside the stability region.
pub fn rk4_bending_gate(model: &Model, sigma: f64) -> f64 {
    let kmax = (model.grid.n() / 2 - 1) as f64;
    let rate = model.bending_rate(sigma) * kmax.powi(3);
    if rate > 0.0 {
        RK4_REAL_AXIS_LIMIT / rate
    } else {
        f64::INFINITY
    }
}

/// Automatic step: `cfl h min(1, 1/rate)` for the advective and elastic terms and,
/// for explicit RK4, `cfl sigma^3 h^3 / (2 chi kappa_B)` for bending. `sigma` is bounded
/// below by the radius of the circle of equal area.
pub fn auto_dt(model: &Model, state: &InterfaceState, scheme: Scheme, cfl: f64) -> Result<f64> {
    let h = model.grid.h();
    let rate = model.flow.rate_scale().max(model.membrane.tension_scale());
    let mut dt = cfl * h * if rate > 1.0 { 1.0 / rate } else { 1.0 };
    if scheme == Scheme::Rk4 && model.membrane.kappa_b > 0.0 {
        let sigma = (state.enclosed_area(&model.grid)? / PI).sqrt().min(state.sigma);
        let bend = cfl * sigma.powi(3) * h.powi(3) / (2.0 * model.flow.chi() * model.membrane.kappa_b);
        dt = dt.min(bend);
    }
    Ok(dt)
}

fn advance(state: &InterfaceState, d: &StateDerivative, dt: f64) -> InterfaceState {
    InterfaceState {
        theta: state.theta.iter().zip(&d.dtheta).map(|(a, b)| a + dt * b).collect(),
        winding: state.winding,
        sigma: state.sigma + dt * d.dsigma,
        alpha0: state.alpha0.iter().zip(&d.dalpha0).map(|(a, b)| a + dt * b).collect(),
        tau_c: state.tau_c + d.dtau_c * dt,
        time: state.time + dt,
    }
}

fn is_finite_state(s: &InterfaceState) -> bool {
    s.sigma.is_finite()
        && s.tau_c.re.is_finite()
        && s.tau_c.im.is_finite()
        && s.theta.iter().chain(&s.alpha0).all(|v| v.is_finite())
}

/// Integrating factor `exp(c L)` acting on the tangent angle only.
struct Propagator<'a> {
    grid: &'a SpectralGrid,
    table: Vec<f64>,
}

impl Propagator<'_> {
    fn state(&self, s: &InterfaceState) -> Result<InterfaceState> {
        let mut out = s.clone();
        out.theta = self.grid.apply_real_symbol(&s.theta, &self.table)?;
        Ok(out)
    }

    fn deriv(&self, d: &StateDerivative) -> Result<StateDerivative> {
        let mut out = d.clone();
        out.dtheta = self.grid.apply_real_symbol(&d.dtheta, &self.table)?;
        Ok(out)
    }
}

/// `-chi kappa_B |k|^3 / (2 sigma^3)` by FFT slot; zero at `N/2`.
fn bending_symbol(model: &Model, sigma: f64) -> Vec<f64> {
    let rate = model.bending_rate(sigma);
    let half = model.grid.n() / 2;
    model
        .grid
        .wavenumber_table()
        .iter()
        .enumerate()
        .map(|(s, k)| if s == half { 0.0 } else { -rate * k.abs().powi(3) })
        .collect()
}

/// One step of size `dt`. Stage states are checked for finiteness and frame collapse.
pub fn step<F>(state: &InterfaceState, dt: f64, scheme: Scheme, model: &Model, mut rhs: F) -> Result<InterfaceState>
where
    F: FnMut(&InterfaceState) -> Result<StateDerivative>,
{
    let t0 = state.time;
    let mut eval = |s: &InterfaceState| -> Result<StateDerivative> {
        if !is_finite_state(s) {
            return Err(Error::BlowUp { last_valid_time: t0 });
        }
        if s.sigma <= 0.0 {
            return Err(Error::FrameCollapse { time: s.time, sigma: s.sigma });
        }
        let d = rhs(s)?;
        if !(d.dsigma.is_finite() && d.max_abs().is_finite()) {
            return Err(Error::BlowUp { last_valid_time: t0 });
        }
        Ok(d)
    };
    let next = match scheme {
        Scheme::Rk4 => {
            let k1 = eval(state)?;
            let k2 = eval(&advance(state, &k1, 0.5 * dt))?;
            let k3 = eval(&advance(state, &k2, 0.5 * dt))?;
            let k4 = eval(&advance(state, &k3, dt))?;
            let inc = StateDerivative::combine(&[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
            let mut out = advance(state, &inc, dt / 6.0);
            out.time = t0 + dt;
            out
        }
        Scheme::ImexBending => {
            let grid = &model.grid;
            let symbol = bending_symbol(model, state.sigma);
            let half = Propagator {
                grid,
                table: symbol.iter().map(|l| (0.5 * dt * l).exp()).collect(),
            };
            let full = Propagator {
                grid,
                table: symbol.iter().map(|l| (dt * l).exp()).collect(),
            };
            // nonlinear remainder F(u) - L u
            let mut remainder = |s: &InterfaceState| -> Result<StateDerivative> {
                let mut d = eval(s)?;
                let lp = grid.apply_real_symbol(&s.theta, &symbol)?;
                for (a, b) in d.dtheta.iter_mut().zip(&lp) {
                    *a -= b;
                }
                Ok(d)
            };
            let e_u = half.state(state)?;
            let n1 = remainder(state)?;
            let a = half.state(&advance(state, &n1, 0.5 * dt))?;
            let n2 = remainder(&a)?;
            let b = advance(&e_u, &n2, 0.5 * dt);
            let n3 = remainder(&b)?;
            let e2_u = full.state(state)?;
            let c = advance(&e2_u, &half.deriv(&n3)?, dt);
            let n4 = remainder(&c)?;
            let n23 = StateDerivative::combine(&[(2.0, &n2), (2.0, &n3)]);
            let inc = StateDerivative::combine(&[(1.0, &full.deriv(&n1)?), (1.0, &half.deriv(&n23)?), (1.0, &n4)]);
            let mut out = advance(&e2_u, &inc, dt / 6.0);
            out.time = t0 + dt;
            out
        }
    };
    if !is_finite_state(&next) {
        return Err(Error::BlowUp { last_valid_time: t0 });
    }
    if next.sigma <= 0.0 {
        return Err(Error::FrameCollapse {
            time: next.time,
            sigma: next.sigma,
        });
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub time: f64,
    pub area: f64,
    pub perimeter: f64,
    pub sigma: f64,
    pub high_mode_max: f64,
    pub density_residual: f64,
    pub alpha0_min_slope: f64,
    pub imag_residue_alpha0: f64,
    pub arclength_defect: f64,
}

impl Diagnostics {
    pub fn from_report(model: &Model, state: &InterfaceState, report: &RhsReport) -> Result<Self> {
        let grid = &model.grid;
        Ok(Self {
            time: state.time,
            area: state.enclosed_area(grid)?,
            perimeter: state.perimeter(),
            sigma: state.sigma,
            high_mode_max: state.high_mode_max(grid)?,
            density_residual: report.density_residual,
            alpha0_min_slope: report.alpha0_min_slope,
            imag_residue_alpha0: report.imag_residue_alpha0,
            arclength_defect: state.arclength_defect(grid)?,
        })
    }

    /// Diagnostics of `state`, evaluating the right-hand side once.
    pub fn measure(model: &Model, state: &InterfaceState) -> Result<(Self, RhsReport)> {
        let (_, report) = assemble_rhs(model, state)?;
        Ok((Self::from_report(model, state, &report)?, report))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub state: InterfaceState,
    pub tension: Vec<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    /// Set when the run stopped before `t_end`.
    pub failure: Option<Error>,
    pub dt: f64,
    pub steps: usize,
    /// Last state that was accepted.
    pub last_state: InterfaceState,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn final_snapshot(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

/// Time step actually used by `run`: the configured or automatic step, shrunk so that
/// an integer number of steps fits each snapshot interval.
pub fn resolve_dt(model: &Model, initial: &InterfaceState, cfg: &IntegratorConfig) -> Result<(f64, usize)> {
    cfg.validate()?;
    let max_dt = match cfg.dt {
        TimeStep::Auto { cfl } => auto_dt(model, initial, cfg.scheme, cfl)?,
        TimeStep::Fixed { dt } => dt,
    };
    let interval = cfg.snapshot_interval.unwrap_or(cfg.t_end);
    if interval <= 0.0 {
        return Ok((max_dt, 0));
    }
    let per = (interval / max_dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((interval / per as f64, per))
}

/// Integrates from `initial` to `cfg.t_end`, recording a snapshot at `t = 0` and every
/// snapshot interval. A failure ends the run and is returned with the partial trajectory.
pub fn run(model: &Model, initial: &InterfaceState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    model.validate()?;
    initial.validate(&model.grid)?;
    ensure_clockwise(initial)?;
    let (dt, per_interval) = resolve_dt(model, initial, cfg)?;
    if cfg.scheme == Scheme::Rk4 {
        let limit = rk4_bending_gate(model, initial.sigma.min((initial.enclosed_area(&model.grid)? / PI).sqrt()));
        if dt > limit {
            return Err(Error::TimeStepTooLarge { dt, limit });
        }
    }
    let interval = cfg.snapshot_interval.unwrap_or(cfg.t_end);
    let n_intervals = if cfg.t_end == 0.0 {
        0
    } else {
        (cfg.t_end / interval * (1.0 - 1e-12)).ceil() as usize
    };

    let record = |state: &InterfaceState| -> Result<Snapshot> {
        let (diagnostics, report) = Diagnostics::measure(model, state)?;
        Ok(Snapshot {
            state: state.clone(),
            tension: report.tension,
            diagnostics,
        })
    };

    let mut snapshots = vec![record(initial)?];
    let mut state = initial.clone();
    let mut steps = 0;
    let mut failure = None;
    'outer: for m in 1..=n_intervals {
        let t_target = (m as f64 * interval).min(cfg.t_end);
        let nsteps = if (t_target - state.time - interval).abs() < 1e-12 * interval.max(1.0) {
            per_interval
        } else {
            ((t_target - state.time) / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize
        };
        let local_dt = (t_target - state.time) / nsteps as f64;
        for _ in 0..nsteps {
            match step(&state, local_dt, cfg.scheme, model, |s| assemble_rhs(model, s).map(|(d, _)| d)) {
                Ok(next) => {
                    state = next;
                    steps += 1;
                }
                Err(e) => {
                    failure = Some(e);
                    break 'outer;
                }
            }
        }
        state.time = t_target;
        match record(&state) {
            Ok(s) => snapshots.push(s),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    Ok(Trajectory {
        snapshots,
        failure,
        dt,
        steps,
        last_state: state,
    })
}

/// Initial data for a membrane: `alpha0 = alpha`, reference `sigma0 = sigma`.
pub fn hookean_membrane(state: &InterfaceState, grid: &SpectralGrid, s0: f64, kappa_b: f64) -> MembraneParams {
    MembraneParams::hookean(vec![s0; grid.n()], kappa_b, state.sigma)
}

/// Current tension of `state`, with the transport filter setting of `model`.
pub fn tension_of(model: &Model, state: &InterfaceState) -> Result<Vec<f64>> {
    stretch_tension(state, &model.membrane, &model.grid, model.filters.transport)
}
