//! Membrane tension and the interfacial forcing `g` of the density equation.

use serde::{Deserialize, Serialize};

use crate::density::FlowConfig;
use crate::error::{Error, Result};
use crate::interface::InterfaceState;
use crate::spectral::{SpectralGrid, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TensionLaw {
    /// Linear elastic membrane; `s0` is the initial tension at the t = 0 nodes.
    Hookean { s0: Vec<f64> },
    /// Constant interfacial tension (drop or bubble).
    Constant { tension: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembraneParams {
    pub kappa_b: f64,
    pub tension: TensionLaw,
    /// Arclength per unit `alpha` of the reference (t = 0) configuration.
    pub sigma0: f64,
}

impl MembraneParams {
    pub fn constant(tension: f64, kappa_b: f64, sigma0: f64) -> Self {
        Self {
            kappa_b,
            tension: TensionLaw::Constant { tension },
            sigma0,
        }
    }

    pub fn hookean(s0: Vec<f64>, kappa_b: f64, sigma0: f64) -> Self {
        Self {
            kappa_b,
            tension: TensionLaw::Hookean { s0 },
            sigma0,
        }
    }

    pub fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        if !(self.kappa_b >= 0.0 && self.kappa_b.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bending modulus must be nonnegative, got {}",
                self.kappa_b
            )));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "reference sigma must be positive, got {}",
                self.sigma0
            )));
        }
        match &self.tension {
            TensionLaw::Constant { tension } => {
                if !tension.is_finite() {
                    return Err(Error::InvalidInput("tension must be finite".into()));
                }
            }
            TensionLaw::Hookean { s0 } => {
                grid.check_len(s0)?;
                if let Some((j, v)) = s0.iter().enumerate().find(|(_, v)| !(1.0 + **v > 0.0)) {
                    return Err(Error::InvalidInput(format!(
                        "initial stretch 1 + S0 must be positive, got {} at node {j}",
                        1.0 + v
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rough magnitude of the tension, used for time-step selection.
    pub fn tension_scale(&self) -> f64 {
        match &self.tension {
            TensionLaw::Constant { tension } => tension.abs(),
            TensionLaw::Hookean { s0 } => s0.iter().map(|v| 1.0 + v.abs()).fold(0.0, f64::max),
        }
    }
}

/// Hookean tension from the backward map:
/// `S_i = sigma / (sigma0 (D alpha0)_i) (1 + S0(alpha0_i)) - 1`.
///
/// `D` is `D_h` when `filtered_slope` is set, `S_h` otherwise. `S0` is evaluated at
/// `alpha0_i` by trigonometric interpolation of the initial nodal values.
/// Constant-tension membranes return the constant and ignore the map.
pub fn stretch_tension(
    state: &InterfaceState,
    params: &MembraneParams,
    grid: &SpectralGrid,
    filtered_slope: bool,
) -> Result<Vec<f64>> {
    match &params.tension {
        TensionLaw::Constant { tension } => Ok(vec![*tension; grid.n()]),
        TensionLaw::Hookean { s0 } => {
            let slope = state.alpha0_slope(grid, filtered_slope)?;
            if let Some((node, &s)) = slope.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
                return Err(Error::MapDegeneracy { node, slope: s });
            }
            let s0_at = grid.interpolate_shifted(s0, &state.alpha0)?;
            let ratio = state.sigma / params.sigma0;
            Ok(slope
                .iter()
                .zip(&s0_at)
                .map(|(d, s)| ratio / d * (1.0 + s) - 1.0)
                .collect())
        }
    }
}

/// The discrete forcing
/// `g_i = -(chi/2)(S_i e^{i theta_i} - (kappa_B / sigma^2)(D theta)_i i e^{i theta_i})
///        - beta (B - iQ) conj(tau_i) - 2 beta H`
/// with `D = S_h^2` or, when `filtered`, `D_h^2`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_forcing(
    state: &InterfaceState,
    grid: &SpectralGrid,
    tau: &[C64],
    tension: &[f64],
    kappa_b: f64,
    flow: &FlowConfig,
    h_term: C64,
    filtered: bool,
) -> Result<Vec<C64>> {
    grid.check_len(tau)?;
    grid.check_len(tension)?;
    // the linear part W alpha of theta has no second derivative
    let theta_aa = if filtered {
        grid.filtered_second_derivative(&state.theta)?
    } else {
        grid.spectral_second_derivative(&state.theta)?
    };
    let chi = flow.chi();
    let beta = flow.beta();
    let bend = kappa_b / (state.sigma * state.sigma);
    let far = C64::new(flow.b, -flow.q) * beta;
    let constant = h_term * (2.0 * beta);
    Ok(state
        .unit_tangent(grid)
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let stress = e * tension[i] - C64::new(0.0, bend * theta_aa[i]) * e;
            -stress * (0.5 * chi) - far * tau[i].conj() - constant
        })
        .collect())
}

/// Tension together with the plain and filtered forcing.
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing {
    pub g: Vec<C64>,
    /// `g^p`: the bending term uses `D_h^2` in place of `S_h^2`.
    pub g_filtered: Vec<C64>,
    pub tension: Vec<f64>,
}

impl Forcing {
    /// With `filter_forcing` unset the filtered forcing is replaced by `g`.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        state: &InterfaceState,
        grid: &SpectralGrid,
        tau: &[C64],
        membrane: &MembraneParams,
        flow: &FlowConfig,
        h_term: C64,
        filter_forcing: bool,
        filter_transport: bool,
    ) -> Result<Self> {
        let tension = stretch_tension(state, membrane, grid, filter_transport)?;
        let g = assemble_forcing(state, grid, tau, &tension, membrane.kappa_b, flow, h_term, false)?;
        let g_filtered = if filter_forcing {
            assemble_forcing(state, grid, tau, &tension, membrane.kappa_b, flow, h_term, true)?
        } else {
            g.clone()
        };
        Ok(Self {
            g,
            g_filtered,
            tension,
        })
    }
}
