//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Every key is optional; the resolved
//! values, defaults included, are written to the run manifest.
//!
//! ```text
//! n = 64
//! shape = circle                 # circle | ellipse | fourier
//! shape.radius = 1.0
//! shape.a = 1.2                  # ellipse semi-axes
//! shape.b = 0.8
//! shape.modes = 2:0.1:0, 3:0:0.05 # fourier: k:re:im of the position coefficients
//! shape.orientation = clockwise
//! flow.q = 1.0
//! flow.b = 0.0
//! flow.g = 0.0
//! flow.lambda = 0.0
//! membrane.tension = hookean     # hookean | constant
//! membrane.s0 = 1.0              # initial (hookean) or constant tension
//! membrane.s0_cos = 2:0.3        # k:amplitude cosine terms added to s0
//! membrane.kappa_b = 0.0
//! filter.mu = 0.6666666666666666
//! filter.forcing = true
//! filter.density = true
//! filter.transport = true
//! filter.hilbert = false
//! filter.rate = false
//! solver.tol = 1e-13
//! solver.max_iter = 200
//! solver.deflation = auto        # auto | on | off
//! solver.kernel_filter = auto    # auto | on | off
//! integrator.scheme = rk4        # rk4 | imex
//! integrator.cfl = 0.25          # or integrator.dt = 1e-3
//! integrator.t_end = 1.0
//! output.dir = run
//! output.interval = 0.5
//! output.format = csv
//! diagnose.disable = forcing, density
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{Deflation, FlowConfig, KernelFilter, SolverConfig};
use crate::error::{Error, Result};
use crate::evolution::{FilterSites, IntegratorConfig, Model, Scheme, TimeStep};
use crate::interface::{resample_equal_arclength, FourierMode, InterfaceState, Orientation, ShapeKind, ShapeSpec};
use crate::membrane::MembraneParams;
use crate::spectral::{FilterSpec, SpectralGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensionMode {
    Hookean,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembraneConfig {
    pub tension: TensionMode,
    pub s0: f64,
    /// `(k, a)` pairs: `S0(alpha) = s0 + sum a cos(k alpha)`.
    pub s0_cos: Vec<(u32, f64)>,
    pub kappa_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub mu: f64,
    pub sites: FilterSites,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: String,
    pub interval: f64,
    pub format: OutputFormat,
}

/// Filter sites switched off in the comparison run of `diagnose`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseConfig {
    pub disable: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub shape: ShapeSpec,
    pub flow: FlowConfig,
    pub membrane: MembraneConfig,
    pub filter: FilterConfig,
    pub solver: SolverConfig,
    pub integrator: IntegratorConfig,
    pub output: OutputConfig,
    pub diagnose: DiagnoseConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 64,
            shape: ShapeSpec::circle(1.0),
            flow: FlowConfig::quiescent(1.0),
            membrane: MembraneConfig {
                tension: TensionMode::Constant,
                s0: 1.0,
                s0_cos: Vec::new(),
                kappa_b: 0.0,
            },
            filter: FilterConfig {
                mu: FilterSpec::DEFAULT_MU,
                sites: FilterSites::default(),
            },
            solver: SolverConfig::default(),
            integrator: IntegratorConfig::new(Scheme::Rk4, 1.0),
            output: OutputConfig {
                dir: "run".into(),
                interval: 1.0,
                format: OutputFormat::Csv,
            },
            diagnose: DiagnoseConfig {
                disable: vec!["forcing".into(), "density".into()],
            },
        }
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn f64(&self) -> Result<f64> {
        let v: f64 = self.value.parse().map_err(|_| self.err(format!("expected a number, got `{}`", self.value)))?;
        if !v.is_finite() {
            return Err(self.err("value must be finite"));
        }
        Ok(v)
    }

    fn positive(&self) -> Result<f64> {
        let v = self.f64()?;
        if v <= 0.0 {
            return Err(self.err(format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected a nonnegative integer, got `{}`", self.value)))
    }

    fn bool(&self) -> Result<bool> {
        match self.value {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            v => Err(self.err(format!("expected true or false, got `{v}`"))),
        }
    }

    fn list(&self) -> Vec<&str> {
        self.value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    }

    fn triple_list(&self, arity: usize) -> Result<Vec<Vec<f64>>> {
        self.list()
            .into_iter()
            .map(|item| {
                let parts: Vec<&str> = item.split(':').map(str::trim).collect();
                if parts.len() != arity {
                    return Err(self.err(format!("`{item}` should have {arity} colon-separated fields")));
                }
                parts
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| self.err(format!("bad number `{p}` in `{item}`"))))
                    .collect()
            })
            .collect()
    }
}

fn tri_state<T>(e: &Entry, auto: T, on: T, off: T) -> Result<T> {
    match e.value {
        "auto" => Ok(auto),
        "on" | "true" => Ok(on),
        "off" | "false" => Ok(off),
        v => Err(e.err(format!("expected auto, on or off, got `{v}`"))),
    }
}

const FILTER_SITE_NAMES: [&str; 5] = ["forcing", "density", "transport", "hilbert", "rate"];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            key: String::new(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line,
                    key: content.to_string(),
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = entries.get(key) {
                return Err(Error::Config {
                    line,
                    key: key.to_string(),
                    message: format!("duplicate key, first set on line {}", prev.line),
                });
            }
            entries.insert(key, Entry { line, key, value });
        }

        let mut cfg = RunConfig::default();
        let mut shape_kind = "circle";
        let mut shape_line = 0;
        let (mut radius, mut a, mut b) = (1.0, 1.0, 1.0);
        let mut modes = Vec::new();
        let (mut cfl, mut dt) = (None, None);
        for e in entries.values() {
            match e.key {
                "n" => {
                    let n: i64 = e.value.parse().map_err(|_| e.err(format!("expected an integer, got `{}`", e.value)))?;
                    if n < 8 || n % 2 != 0 {
                        return Err(e.err(format!("grid size must be even and at least 8, got {n}")));
                    }
                    cfg.n = n as usize;
                }
                "shape" => {
                    if !matches!(e.value, "circle" | "ellipse" | "fourier") {
                        return Err(e.err(format!("unknown shape `{}`", e.value)));
                    }
                    shape_kind = e.value;
                    shape_line = e.line;
                }
                "shape.radius" => radius = e.positive()?,
                "shape.a" => a = e.positive()?,
                "shape.b" => b = e.positive()?,
                "shape.modes" => {
                    modes = e
                        .triple_list(3)?
                        .into_iter()
                        .map(|v| FourierMode {
                            k: v[0] as i32,
                            coeff: (v[1], v[2]),
                        })
                        .collect()
                }
                "shape.orientation" => {
                    cfg.shape.orientation = match e.value {
                        "clockwise" => Orientation::Clockwise,
                        "counterclockwise" => Orientation::Counterclockwise,
                        v => return Err(e.err(format!("unknown orientation `{v}`"))),
                    }
                }
                "flow.q" => cfg.flow.q = e.f64()?,
                "flow.b" => cfg.flow.b = e.f64()?,
                "flow.g" => cfg.flow.g = e.f64()?,
                "flow.lambda" => {
                    let v = e.f64()?;
                    if v < 0.0 {
                        return Err(e.err(format!("viscosity ratio must be nonnegative, got {v}")));
                    }
                    cfg.flow.lambda = v;
                }
                "membrane.tension" => {
                    cfg.membrane.tension = match e.value {
                        "hookean" => TensionMode::Hookean,
                        "constant" => TensionMode::Constant,
                        v => return Err(e.err(format!("unknown tension mode `{v}`"))),
                    }
                }
                "membrane.s0" => cfg.membrane.s0 = e.f64()?,
                "membrane.s0_cos" => {
                    cfg.membrane.s0_cos = e
                        .triple_list(2)?
                        .into_iter()
                        .map(|v| {
                            if v[0] < 1.0 || v[0].fract() != 0.0 {
                                return Err(e.err(format!("wavenumber must be a positive integer, got {}", v[0])));
                            }
                            Ok((v[0] as u32, v[1]))
                        })
                        .collect::<Result<_>>()?
                }
                "membrane.kappa_b" => {
                    let v = e.f64()?;
                    if v < 0.0 {
                        return Err(e.err(format!("bending modulus must be nonnegative, got {v}")));
                    }
                    cfg.membrane.kappa_b = v;
                }
                "filter.mu" => {
                    let v = e.f64()?;
                    FilterSpec::new(v).map_err(|err| e.err(err.to_string()))?;
                    cfg.filter.mu = v;
                }
                "filter.forcing" => cfg.filter.sites.forcing = e.bool()?,
                "filter.density" => cfg.filter.sites.density = e.bool()?,
                "filter.transport" => cfg.filter.sites.transport = e.bool()?,
                "filter.hilbert" => cfg.filter.sites.hilbert = e.bool()?,
                "filter.rate" => cfg.filter.sites.rate = e.bool()?,
                "solver.tol" => cfg.solver.tol = e.positive()?,
                "solver.max_iter" => cfg.solver.max_iter = e.usize()?,
                "solver.deflation" => cfg.solver.deflation = tri_state(e, Deflation::Auto, Deflation::On, Deflation::Off)?,
                "solver.kernel_filter" => {
                    cfg.solver.kernel_filter = tri_state(e, KernelFilter::Auto, KernelFilter::On, KernelFilter::Off)?
                }
                "integrator.scheme" => {
                    cfg.integrator.scheme = match e.value {
                        "rk4" => Scheme::Rk4,
                        "imex" => Scheme::ImexBending,
                        v => return Err(e.err(format!("unknown scheme `{v}`"))),
                    }
                }
                "integrator.cfl" => cfl = Some(e.positive()?),
                "integrator.dt" => dt = Some(e.positive()?),
                "integrator.t_end" => {
                    let v = e.f64()?;
                    if v < 0.0 {
                        return Err(e.err(format!("t_end must be nonnegative, got {v}")));
                    }
                    cfg.integrator.t_end = v;
                }
                "output.dir" => {
                    if e.value.is_empty() {
                        return Err(e.err("output directory must not be empty"));
                    }
                    cfg.output.dir = e.value.to_string();
                }
                "output.interval" => cfg.output.interval = e.positive()?,
                "output.format" => {
                    cfg.output.format = match e.value {
                        "csv" => OutputFormat::Csv,
                        v => return Err(e.err(format!("unsupported format `{v}`"))),
                    }
                }
                "diagnose.disable" => {
                    let names = e.list();
                    if let Some(bad) = names.iter().find(|s| !FILTER_SITE_NAMES.contains(s)) {
                        return Err(e.err(format!("unknown filter site `{bad}`")));
                    }
                    cfg.diagnose.disable = names.into_iter().map(String::from).collect();
                }
                _ => return Err(e.err("unknown key")),
            }
        }

        let shape_err = |message: String| Error::Config {
            line: shape_line,
            key: "shape".into(),
            message,
        };
        cfg.shape.kind = match shape_kind {
            "circle" => ShapeKind::Circle { radius },
            "ellipse" => ShapeKind::Ellipse { a, b },
            _ => {
                if modes.is_empty() {
                    return Err(shape_err("fourier shape needs shape.modes".into()));
                }
                ShapeKind::Fourier { modes }
            }
        };
        cfg.integrator.dt = match (cfl, dt) {
            (Some(_), Some(_)) => {
                let line = entries["integrator.dt"].line;
                return Err(Error::Config {
                    line,
                    key: "integrator.dt".into(),
                    message: "set either integrator.cfl or integrator.dt, not both".into(),
                });
            }
            (_, Some(dt)) => TimeStep::Fixed { dt },
            (Some(cfl), None) => TimeStep::Auto { cfl },
            (None, None) => TimeStep::Auto {
                cfl: IntegratorConfig::DEFAULT_CFL,
            },
        };
        cfg.integrator.snapshot_interval = Some(cfg.output.interval);
        Ok(cfg)
    }

    /// Grid with the configured filter cutoff.
    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::with_filter(self.n, FilterSpec::new(self.filter.mu)?)
    }

    pub fn initial_state(&self, grid: &SpectralGrid) -> Result<InterfaceState> {
        resample_equal_arclength(&self.shape, grid)
    }

    pub fn membrane_params(&self, grid: &SpectralGrid, initial: &InterfaceState) -> MembraneParams {
        match self.membrane.tension {
            TensionMode::Constant => MembraneParams::constant(self.membrane.s0, self.membrane.kappa_b, initial.sigma),
            TensionMode::Hookean => {
                let s0 = grid
                    .nodes()
                    .iter()
                    .map(|a| {
                        self.membrane.s0
                            + self
                                .membrane
                                .s0_cos
                                .iter()
                                .map(|(k, amp)| amp * (*k as f64 * a).cos())
                                .sum::<f64>()
                    })
                    .collect();
                MembraneParams::hookean(s0, self.membrane.kappa_b, initial.sigma)
            }
        }
    }

    /// Grid, model and initial state at this configuration's resolution.
    pub fn build(&self) -> Result<(Model, InterfaceState)> {
        self.build_at(self.n)
    }

    pub fn build_at(&self, n: usize) -> Result<(Model, InterfaceState)> {
        let mut cfg = self.clone();
        cfg.n = n;
        let grid = cfg.grid()?;
        let initial = cfg.initial_state(&grid)?;
        let model = Model {
            membrane: cfg.membrane_params(&grid, &initial),
            grid,
            flow: cfg.flow,
            solver: cfg.solver,
            filters: cfg.filter.sites,
        };
        model.validate()?;
        cfg.integrator.validate()?;
        Ok((model, initial))
    }

    /// Copy with the sites listed in `diagnose.disable` switched off.
    pub fn comparison_variant(&self) -> RunConfig {
        let mut out = self.clone();
        for name in &self.diagnose.disable {
            let site = &mut out.filter.sites;
            match name.as_str() {
                "forcing" => site.forcing = false,
                "density" => site.density = false,
                "transport" => site.transport = false,
                "hilbert" => site.hilbert = false,
                "rate" => site.rate = false,
                _ => {}
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_text() {
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig {
            integrator: RunConfig::default().integrator.with_snapshots(1.0),
            ..RunConfig::default()
        });
    }

    #[test]
    fn full_capsule_config() {
        let text = "n = 128\nshape = ellipse\nshape.a = 1.2\nshape.b = 0.8\nflow.q = 1\n\
                    membrane.tension = hookean\nmembrane.s0 = 1\nmembrane.s0_cos = 2:0.25\n\
                    membrane.kappa_b = 0.05\nintegrator.dt = 1e-3\nintegrator.t_end = 0.5\n\
                    output.interval = 0.25\nsolver.deflation = off\nfilter.rate = true\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.n, 128);
        assert_eq!(cfg.shape.kind, ShapeKind::Ellipse { a: 1.2, b: 0.8 });
        assert_eq!(cfg.membrane.s0_cos, vec![(2, 0.25)]);
        assert_eq!(cfg.integrator.dt, TimeStep::Fixed { dt: 1e-3 });
        assert_eq!(cfg.solver.deflation, Deflation::Off);
        assert!(cfg.filter.sites.rate);
        let (model, initial) = cfg.build().unwrap();
        assert_eq!(model.grid.n(), 128);
        assert!((model.membrane.sigma0 - initial.sigma).abs() == 0.0);
    }

    fn config_error(text: &str) -> (usize, String) {
        match RunConfig::parse(text) {
            Err(Error::Config { line, key, .. }) => (line, key),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_and_key() {
        assert_eq!(config_error("n = 64\nn = -32\n"), (2, "n".into()));
        assert_eq!(config_error("n = -32\n"), (1, "n".into()));
        assert_eq!(config_error("\nflow.q = fast\n"), (2, "flow.q".into()));
        assert_eq!(config_error("flow.typo = 1\n"), (1, "flow.typo".into()));
        assert_eq!(config_error("just words\n"), (1, "just words".into()));
        assert_eq!(config_error("shape = fourier\n"), (1, "shape".into()));
        assert_eq!(config_error("integrator.cfl = 0.1\nintegrator.dt = 0.1\n"), (2, "integrator.dt".into()));
        assert_eq!(config_error("diagnose.disable = forcing, bogus\n"), (1, "diagnose.disable".into()));
        assert_eq!(config_error("n = 33\n"), (1, "n".into()));
    }
}
