//! Run configuration and its translation into a propagation scenario.

use mixonium::analytic::AnalyticParams;
use mixonium::medium::{
    beer_coefficient, kappa, DetuningEnsemble, Grid, MediumPreparation, QuadratureRule, DEFAULT_NODES,
};
use mixonium::propagator::{seed_with_analytic, Fields, Scenario};
use mixonium::pulse::{resolve_mu_for_velocity, PulseShape, PulseSpec, Target};
use mixonium::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preparation: PreparationBlock,
    pub medium: MediumBlock,
    pub grid: GridBlock,
    #[serde(rename = "pulse", default)]
    pub pulses: Vec<PulseBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreparationBlock {
    pub alpha_sq: f64,
    /// Defaults to `1 − α²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_sq: Option<f64>,
    pub lambda: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    GaussHermite,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Input-regime group velocity ratio `v_g/c` from which `μ` is resolved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_vg: Option<f64>,
    /// Interaction parameter used when resolving `target_vg`; defaults to the
    /// preparation's own `ζ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_zeta: Option<f64>,
    /// Pulse width `τ` defining `κ`; defaults to the first pulse's width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_width: Option<f64>,
    #[serde(default = "one")]
    pub t2_star: f64,
    #[serde(default)]
    pub quadrature: Quadrature,
    /// Gauss–Hermite node count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    /// Uniform grid spacing; defaults to `2π/(1.1·window)`, which keeps the
    /// rephasing time of the discrete line beyond the time window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// Uniform grid half-width in units of `1/T₂*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZUnit {
    /// Absorption depths `κZ`.
    #[default]
    Absorption,
    /// Raw propagation coordinate.
    Absolute,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_t: Option<usize>,
    #[serde(default)]
    pub z_min: f64,
    pub z_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_z: Option<usize>,
    #[serde(default)]
    pub z_unit: ZUnit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    pub shape: PulseShape,
    /// Area in radians.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    /// Area in units of π.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_pi: Option<f64>,
    pub width: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: String,
    /// Z steps between snapshot files.
    #[serde(default = "one_usize")]
    pub snapshot_stride: usize,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    /// Times at which the analytic export tabulates spatial profiles.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frame_times: Vec<f64>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            snapshot_stride: 1,
            observables: default_observables(),
            frame_times: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Areas,
    LineCenter,
    Fits,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn default_directory() -> String {
    "run".into()
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Areas, Observable::LineCenter, Observable::Fits]
}

/// Constants derived from a configuration, recorded in every manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub zeta: f64,
    pub theta: f64,
    pub tan_theta: f64,
    pub mu: f64,
    pub kappa: f64,
    pub alpha_d: f64,
    pub reference_width: f64,
    pub t2_star: f64,
    pub quadrature: QuadratureRule,
    pub detuning_nodes: usize,
    pub dt: f64,
    pub dz: f64,
    pub n_t: usize,
    pub n_z: usize,
    pub z_min: f64,
    pub z_max: f64,
}

/// A configuration resolved into core types.
pub struct Resolved {
    pub prep: MediumPreparation,
    pub ensemble: DetuningEnsemble,
    pub grid: Grid,
    pub mu: f64,
    pub derived: Derived,
    pub pulses: Vec<PulseSpec>,
    pub seeded: bool,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Reads a TOML configuration, or the configuration recorded in a manifest.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let cfg = v.get("config").ok_or_else(|| bad(format!("{} has no config entry", path.display())))?;
        return serde_json::from_value(cfg.clone()).map_err(|e| bad(format!("{}: {e}", path.display())));
    }
    parse(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

fn steps(span: f64, step: Option<f64>, count: Option<usize>, what: &str) -> Result<usize, CliError> {
    match (step, count) {
        (Some(h), None) if h > 0.0 && h.is_finite() => Ok((span / h).round() as usize + 1),
        (None, Some(n)) => Ok(n),
        (Some(h), None) => Err(bad(format!("{what} step must be positive, got {h}"))),
        _ => Err(bad(format!("give exactly one of the {what} step and point count"))),
    }
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let p = &self.preparation;
        let prep = MediumPreparation::new(p.alpha_sq, p.beta_sq.unwrap_or(1.0 - p.alpha_sq), p.lambda, p.phi)?;

        let m = &self.medium;
        let g = &self.grid;
        let rule = match m.quadrature {
            Quadrature::GaussHermite => QuadratureRule::GaussHermite { nodes: m.nodes.unwrap_or(DEFAULT_NODES) },
            Quadrature::Uniform => QuadratureRule::Uniform {
                spacing: m.spacing.unwrap_or(2.0 * PI / (1.1 * (g.t_max - g.t_min))),
                cutoff: m.cutoff.unwrap_or(6.0),
            },
        };
        let ensemble = DetuningEnsemble::new(m.t2_star, rule)?;

        let tau = m
            .reference_width
            .or_else(|| self.pulses.first().map(|b| b.width))
            .ok_or_else(|| bad("no pulses and no medium.reference_width"))?;
        let mu = match (m.mu, m.target_vg) {
            (Some(mu), None) => mu,
            (None, Some(v)) => resolve_mu_for_velocity(v, tau, m.velocity_zeta.unwrap_or(prep.zeta), &ensemble)?,
            _ => return Err(bad("give exactly one of medium.mu and medium.target_vg")),
        };
        let k = kappa(mu, tau, &ensemble);

        let scale = match g.z_unit {
            ZUnit::Absolute => 1.0,
            ZUnit::Absorption if k > 0.0 => 1.0 / k,
            ZUnit::Absorption => return Err(bad("absorption-depth units need a nonzero coupling")),
        };
        let n_t = steps(g.t_max - g.t_min, g.dt, g.n_t, "time")?;
        let n_z = steps(g.z_max - g.z_min, g.dz, g.n_z, "depth")?;
        let grid = Grid::new(g.t_min, g.t_max, n_t, g.z_min * scale, g.z_max * scale, n_z)?;

        let seeded = self.pulses.iter().any(|b| b.shape == PulseShape::AnalyticSeed);
        if seeded && self.pulses.len() != 1 {
            return Err(bad("an analytic_seed pulse must be the only pulse block"));
        }
        let pulses = if seeded {
            Vec::new()
        } else {
            self.pulses.iter().map(PulseBlock::spec).collect::<Result<Vec<_>, _>>()?
        };

        let derived = Derived {
            zeta: prep.zeta,
            theta: prep.sin_theta.atan2(prep.cos_theta),
            tan_theta: prep.tan_theta(),
            mu,
            kappa: k,
            alpha_d: beer_coefficient(mu, m.t2_star),
            reference_width: tau,
            t2_star: m.t2_star,
            quadrature: rule,
            detuning_nodes: ensemble.len(),
            dt: grid.dt(),
            dz: grid.dz(),
            n_t,
            n_z,
            z_min: grid.z_min,
            z_max: grid.z_max,
        };
        Ok(Resolved { prep, ensemble, grid, mu, derived, pulses, seeded })
    }

    pub fn observes(&self, o: Observable) -> bool {
        self.output.observables.contains(&o)
    }
}

impl PulseBlock {
    fn spec(&self) -> Result<PulseSpec, CliError> {
        let area = match (self.area, self.area_pi) {
            (Some(a), None) => a,
            (None, Some(a)) => a * PI,
            _ => return Err(bad("give exactly one of pulse.area and pulse.area_pi")),
        };
        let target = self.target.ok_or_else(|| bad("pulse.target is required"))?;
        let spec = PulseSpec::new(self.shape, area, self.width, self.offset, target);
        spec.validate()?;
        Ok(spec)
    }
}

impl Resolved {
    pub fn analytic_params(&self) -> AnalyticParams {
        AnalyticParams::from_medium(self.prep, self.mu, self.derived.reference_width, &self.ensemble)
    }

    /// The propagation scenario, with any warnings raised while building it.
    pub fn scenario(&self, cfg: &RunConfig) -> Result<(Scenario, Vec<String>), CliError> {
        let mut warnings = Vec::new();
        let sc = if self.seeded {
            let n = self.grid.n_t;
            let empty = Fields::new(vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n])?;
            let sc = Scenario::with_fields(self.grid, self.mu, self.prep, self.ensemble.clone(), empty)?;
            let (sc, w) = seed_with_analytic(sc, &self.analytic_params(), self.grid.z_min)?;
            warnings.extend(w);
            sc
        } else {
            Scenario::new(self.grid, self.mu, self.prep, self.ensemble.clone(), &self.pulses)?
        };
        let mut sc = sc.with_stride(cfg.output.snapshot_stride);
        sc.line_center_observables = cfg.observes(Observable::LineCenter);
        Ok((sc, warnings))
    }
}
