//! Input pulse synthesis.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::medium::{DetuningEnsemble, Grid};
use crate::{Error, Result};

/// Γ(1/4).
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;

/// Relative envelope magnitude allowed at the edges of the time window.
pub const WINDOW_EDGE_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// `A/(τ√(2π)) exp(−T²/2τ²)`.
    Gaussian,
    /// `A/(τΓ(1/4)) exp(−(T/2τ)⁴)`.
    Supergaussian,
    /// `A/(πτ) sech(T/τ)`.
    Sech,
    /// Fields taken from the analytic solution at the inflow depth; see
    /// [`crate::propagator::seed_with_analytic`].
    AnalyticSeed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Pump,
    Stokes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Pulse area in radians; may be negative.
    pub area: f64,
    pub width: f64,
    #[serde(default)]
    pub offset: f64,
    pub target: Target,
}

impl PulseSpec {
    pub fn new(shape: PulseShape, area: f64, width: f64, offset: f64, target: Target) -> Self {
        Self { shape, area, width, offset, target }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::Pulse(format!("width must be positive, got {}", self.width)));
        }
        if !self.area.is_finite() || !self.offset.is_finite() {
            return Err(Error::Pulse("area and offset must be finite".into()));
        }
        Ok(())
    }

    /// Peak amplitude.
    pub fn amplitude(&self) -> f64 {
        let tau = self.width;
        match self.shape {
            PulseShape::Gaussian => self.area / (tau * (2.0 * PI).sqrt()),
            PulseShape::Supergaussian => self.area / (tau * GAMMA_QUARTER),
            PulseShape::Sech | PulseShape::AnalyticSeed => self.area / (PI * tau),
        }
    }

    /// Unit-peak profile at time `t`.
    fn profile(&self, t: f64) -> f64 {
        let x = (t - self.offset) / self.width;
        match self.shape {
            PulseShape::Gaussian => (-0.5 * x * x).exp(),
            PulseShape::Supergaussian => (-(0.5 * x).powi(4)).exp(),
            PulseShape::Sech | PulseShape::AnalyticSeed => {
                let ax = x.abs();
                2.0 * (-ax).exp() / (1.0 + (-2.0 * ax).exp())
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude() * self.profile(t)
    }
}

/// Samples `spec` on the grid's time axis.
pub fn synth_input(spec: &PulseSpec, grid: &Grid) -> Result<Vec<C64>> {
    spec.validate()?;
    if spec.shape == PulseShape::AnalyticSeed {
        return Err(Error::Pulse(
            "analytic_seed envelopes come from the analytic solution, not a pulse formula".into(),
        ));
    }
    let edge = spec.profile(grid.t_min).max(spec.profile(grid.t_max));
    if edge > WINDOW_EDGE_LIMIT {
        return Err(Error::WindowTooNarrow { edge, limit: WINDOW_EDGE_LIMIT });
    }
    Ok(grid.times().into_iter().map(|t| C64::new(spec.value(t), 0.0)).collect())
}

/// Sums the pump and Stokes pulses of `specs` into a field pair.
pub fn synth_fields(specs: &[PulseSpec], grid: &Grid) -> Result<(Vec<C64>, Vec<C64>)> {
    let mut a = vec![C64::new(0.0, 0.0); grid.n_t];
    let mut b = a.clone();
    for s in specs {
        let f = synth_input(s, grid)?;
        let dst = match s.target {
            Target::Pump => &mut a,
            Target::Stokes => &mut b,
        };
        for (d, v) in dst.iter_mut().zip(f) {
            *d += v;
        }
    }
    Ok((a, b))
}

/// Coupling `μ` that gives input-regime simultons of width `tau` the group
/// velocity ratio `target_vg = (1 + ζκτ)⁻¹`.
pub fn resolve_mu_for_velocity(target_vg: f64, tau: f64, zeta: f64, ensemble: &DetuningEnsemble) -> Result<f64> {
    if !(target_vg > 0.0 && target_vg < 1.0) {
        return Err(Error::UnreachableVelocity(target_vg));
    }
    if !(tau > 0.0) || !(zeta > 0.0) {
        return Err(Error::Pulse("width and interaction parameter must be positive".into()));
    }
    let kappa = (1.0 / target_vg - 1.0) / (zeta * tau);
    Ok(2.0 * kappa / (tau * ensemble.lorentz_overlap(tau)))
}
