//! Post-processing of field series and trajectories.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::medium::MediumPreparation;
use crate::propagator::Snapshot;
use crate::series::{derivative, max_abs, require_real, trapezoid, trapezoid_c};
use crate::{Error, Result};

/// Pulse areas at one depth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaRecord {
    pub z: f64,
    /// Signed areas `∫Re Ω dT`.
    pub a_a: f64,
    pub a_b: f64,
    /// `∫Im Ω dT`; zero for real envelopes.
    pub a_a_im: f64,
    pub a_b_im: f64,
    /// `∫Ω_T dT`.
    pub a_total: f64,
}

impl AreaRecord {
    pub fn from_fields(z: f64, omega_a: &[C64], omega_b: &[C64], dt: f64) -> Self {
        let a = complex_pulse_area(omega_a, dt);
        let b = complex_pulse_area(omega_b, dt);
        Self { z, a_a: a.re, a_b: b.re, a_a_im: a.im, a_b_im: b.im, a_total: total_area(omega_a, omega_b, dt) }
    }
}

/// Signed area of a real envelope (trapezoid rule).
pub fn pulse_area(omega: &[C64], dt: f64) -> Result<f64> {
    Ok(trapezoid(&require_real(omega)?, dt))
}

/// `∫Ω dT` for a complex envelope.
pub fn complex_pulse_area(omega: &[C64], dt: f64) -> C64 {
    trapezoid_c(omega, dt)
}

/// Area of the total Rabi frequency, `∫(|Ω_a|² + |Ω_b|²)^½ dT`.
pub fn total_area(omega_a: &[C64], omega_b: &[C64], dt: f64) -> f64 {
    let wt: Vec<f64> = omega_a.iter().zip(omega_b).map(|(a, b)| a.norm().hypot(b.norm())).collect();
    trapezoid(&wt, dt)
}

/// Relative support threshold used by the matching metrics.
pub const SUPPORT_MASK: f64 = 1e-3;

struct Slopes {
    a: Vec<f64>,
    b: Vec<f64>,
    da: Vec<f64>,
    db: Vec<f64>,
    mask: Vec<bool>,
    peak: f64,
}

fn slopes(omega_a: &[C64], omega_b: &[C64], dt: f64) -> Result<Slopes> {
    if omega_a.len() != omega_b.len() {
        return Err(Error::LengthMismatch { expected: omega_a.len(), found: omega_b.len() });
    }
    let a = require_real(omega_a)?;
    let b = require_real(omega_b)?;
    let (da, db) = (derivative(&a, dt), derivative(&b, dt));
    let wt: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect();
    let peak = wt.iter().copied().fold(0.0, f64::max);
    let mask = wt.iter().map(|w| peak > 0.0 && *w > SUPPORT_MASK * peak).collect();
    Ok(Slopes { a, b, da, db, mask, peak })
}

/// Temporal mismatch of two real envelopes:
/// `τ · sup |Ω̇_a Ω_b − Ω_a Ω̇_b| / max(Ω_T)²` over samples where `Ω_T`
/// exceeds `1e-3` of its peak. Zero exactly when `Ω_a/Ω_b` is constant.
///
/// This is the slope of the ratio `Ω_a/Ω_b` weighted by `Ω_b²/max(Ω_T)²`.
/// The weight keeps the metric finite at common sign changes of matched
/// two-lobed pulses, where the bare ratio slope
/// ([`ratio_slope_metric`]) is dominated by sub-sample offsets between
/// the two zeros.
pub fn matching_metric(omega_a: &[C64], omega_b: &[C64], dt: f64, tau: f64) -> Result<f64> {
    let s = slopes(omega_a, omega_b, dt)?;
    let mut sup: f64 = 0.0;
    for j in 0..s.a.len() {
        if s.mask[j] {
            sup = sup.max((s.da[j] * s.b[j] - s.a[j] * s.db[j]).abs());
        }
    }
    Ok(if s.peak > 0.0 { tau * sup / (s.peak * s.peak) } else { 0.0 })
}

/// `τ · sup |∂(Ω_a/Ω_b)/∂T|` over the same support as [`matching_metric`].
pub fn ratio_slope_metric(omega_a: &[C64], omega_b: &[C64], dt: f64, tau: f64) -> Result<f64> {
    let s = slopes(omega_a, omega_b, dt)?;
    let mut sup: f64 = 0.0;
    for j in 0..s.a.len() {
        if s.mask[j] {
            sup = sup.max(((s.da[j] * s.b[j] - s.a[j] * s.db[j]) / (s.b[j] * s.b[j])).abs());
        }
    }
    Ok(tau * sup)
}

/// `|dA/dZ + (α_D/2) sin A|` along a uniformly spaced area series.
pub fn area_theorem_residual(areas: &[f64], alpha_d: f64, dz: f64) -> Vec<f64> {
    derivative(areas, dz).iter().zip(areas).map(|(d, a)| (d + 0.5 * alpha_d * a.sin()).abs()).collect()
}

/// Time of the maximum of `values`, refined by a parabola through the largest
/// sample and its neighbours, and the interpolated maximum.
pub fn peak_position(values: &[f64], times: &[f64]) -> Option<(f64, f64)> {
    let (j, &vmax) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if j == 0 || j + 1 >= values.len() {
        return Some((times[j], vmax));
    }
    let (ym, y0, yp) = (values[j - 1], values[j], values[j + 1]);
    let den = ym - 2.0 * y0 + yp;
    if den >= 0.0 {
        return Some((times[j], vmax));
    }
    let off = 0.5 * (ym - yp) / den;
    let h = times[j + 1] - times[j];
    Some((times[j] + off * h, y0 - 0.25 * (ym - yp) * off))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Pump,
    Stokes,
    Total,
}

fn intensity(s: &Snapshot, which: Which) -> Vec<f64> {
    match which {
        Which::Pump => s.omega_a.iter().map(|v| v.norm_sqr()).collect(),
        Which::Stokes => s.omega_b.iter().map(|v| v.norm_sqr()).collect(),
        Which::Total => s.omega_a.iter().zip(&s.omega_b).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Fit(format!("need at least two paired points, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(LineFit { slope, intercept, rms_residual: rms })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityFit {
    /// `v_g/c`.
    pub velocity_ratio: f64,
    /// Retarded-frame delay per unit `Z`.
    pub slope: f64,
    pub rms_residual: f64,
    pub warning: Option<String>,
}

/// Minimum number of snapshots for a velocity fit.
pub const MIN_FIT_SNAPSHOTS: usize = 5;

/// Group velocity from a straight-line fit of peak position against depth.
/// The peak of the chosen intensity is located with sub-sample accuracy; a
/// warning is attached when the positions do not lie on a line, which happens
/// when the snapshots straddle two propagation regimes.
pub fn group_velocity_fit(snapshots: &[Snapshot], times: &[f64], which: Which) -> Result<VelocityFit> {
    if snapshots.len() < MIN_FIT_SNAPSHOTS {
        return Err(Error::Fit(format!("need at least {MIN_FIT_SNAPSHOTS} snapshots, got {}", snapshots.len())));
    }
    let mut zs = Vec::with_capacity(snapshots.len());
    let mut ts = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        if s.omega_a.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: s.omega_a.len() });
        }
        let (t, _) = peak_position(&intensity(s, which), times).ok_or_else(|| Error::Fit("empty snapshot".into()))?;
        zs.push(s.z);
        ts.push(t);
    }
    let fit = linear_fit(&zs, &ts)?;
    let dt = times.get(1).map_or(0.0, |t1| t1 - times[0]);
    let span = fit.slope.abs() * (zs[zs.len() - 1] - zs[0]).abs();
    let limit = (0.02 * span).max(0.5 * dt);
    let warning = (fit.rms_residual > limit).then(|| {
        format!(
            "peak positions deviate from a straight line (rms {:.3e} > {:.3e}); snapshots may straddle regimes",
            fit.rms_residual, limit
        )
    });
    Ok(VelocityFit {
        velocity_ratio: 1.0 / (1.0 + fit.slope),
        slope: fit.slope,
        rms_residual: fit.rms_residual,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeerFit {
    /// Fitted intensity decay constant per unit `Z`.
    pub alpha: f64,
    pub intercept: f64,
    pub warning: Option<String>,
}

/// Largest input area accepted by [`beer_decay_fit`].
pub const WEAK_AREA_LIMIT: f64 = 0.05 * PI;

/// Least-squares decay constant of the peak intensity `max_T |Ω|²` against
/// depth, for a weak pulse.
pub fn beer_decay_fit(snapshots: &[Snapshot], dt: f64) -> Result<BeerFit> {
    let first = snapshots.first().ok_or_else(|| Error::Fit("no snapshots".into()))?;
    let a0 = crate::diagnostics::total_area(&first.omega_a, &first.omega_b, dt);
    if a0 > WEAK_AREA_LIMIT * (1.0 + 1e-9) {
        return Err(Error::Fit(format!("input area {a0:.4} exceeds the weak-pulse limit {WEAK_AREA_LIMIT:.4}")));
    }
    let mut zs = Vec::with_capacity(snapshots.len());
    let mut ln = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let peak = max_abs(&s.omega_a).hypot(max_abs(&s.omega_b));
        if !(peak > 0.0) {
            return Err(Error::Fit(format!("field vanished at z = {}", s.z)));
        }
        zs.push(s.z);
        ln.push(2.0 * peak.ln());
    }
    let fit = linear_fit(&zs, &ln)?;
    let alpha = -fit.slope;
    let lengths = alpha * (zs[zs.len() - 1] - zs[0]);
    let warning = (lengths < 1.0).then(|| format!("only {lengths:.2} decay lengths of propagation"));
    Ok(BeerFit { alpha, intercept: fit.intercept, warning })
}

/// `A sech((T − T₀)/w)` fitted to a real envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SechFit {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    /// RMS residual relative to `|A|`.
    pub rel_rms: f64,
}

/// Levenberg–Marquardt least-squares fit of a sech profile, started from the
/// peak position, peak value and area of the series.
pub fn sech_fit(omega: &[C64], times: &[f64]) -> Result<SechFit> {
    use nalgebra::{Matrix3, Vector3};
    let y = require_real(omega)?;
    if y.len() != times.len() || y.len() < 4 {
        return Err(Error::Fit("need at least four samples on the time grid".into()));
    }
    let dt = times[1] - times[0];
    let mag: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let (t0, _) = peak_position(&mag, times).ok_or_else(|| Error::Fit("empty series".into()))?;
    let j = mag.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j).unwrap_or(0);
    let a0 = y[j];
    if a0 == 0.0 {
        return Err(Error::Fit("zero envelope".into()));
    }
    let w0 = (trapezoid(&y, dt) / (PI * a0)).abs().max(dt);
    let mut p = Vector3::new(a0, t0, w0);
    let cost = |p: &Vector3<f64>| -> f64 {
        y.iter().zip(times).map(|(v, t)| (v - p[0] / ((t - p[1]) / p[2]).cosh()).powi(2)).sum()
    };
    let mut c = cost(&p);
    let mut lm = 1e-3;
    for _ in 0..200 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (v, t) in y.iter().zip(times) {
            let u = (t - p[1]) / p[2];
            let s = 1.0 / u.cosh();
            let th = u.tanh();
            let g = Vector3::new(s, p[0] * s * th / p[2], p[0] * s * th * u / p[2]);
            jtj += g * g.transpose();
            jtr += g * (v - p[0] * s);
        }
        let mut improved = false;
        while lm < 1e12 {
            let mut m = jtj;
            for k in 0..3 {
                m[(k, k)] *= 1.0 + lm;
            }
            let Some(step) = m.lu().solve(&jtr) else { break };
            let trial = p + step;
            let ct = if trial[2] > 0.0 { cost(&trial) } else { f64::INFINITY };
            if ct < c {
                let rel = (c - ct) / c.max(f64::MIN_POSITIVE);
                p = trial;
                c = ct;
                lm = (lm * 0.3).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lm *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let rel_rms = (c / y.len() as f64).sqrt() / p[0].abs();
    Ok(SechFit { amplitude: p[0], center: p[1], width: p[2], rel_rms })
}

/// Propagation regimes: bright-state dominated (I), transitional (II) and
/// dark-state dominated (III).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagationRegime {
    I,
    II,
    III,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub low: f64,
    pub high: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { low: 0.1, high: 0.9 }
    }
}

/// Classifies by the peak line-center dark population relative to `ζ`.
pub fn regime_classify(peak_dark: f64, prep: &MediumPreparation, thresholds: RegimeThresholds) -> PropagationRegime {
    if peak_dark < thresholds.low * prep.zeta {
        PropagationRegime::I
    } else if peak_dark > thresholds.high * prep.zeta {
        PropagationRegime::III
    } else {
        PropagationRegime::II
    }
}

/// Largest dark population among the valid samples of a snapshot.
pub fn peak_dark_population(snapshot: &Snapshot) -> f64 {
    snapshot.rho_dd.iter().zip(&snapshot.dd_valid).filter(|(_, v)| **v).map(|(d, _)| *d).fold(0.0, f64::max)
}
