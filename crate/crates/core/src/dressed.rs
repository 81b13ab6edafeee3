//! Bright/dark dressed basis.
//!
//! For fields `(Ω_a, Ω_b)` with total Rabi frequency `Ω_T`, the bright state
//! `|B⟩ = (Ω_a|1⟩ + Ω_b|2⟩)/Ω_T` carries all the coupling to `|3⟩` and the dark
//! state `|D⟩ = (−Ω_b*|1⟩ + Ω_a*|2⟩)/Ω_T` carries none.

use nalgebra::Vector3;
use num_complex::Complex64 as C64;

use crate::matrix::Mat3;
use crate::series::{max_abs, midpoints, require_real};
use crate::{Error, Result};

/// Relative floor on `Ω_T` below which the dressed basis is treated as
/// undefined.
pub const OMEGA_T_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedAmplitudes {
    pub c_b: C64,
    pub c_d: C64,
    pub omega_t: f64,
}

pub fn total_rabi(omega_a: C64, omega_b: C64) -> f64 {
    omega_a.norm().hypot(omega_b.norm())
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Bright and dark vectors in the bare basis, or `None` when `Ω_T = 0`.
pub fn bright_dark_vectors(omega_a: C64, omega_b: C64) -> Option<(Vector3<C64>, Vector3<C64>)> {
    let wt = total_rabi(omega_a, omega_b);
    if !(wt > 0.0) {
        return None;
    }
    let b = Vector3::new(omega_a / wt, omega_b / wt, zero());
    let d = Vector3::new(-omega_b.conj() / wt, omega_a.conj() / wt, zero());
    Some((b, d))
}

/// Dark Rabi frequency `(2i/Ω_T²)(Ω_a Ω̇_b − Ω_b Ω̇_a)` of real envelopes.
///
/// Derivatives are central differences (one-sided at the ends). Samples where
/// `Ω_T` falls below `1e-12` of its peak are set to zero.
pub fn dark_rabi(omega_a: &[C64], omega_b: &[C64], dt: f64) -> Result<Vec<C64>> {
    if omega_a.len() != omega_b.len() {
        return Err(Error::LengthMismatch { expected: omega_a.len(), found: omega_b.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::Step(format!("dt must be positive, got {dt}")));
    }
    let a = require_real(omega_a)?;
    let b = require_real(omega_b)?;
    let da = crate::series::derivative(&a, dt);
    let db = crate::series::derivative(&b, dt);
    let wt: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect();
    let floor = OMEGA_T_FLOOR * wt.iter().copied().fold(0.0, f64::max);
    Ok((0..a.len())
        .map(|j| {
            if wt[j] <= floor || wt[j] == 0.0 {
                zero()
            } else {
                C64::new(0.0, 2.0 * (a[j] * db[j] - b[j] * da[j]) / (wt[j] * wt[j]))
            }
        })
        .collect())
}

/// Projects the ground-state amplitudes onto the bright and dark states.
pub fn bright_dark_amplitudes(c1: C64, c2: C64, omega_a: C64, omega_b: C64) -> Result<DressedAmplitudes> {
    let wt = total_rabi(omega_a, omega_b);
    let (b, d) = bright_dark_vectors(omega_a, omega_b).ok_or(Error::DegenerateField { omega_t: wt })?;
    Ok(DressedAmplitudes {
        c_b: b[0].conj() * c1 + b[1].conj() * c2,
        c_d: d[0].conj() * c1 + d[1].conj() * c2,
        omega_t: wt,
    })
}

/// `⟨D|ρ|D⟩`.
pub fn dark_population(rho: &Mat3, omega_a: C64, omega_b: C64) -> Result<f64> {
    let wt = total_rabi(omega_a, omega_b);
    let (_, d) = bright_dark_vectors(omega_a, omega_b).ok_or(Error::DegenerateField { omega_t: wt })?;
    Ok((d.adjoint() * rho * d)[(0, 0)].re)
}

/// `⟨B|ρ|B⟩`.
pub fn bright_population(rho: &Mat3, omega_a: C64, omega_b: C64) -> Result<f64> {
    let wt = total_rabi(omega_a, omega_b);
    let (b, _) = bright_dark_vectors(omega_a, omega_b).ok_or(Error::DegenerateField { omega_t: wt })?;
    Ok((b.adjoint() * rho * b)[(0, 0)].re)
}

/// Dark population along a series, with a validity mask. Samples where `Ω_T`
/// is below `1e-12` of the series peak are reported as 0 and masked out.
pub fn dark_population_series(rhos: &[Mat3], omega_a: &[C64], omega_b: &[C64]) -> Result<(Vec<f64>, Vec<bool>)> {
    if rhos.len() != omega_a.len() || omega_a.len() != omega_b.len() {
        return Err(Error::LengthMismatch { expected: rhos.len(), found: omega_a.len().min(omega_b.len()) });
    }
    let peak = omega_a.iter().zip(omega_b).map(|(a, b)| total_rabi(*a, *b)).fold(0.0, f64::max);
    let floor = OMEGA_T_FLOOR * peak;
    let mut pop = Vec::with_capacity(rhos.len());
    let mut valid = Vec::with_capacity(rhos.len());
    for ((r, a), b) in rhos.iter().zip(omega_a).zip(omega_b) {
        if total_rabi(*a, *b) > floor && peak > 0.0 {
            pop.push(dark_population(r, *a, *b)?);
            valid.push(true);
        } else {
            pop.push(0.0);
            valid.push(false);
        }
    }
    Ok((pop, valid))
}

/// The interaction Hamiltonian built in the `{|B⟩, |D⟩, |3⟩}` basis, where
/// only `|B⟩` couples to `|3⟩` with strength `Ω_T/2`, and transformed back to
/// the bare basis.
pub fn dressed_hamiltonian(omega_a: C64, omega_b: C64, delta: f64) -> Mat3 {
    let wt = total_rabi(omega_a, omega_b);
    let mut hd = Mat3::zeros();
    hd[(2, 2)] = C64::new(delta, 0.0);
    let (b, d) = bright_dark_vectors(omega_a, omega_b).unwrap_or((
        Vector3::new(C64::new(1.0, 0.0), zero(), zero()),
        Vector3::new(zero(), C64::new(1.0, 0.0), zero()),
    ));
    hd[(0, 2)] = C64::new(-0.5 * wt, 0.0);
    hd[(2, 0)] = C64::new(-0.5 * wt, 0.0);
    let e3 = Vector3::new(zero(), zero(), C64::new(1.0, 0.0));
    let u = Mat3::from_columns(&[b, d, e3]);
    u * hd * u.adjoint()
}

/// RK4 solution of the two-level system `ċ_B = (i/2)Ω_T c₃`,
/// `ċ₃ = (i/2)Ω_T c_B − iΔc₃` from `c_B = 1, c₃ = 0`, using the same half-step
/// interpolation as the three-level integrator.
pub fn two_level_reference(omega_t: &[C64], delta: f64, dt: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Step(format!("dt must be positive and finite, got {dt}")));
    }
    if !delta.is_finite() {
        return Err(Error::Step("detuning must be finite".into()));
    }
    let n = omega_t.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mid = midpoints(omega_t);
    let i = C64::new(0.0, 1.0);
    let rhs = |w: C64, cb: C64, c3: C64| (0.5 * i * w * c3, 0.5 * i * w.conj() * cb - i * delta * c3);
    let mut cb = vec![zero(); n];
    let mut c3 = vec![zero(); n];
    cb[0] = C64::new(1.0, 0.0);
    for j in 0..n - 1 {
        let (b, e) = (cb[j], c3[j]);
        let (k1b, k1e) = rhs(omega_t[j], b, e);
        let (k2b, k2e) = rhs(mid[j], b + 0.5 * dt * k1b, e + 0.5 * dt * k1e);
        let (k3b, k3e) = rhs(mid[j], b + 0.5 * dt * k2b, e + 0.5 * dt * k2e);
        let (k4b, k4e) = rhs(omega_t[j + 1], b + dt * k3b, e + dt * k3e);
        cb[j + 1] = b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        c3[j + 1] = e + dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
    }
    if max_abs(&c3).is_nan() {
        return Err(Error::Step("two-level integration produced non-finite values".into()));
    }
    Ok((cb, c3))
}
