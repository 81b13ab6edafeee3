//! Closed-form matched two-pulse solutions.
//!
//! The solutions are first written for a medium whose atoms start in the
//! diagonal state `diag(ζ, 1−ζ, 0)` ("diagonal" solutions) and then rotated by
//! the preparation's unitary `S` to obtain the solutions for the partially
//! coherent initial state. All exponentials are evaluated after factoring out
//! the largest exponent, so the functions are finite for any finite `(Z, T)`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::matrix::Mat3;
use crate::medium::{kappa, DetuningEnsemble, MediumPreparation};

/// Parameters of one member of the analytic solution family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    /// Nominal pulse width.
    pub tau: f64,
    /// Inverse absorption length (`κ/c` with `c = 1`).
    pub kappa: f64,
    pub prep: MediumPreparation,
    /// Coupling constant; only needed when substituting into the field equations.
    pub mu: f64,
    /// Optional phases multiplying the first and second columns of `S`.
    #[serde(default)]
    pub column_phases: (f64, f64),
}

impl AnalyticParams {
    pub fn new(tau: f64, kappa: f64, prep: MediumPreparation) -> Self {
        Self { tau, kappa, prep, mu: f64::NAN, column_phases: (0.0, 0.0) }
    }

    /// Parameters whose `κ` is consistent with coupling `mu` and the given
    /// detuning quadrature, so that the solutions satisfy the discretized
    /// field equations exactly.
    pub fn from_medium(prep: MediumPreparation, mu: f64, tau: f64, ensemble: &DetuningEnsemble) -> Self {
        Self { tau, kappa: kappa(mu, tau, ensemble), prep, mu, column_phases: (0.0, 0.0) }
    }

    pub fn with_column_phases(mut self, chi1: f64, chi2: f64) -> Self {
        self.column_phases = (chi1, chi2);
        self
    }

    fn zeta(&self) -> f64 {
        self.prep.zeta
    }

    /// Upper-left 2×2 block of `S`, which acts on the pulse pair.
    fn field_rotation(&self) -> Matrix2<C64> {
        let s = self.prep.rotation_with_phases(self.column_phases.0, self.column_phases.1);
        Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)])
    }

    fn rotation(&self) -> Mat3 {
        self.prep.rotation_with_phases(self.column_phases.0, self.column_phases.1)
    }

    /// Group-velocity ratio `v_g/c` of the input-regime simultons.
    pub fn input_velocity(&self) -> f64 {
        1.0 / (1.0 + self.zeta() * self.kappa * self.tau)
    }

    /// Group-velocity ratio `v_g/c` of the output-regime simultons.
    pub fn output_velocity(&self) -> f64 {
        1.0 / (1.0 + (1.0 - self.zeta()) * self.kappa * self.tau)
    }
}

/// Scaled denominator `D(Z,T) = e^{m}·sum` with the exponents kept separately.
#[derive(Clone, Copy, Debug)]
struct Denominator {
    /// Scaled terms `e^{eᵢ − m}` of `e^{x−ζk}`, `e^{−x+ζk}`, `e^{x+(3ζ−2)k}`.
    terms: [f64; 3],
    sum: f64,
    m: f64,
}

impl Denominator {
    fn new(exps: [f64; 3]) -> Self {
        let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let terms = [(exps[0] - m).exp(), (exps[1] - m).exp(), (exps[2] - m).exp()];
        Self { terms, sum: terms.iter().sum(), m }
    }

    /// `e^{e}/D`.
    fn ratio(&self, e: f64) -> f64 {
        (e - self.m).exp() / self.sum
    }
}

fn pump_denominator(p: &AnalyticParams, z: f64, t: f64) -> Denominator {
    let (x, k, zeta) = (t / p.tau, p.kappa * z, p.zeta());
    Denominator::new([x - zeta * k, -x + zeta * k, x + (3.0 * zeta - 2.0) * k])
}

fn stokes_denominator(p: &AnalyticParams, z: f64, t: f64) -> Denominator {
    let (x, k, zeta) = (t / p.tau, p.kappa * z, p.zeta());
    Denominator::new([x - (1.0 - zeta) * k, -x + (1.0 - zeta) * k, x + (1.0 - 3.0 * zeta) * k])
}

/// The `f_ij` functions of the diagonal solution at one point.
#[derive(Clone, Copy, Debug)]
pub struct FFunctions {
    pub f11: f64,
    pub f22: f64,
    pub f12: f64,
    pub f13: C64,
    pub f23: C64,
}

pub fn f_functions(p: &AnalyticParams, z: f64, t: f64) -> FFunctions {
    let d = pump_denominator(p, z, t);
    let (x, k, zeta) = (t / p.tau, p.kappa * z, p.zeta());
    let [s1, s2, s3] = d.terms;
    FFunctions {
        f11: (s1 - s2 - s3) / d.sum,
        f22: (-s1 - s2 + s3) / d.sum,
        f12: 2.0 * d.ratio(x - (1.0 - zeta) * k),
        f13: C64::new(0.0, 2.0 * d.ratio(0.0)),
        f23: C64::new(0.0, 2.0 * d.ratio((2.0 * zeta - 1.0) * k)),
    }
}

/// Pump and Stokes solutions for the diagonal initial state. Both are real,
/// positive and bounded by `2/τ`.
pub fn diagonal_pulses(p: &AnalyticParams, z: f64, t: f64) -> (f64, f64) {
    let scale = 4.0 / p.tau;
    let a = pump_denominator(p, z, t);
    let b = stokes_denominator(p, z, t);
    (scale * a.ratio(0.0), scale * b.ratio(0.0))
}

/// Density matrix of an atom with detuning `delta` for the diagonal initial
/// state.
pub fn diagonal_density_matrix(p: &AnalyticParams, delta: f64, z: f64, t: f64) -> Mat3 {
    let f = f_functions(p, z, t);
    let zeta = p.zeta();
    let dt = delta * p.tau;
    let n = 1.0 / (1.0 + dt * dt);
    let i_dt = C64::new(0.0, dt);
    let (f11, f22, f12) = (C64::new(f.f11, 0.0), C64::new(f.f22, 0.0), C64::new(f.f12, 0.0));

    let r11 = n * (zeta * (f.f11 * f.f11 + dt * dt) + (1.0 - zeta) * f.f12 * f.f12);
    let r22 = n * (zeta * f.f12 * f.f12 + (1.0 - zeta) * (f.f22 * f.f22 + dt * dt));
    let r33 = n * (zeta * f.f13.norm_sqr() + (1.0 - zeta) * f.f23.norm_sqr());
    let r12 = n * (zeta * (f11 - i_dt) * f12 + (1.0 - zeta) * (f22 + i_dt) * f12);
    let r13 = n * (zeta * (f11 - i_dt) * f.f13 + (1.0 - zeta) * f12 * f.f23);
    let r23 = n * (zeta * f12.conj() * f.f13 + (1.0 - zeta) * (f22 - i_dt) * f.f23);

    let re = |v: f64| C64::new(v, 0.0);
    Mat3::new(re(r11), r12, r13, r12.conj(), re(r22), r23, r13.conj(), r23.conj(), re(r33))
}

/// Pump and Stokes envelopes for the partially coherent medium: the diagonal
/// pair rotated by the upper block of `S`.
pub fn mixonium_pulses(p: &AnalyticParams, z: f64, t: f64) -> (C64, C64) {
    let (a, b) = diagonal_pulses(p, z, t);
    let v = p.field_rotation() * Vector2::new(C64::new(a, 0.0), C64::new(b, 0.0));
    (v[0], v[1])
}

/// `S ρ⁽ᵈ⁾ S†`.
pub fn mixonium_density_matrix(p: &AnalyticParams, delta: f64, z: f64, t: f64) -> Mat3 {
    let s = p.rotation();
    s * diagonal_density_matrix(p, delta, z, t) * s.adjoint()
}

/// Line-center excited-state probability in closed form,
/// `4[ζ + (1−ζ)e^{2(2ζ−1)κZ}] / D²`.
pub fn excited_state_probability(p: &AnalyticParams, z: f64, t: f64) -> f64 {
    let d = pump_denominator(p, z, t);
    let zeta = p.zeta();
    let k = p.kappa * z;
    let a = d.ratio(0.0);
    let b = d.ratio((2.0 * zeta - 1.0) * k);
    4.0 * (zeta * a * a + (1.0 - zeta) * b * b)
}

/// Probability amplitudes `(c₁, c₂, c₃)` for a pure preparation (`ζ = 1`).
/// Returns `None` for mixed preparations, which have no state vector.
pub fn pure_state_amplitudes(p: &AnalyticParams, delta: f64, z: f64, t: f64) -> Option<[C64; 3]> {
    if p.zeta() != 1.0 {
        return None;
    }
    let f = f_functions(p, z, t);
    let dt = delta * p.tau;
    let n = 1.0 / (1.0 + dt * dt).sqrt();
    let d = [C64::new(n * f.f11, -n * dt), C64::new(n * f.f12, 0.0), n * f.f13.conj()];
    let s = p.rotation();
    let mut c = [C64::new(0.0, 0.0); 3];
    for (i, ci) in c.iter_mut().enumerate() {
        *ci = (0..3).map(|j| s[(i, j)] * d[j]).sum();
    }
    Some(c)
}

/// Asymptotic regime of the analytic solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `−κZ ≫ 1`: bright-state simultons at `v_g/c = (1 + ζκτ)⁻¹`.
    Input,
    /// `κZ ≫ 1`: dark-state simultons at `v_g/c = (1 + (1−ζ)κτ)⁻¹`.
    Output,
}

fn sech(x: f64) -> f64 {
    let ax = x.abs();
    // 1/cosh written to stay finite for large |x|.
    2.0 * (-ax).exp() / (1.0 + (-2.0 * ax).exp())
}

/// Matched sech pairs approached by the exact solutions in either regime.
pub fn asymptotic_pulses(p: &AnalyticParams, z: f64, t: f64, regime: Regime) -> (C64, C64) {
    let (x, k, zeta) = (t / p.tau, p.kappa * z, p.zeta());
    let amp = 2.0 / p.tau;
    let diag = match regime {
        Regime::Input => Vector2::new(C64::new(amp * sech(x - zeta * k), 0.0), C64::new(0.0, 0.0)),
        Regime::Output => Vector2::new(C64::new(0.0, 0.0), C64::new(amp * sech(x - (1.0 - zeta) * k), 0.0)),
    };
    let v = p.field_rotation() * diag;
    (v[0], v[1])
}

/// Signed pulse areas of the analytic solutions at depth `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticAreas {
    pub pump: C64,
    pub stokes: C64,
    /// Area of the total Rabi frequency, `√(|A_a|² + |A_b|²)`.
    pub total: f64,
}

/// `1/h(Z)` with `h(Z) = √(1 + e^{2(2ζ−1)κZ})`.
fn inv_h(p: &AnalyticParams, z: f64) -> f64 {
    let y = 2.0 * (2.0 * p.zeta() - 1.0) * p.kappa * z;
    if y > 0.0 {
        (-0.5 * y).exp() / (1.0 + (-y).exp()).sqrt()
    } else {
        1.0 / (1.0 + y.exp()).sqrt()
    }
}

pub fn analytic_pulse_areas(p: &AnalyticParams, z: f64) -> AnalyticAreas {
    let a = 2.0 * PI * inv_h(p, z);
    let b = 2.0 * PI * inv_h(p, -z);
    let v = p.field_rotation() * Vector2::new(C64::new(a, 0.0), C64::new(b, 0.0));
    AnalyticAreas { pump: v[0], stokes: v[1], total: (v[0].norm_sqr() + v[1].norm_sqr()).sqrt() }
}

/// Samples `mixonium_pulses` at depth `z` over `times`.
pub fn pulse_series(p: &AnalyticParams, z: f64, times: &[f64]) -> (Vec<C64>, Vec<C64>) {
    times.iter().map(|&t| mixonium_pulses(p, z, t)).unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hermitian_eigenvalues;
    use crate::medium::make_medium_preparation;

    fn params(alpha_sq: f64, lambda: f64) -> AnalyticParams {
        let prep = make_medium_preparation(alpha_sq, 1.0 - alpha_sq, lambda, 0.0).unwrap();
        AnalyticParams::new(3.0, 0.4, prep)
    }

    fn sech_ref(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn pump_at_origin_pure() {
        let p = params(0.8, 1.0);
        let (a, b) = diagonal_pulses(&p, 0.0, 0.0);
        assert!((a - 4.0 / (3.0 * p.tau)).abs() < 1e-15);
        assert!((b - 4.0 / (3.0 * p.tau)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_pulses_asymptotics() {
        let p = params(0.8, 1.0);
        let amp = 2.0 / p.tau;
        let tol = (-10.0f64).exp();
        let z_in = -10.0 / p.kappa;
        let z_out = 10.0 / p.kappa;
        for i in -40..=40 {
            let x = i as f64 * 0.25;
            let t = x * p.tau;
            let (a, _) = diagonal_pulses(&p, z_in, t - 10.0 * p.tau);
            let expect = amp * sech_ref(x);
            assert!((a - expect).abs() <= tol * expect, "input x = {x}");
            let (a_out, b_out) = diagonal_pulses(&p, z_out, t);
            let expect = amp * sech_ref(x);
            assert!((b_out - expect).abs() <= tol * expect, "output x = {x}");
            assert!(a_out < 1e-4 * amp);
        }
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        let p = params(0.8, 0.6);
        for &(z, t) in &[(1e4, 0.0), (-1e4, 0.0), (0.0, 1e5), (0.0, -1e5), (1e4, -1e5)] {
            let (a, b) = diagonal_pulses(&p, z, t);
            assert!(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0);
            let r = mixonium_density_matrix(&p, 0.2, z, t);
            assert!(r.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
            assert!((r.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn excited_state_at_origin() {
        for &l in &[0.0, 0.3, 0.8, 1.0] {
            let p = params(0.8, l);
            let r = diagonal_density_matrix(&p, 0.0, 0.0, 0.0);
            assert!((r[(2, 2)].re - 4.0 / 9.0).abs() < 1e-15);
            assert!((excited_state_probability(&p, 0.0, 0.0) - 4.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn detuned_excited_state_from_f13() {
        let p = params(0.8, 1.0);
        let delta = 1.0 / p.tau;
        let r = diagonal_density_matrix(&p, delta, 0.0, 0.0);
        let f = f_functions(&p, 0.0, 0.0);
        assert!((r[(2, 2)].re - 0.5 * f.f13.norm_sqr()).abs() < 1e-15);
        assert!((r.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unperturbed_before_pulse() {
        let p = params(0.7, 0.5);
        let t = -200.0 * p.tau;
        let d = diagonal_density_matrix(&p, 0.0, 0.3, t);
        let expect = [p.prep.zeta, 1.0 - p.prep.zeta, 0.0];
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert!((d[(i, j)].re - e).abs() < 1e-12 && d[(i, j)].im.abs() < 1e-12);
            }
        }
        let m = mixonium_density_matrix(&p, 0.0, 0.3, t);
        assert!((m - p.prep.initial_density_matrix()).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn closed_form_excited_state_matches_matrix() {
        for &l in &[0.0, 0.2, 0.8, 1.0] {
            let p = params(0.8, l);
            for &kz in &[-8.0, -1.0, 0.0, 0.7, 9.0] {
                for i in -20..=20 {
                    let z = kz / p.kappa;
                    let t = (i as f64 * 0.5 + p.prep.zeta * kz) * p.tau;
                    let m = mixonium_density_matrix(&p, 0.0, z, t);
                    let c = excited_state_probability(&p, z, t);
                    assert!((m[(2, 2)].re - c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectrum_is_preserved() {
        for &(a2, l, phi) in &[(0.8, 0.8, 0.0), (0.6, 0.3, PI / 2.0), (0.9, 1.0, 0.0), (0.5, 0.0, 0.0)] {
            let prep = make_medium_preparation(a2, 1.0 - a2, l, phi).unwrap();
            let p = AnalyticParams::new(2.0, 0.5, prep);
            for &delta in &[0.0, 0.4, -1.3] {
                for &kz in &[-5.0, 0.0, 2.0, 6.0] {
                    for &x in &[-3.0, 0.0, 0.5, 4.0] {
                        let z = kz / p.kappa;
                        let t = (x + prep.zeta * kz) * p.tau;
                        let m = mixonium_density_matrix(&p, delta, z, t);
                        let ev = hermitian_eigenvalues(&m);
                        let mut expect = [0.0, 1.0 - prep.zeta, prep.zeta];
                        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        for k in 0..3 {
                            assert!((ev[k] - expect[k]).abs() < 1e-10, "{ev:?} vs {expect:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pure_limit_matches_dedicated_forms() {
        let p = params(0.8, 1.0);
        let (al, be) = (p.prep.alpha(), p.prep.beta());
        for &kz in &[-4.0, 0.0, 3.0] {
            for &x in &[-2.0, 0.0, 1.5] {
                let z = kz / p.kappa;
                let t = x * p.tau;
                let (da, db) = diagonal_pulses(&p, z, t);
                let (a, b) = mixonium_pulses(&p, z, t);
                assert!((a.re - (al * da - be * db)).abs() < 1e-15 && a.im == 0.0);
                assert!((b.re - (be * da + al * db)).abs() < 1e-15 && b.im == 0.0);

                let f = f_functions(&p, z, t);
                let c = pure_state_amplitudes(&p, 0.0, z, t).unwrap();
                assert!((c[0] - C64::new(al * f.f11 - be * f.f12, 0.0)).norm() < 1e-15);
                assert!((c[1] - C64::new(be * f.f11 + al * f.f12, 0.0)).norm() < 1e-15);
                assert!((c[2] - f.f13.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn amplitudes_reproduce_density_matrix() {
        let p = params(0.8, 1.0);
        for &delta in &[0.0, 0.25, -0.7] {
            for &kz in &[-6.0, 0.0, 6.0] {
                for &x in &[-2.0, 0.0, 1.0] {
                    let z = kz / p.kappa;
                    let t = (x + kz.min(0.0)) * p.tau;
                    let c = pure_state_amplitudes(&p, delta, z, t).unwrap();
                    let m = mixonium_density_matrix(&p, delta, z, t);
                    for i in 0..3 {
                        for j in 0..3 {
                            assert!((c[i] * c[j].conj() - m[(i, j)]).norm() < 1e-10);
                        }
                    }
                }
            }
        }
        assert!(pure_state_amplitudes(&params(0.8, 0.5), 0.0, 0.0, 0.0).is_none());
    }

    #[test]
    fn output_amplitudes_signs() {
        let p = params(0.8, 1.0);
        let c = pure_state_amplitudes(&p, 0.0, 22.0 / p.kappa, 80.0 * p.tau).unwrap();
        assert!((c[0].re + p.prep.alpha()).abs() < 1e-8);
        assert!((c[1].re + p.prep.beta()).abs() < 1e-8);
        assert!(c[2].norm() < 1e-8);
    }

    #[test]
    fn regime_ratios() {
        let p = params(0.8, 1.0);
        let (a, b) = mixonium_pulses(&p, -10.0 / p.kappa, -10.0 * p.tau);
        assert!((a.re / b.re - 2.0).abs() < 1e-3);
        let (a, b) = mixonium_pulses(&p, 10.0 / p.kappa, 0.0);
        assert!((a.re / b.re + 0.5).abs() < 1e-3);

        let p = params(0.8, 0.8);
        assert!((p.prep.tan_theta() + 0.4333).abs() < 1e-4);
        let (a, b) = asymptotic_pulses(&p, 10.0 / p.kappa, 0.0, Regime::Output);
        assert!((a.re / b.re - p.prep.tan_theta()).abs() < 1e-14);
        let (a, b) = mixonium_pulses(&p, 30.0 / p.kappa, 30.0 * 0.0614 * p.tau);
        assert!((a.re / b.re - p.prep.tan_theta()).abs() < 1e-6);
    }

    #[test]
    fn output_regime_excited_state() {
        let p = params(0.8, 1.0);
        let z = 10.0 / p.kappa;
        for i in -20..=20 {
            let m = mixonium_density_matrix(&p, 0.0, z, i as f64 * p.tau);
            assert!(m[(2, 2)].re < 1e-8);
        }
        let p = params(0.8, 0.8);
        let z = 10.0 / p.kappa;
        let peak =
            (0..4001).map(|i| excited_state_probability(&p, z, (-10.0 + i as f64 * 0.01) * p.tau)).fold(0.0, f64::max);
        assert!((peak - (1.0 - p.prep.zeta)).abs() < 1e-3);
        assert!((peak - 0.0614).abs() < 1e-3);
    }

    #[test]
    fn input_regime_excited_state_peak() {
        let p = params(0.8, 0.8);
        let z = -10.0 / p.kappa;
        let peak =
            (0..4001).map(|i| excited_state_probability(&p, z, (-20.0 + i as f64 * 0.01) * p.tau)).fold(0.0, f64::max);
        assert!((peak - p.prep.zeta).abs() < 1e-4);
    }

    #[test]
    fn asymptotic_forms() {
        let p = params(0.8, 1.0);
        let (al, be) = (p.prep.alpha(), p.prep.beta());
        let z = -3.0 / p.kappa;
        let (a, b) = asymptotic_pulses(&p, z, 0.0, Regime::Input);
        let s = 2.0 / p.tau * sech_ref(3.0);
        assert!((a.re - al * s).abs() < 1e-15 && (b.re - be * s).abs() < 1e-15);
        let (a, b) = asymptotic_pulses(&p, 3.0 / p.kappa, p.tau, Regime::Output);
        let s = 2.0 / p.tau * sech_ref(1.0);
        assert!((a.re + be * s).abs() < 1e-15 && (b.re - al * s).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_deviation_bound() {
        let eps = 1e-3;
        for &(a2, l) in &[(0.8, 1.0), (0.8, 0.8), (0.8, 0.2), (0.6, 0.5)] {
            let p = params(a2, l);
            let zeta = p.prep.zeta;
            let rate = zeta.min((2.0 * zeta - 1.0).abs()).min(1.0 - zeta + eps);
            for &(kz, regime) in &[(-8.0, Regime::Input), (8.0, Regime::Output)] {
                let z = kz / p.kappa;
                let mut dev: f64 = 0.0;
                for i in -400..=400 {
                    let t = (i as f64 * 0.05 + kz * if kz < 0.0 { zeta } else { 1.0 - zeta }) * p.tau;
                    let (ea, eb) = mixonium_pulses(&p, z, t);
                    let (aa, ab) = asymptotic_pulses(&p, z, t, regime);
                    dev = dev.max((ea - aa).norm().max((eb - ab).norm()));
                }
                let rel = dev / (2.0 / p.tau);
                let bound = 10.0 * (-2.0 * kz.abs() * rate).exp();
                assert!(rel <= bound, "α²={a2} λ={l} κZ={kz}: {rel:e} > {bound:e}");
            }
        }
    }

    #[test]
    fn areas_pure_origin_and_limits() {
        let p = params(0.8, 1.0);
        let (al, be) = (p.prep.alpha(), p.prep.beta());
        let ar = analytic_pulse_areas(&p, 0.0);
        assert!((ar.pump.re - 2.0 * PI * (al - be) / 2f64.sqrt()).abs() < 1e-14);
        let ar = analytic_pulse_areas(&p, 40.0 / p.kappa);
        assert!((ar.pump.re + 2.0 * PI * be).abs() < 1e-12);
        assert!((ar.stokes.re - 2.0 * PI * al).abs() < 1e-12);
    }

    #[test]
    fn total_area_is_two_pi() {
        for &(a2, l, phi) in &[(0.8, 1.0, 0.0), (0.8, 0.4, 0.0), (0.55, 0.0, 0.0), (0.7, 0.7, PI / 2.0)] {
            let prep = make_medium_preparation(a2, 1.0 - a2, l, phi).unwrap();
            let p = AnalyticParams::new(3.0, 0.3, prep);
            for i in -50..=50 {
                let ar = analytic_pulse_areas(&p, i as f64 / p.kappa);
                let t2 = ar.pump.norm_sqr() + ar.stokes.norm_sqr();
                assert!((t2 - 4.0 * PI * PI).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn column_phases_do_not_change_observables() {
        let prep = make_medium_preparation(0.7, 0.3, 0.6, PI / 2.0).unwrap();
        let p0 = AnalyticParams::new(3.0, 0.3, prep);
        let p1 = p0.with_column_phases(0.7, -2.1);
        for &(z, t) in &[(0.0, 0.0), (5.0, 2.0), (-8.0, -7.0)] {
            let (a0, b0) = mixonium_pulses(&p0, z, t);
            let (a1, b1) = mixonium_pulses(&p1, z, t);
            assert!((a0.norm_sqr() + b0.norm_sqr() - a1.norm_sqr() - b1.norm_sqr()).abs() < 1e-14);
            let m0 = mixonium_density_matrix(&p0, 0.3, z, t);
            let m1 = mixonium_density_matrix(&p1, 0.3, z, t);
            assert!((m0[(2, 2)] - m1[(2, 2)]).norm() < 1e-14);
        }
    }
}
