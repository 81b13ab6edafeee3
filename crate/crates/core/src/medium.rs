//! Medium preparation, detuning quadrature and propagation constants.

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::Mat3;

const SUM_TOL: f64 = 1e-12;

/// Initial ground-state preparation of every atom: populations `α²`, `β²`, a
/// coherence fraction `λ` and coherence phase `φ`, together with the
/// eigenvalue `ζ` and rotation angle `θ` that diagonalize the resulting
/// density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumPreparation {
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub lambda: f64,
    pub phi: f64,
    /// Larger eigenvalue of the ground-state block; the interaction parameter.
    pub zeta: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
}

impl MediumPreparation {
    /// Validates the populations and coherence and derives `ζ`, `cos θ`, `sin θ`.
    pub fn new(alpha_sq: f64, beta_sq: f64, lambda: f64, phi: f64) -> Result<Self> {
        let finite = [alpha_sq, beta_sq, lambda, phi].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Preparation("non-finite parameter".into()));
        }
        if !(0.0..=1.0).contains(&alpha_sq) || !(0.0..=1.0).contains(&beta_sq) {
            return Err(Error::Preparation(format!(
                "populations must lie in [0, 1], got α² = {alpha_sq}, β² = {beta_sq}"
            )));
        }
        if (alpha_sq + beta_sq - 1.0).abs() > SUM_TOL {
            return Err(Error::Preparation(format!("populations must sum to 1, got {}", alpha_sq + beta_sq)));
        }
        if alpha_sq < beta_sq {
            return Err(Error::Preparation(format!(
                "ground state 1 must be the majority population (α² = {alpha_sq} < β² = {beta_sq})"
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Preparation(format!("λ = {lambda} outside [0, 1]")));
        }

        let a2b2 = alpha_sq * beta_sq;
        let zeta = if lambda == 1.0 || beta_sq == 0.0 {
            1.0
        } else if lambda == 0.0 {
            alpha_sq
        } else {
            // ζ = α² + (s − d)/2 with s² = d² + 4λ²α²β², written without the
            // cancellation in s − d so that ζ(λ) stays monotone to the last bit.
            let d = alpha_sq - beta_sq;
            let s = (d * d + 4.0 * lambda * lambda * a2b2).sqrt();
            (alpha_sq + 2.0 * lambda * lambda * a2b2 / (s + d)).min(1.0)
        };

        let num_cos = zeta - beta_sq;
        let num_sin = -lambda * a2b2.sqrt();
        let norm = num_cos.hypot(num_sin);
        let (cos_theta, sin_theta) = if norm == 0.0 {
            // α² = β², λ = 0: ρ⁽⁰⁾ ∝ identity, any rotation diagonalizes it.
            (1.0, 0.0)
        } else {
            (num_cos / norm, num_sin / norm)
        };

        Ok(Self { alpha_sq, beta_sq, lambda, phi, zeta, cos_theta, sin_theta })
    }

    /// Pure phase-coherent preparation (`λ = 1`) with `φ = 0`.
    pub fn pure(alpha_sq: f64) -> Result<Self> {
        Self::new(alpha_sq, 1.0 - alpha_sq, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_sq.sqrt()
    }

    pub fn beta(&self) -> f64 {
        self.beta_sq.sqrt()
    }

    /// `tan θ`, the pump/Stokes ratio of the output-regime simultons.
    pub fn tan_theta(&self) -> f64 {
        self.sin_theta / self.cos_theta
    }

    /// The initial density matrix of every atom,
    /// `[[α², λαβe^{iφ}, 0], [λαβe^{−iφ}, β², 0], [0, 0, 0]]`.
    pub fn initial_density_matrix(&self) -> Mat3 {
        let coh = C64::from_polar(self.lambda * self.alpha() * self.beta(), self.phi);
        let z = C64::new(0.0, 0.0);
        Matrix3::new(C64::new(self.alpha_sq, 0.0), coh, z, coh.conj(), C64::new(self.beta_sq, 0.0), z, z, z, z)
    }

    /// The unitary `S` with `S† ρ⁽⁰⁾ S = diag(ζ, 1−ζ, 0)`.
    pub fn rotation(&self) -> Mat3 {
        self.rotation_with_phases(0.0, 0.0)
    }

    /// `S` with its first and second columns multiplied by `e^{iχ₁}` and
    /// `e^{iχ₂}`. Any such choice still diagonalizes `ρ⁽⁰⁾`.
    pub fn rotation_with_phases(&self, chi1: f64, chi2: f64) -> Mat3 {
        let (c, s) = (self.cos_theta, self.sin_theta);
        let p1 = C64::from_polar(1.0, chi1);
        let p2 = C64::from_polar(1.0, chi2);
        let eip = C64::from_polar(1.0, self.phi);
        let z = C64::new(0.0, 0.0);
        Matrix3::new(c * p1, s * eip * p2, z, -s * eip.conj() * p1, c * p2, z, z, z, C64::new(1.0, 0.0))
    }
}

/// Free-function form of [`MediumPreparation::new`].
pub fn make_medium_preparation(alpha_sq: f64, beta_sq: f64, lambda: f64, phi: f64) -> Result<MediumPreparation> {
    MediumPreparation::new(alpha_sq, beta_sq, lambda, phi)
}

pub fn initial_density_matrix(prep: &MediumPreparation) -> Mat3 {
    prep.initial_density_matrix()
}

/// How the Gaussian line `F(Δ)` is discretized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Gauss–Hermite nodes for the weight `exp(−(T₂*)²Δ²/2)`.
    GaussHermite { nodes: usize },
    /// Equally spaced nodes `Δ = k·spacing`, `|Δ| ≤ cutoff/T₂*`, trapezoid
    /// weights `∝ F(Δ)`. The spacing sets the rephasing time `2π/spacing` of
    /// the discrete ensemble.
    Uniform { spacing: f64, cutoff: f64 },
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::GaussHermite { nodes: DEFAULT_NODES }
    }
}

pub const DEFAULT_NODES: usize = 41;

/// One detuning class of the inhomogeneously broadened line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningNode {
    pub delta: f64,
    pub weight: f64,
}

/// Quadrature for averages `⟨g⟩ = ∫ F(Δ) g(Δ) dΔ` over the Gaussian line of
/// width parameter `T₂*`, centered on the laser frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningEnsemble {
    pub t2_star: f64,
    pub nodes: Vec<DetuningNode>,
    pub line_center_index: usize,
}

impl DetuningEnsemble {
    pub fn new(t2_star: f64, rule: QuadratureRule) -> Result<Self> {
        match rule {
            QuadratureRule::GaussHermite { nodes } => make_detuning_ensemble(t2_star, nodes),
            QuadratureRule::Uniform { spacing, cutoff } => make_uniform_ensemble(t2_star, spacing, cutoff),
        }
    }

    /// A single line-center node: no inhomogeneous broadening.
    pub fn line_center() -> Self {
        Self { t2_star: f64::INFINITY, nodes: vec![DetuningNode { delta: 0.0, weight: 1.0 }], line_center_index: 0 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k g(Δ_k)`.
    pub fn average(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * g(n.delta)).sum()
    }

    /// Drops nodes whose weight is below `rel_min` times the largest weight and
    /// renormalizes. Symmetry about `Δ = 0` is preserved.
    pub fn pruned(&self, rel_min: f64) -> Self {
        let wmax = self.nodes.iter().map(|n| n.weight).fold(0.0, f64::max);
        let kept: Vec<DetuningNode> = self.nodes.iter().copied().filter(|n| n.weight >= rel_min * wmax).collect();
        let total: f64 = kept.iter().map(|n| n.weight).sum();
        let nodes: Vec<DetuningNode> =
            kept.into_iter().map(|n| DetuningNode { delta: n.delta, weight: n.weight / total }).collect();
        let line_center_index = nearest_zero(&nodes);
        Self { t2_star: self.t2_star, nodes, line_center_index }
    }

    /// `⟨1/(1 + (Δτ)²)⟩`, the Lorentzian overlap that sets the absorption
    /// length of a sech pulse of width `tau`.
    pub fn lorentz_overlap(&self, tau: f64) -> f64 {
        self.average(|d| 1.0 / (1.0 + (d * tau).powi(2)))
    }
}

fn nearest_zero(nodes: &[DetuningNode]) -> usize {
    nodes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.delta.abs().partial_cmp(&b.1.delta.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Gauss–Hermite quadrature for `F(Δ) = (T₂*/√(2π)) exp(−(T₂*)²Δ²/2)`, weights
/// normalized to one. Nodes come from the Golub–Welsch eigenproblem of the
/// probabilists' Hermite Jacobi matrix.
pub fn make_detuning_ensemble(t2_star: f64, n_nodes: usize) -> Result<DetuningEnsemble> {
    if !(t2_star.is_finite() && t2_star > 0.0) {
        return Err(Error::Ensemble(format!("T2* must be positive, got {t2_star}")));
    }
    if n_nodes == 0 || n_nodes.is_multiple_of(2) {
        return Err(Error::Ensemble(format!("node count must be odd and positive, got {n_nodes}")));
    }
    if n_nodes == 1 {
        return Ok(DetuningEnsemble {
            t2_star,
            nodes: vec![DetuningNode { delta: 0.0, weight: 1.0 }],
            line_center_index: 0,
        });
    }

    let n = n_nodes;
    let jacobi = DMatrix::from_fn(n, n, |i, j| if i + 1 == j || j + 1 == i { (i.max(j) as f64).sqrt() } else { 0.0 });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Symmetrize: exact zero in the middle, mirrored nodes and weights.
    let mid = n / 2;
    let mut nodes = vec![DetuningNode { delta: 0.0, weight: 0.0 }; n];
    for k in 0..=mid {
        let (xl, wl) = pairs[k];
        let (xr, wr) = pairs[n - 1 - k];
        let x = if k == mid { 0.0 } else { 0.5 * (xr - xl) };
        let w = 0.5 * (wl + wr);
        nodes[k] = DetuningNode { delta: -x / t2_star, weight: w };
        nodes[n - 1 - k] = DetuningNode { delta: x / t2_star, weight: w };
    }
    normalize(&mut nodes);
    Ok(DetuningEnsemble { t2_star, nodes, line_center_index: mid })
}

/// Trapezoid rule on an equally spaced, symmetric detuning grid. `spacing` is
/// in units of `1/T₂*`; nodes extend to `|Δ| ≤ cutoff/T₂*`.
pub fn make_uniform_ensemble(t2_star: f64, spacing: f64, cutoff: f64) -> Result<DetuningEnsemble> {
    if !(t2_star.is_finite() && t2_star > 0.0) {
        return Err(Error::Ensemble(format!("T2* must be positive, got {t2_star}")));
    }
    if !(spacing > 0.0 && cutoff >= 0.0 && spacing.is_finite() && cutoff.is_finite()) {
        return Err(Error::Ensemble(format!("uniform rule needs spacing > 0 and cutoff ≥ 0, got {spacing}, {cutoff}")));
    }
    let half = (cutoff / spacing).floor() as usize;
    let mut nodes: Vec<DetuningNode> = (0..=2 * half)
        .map(|k| {
            let x = (k as f64 - half as f64) * spacing;
            DetuningNode { delta: x / t2_star, weight: (-0.5 * x * x).exp() }
        })
        .collect();
    normalize(&mut nodes);
    Ok(DetuningEnsemble { t2_star, nodes, line_center_index: half })
}

fn normalize(nodes: &mut [DetuningNode]) {
    let total: f64 = nodes.iter().map(|n| n.weight).sum();
    for n in nodes.iter_mut() {
        n.weight /= total;
    }
}

/// Inverse absorption length of a sech pulse of width `tau`,
/// `κ = (μτ/2) ∫ F(Δ) dΔ / (1 + (Δτ)²)`, evaluated with the ensemble quadrature.
pub fn kappa(mu: f64, tau: f64, ensemble: &DetuningEnsemble) -> f64 {
    0.5 * mu * tau * ensemble.lorentz_overlap(tau)
}

/// Weak-pulse (Beer) attenuation coefficient at line center, `√(π/2)·T₂*·μ`
/// with `c = 1`.
pub fn beer_coefficient(mu: f64, t2_star: f64) -> f64 {
    (PI / 2.0).sqrt() * t2_star * mu
}

/// Coupling and line parameters of the medium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub mu: f64,
    pub t2_star: f64,
    pub alpha_d: f64,
    /// Inverse absorption length for the scenario's reference pulse width.
    pub kappa: f64,
}

impl MediumParams {
    pub fn new(mu: f64, tau: f64, ensemble: &DetuningEnsemble) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::Scenario(format!("coupling μ must be ≥ 0, got {mu}")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Scenario(format!("pulse width must be > 0, got {tau}")));
        }
        let t2 = ensemble.t2_star;
        let alpha_d = if t2.is_finite() { beer_coefficient(mu, t2) } else { f64::INFINITY };
        Ok(Self { mu, t2_star: t2, alpha_d, kappa: kappa(mu, tau, ensemble) })
    }
}

/// Uniform retarded-time window and propagation range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
}

impl Grid {
    pub fn new(t_min: f64, t_max: f64, n_t: usize, z_min: f64, z_max: f64, n_z: usize) -> Result<Self> {
        let g = Self { t_min, t_max, n_t, z_min, z_max, n_z };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 2 || self.n_z < 2 {
            return Err(Error::Grid(format!(
                "need at least two samples per axis, got n_t = {}, n_z = {}",
                self.n_t, self.n_z
            )));
        }
        let ok = [self.t_min, self.t_max, self.z_min, self.z_max].iter().all(|v| v.is_finite());
        if !ok || self.t_max <= self.t_min || self.z_max <= self.z_min {
            return Err(Error::Grid("window bounds must be finite and increasing".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt()
    }

    pub fn z(&self, k: usize) -> f64 {
        self.z_min + k as f64 * self.dz()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_t).map(|j| self.t(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hermitian_eigenvalues;

    #[test]
    fn pure_state_rotation_is_alpha_minus_beta() {
        let p = make_medium_preparation(0.8, 0.2, 1.0, 0.0).unwrap();
        assert_eq!(p.zeta, 1.0);
        assert!((p.cos_theta - 0.8f64.sqrt()).abs() < 1e-15);
        assert!((p.sin_theta + 0.2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn completely_mixed_gives_majority_population() {
        let p = make_medium_preparation(0.8, 0.2, 0.0, 0.0).unwrap();
        assert_eq!(p.zeta, 0.8);
        assert_eq!((p.cos_theta, p.sin_theta), (1.0, 0.0));
    }

    #[test]
    fn partial_coherence_matches_eigendecomposition() {
        // Independent route: 2×2 symmetric eigenproblem in closed form.
        let (a, b, c): (f64, f64, f64) = (0.8, 0.32, 0.2);
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let top = mean + rad;
        let (vx, vy) = (b, top - a);
        let n = vx.hypot(vy);
        let p = make_medium_preparation(0.8, 0.2, 0.8, 0.0).unwrap();
        assert!((p.zeta - top).abs() < 1e-12);
        assert!((p.zeta - 0.93863).abs() < 1e-5);
        // S's first column is (cos θ, −sin θ).
        assert!((p.cos_theta - vx / n).abs() < 1e-12);
        assert!((-p.sin_theta - vy / n).abs() < 1e-12);
        assert!((p.cos_theta - 0.9176).abs() < 1e-4);
        assert!((p.sin_theta + 0.3976).abs() < 1e-4);
    }

    #[test]
    fn degenerate_mixed_state_uses_identity() {
        let p = make_medium_preparation(0.5, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(p.zeta, 0.5);
        assert_eq!((p.cos_theta, p.sin_theta), (1.0, 0.0));
        let q = make_medium_preparation(0.5, 0.5, 0.3, 0.0).unwrap();
        assert!((q.zeta - 0.65).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_preparations() {
        assert!(make_medium_preparation(1.2, -0.2, 0.5, 0.0).is_err());
        assert!(make_medium_preparation(0.7, 0.2, 0.5, 0.0).is_err());
        assert!(make_medium_preparation(0.2, 0.8, 0.5, 0.0).is_err());
        assert!(make_medium_preparation(0.8, 0.2, 1.5, 0.0).is_err());
        assert!(make_medium_preparation(0.8, 0.2, -0.1, 0.0).is_err());
        assert!(make_medium_preparation(f64::NAN, 0.2, 0.5, 0.0).is_err());
    }

    #[test]
    fn initial_density_matrix_entries() {
        let p = make_medium_preparation(1.0, 0.0, 0.3, 0.0).unwrap();
        let m = p.initial_density_matrix();
        assert_eq!(
            m,
            Mat3::from_diagonal(&nalgebra::Vector3::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)))
        );

        let p = make_medium_preparation(0.8, 0.2, 0.8, 0.0).unwrap();
        let r12 = p.initial_density_matrix()[(0, 1)];
        assert!((r12 - C64::new(0.32, 0.0)).norm() < 1e-15);

        let p = make_medium_preparation(0.8, 0.2, 1.0, PI).unwrap();
        let r12 = p.initial_density_matrix()[(0, 1)];
        assert!((r12 - C64::new(-0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_diagonalizes_with_phase() {
        for &phi in &[0.0, PI / 2.0, 1.3] {
            let p = make_medium_preparation(0.7, 0.3, 0.6, phi).unwrap();
            for &(c1, c2) in &[(0.0, 0.0), (0.4, -1.1)] {
                let s = p.rotation_with_phases(c1, c2);
                let d = s.adjoint() * p.initial_density_matrix() * s;
                let expect = [p.zeta, 1.0 - p.zeta, 0.0];
                for i in 0..3 {
                    for j in 0..3 {
                        let target = if i == j { expect[i] } else { 0.0 };
                        assert!((d[(i, j)] - C64::new(target, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn initial_matrix_is_a_state() {
        let p = make_medium_preparation(0.6, 0.4, 0.9, 0.4).unwrap();
        let m = p.initial_density_matrix();
        let ev = hermitian_eigenvalues(&m);
        assert!(ev[0] > -1e-14);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ensemble_single_node() {
        let e = make_detuning_ensemble(1.0, 1).unwrap();
        assert_eq!(e.nodes, vec![DetuningNode { delta: 0.0, weight: 1.0 }]);
    }

    #[test]
    fn ensemble_rejects_even_or_zero() {
        assert!(make_detuning_ensemble(1.0, 0).is_err());
        assert!(make_detuning_ensemble(1.0, 4).is_err());
        assert!(make_detuning_ensemble(0.0, 3).is_err());
    }

    #[test]
    fn ensemble_moments() {
        for &t2 in &[1.0, 0.5, 2.0] {
            let e = make_detuning_ensemble(t2, 3).unwrap();
            assert!((e.average(|d| d * d) - 1.0 / (t2 * t2)).abs() < 1e-12);
            let e = make_detuning_ensemble(t2, 41).unwrap();
            let sum: f64 = e.nodes.iter().map(|n| n.weight).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(e.average(|d| d).abs() < 1e-14);
            assert!((e.average(|d| d * d) - 1.0 / t2.powi(2)).abs() < 1e-12);
            assert!(e.average(|d| d.powi(3)).abs() < 1e-12);
            assert!((e.average(|d| d.powi(4)) - 3.0 / t2.powi(4)).abs() < 1e-11);
            assert_eq!(e.nodes[e.line_center_index].delta, 0.0);
            for k in 0..e.len() {
                let m = e.len() - 1 - k;
                assert_eq!(e.nodes[k].delta, -e.nodes[m].delta);
                assert_eq!(e.nodes[k].weight, e.nodes[m].weight);
            }
        }
    }

    #[test]
    fn pruning_keeps_symmetry_and_normalization() {
        let e = make_detuning_ensemble(1.0, 101).unwrap().pruned(1e-14);
        assert!(e.len() < 101 && e.len() % 2 == 1);
        let sum: f64 = e.nodes.iter().map(|n| n.weight).sum();
        assert!((sum - 1.0).abs() < 1e-14);
        assert_eq!(e.nodes[e.line_center_index].delta, 0.0);
        assert!((e.average(|d| d * d) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_rule_moments() {
        let e = make_uniform_ensemble(1.0, 0.1, 9.0).unwrap();
        assert_eq!(e.len(), 181);
        assert_eq!(e.nodes[e.line_center_index].delta, 0.0);
        assert!((e.average(|d| d * d) - 1.0).abs() < 1e-12);
        assert!((e.average(|d| d.powi(4)) - 3.0).abs() < 1e-11);
    }

    #[test]
    fn kappa_single_node_is_half_mu_tau() {
        let e = make_detuning_ensemble(1.0, 1).unwrap();
        assert_eq!(kappa(1.7, 2.5, &e), 0.5 * 1.7 * 2.5);
    }

    #[test]
    fn beer_coefficient_values() {
        assert!((beer_coefficient(1.0, 1.0) - 1.2533141373155).abs() < 1e-12);
        assert_eq!(beer_coefficient(0.0, 3.0), 0.0);
        assert!((beer_coefficient(2.0, 3.0) - 6.0 * (PI / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(-1.0, 1.0, 1, 0.0, 1.0, 2).is_err());
        assert!(Grid::new(1.0, -1.0, 4, 0.0, 1.0, 2).is_err());
        let g = Grid::new(-1.0, 1.0, 5, 0.0, 2.0, 3).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.dz(), 1.0);
        assert_eq!(g.times(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
