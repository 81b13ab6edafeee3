#![allow(dead_code)]

use mixonium::analytic::{mixonium_density_matrix, mixonium_pulses, AnalyticParams};
use mixonium::matrix::{bare_hamiltonian, Mat3};
use mixonium::medium::{make_uniform_ensemble, DetuningEnsemble, Grid, MediumPreparation};
use mixonium::propagator::{propagate, seed_with_analytic, Fields, Scenario, Trajectory};
use mixonium::pulse::{resolve_mu_for_velocity, PulseShape, PulseSpec, Target};
use mixonium::C64;
use std::f64::consts::PI;

/// Pulse width used throughout, in units of `T2*`.
pub const TAU: f64 = 3.0;

pub fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// `−i[H, ρ]` built from dense matrices, independent of the packed integrator.
pub fn commutator_rhs(rho: &Mat3, oa: C64, ob: C64, delta: f64) -> Mat3 {
    let h = bare_hamiltonian(oa, ob, delta);
    (h * rho - rho * h) * C64::new(0.0, -1.0)
}

pub fn frob(m: &Mat3) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest Bloch and Maxwell residuals of the analytic solution on a sample
/// of `(Z, T)` points, using central differences with step `h` in both
/// coordinates.
pub fn analytic_residuals(p: &AnalyticParams, ens: &DetuningEnsemble, h: f64) -> (f64, f64) {
    let mut bloch: f64 = 0.0;
    let mut maxwell: f64 = 0.0;
    let nodes: Vec<f64> = ens.nodes.iter().step_by(4).map(|n| n.delta).collect();
    for &kz in &[-4.0, -1.5, 0.0, 0.7, 2.5] {
        let z = kz / p.kappa;
        let center = if kz < 0.0 { p.prep.zeta * kz } else { (1.0 - p.prep.zeta) * kz } * p.tau;
        for i in -12..=12 {
            let t = center + i as f64 * 0.37 * p.tau;
            let (oa, ob) = mixonium_pulses(p, z, t);
            for &d in &nodes {
                let drho =
                    (mixonium_density_matrix(p, d, z, t + h) - mixonium_density_matrix(p, d, z, t - h)) * c(0.5 / h);
                let r = drho - commutator_rhs(&mixonium_density_matrix(p, d, z, t), oa, ob, d);
                bloch = bloch.max(frob(&r));
            }
            let (ap, bp) = mixonium_pulses(p, z + h, t);
            let (am, bm) = mixonium_pulses(p, z - h, t);
            let mut p13 = c(0.0);
            let mut p23 = c(0.0);
            for n in &ens.nodes {
                let m = mixonium_density_matrix(p, n.delta, z, t);
                p13 += n.weight * m[(0, 2)];
                p23 += n.weight * m[(1, 2)];
            }
            let i_mu = C64::new(0.0, p.mu);
            let ra = (ap - am) * (0.5 / h) + i_mu * p13;
            let rb = (bp - bm) * (0.5 / h) + i_mu * p23;
            maxwell = maxwell.max(ra.norm().max(rb.norm()));
        }
    }
    (bloch, maxwell)
}

pub fn prep(alpha_sq: f64, lambda: f64) -> MediumPreparation {
    MediumPreparation::new(alpha_sq, 1.0 - alpha_sq, lambda, 0.0).unwrap()
}

/// Coupling that makes a simulton of width [`TAU`] in a pure medium travel at
/// `c/2`.
pub fn half_speed_mu(ens: &DetuningEnsemble) -> f64 {
    resolve_mu_for_velocity(0.5, TAU, 1.0, ens).unwrap()
}

/// Analytic seed at `κZ = −depth`, propagated to `κZ = +depth` on a window
/// shifted to follow the slowed input simultons, keeping the default sampling
/// density of 2048 points per 40τ.
pub fn seeded_run(
    prep: MediumPreparation,
    ens: DetuningEnsemble,
    depth: f64,
    dz_kappa: f64,
    snapshots_per_depth: usize,
) -> (AnalyticParams, Trajectory) {
    let mu = half_speed_mu(&ens);
    let p = AnalyticParams::from_medium(prep, mu, TAU, &ens);
    let (t_lo, t_hi) = (-(depth + 21.0) * TAU, 21.0 * TAU);
    let n_t = ((t_hi - t_lo) / (40.0 * TAU / 2047.0)).round() as usize + 1;
    let n_z = (2.0 * depth / dz_kappa).round() as usize + 1;
    let grid = Grid::new(t_lo, t_hi, n_t, -depth / p.kappa, depth / p.kappa, n_z).unwrap();
    let empty = Fields::new(vec![c(0.0); n_t], vec![c(0.0); n_t]).unwrap();
    let stride = ((1.0 / dz_kappa) / snapshots_per_depth as f64).round() as usize;
    let sc = Scenario::with_fields(grid, mu, prep, ens, empty).unwrap().with_stride(stride);
    let (sc, warning) = seed_with_analytic(sc, &p, -depth / p.kappa).unwrap();
    assert!(warning.is_none());
    let traj = propagate(&sc).unwrap();
    assert!(traj.is_complete(), "{:?}", traj.failure);
    (p, traj)
}

/// Gaussian pump of width τ and Stokes of width 2τ delayed by 2τ, with areas
/// 1.2π and 0.8π.
pub fn mismatched_gaussians() -> Vec<PulseSpec> {
    vec![
        PulseSpec::new(PulseShape::Gaussian, 1.2 * PI, TAU, 0.0, Target::Pump),
        PulseSpec::new(PulseShape::Gaussian, 0.8 * PI, 2.0 * TAU, 2.0 * TAU, Target::Stokes),
    ]
}

/// Matched super-gaussians with areas `2.3π(α, β)`.
pub fn matched_supergaussians(prep: &MediumPreparation) -> Vec<PulseSpec> {
    vec![
        PulseSpec::new(PulseShape::Supergaussian, 2.3 * PI * prep.alpha(), TAU, 0.0, Target::Pump),
        PulseSpec::new(PulseShape::Supergaussian, 2.3 * PI * prep.beta(), TAU, 0.0, Target::Stokes),
    ]
}

/// Free propagation over `depths` absorption lengths `1/κ`, on a uniform
/// detuning grid whose spacing is chosen so that its rephasing time
/// `2π/spacing` exceeds the time window.
pub struct FreeRun {
    pub prep: MediumPreparation,
    pub pulses: Vec<PulseSpec>,
    pub depths: f64,
    pub t_window: (f64, f64),
    pub dt: f64,
    pub dz_kappa: f64,
    pub snapshots_per_depth: usize,
}

pub struct FreeResult {
    pub kappa: f64,
    pub mu: f64,
    pub traj: Trajectory,
}

impl FreeRun {
    pub fn run(&self) -> FreeResult {
        let (t_lo, t_hi) = self.t_window;
        let spacing = 2.0 * PI / (1.1 * (t_hi - t_lo));
        let ens = make_uniform_ensemble(1.0, spacing, 6.0).unwrap();
        let mu = half_speed_mu(&ens);
        let kappa = mixonium::medium::kappa(mu, TAU, &ens);
        let n_t = ((t_hi - t_lo) / self.dt).round() as usize + 1;
        let n_z = (self.depths / self.dz_kappa).round() as usize + 1;
        let grid = Grid::new(t_lo, t_hi, n_t, 0.0, self.depths / kappa, n_z).unwrap();
        let stride = ((1.0 / self.dz_kappa) / self.snapshots_per_depth as f64).round() as usize;
        let sc = Scenario::new(grid, mu, self.prep, ens, &self.pulses).unwrap().with_stride(stride);
        let traj = propagate(&sc).unwrap();
        assert!(traj.is_complete(), "{:?}", traj.failure);
        FreeResult { kappa, mu, traj }
    }
}

/// `Ω_a/Ω_b` at the peak of `Ω_T`.
pub fn ratio_at_peak(a: &[C64], b: &[C64]) -> f64 {
    let j = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.norm_sqr() + y.norm_sqr())
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap()
        .0;
    a[j].re / b[j].re
}
