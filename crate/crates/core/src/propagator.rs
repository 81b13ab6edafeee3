//! Maxwell–Bloch marching in the retarded frame.
//!
//! At each depth the atoms of every detuning class are integrated through the
//! pulse with RK4 in `T`; their coherences are averaged over the line and the
//! fields are advanced in `Z` with a Heun predictor–corrector step.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{mixonium_pulses, AnalyticParams};
use crate::diagnostics::AreaRecord;
use crate::dressed::dark_population_series;
use crate::matrix::Rho;
use crate::medium::{DetuningEnsemble, Grid, MediumPreparation};
use crate::pulse::{synth_fields, PulseSpec, WINDOW_EDGE_LIMIT};
use crate::series::{max_abs, midpoints};
use crate::{Error, Result};

/// Largest trace drift tolerated inside a single Bloch integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Bound on `ΔZ·μ·max|⟨ρ₁₃⟩|`; steps are halved until it holds.
pub const STEP_GUARD: f64 = 0.1;

/// Pump and Stokes envelopes on the time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fields {
    pub omega_a: Vec<C64>,
    pub omega_b: Vec<C64>,
}

impl Fields {
    pub fn new(omega_a: Vec<C64>, omega_b: Vec<C64>) -> Result<Self> {
        if omega_a.len() != omega_b.len() {
            return Err(Error::LengthMismatch { expected: omega_a.len(), found: omega_b.len() });
        }
        Ok(Self { omega_a, omega_b })
    }

    pub fn len(&self) -> usize {
        self.omega_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_a.is_empty()
    }

    fn is_finite(&self) -> bool {
        self.omega_a.iter().chain(&self.omega_b).all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Line-averaged coherences `⟨ρ₁₃⟩(T)` and `⟨ρ₂₃⟩(T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization {
    pub p13: Vec<C64>,
    pub p23: Vec<C64>,
}

impl Polarization {
    fn max_abs(&self) -> f64 {
        max_abs(&self.p13).max(max_abs(&self.p23))
    }
}

/// RK4 march over `T` with half-step fields supplied; `visit` sees every
/// sample including the initial one.
#[allow(clippy::too_many_arguments)]
fn march(
    rho0: Rho,
    a: &[C64],
    b: &[C64],
    am: &[C64],
    bm: &[C64],
    delta: f64,
    dt: f64,
    mut visit: impl FnMut(usize, &Rho),
) -> Result<()> {
    let mut r = rho0;
    visit(0, &r);
    let h = 0.5 * dt;
    for j in 0..a.len().saturating_sub(1) {
        let k1 = r.bloch_rhs(a[j], b[j], delta);
        let k2 = (r + k1 * h).bloch_rhs(am[j], bm[j], delta);
        let k3 = (r + k2 * h).bloch_rhs(am[j], bm[j], delta);
        let k4 = (r + k3 * dt).bloch_rhs(a[j + 1], b[j + 1], delta);
        r = r + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        let drift = (r.trace() - 1.0).abs();
        if !(drift <= TRACE_DRIFT_LIMIT) {
            return Err(Error::Step(format!("trace drift {drift:.3e} at sample {} (Δ = {delta})", j + 1)));
        }
        visit(j + 1, &r);
    }
    Ok(())
}

/// Density matrix of one detuning class along the time grid.
pub fn bloch_integrate(initial: &Rho, omega_a: &[C64], omega_b: &[C64], delta: f64, dt: f64) -> Result<Vec<Rho>> {
    if omega_a.len() != omega_b.len() {
        return Err(Error::LengthMismatch { expected: omega_a.len(), found: omega_b.len() });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Step(format!("dt must be positive and finite, got {dt}")));
    }
    if (initial.trace() - 1.0).abs() > 1e-12 || initial.r11 < 0.0 || initial.r22 < 0.0 || initial.r33 < 0.0 {
        return Err(Error::Step("initial density matrix must have unit trace".into()));
    }
    let (am, bm) = (midpoints(omega_a), midpoints(omega_b));
    let mut out = vec![Rho::default(); omega_a.len()];
    march(*initial, omega_a, omega_b, &am, &bm, delta, dt, |j, r| out[j] = *r)?;
    Ok(out)
}

/// Weighted line averages of `ρ₁₃` and `ρ₂₃` at one time sample.
pub fn polarization_average(atoms: &[Rho], ensemble: &DetuningEnsemble) -> Result<(C64, C64)> {
    if atoms.len() != ensemble.len() {
        return Err(Error::LengthMismatch { expected: ensemble.len(), found: atoms.len() });
    }
    let mut p = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for (r, n) in atoms.iter().zip(&ensemble.nodes) {
        p.0 += n.weight * r.r13;
        p.1 += n.weight * r.r23;
    }
    Ok(p)
}

/// Atomic response of an inhomogeneously broadened line to given fields.
#[derive(Clone, Debug)]
pub struct MaxwellSolver {
    pub ensemble: DetuningEnsemble,
    pub rho0: Rho,
    pub mu: f64,
    pub dt: f64,
}

impl MaxwellSolver {
    pub fn new(ensemble: DetuningEnsemble, prep: &MediumPreparation, mu: f64, dt: f64) -> Self {
        Self { ensemble, rho0: Rho::from_matrix(&prep.initial_density_matrix()), mu, dt }
    }

    /// `⟨ρ₁₃⟩(T)`, `⟨ρ₂₃⟩(T)` for the fields. Nodes are processed in
    /// fixed-size chunks whose partial sums are combined in node order, so the
    /// result does not depend on the number of worker threads.
    pub fn polarization(&self, fields: &Fields) -> Result<Polarization> {
        let n = fields.len();
        let (a, b) = (&fields.omega_a[..], &fields.omega_b[..]);
        let (am, bm) = (midpoints(a), midpoints(b));
        let nodes = &self.ensemble.nodes;
        let chunk = nodes.len().div_ceil(64).max(4);
        let partial: Vec<Result<Polarization>> = nodes
            .par_chunks(chunk)
            .map(|group| {
                let mut acc = Polarization { p13: vec![C64::new(0.0, 0.0); n], p23: vec![C64::new(0.0, 0.0); n] };
                for node in group {
                    let w = node.weight;
                    march(self.rho0, a, b, &am, &bm, node.delta, self.dt, |j, r| {
                        acc.p13[j] += w * r.r13;
                        acc.p23[j] += w * r.r23;
                    })?;
                }
                Ok(acc)
            })
            .collect();
        let mut total = Polarization { p13: vec![C64::new(0.0, 0.0); n], p23: vec![C64::new(0.0, 0.0); n] };
        for p in partial {
            let p = p?;
            for j in 0..n {
                total.p13[j] += p.p13[j];
                total.p23[j] += p.p23[j];
            }
        }
        Ok(total)
    }

    /// One Heun step of length `dz` from fields whose polarization is `p0`.
    /// Returns the new fields and their polarization.
    pub fn step(&self, fields: &Fields, p0: &Polarization, dz: f64) -> Result<(Fields, Polarization)> {
        let k = C64::new(0.0, -self.mu * dz);
        let predict = |f: &[C64], p: &[C64]| f.iter().zip(p).map(|(f, p)| f + k * p).collect::<Vec<_>>();
        let star = Fields { omega_a: predict(&fields.omega_a, &p0.p13), omega_b: predict(&fields.omega_b, &p0.p23) };
        let ps = self.polarization(&star)?;
        let correct = |f: &[C64], p0: &[C64], ps: &[C64]| {
            f.iter().zip(p0).zip(ps).map(|((f, a), b)| f + 0.5 * k * (a + b)).collect::<Vec<_>>()
        };
        let next = Fields {
            omega_a: correct(&fields.omega_a, &p0.p13, &ps.p13),
            omega_b: correct(&fields.omega_b, &p0.p23, &ps.p23),
        };
        let pn = self.polarization(&next)?;
        Ok((next, pn))
    }
}

/// Heun advance of `fields` by `dz`; see [`MaxwellSolver::step`].
pub fn maxwell_step(
    solver: &MaxwellSolver,
    fields: &Fields,
    polarization: &Polarization,
    dz: f64,
) -> Result<(Fields, Polarization)> {
    solver.step(fields, polarization, dz)
}

/// Everything needed for one propagation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub grid: Grid,
    pub mu: f64,
    pub prep: MediumPreparation,
    pub ensemble: DetuningEnsemble,
    pub input: Fields,
    /// Record a full snapshot every `snapshot_stride` Z steps (and at both ends).
    pub snapshot_stride: usize,
    /// Integrate a line-center atom for ρ₃₃ and dark-population observables.
    pub line_center_observables: bool,
}

impl Scenario {
    pub fn new(
        grid: Grid,
        mu: f64,
        prep: MediumPreparation,
        ensemble: DetuningEnsemble,
        pulses: &[PulseSpec],
    ) -> Result<Self> {
        let (a, b) = synth_fields(pulses, &grid)?;
        Self::with_fields(grid, mu, prep, ensemble, Fields::new(a, b)?)
    }

    pub fn with_fields(
        grid: Grid,
        mu: f64,
        prep: MediumPreparation,
        ensemble: DetuningEnsemble,
        input: Fields,
    ) -> Result<Self> {
        let s = Self { grid, mu, prep, ensemble, input, snapshot_stride: 1, line_center_observables: true };
        s.validate()?;
        Ok(s)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::Scenario(format!("coupling must be finite and nonnegative, got {}", self.mu)));
        }
        if self.ensemble.is_empty() {
            return Err(Error::Scenario("empty detuning ensemble".into()));
        }
        if self.input.len() != self.grid.n_t {
            return Err(Error::LengthMismatch { expected: self.grid.n_t, found: self.input.len() });
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Scenario("snapshot stride must be at least 1".into()));
        }
        check_window(&self.input)
    }
}

/// Envelopes must be negligible at both ends of the time window.
pub fn check_window(fields: &Fields) -> Result<()> {
    let peak = max_abs(&fields.omega_a).max(max_abs(&fields.omega_b));
    if peak == 0.0 {
        return Ok(());
    }
    let n = fields.len();
    let edge =
        [0, n - 1].iter().map(|&j| fields.omega_a[j].norm().max(fields.omega_b[j].norm())).fold(0.0, f64::max) / peak;
    if edge > WINDOW_EDGE_LIMIT {
        return Err(Error::WindowTooNarrow { edge, limit: WINDOW_EDGE_LIMIT });
    }
    Ok(())
}

/// Replaces the scenario's inflow with the analytic fields at `z0`, which
/// becomes the start of the propagation range. The second value is a warning
/// when `z0` is too shallow for the inflow to be a clean input-regime state.
pub fn seed_with_analytic(
    mut scenario: Scenario,
    params: &AnalyticParams,
    z0: f64,
) -> Result<(Scenario, Option<String>)> {
    if params.prep != scenario.prep {
        return Err(Error::Scenario("analytic parameters use a different medium preparation".into()));
    }
    if !(z0 < scenario.grid.z_max) {
        return Err(Error::Scenario(format!("seed depth {z0} must lie before z_max = {}", scenario.grid.z_max)));
    }
    scenario.grid.z_min = z0;
    let (a, b): (Vec<C64>, Vec<C64>) =
        scenario.grid.times().into_iter().map(|t| mixonium_pulses(params, z0, t)).unzip();
    scenario.input = Fields::new(a, b)?;
    scenario.validate()?;
    let depth = -params.kappa * z0;
    let warning = (depth < 4.0)
        .then(|| format!("seed depth −κz0 = {depth:.2} < 4: inflow still carries output-regime admixture"));
    Ok((scenario, warning))
}

/// Field envelopes and line-center atomic observables at one depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub z: f64,
    pub omega_a: Vec<C64>,
    pub omega_b: Vec<C64>,
    /// Line-center excited-state population; empty when not recorded.
    pub rho33: Vec<f64>,
    /// Line-center dark-state population, 0 where the basis is undefined.
    pub rho_dd: Vec<f64>,
    pub dd_valid: Vec<bool>,
}

/// Per-step line-center summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineCenterRecord {
    pub z: f64,
    pub max_rho33: f64,
    /// Largest dark population over the samples where the basis is defined.
    pub max_rho_dd: f64,
    /// Largest |Tr ρ − 1| and |Tr ρ² − Tr ρ₀²| along the pulse.
    pub trace_error: f64,
    pub purity_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub z: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub dt: f64,
    pub snapshots: Vec<Snapshot>,
    pub areas: Vec<AreaRecord>,
    pub line_center: Vec<LineCenterRecord>,
    pub warnings: Vec<String>,
    /// Set when the run aborted; the records up to the failure are kept.
    pub failure: Option<Failure>,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

fn line_center_state(solver: &MaxwellSolver, fields: &Fields) -> Result<Vec<Rho>> {
    bloch_integrate(&solver.rho0, &fields.omega_a, &fields.omega_b, 0.0, solver.dt)
}

fn line_center_record(z: f64, rho0: &Rho, rhos: &[Rho], dd: &[f64], valid: &[bool]) -> LineCenterRecord {
    let p0 = rho0.purity();
    LineCenterRecord {
        z,
        max_rho33: rhos.iter().map(|r| r.r33).fold(f64::NEG_INFINITY, f64::max),
        max_rho_dd: dd.iter().zip(valid).filter(|(_, v)| **v).map(|(d, _)| *d).fold(0.0, f64::max),
        trace_error: rhos.iter().map(|r| (r.trace() - 1.0).abs()).fold(0.0, f64::max),
        purity_error: rhos.iter().map(|r| (r.purity() - p0).abs()).fold(0.0, f64::max),
    }
}

fn observe(
    solver: &MaxwellSolver,
    z: f64,
    fields: &Fields,
    traj: &mut Trajectory,
    snapshot: bool,
    line_center: bool,
) -> Result<()> {
    traj.areas.push(AreaRecord::from_fields(z, &fields.omega_a, &fields.omega_b, traj.dt));
    let (mut rho33, mut dd, mut valid) = (Vec::new(), Vec::new(), Vec::new());
    if line_center {
        let rhos = line_center_state(solver, fields)?;
        let mats: Vec<_> = rhos.iter().map(Rho::to_matrix).collect();
        (dd, valid) = dark_population_series(&mats, &fields.omega_a, &fields.omega_b)?;
        traj.line_center.push(line_center_record(z, &solver.rho0, &rhos, &dd, &valid));
        rho33 = rhos.iter().map(|r| r.r33).collect();
    }
    if snapshot {
        traj.snapshots.push(Snapshot {
            z,
            omega_a: fields.omega_a.clone(),
            omega_b: fields.omega_b.clone(),
            rho33,
            rho_dd: dd,
            dd_valid: valid,
        });
    }
    Ok(())
}

/// Marches the scenario's inflow from `z_min` to `z_max`.
///
/// Invalid scenarios are rejected with an error. Numerical failures during the
/// march end the run early: the returned trajectory keeps everything recorded
/// so far and carries a [`Failure`].
pub fn propagate(scenario: &Scenario) -> Result<Trajectory> {
    scenario.validate()?;
    let grid = &scenario.grid;
    let solver = MaxwellSolver::new(scenario.ensemble.clone(), &scenario.prep, scenario.mu, grid.dt());
    let mut traj = Trajectory {
        times: grid.times(),
        dt: grid.dt(),
        snapshots: Vec::new(),
        areas: Vec::new(),
        line_center: Vec::new(),
        warnings: Vec::new(),
        failure: None,
    };
    let lc = scenario.line_center_observables;
    let mut fields = scenario.input.clone();
    let fail = |traj: &mut Trajectory, z: f64, e: Error| {
        let message = match e {
            Error::Step(m) => m,
            other => other.to_string(),
        };
        traj.failure = Some(Failure { z, message });
    };

    let mut p = match solver.polarization(&fields) {
        Ok(p) => p,
        Err(e) => {
            fail(&mut traj, grid.z_min, e);
            return Ok(traj);
        }
    };
    if let Err(e) = observe(&solver, grid.z_min, &fields, &mut traj, true, lc) {
        fail(&mut traj, grid.z_min, e);
        return Ok(traj);
    }

    let dz = grid.dz();
    let mut halvings = 0usize;
    for k in 1..grid.n_z {
        let z_start = grid.z(k - 1);
        let mut sub = 1usize;
        while dz / sub as f64 * scenario.mu * p.max_abs() > STEP_GUARD {
            sub *= 2;
        }
        if sub > 1 {
            halvings += 1;
        }
        let h = dz / sub as f64;
        for s in 0..sub {
            match solver.step(&fields, &p, h) {
                Ok((f, pn)) if f.is_finite() => {
                    fields = f;
                    p = pn;
                }
                Ok(_) => {
                    let z = z_start + (s + 1) as f64 * h;
                    fail(&mut traj, z, Error::Instability { z, reason: "non-finite field".into() });
                    return Ok(traj);
                }
                Err(e) => {
                    let z = z_start + s as f64 * h;
                    fail(&mut traj, z, Error::Instability { z, reason: e.to_string() });
                    return Ok(traj);
                }
            }
        }
        let z = grid.z(k);
        let snap = k % scenario.snapshot_stride == 0 || k == grid.n_z - 1;
        if let Err(e) = observe(&solver, z, &fields, &mut traj, snap, lc) {
            fail(&mut traj, z, e);
            return Ok(traj);
        }
    }
    if halvings > 0 {
        traj.warnings.push(format!("step guard subdivided {halvings} of {} Z steps", grid.n_z - 1));
    }
    Ok(traj)
}
