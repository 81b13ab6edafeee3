use mixonium::analytic::{analytic_pulse_areas, excited_state_probability, mixonium_density_matrix, pulse_series};
use mixonium::diagnostics::{
    beer_decay_fit, group_velocity_fit, matching_metric, peak_dark_population, pulse_area, regime_classify, sech_fit,
    total_area, AreaRecord, RegimeThresholds, Which,
};
use mixonium::dressed::{dark_population_series, total_rabi};
use mixonium::matrix::Rho;
use mixonium::medium::MediumPreparation;
use mixonium::propagator::{propagate, LineCenterRecord, Snapshot};
use mixonium::C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::config::{Observable, RunConfig};
use crate::output::{read_manifest, read_snapshots, resolve_dir, write_json, Kind, RunWriter};
use crate::CliError;

fn outcome<T: Serialize>(r: mixonium::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => resolve_dir(&p.to_string_lossy()),
        None => resolve_dir(&cfg.output.directory),
    }
}

/// Runs a propagation and writes its artifacts. A run that aborts part-way
/// still writes everything recorded up to the failure.
pub fn simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let r = cfg.resolve()?;
    let (sc, mut warnings) = r.scenario(cfg)?;
    let traj = propagate(&sc)?;
    warnings.extend(traj.warnings.iter().cloned());

    let mut w = RunWriter::create(output_dir(cfg, out), r.derived.kappa)?;
    for s in &traj.snapshots {
        w.snapshot(&traj.times, s)?;
    }
    if cfg.observes(Observable::Areas) {
        w.areas(&traj.areas)?;
    }
    if cfg.observes(Observable::LineCenter) {
        w.line_center(&traj.line_center)?;
    }
    if cfg.observes(Observable::Fits) {
        w.json("fits.json", &exit_fits(&traj.snapshots, &traj.times, &r.prep, r.derived.reference_width))?;
    }
    let dir = w.dir.clone();
    let m = w.finish(Kind::Simulation, cfg, &r.derived, warnings, traj.failure.clone())?;
    match m.failure {
        Some(f) => Err(CliError::Numerical(format!("propagation aborted at z = {}: {}", f.z, f.message))),
        None => Ok(dir),
    }
}

/// Scalar diagnostics of the last snapshot.
fn exit_fits(snaps: &[Snapshot], times: &[f64], prep: &MediumPreparation, tau: f64) -> Value {
    let Some(s) = snaps.last() else { return json!({}) };
    let dt = times[1] - times[0];
    let wt: Vec<C64> = s.omega_a.iter().zip(&s.omega_b).map(|(a, b)| C64::new(total_rabi(*a, *b), 0.0)).collect();
    let peak = wt.iter().enumerate().max_by(|x, y| x.1.re.total_cmp(&y.1.re)).map_or(0, |(j, _)| j);
    let ratio = if s.omega_b[peak].norm() > 0.0 { Some((s.omega_a[peak] / s.omega_b[peak]).re) } else { None };
    let dark = peak_dark_population(s);
    json!({
        "z": s.z,
        "area_a": outcome(pulse_area(&s.omega_a, dt)),
        "area_b": outcome(pulse_area(&s.omega_b, dt)),
        "area_total": total_area(&s.omega_a, &s.omega_b, dt),
        "matching_metric": outcome(matching_metric(&s.omega_a, &s.omega_b, dt, tau)),
        "ratio_at_peak": ratio,
        "tan_theta": prep.tan_theta(),
        "peak_dark_population": dark,
        "regime": regime_classify(dark, prep, RegimeThresholds::default()),
        "sech_total": outcome(sech_fit(&wt, times)),
        "sech_pump": outcome(sech_fit(&s.omega_a, times)),
        "sech_stokes": outcome(sech_fit(&s.omega_b, times)),
    })
}

/// Tabulates the analytic solutions with the same file layout as a simulation.
pub fn analytic(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let r = cfg.resolve()?;
    let p = r.analytic_params();
    let grid = r.grid;
    let times = grid.times();
    let stride = cfg.output.snapshot_stride.max(1);
    let mut w = RunWriter::create(output_dir(cfg, out), r.derived.kappa)?;

    let mut snaps = Vec::new();
    let mut records = Vec::new();
    for k in (0..grid.n_z).filter(|k| k % stride == 0 || *k == grid.n_z - 1) {
        let z = grid.z(k);
        let (a, b) = pulse_series(&p, z, &times);
        let mats: Vec<_> = times.iter().map(|&t| mixonium_density_matrix(&p, 0.0, z, t)).collect();
        let (dd, valid) = dark_population_series(&mats, &a, &b)?;
        let rho33: Vec<f64> = times.iter().map(|&t| excited_state_probability(&p, z, t)).collect();
        let rhos: Vec<Rho> = mats.iter().map(Rho::from_matrix).collect();
        let p0 = Rho::from_matrix(&r.prep.initial_density_matrix()).purity();
        records.push(LineCenterRecord {
            z,
            max_rho33: rho33.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            max_rho_dd: dd.iter().zip(&valid).filter(|(_, v)| **v).map(|(d, _)| *d).fold(0.0, f64::max),
            trace_error: rhos.iter().map(|m| (m.trace() - 1.0).abs()).fold(0.0, f64::max),
            purity_error: rhos.iter().map(|m| (m.purity() - p0).abs()).fold(0.0, f64::max),
        });
        let s = Snapshot { z, omega_a: a, omega_b: b, rho33, rho_dd: dd, dd_valid: valid };
        w.snapshot(&times, &s)?;
        snaps.push(s);
    }
    if cfg.observes(Observable::Areas) {
        let areas: Vec<AreaRecord> = (0..grid.n_z)
            .map(|k| {
                let z = grid.z(k);
                let ar = analytic_pulse_areas(&p, z);
                AreaRecord {
                    z,
                    a_a: ar.pump.re,
                    a_b: ar.stokes.re,
                    a_a_im: ar.pump.im,
                    a_b_im: ar.stokes.im,
                    a_total: ar.total,
                }
            })
            .collect();
        w.areas(&areas)?;
    }
    if cfg.observes(Observable::LineCenter) {
        w.line_center(&records)?;
    }
    if cfg.observes(Observable::Fits) {
        w.json("fits.json", &exit_fits(&snaps, &times, &r.prep, r.derived.reference_width))?;
    }
    if !cfg.output.frame_times.is_empty() {
        let mut rows = Vec::new();
        for (i, &t) in cfg.output.frame_times.iter().enumerate() {
            for k in 0..grid.n_z {
                let z = grid.z(k);
                let (a, b) = mixonium::analytic::mixonium_pulses(&p, z, t);
                let rho33 = excited_state_probability(&p, z, t);
                rows.push(vec![(i + 1) as f64, t, z, z * p.kappa, a.re, a.im, b.re, b.im, rho33]);
            }
        }
        let header = ["frame", "T", "z", "kappa_z", "re_omega_a", "im_omega_a", "re_omega_b", "im_omega_b", "rho33"];
        w.table("frames.csv", &header, &rows)?;
    }
    w.table("zeta_table.csv", &ZETA_HEADER, &zeta_table(101))?;
    let dir = w.dir.clone();
    w.finish(Kind::Analytic, cfg, &r.derived, Vec::new(), None)?;
    Ok(dir)
}

const ZETA_HEADER: [&str; 5] = ["lambda", "zeta_split_0.2", "zeta_split_0.4", "zeta_split_0.6", "zeta_split_0.8"];

/// `ζ(λ)` for population splits `α² − β² ∈ {0.2, 0.4, 0.6, 0.8}`.
pub fn zeta_table(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let lambda = k as f64 / (n - 1) as f64;
            let mut row = vec![lambda];
            for split in [0.2, 0.4, 0.6, 0.8] {
                let a2 = 0.5 * (1.0 + split);
                row.push(MediumPreparation::new(a2, 1.0 - a2, lambda, 0.0).map_or(f64::NAN, |p| p.zeta));
            }
            row
        })
        .collect()
}

/// Per-snapshot areas, matching metric and regime of a finished run.
pub fn areas(dir: &Path) -> Result<PathBuf, CliError> {
    let m = read_manifest(dir)?;
    let (_, snaps) = read_snapshots(dir, &m)?;
    let dt = m.derived.dt;
    let prep = MediumPreparation::new(
        m.config.preparation.alpha_sq,
        m.config.preparation.beta_sq.unwrap_or(1.0 - m.config.preparation.alpha_sq),
        m.config.preparation.lambda,
        m.config.preparation.phi,
    )?;
    let path = dir.join("snapshot_areas.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(["z", "kappa_z", "area_a", "area_b", "area_total", "matching_metric", "peak_dark", "regime"])
        .map_err(err)?;
    for s in &snaps {
        let na = |v: mixonium::Result<f64>| v.map_or_else(|_| "nan".to_string(), |x| format!("{x}"));
        let dark = peak_dark_population(s);
        let regime = regime_classify(dark, &prep, RegimeThresholds::default());
        w.write_record([
            format!("{}", s.z),
            format!("{}", s.z * m.derived.kappa),
            na(pulse_area(&s.omega_a, dt)),
            na(pulse_area(&s.omega_b, dt)),
            format!("{}", total_area(&s.omega_a, &s.omega_b, dt)),
            na(matching_metric(&s.omega_a, &s.omega_b, dt, m.derived.reference_width)),
            format!("{dark}"),
            format!("{regime:?}"),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FitObservable {
    Vg,
    Beer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Field {
    Pump,
    Stokes,
    Total,
}

/// Fits over the snapshots with `from ≤ κZ ≤ to`; writes `fit_<observable>.json`.
pub fn fit(
    dir: &Path,
    observable: FitObservable,
    field: Field,
    from: Option<f64>,
    to: Option<f64>,
) -> Result<(PathBuf, Value), CliError> {
    let m = read_manifest(dir)?;
    let (times, snaps) = read_snapshots(dir, &m)?;
    let kappa = m.derived.kappa;
    let chosen: Vec<Snapshot> = snaps
        .into_iter()
        .filter(|s| from.is_none_or(|f| s.z * kappa >= f - 1e-9) && to.is_none_or(|t| s.z * kappa <= t + 1e-9))
        .collect();
    let which = match field {
        Field::Pump => Which::Pump,
        Field::Stokes => Which::Stokes,
        Field::Total => Which::Total,
    };
    let (name, value) = match observable {
        FitObservable::Vg => {
            let f = group_velocity_fit(&chosen, &times, which)?;
            let zeta = m.derived.zeta;
            let kt = kappa * m.derived.reference_width;
            let v = json!({
                "snapshots": chosen.len(),
                "fit": f,
                "input_regime_prediction": 1.0 / (1.0 + zeta * kt),
                "output_regime_prediction": 1.0 / (1.0 + (1.0 - zeta) * kt),
            });
            ("fit_vg.json", v)
        }
        FitObservable::Beer => {
            let f = beer_decay_fit(&chosen, m.derived.dt)?;
            let v = json!({
                "snapshots": chosen.len(),
                "fit": f,
                "alpha_d": m.derived.alpha_d,
                "relative_error": f.alpha / m.derived.alpha_d - 1.0,
            });
            ("fit_beer.json", v)
        }
    };
    let path = dir.join(name);
    write_json(&path, &value)?;
    Ok((path, value))
}

/// A `key=start:stop:step` parameter range.
#[derive(Clone, Debug, PartialEq)]
pub struct Vary {
    pub path: Vec<String>,
    pub label: String,
    pub values: Vec<f64>,
}

impl std::str::FromStr for Vary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (key, range) = s.split_once('=').ok_or("expected key=start:stop:step")?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}")))
            .collect::<Result<_, _>>()?;
        let [a, b, h] = parts[..] else { return Err("expected key=start:stop:step".into()) };
        if !(h > 0.0) || !(b >= a) {
            return Err("need step > 0 and stop ≥ start".into());
        }
        let n = ((b - a) / h + 1e-9).floor() as usize + 1;
        let values = (0..n).map(|k| ((a + k as f64 * h) * 1e12).round() / 1e12).collect();
        let key = key.trim();
        let path: Vec<String> = match key {
            "lambda" | "alpha_sq" | "beta_sq" | "phi" => vec!["preparation".into(), key.into()],
            "mu" | "target_vg" | "t2_star" => vec!["medium".into(), key.into()],
            _ => key.split('.').map(str::to_string).collect(),
        };
        Ok(Self { path, label: key.to_string(), values })
    }
}

fn with_value(cfg: &RunConfig, path: &[String], v: f64) -> Result<RunConfig, CliError> {
    let mut doc = toml::Value::try_from(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let (last, parents) = path.split_last().ok_or_else(|| CliError::Config("empty sweep key".into()))?;
    let mut node = &mut doc;
    for p in parents {
        node = node.get_mut(p.as_str()).ok_or_else(|| CliError::Config(format!("unknown sweep key section {p}")))?;
    }
    let table =
        node.as_table_mut().ok_or_else(|| CliError::Config(format!("{} is not a section", parents.join("."))))?;
    table.insert(last.clone(), toml::Value::Float(v));
    // Setting one coupling specification replaces the other.
    match last.as_str() {
        "mu" => {
            table.remove("target_vg");
        }
        "target_vg" => {
            table.remove("mu");
        }
        _ => {}
    }
    doc.try_into().map_err(|e: toml::de::Error| CliError::Config(format!("sweep value for {}: {e}", path.join("."))))
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    directory: String,
    status: &'static str,
    message: String,
}

/// Runs one scenario per value concurrently, each into its own directory,
/// and writes `sweep.csv` with per-value status. Returns the worst status.
pub fn sweep(cfg: &RunConfig, vary: &Vary, analytic_only: bool, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let base = output_dir(cfg, out);
    std::fs::create_dir_all(&base).map_err(|e| CliError::Io(format!("{}: {e}", base.display())))?;
    let configs: Vec<(f64, RunConfig)> = vary
        .values
        .iter()
        .map(|&v| {
            let mut c = with_value(cfg, &vary.path, v)?;
            c.output.directory = base.join(format!("{}={v}", vary.label)).to_string_lossy().into_owned();
            Ok((v, c))
        })
        .collect::<Result<_, CliError>>()?;
    let results: Vec<(f64, String, Result<PathBuf, CliError>)> = configs
        .par_iter()
        .map(|(v, c)| {
            let dir = PathBuf::from(&c.output.directory);
            let res = if analytic_only { analytic(c, Some(&dir)) } else { simulate(c, Some(&dir)) };
            (*v, c.output.directory.clone(), res)
        })
        .collect();

    let path = base.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut worst: Option<CliError> = None;
    for (value, directory, res) in results {
        let (status, message) = match &res {
            Ok(_) => ("ok", String::new()),
            Err(e) => (e.label(), e.to_string()),
        };
        w.serialize(SweepRow { value, directory, status, message })
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if let Err(e) = res {
            if worst.as_ref().is_none_or(|x| e.exit_code() > x.exit_code()) {
                worst = Some(e);
            }
        }
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match worst {
        Some(e) => Err(e),
        None => Ok(path),
    }
}
