//! On-disk layout of a run directory.
//!
//! ```text
//! manifest.json            config, derived constants, status, snapshot index
//! snapshots/snap_NNNNN.csv T, re_omega_a, im_omega_a, re_omega_b, im_omega_b, rho33, rho_dd, dd_valid
//! areas.csv                z, kappa_z, area_a, area_b, area_a_im, area_b_im, area_total
//! line_center.csv          z, kappa_z, max_rho33, max_rho_dd, trace_error, purity_error
//! fits.json                scalar diagnostics
//! FAILED                   present only when the run aborted
//! ```
//!
//! Floats are written in shortest round-trip form, so re-reading a file
//! recovers the exact values.

use mixonium::diagnostics::AreaRecord;
use mixonium::propagator::{Failure, LineCenterRecord, Snapshot};
use mixonium::C64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{Derived, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SNAPSHOT_COLUMNS: [&str; 8] =
    ["T", "re_omega_a", "im_omega_a", "re_omega_b", "im_omega_b", "rho33", "rho_dd", "dd_valid"];

/// Environment variable naming the directory that relative output paths are
/// resolved against.
pub const OUTPUT_ROOT_VAR: &str = "MIXONIUM_OUTPUT_ROOT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Simulation,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub z: f64,
    pub kappa_z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub time: String,
    pub rabi_frequency: String,
    pub z: String,
    pub kappa_z: String,
    pub area: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            time: "retarded time T in units of T2*".into(),
            rabi_frequency: "1/T2*".into(),
            z: "propagation coordinate with c = 1 and T2* = 1".into(),
            kappa_z: "absorption depths".into(),
            area: "radians".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: Kind,
    pub status: Status,
    pub failure: Option<Failure>,
    pub warnings: Vec<String>,
    pub units: Units,
    pub config: RunConfig,
    pub derived: Derived,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Resolves a relative output path against the output root.
pub fn resolve_dir(dir: &str) -> PathBuf {
    let p = PathBuf::from(dir);
    match std::env::var_os(OUTPUT_ROOT_VAR) {
        Some(root) if p.is_relative() => PathBuf::from(root).join(p),
        _ => p,
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| io(path, e))
}

fn f(v: f64) -> String {
    format!("{v}")
}

pub struct RunWriter {
    pub dir: PathBuf,
    kappa: f64,
    entries: Vec<SnapshotEntry>,
}

impl RunWriter {
    /// Prepares `dir`, removing outputs of an earlier run in the same place.
    pub fn create(dir: PathBuf, kappa: f64) -> Result<Self, CliError> {
        let snaps = dir.join(SNAPSHOT_DIR);
        if snaps.exists() {
            fs::remove_dir_all(&snaps).map_err(|e| io(&snaps, e))?;
        }
        for stale in ["FAILED", "areas.csv", "line_center.csv", "fits.json", "frames.csv", "zeta_table.csv"] {
            let p = dir.join(stale);
            if p.exists() {
                fs::remove_file(&p).map_err(|e| io(&p, e))?;
            }
        }
        fs::create_dir_all(&snaps).map_err(|e| io(&snaps, e))?;
        Ok(Self { dir, kappa, entries: Vec::new() })
    }

    pub fn snapshot(&mut self, times: &[f64], s: &Snapshot) -> Result<(), CliError> {
        let name = format!("{SNAPSHOT_DIR}/snap_{:05}.csv", self.entries.len());
        let path = self.dir.join(&name);
        let mut w = csv_writer(&path)?;
        w.write_record(SNAPSHOT_COLUMNS).map_err(|e| io(&path, e))?;
        for (j, &t) in times.iter().enumerate() {
            let (a, b) = (s.omega_a[j], s.omega_b[j]);
            let rho33 = s.rho33.get(j).copied().unwrap_or(f64::NAN);
            let dd = s.rho_dd.get(j).copied().unwrap_or(f64::NAN);
            let valid = s.dd_valid.get(j).copied().unwrap_or(false);
            w.write_record([f(t), f(a.re), f(a.im), f(b.re), f(b.im), f(rho33), f(dd), (valid as u8).to_string()])
                .map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        self.entries.push(SnapshotEntry { file: name, z: s.z, kappa_z: s.z * self.kappa });
        Ok(())
    }

    pub fn areas(&self, records: &[AreaRecord]) -> Result<(), CliError> {
        let path = self.dir.join("areas.csv");
        let mut w = csv_writer(&path)?;
        w.write_record(["z", "kappa_z", "area_a", "area_b", "area_a_im", "area_b_im", "area_total"])
            .map_err(|e| io(&path, e))?;
        for r in records {
            w.write_record([f(r.z), f(r.z * self.kappa), f(r.a_a), f(r.a_b), f(r.a_a_im), f(r.a_b_im), f(r.a_total)])
                .map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    pub fn line_center(&self, records: &[LineCenterRecord]) -> Result<(), CliError> {
        let path = self.dir.join("line_center.csv");
        let mut w = csv_writer(&path)?;
        w.write_record(["z", "kappa_z", "max_rho33", "max_rho_dd", "trace_error", "purity_error"])
            .map_err(|e| io(&path, e))?;
        for r in records {
            w.write_record([
                f(r.z),
                f(r.z * self.kappa),
                f(r.max_rho33),
                f(r.max_rho_dd),
                f(r.trace_error),
                f(r.purity_error),
            ])
            .map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    /// Writes a table given as a header and rows of numbers.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = csv_writer(&path)?;
        w.write_record(header).map_err(|e| io(&path, e))?;
        for r in rows {
            w.write_record(r.iter().map(|v| f(*v))).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        write_json(&self.dir.join(name), value)
    }

    pub fn finish(
        self,
        kind: Kind,
        config: &RunConfig,
        derived: &Derived,
        warnings: Vec<String>,
        failure: Option<Failure>,
    ) -> Result<Manifest, CliError> {
        let status = if failure.is_some() { Status::Failed } else { Status::Ok };
        if let Some(fl) = &failure {
            let p = self.dir.join("FAILED");
            fs::write(&p, format!("z = {}\n{}\n", fl.z, fl.message)).map_err(|e| io(&p, e))?;
        }
        let m = Manifest {
            schema_version: SCHEMA_VERSION,
            kind,
            status,
            failure,
            warnings,
            units: Units::default(),
            config: config.clone(),
            derived: derived.clone(),
            snapshots: self.entries,
        };
        write_json(&self.dir.join(MANIFEST), &m)?;
        Ok(m)
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io(path, e))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| io(&path, e))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| io(&path, e))?;
    if m.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "{}: schema version {} is not {}",
            path.display(),
            m.schema_version,
            SCHEMA_VERSION
        )));
    }
    Ok(m)
}

#[derive(Deserialize)]
struct Row {
    #[serde(rename = "T")]
    t: f64,
    re_omega_a: f64,
    im_omega_a: f64,
    re_omega_b: f64,
    im_omega_b: f64,
    rho33: f64,
    rho_dd: f64,
    dd_valid: u8,
}

/// Reads every snapshot listed in a manifest, with the shared time axis.
pub fn read_snapshots(dir: &Path, m: &Manifest) -> Result<(Vec<f64>, Vec<Snapshot>), CliError> {
    let mut times = Vec::new();
    let mut out = Vec::with_capacity(m.snapshots.len());
    for (k, e) in m.snapshots.iter().enumerate() {
        let path = dir.join(&e.file);
        let mut r = csv::Reader::from_path(&path).map_err(|er| io(&path, er))?;
        let mut s = Snapshot {
            z: e.z,
            omega_a: Vec::new(),
            omega_b: Vec::new(),
            rho33: Vec::new(),
            rho_dd: Vec::new(),
            dd_valid: Vec::new(),
        };
        for row in r.deserialize::<Row>() {
            let row = row.map_err(|er| io(&path, er))?;
            if k == 0 {
                times.push(row.t);
            }
            s.omega_a.push(C64::new(row.re_omega_a, row.im_omega_a));
            s.omega_b.push(C64::new(row.re_omega_b, row.im_omega_b));
            s.rho33.push(row.rho33);
            s.rho_dd.push(row.rho_dd);
            s.dd_valid.push(row.dd_valid != 0);
        }
        if s.omega_a.len() != times.len() {
            return Err(CliError::Io(format!(
                "{}: expected {} rows, found {}",
                path.display(),
                times.len(),
                s.omega_a.len()
            )));
        }
        out.push(s);
    }
    Ok((times, out))
}
