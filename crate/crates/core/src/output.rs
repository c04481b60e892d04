//! Result files. CSVs are long-format and carry full provenance on every
//! row; `.dat` files are whitespace-separated columns for gnuplot. Numbers
//! are written with Rust's shortest round-trip formatting, so equal results
//! give byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::runner::{RunResult, SweepRow, SweepSummary};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns: seed, config_hash, method, M, L, N_r, angle_deg, magnitude,
/// phase_rad.
pub fn write_spectra_csv(path: impl AsRef<Path>, run: &RunResult) -> Result<()> {
    let p = &run.provenance;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["seed", "config_hash", "method", "M", "L", "N_r", "angle_deg", "magnitude", "phase_rad"])?;
    for m in &run.methods {
        for i in 0..m.angles_deg.len() {
            w.write_record([
                p.seed.to_string(),
                p.config_hash.clone(),
                m.method.to_string(),
                p.measurements.to_string(),
                p.snapshots.to_string(),
                p.receive_antennas.to_string(),
                m.angles_deg[i].to_string(),
                m.magnitude[i].to_string(),
                m.phase_rad[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-method PRR of a single run. Columns: seed, config_hash, method, M, L,
/// N_r, prr, prr_db, status.
pub fn write_prr_csv(path: impl AsRef<Path>, run: &RunResult) -> Result<()> {
    let p = &run.provenance;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["seed", "config_hash", "method", "M", "L", "N_r", "prr", "prr_db", "status"])?;
    for m in &run.methods {
        let status = match &m.error {
            Some(e) => format!("failed: {}", e.kind),
            None => "ok".into(),
        };
        w.write_record([
            p.seed.to_string(),
            p.config_hash.clone(),
            m.method.to_string(),
            p.measurements.to_string(),
            p.snapshots.to_string(),
            p.receive_antennas.to_string(),
            opt(m.prr),
            opt(m.prr_db()),
            status,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: axis, value, method, trial, prr, prr_db, status, seed,
/// config_hash, M, L, N_r.
pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "axis",
        "value",
        "method",
        "trial",
        "prr",
        "prr_db",
        "status",
        "seed",
        "config_hash",
        "M",
        "L",
        "N_r",
    ])?;
    for r in rows {
        w.write_record([
            r.axis.to_string(),
            r.value.to_string(),
            r.method.to_string(),
            r.trial.map(|t| t.to_string()).unwrap_or_default(),
            opt(r.prr),
            opt(r.prr_db()),
            r.status.clone(),
            r.seed.to_string(),
            r.config_hash.clone(),
            r.measurements.to_string(),
            r.snapshots.to_string(),
            r.receive_antennas.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: impl AsRef<Path>, summary: &[SweepSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "axis",
        "value",
        "method",
        "trials",
        "ok",
        "infinite",
        "mean_prr_db",
        "stderr_prr_db",
        "peak_hit_rate",
    ])?;
    for s in summary {
        w.write_record([
            s.axis.to_string(),
            s.value.to_string(),
            s.method.to_string(),
            s.trials.to_string(),
            s.ok.to_string(),
            s.infinite.to_string(),
            s.mean_prr_db.to_string(),
            s.stderr_prr_db.to_string(),
            s.peak_hit_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One `spectrum_<method>.dat` per method: `angle_deg magnitude`.
pub fn write_spectra_dat(dir: impl AsRef<Path>, run: &RunResult) -> Result<()> {
    for m in &run.methods {
        let mut f = BufWriter::new(File::create(dir.as_ref().join(format!("spectrum_{}.dat", m.method)))?);
        writeln!(f, "# angle_deg magnitude ({})", m.method)?;
        for (a, v) in m.angles_deg.iter().zip(&m.magnitude) {
            writeln!(f, "{a} {v}")?;
        }
        f.flush()?;
    }
    Ok(())
}

/// One `sweep_<method>.dat` per method: `value mean_prr_db stderr_prr_db`.
pub fn write_summary_dat(dir: impl AsRef<Path>, summary: &[SweepSummary]) -> Result<()> {
    let mut methods: Vec<_> = summary.iter().map(|s| s.method).collect();
    methods.dedup();
    methods.sort();
    methods.dedup();
    for method in methods {
        let mut f = BufWriter::new(File::create(dir.as_ref().join(format!("sweep_{method}.dat")))?);
        writeln!(f, "# value mean_prr_db stderr_prr_db ({method})")?;
        for s in summary.iter().filter(|s| s.method == method) {
            writeln!(f, "{} {} {}", s.value, s.mean_prr_db, s.stderr_prr_db)?;
        }
        f.flush()?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| crate::error::Error::Config(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}
