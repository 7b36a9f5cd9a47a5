//! CSV and manifest emission.
//!
//! Floats are written with Rust's shortest round-trip formatting, so files
//! regenerate byte-identically and parse back to the exact simulated
//! values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use setr_core::market::SimulationPath;
use setr_core::rng::derive_seed;
use setr_core::SetrCurve;

use crate::error::CliError;

fn write_file(path: &Path, body: String) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes the strong-curve CSV (`t_prime_days,phi`) and returns its path.
pub fn write_curve_csv(out_dir: &Path, curve: &SetrCurve) -> Result<PathBuf, CliError> {
    let path = out_dir.join("curve.csv");
    let mut body = String::from("t_prime_days,phi\n");
    for (t, phi) in curve.grid.iter().zip(&curve.values) {
        body.push_str(&format!("{t},{phi}\n"));
    }
    write_file(&path, body)?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestPathEntry {
    pub index: u64,
    pub file: String,
    pub arrival_seed: u64,
    pub noise_seed: u64,
    pub transition_time_days: f64,
    pub transitioned_within_horizon: bool,
}

/// Sidecar describing a batch of emitted paths: seeds, transition times and
/// the switches that shaped the price model.
#[derive(Debug, Clone, Serialize)]
pub struct PathsManifest {
    pub scenario: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub phi: f64,
    pub premium_application: String,
    pub clamp_at_zero: bool,
    pub price_model_note: String,
    pub paths: Vec<ManifestPathEntry>,
}

/// Writes one CSV per path (`t_days,riskfree,carbon`) plus `manifest.json`.
/// An empty path list still produces a manifest.
pub fn emit_paths(
    out_dir: &Path,
    paths: &[SimulationPath],
    horizon_end: f64,
    mut manifest: PathsManifest,
) -> Result<PathBuf, CliError> {
    for (i, path) in paths.iter().enumerate() {
        let file = format!("path_{i:04}.csv");
        let mut body = String::from("t_days,riskfree,carbon\n");
        for k in 0..path.times.len() {
            body.push_str(&format!(
                "{},{},{}\n",
                path.times[k], path.riskfree[k], path.carbon[k]
            ));
        }
        write_file(&out_dir.join(&file), body)?;
        manifest.paths.push(ManifestPathEntry {
            index: i as u64,
            file,
            arrival_seed: derive_seed(manifest.master_seed, 2 * i as u64),
            noise_seed: derive_seed(manifest.master_seed, 2 * i as u64 + 1),
            transition_time_days: path.transition_time,
            transitioned_within_horizon: path.transition_time <= horizon_end,
        });
    }
    let path = out_dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("manifest serialization failed: {e}")))?;
    write_file(&path, body + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn empty_manifest() -> PathsManifest {
        PathsManifest {
            scenario: "t".into(),
            config_hash: "h".into(),
            master_seed: 1,
            phi: 0.0,
            premium_application: "additive".into(),
            clamp_at_zero: false,
            price_model_note: String::new(),
            paths: Vec::new(),
        }
    }

    #[test]
    fn empty_path_list_still_writes_manifest() {
        let tmp = TempDir::new().unwrap();
        let manifest_path = emit_paths(tmp.path(), &[], 750.0, empty_manifest()).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(manifest_path).unwrap()).unwrap();
        assert_eq!(value["paths"].as_array().unwrap().len(), 0);
        assert!(std::fs::read_dir(tmp.path()).unwrap().count() == 1);
    }

    #[test]
    fn io_failure_carries_path_context() {
        let missing = Path::new("/nonexistent-dir-for-sure/out");
        let err = emit_paths(missing, &[], 0.0, empty_manifest()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("manifest.json"), "{msg}");
    }

    #[test]
    fn curve_csv_round_trips_floats() {
        let tmp = TempDir::new().unwrap();
        let curve = SetrCurve {
            grid: vec![1.0, 2.5],
            values: vec![0.1234567890123456, 0.75],
            skipped: Vec::new(),
        };
        let path = write_curve_csv(tmp.path(), &curve).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t_prime_days,phi"));
        let first = lines.next().unwrap();
        let phi: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(phi.to_bits(), 0.1234567890123456_f64.to_bits());
    }
}
