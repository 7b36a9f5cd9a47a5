//! Machine-readable run reports.
//!
//! Every command that gets past validation writes a `report.json`, numerical
//! failures included (those carry a `failed` result and exit 3). Reports
//! contain no timestamps or other nondeterministic content.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use setr_core::{McReport, SetrMethod, SetrResult};

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn method_name(m: SetrMethod) -> &'static str {
    match m {
        SetrMethod::WeakConstant => "weak_constant",
        SetrMethod::GeometricPremium => "geometric_premium",
        SetrMethod::StrongCurvePoint => "strong_curve_point",
        SetrMethod::ResidualCheck => "residual_check",
        SetrMethod::ExpectedEarnings => "expected_earnings",
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReportResult {
    Setr {
        method: &'static str,
        value: f64,
        abs_error_estimate: f64,
    },
    Curve {
        csv_file: String,
        points: usize,
        skipped_grid_points: Vec<f64>,
    },
    Paths {
        n_paths: u64,
        manifest_file: String,
    },
    MonteCarlo {
        n_paths: u64,
        phi: f64,
        phi_source: String,
        mean_premium_earned: f64,
        se_premium: f64,
        mean_loss: f64,
        se_loss: f64,
        residual: f64,
        fraction_transitioned_in_horizon: f64,
        three_se_band: f64,
        passed: bool,
    },
    Failed {
        error: String,
    },
}

impl ReportResult {
    pub fn setr(r: &SetrResult) -> Self {
        ReportResult::Setr {
            method: method_name(r.method),
            value: r.value,
            abs_error_estimate: r.abs_error_estimate,
        }
    }

    pub fn monte_carlo(mc: &McReport, phi: f64, phi_source: String) -> Self {
        let band = 3.0 * (mc.se_premium * mc.se_premium + mc.se_loss * mc.se_loss).sqrt();
        ReportResult::MonteCarlo {
            n_paths: mc.n_paths,
            phi,
            phi_source,
            mean_premium_earned: mc.mean_premium_earned,
            se_premium: mc.se_premium,
            mean_loss: mc.mean_loss,
            se_loss: mc.se_loss,
            residual: mc.residual,
            fraction_transitioned_in_horizon: mc.fraction_transitioned_in_horizon,
            three_se_band: band,
            passed: mc.residual.abs() <= band,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub command: &'static str,
    pub setr_mode: &'static str,
    pub result: ReportResult,
    pub warnings: Vec<String>,
}

/// Writes `report.json` into `out_dir` and returns its path.
pub fn write_report(out_dir: &Path, report: &RunReport) -> Result<PathBuf, CliError> {
    let path = out_dir.join("report.json");
    let body = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("report serialization failed: {e}")))?;
    fs::write(&path, body + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
