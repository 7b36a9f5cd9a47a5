//! Scenario configuration: parsing, validation and canonical hashing.
//!
//! Configs are JSON (TOML accepted as an alternate front end) with strict
//! unknown-key rejection, so a typo'd field fails loudly instead of being
//! silently ignored. The config hash is a SHA-256 over the canonical
//! re-serialization of the parsed config — stable under key reordering and
//! parse/serialize round trips.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use setr_core::market::{MarketParams, PremiumApplication, SimOptions};
use setr_core::{ArrivalProcess, PremiumModel, Tolerances};

use crate::error::CliError;

/// Which SETR quantity a scenario asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetrMode {
    WeakConstant,
    Geometric,
    StrongCurve,
    Residual,
}

impl SetrMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetrMode::WeakConstant => "weak_constant",
            SetrMode::Geometric => "geometric",
            SetrMode::StrongCurve => "strong_curve",
            SetrMode::Residual => "residual",
        }
    }
}

/// Arrival-process spec as it appears on the wire, e.g.
/// `{"kind": "exponential", "scale_days": 750, "t0_days": 0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrivalSpec {
    Exponential {
        scale_days: f64,
        #[serde(default)]
        t0_days: f64,
    },
    Weibull {
        shape: f64,
        scale_days: f64,
        #[serde(default)]
        t0_days: f64,
    },
    LogNormal {
        log_mean: f64,
        log_sd: f64,
        #[serde(default)]
        t0_days: f64,
    },
    PointMass {
        event_time_days: f64,
        #[serde(default)]
        t0_days: f64,
    },
    EmpiricalHistogram {
        bin_edges_days: Vec<f64>,
        masses: Vec<f64>,
        #[serde(default)]
        t0_days: f64,
    },
}

// Internally-tagged enums cannot use serde's deny_unknown_fields, so each
// variant is deserialized through a strict helper struct by hand.
macro_rules! strict_variant {
    ($name:ident { $($field:ident: $ty:ty),+ $(,)? }) => {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $name {
            $($field: $ty,)+
            #[serde(default)]
            t0_days: f64,
        }
    };
}

strict_variant!(ExponentialFields { scale_days: f64 });
strict_variant!(WeibullFields {
    shape: f64,
    scale_days: f64
});
strict_variant!(LogNormalFields {
    log_mean: f64,
    log_sd: f64
});
strict_variant!(PointMassFields {
    event_time_days: f64
});
strict_variant!(HistogramFields { bin_edges_days: Vec<f64>, masses: Vec<f64> });

fn split_kind<'de, D: Deserializer<'de>>(
    d: D,
    what: &'static str,
) -> Result<(String, serde_json::Value), D::Error> {
    let mut map = serde_json::Map::deserialize(d)?;
    let kind = map
        .remove("kind")
        .ok_or_else(|| D::Error::custom(format!("{what}: missing field `kind`")))?;
    let kind = kind
        .as_str()
        .ok_or_else(|| D::Error::custom(format!("{what}: `kind` must be a string")))?
        .to_string();
    Ok((kind, serde_json::Value::Object(map)))
}

fn fields<'de, D: Deserializer<'de>, T: serde::de::DeserializeOwned>(
    rest: serde_json::Value,
    what: &'static str,
) -> Result<T, D::Error> {
    serde_json::from_value(rest).map_err(|e| D::Error::custom(format!("{what}: {e}")))
}

impl<'de> Deserialize<'de> for ArrivalSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (kind, rest) = split_kind(d, "arrival")?;
        match kind.as_str() {
            "exponential" => {
                let f: ExponentialFields = fields::<D, _>(rest, "arrival")?;
                Ok(ArrivalSpec::Exponential {
                    scale_days: f.scale_days,
                    t0_days: f.t0_days,
                })
            }
            "weibull" => {
                let f: WeibullFields = fields::<D, _>(rest, "arrival")?;
                Ok(ArrivalSpec::Weibull {
                    shape: f.shape,
                    scale_days: f.scale_days,
                    t0_days: f.t0_days,
                })
            }
            "log_normal" => {
                let f: LogNormalFields = fields::<D, _>(rest, "arrival")?;
                Ok(ArrivalSpec::LogNormal {
                    log_mean: f.log_mean,
                    log_sd: f.log_sd,
                    t0_days: f.t0_days,
                })
            }
            "point_mass" => {
                let f: PointMassFields = fields::<D, _>(rest, "arrival")?;
                Ok(ArrivalSpec::PointMass {
                    event_time_days: f.event_time_days,
                    t0_days: f.t0_days,
                })
            }
            "empirical_histogram" => {
                let f: HistogramFields = fields::<D, _>(rest, "arrival")?;
                Ok(ArrivalSpec::EmpiricalHistogram {
                    bin_edges_days: f.bin_edges_days,
                    masses: f.masses,
                    t0_days: f.t0_days,
                })
            }
            other => Err(D::Error::unknown_variant(
                other,
                &[
                    "exponential",
                    "weibull",
                    "log_normal",
                    "point_mass",
                    "empirical_histogram",
                ],
            )),
        }
    }
}

impl ArrivalSpec {
    pub fn t0_days(&self) -> f64 {
        match self {
            ArrivalSpec::Exponential { t0_days, .. }
            | ArrivalSpec::Weibull { t0_days, .. }
            | ArrivalSpec::LogNormal { t0_days, .. }
            | ArrivalSpec::PointMass { t0_days, .. }
            | ArrivalSpec::EmpiricalHistogram { t0_days, .. } => *t0_days,
        }
    }

    pub fn build(&self) -> Result<ArrivalProcess, CliError> {
        let built = match self {
            ArrivalSpec::Exponential {
                scale_days,
                t0_days,
            } => ArrivalProcess::exponential(*scale_days, *t0_days),
            ArrivalSpec::Weibull {
                shape,
                scale_days,
                t0_days,
            } => ArrivalProcess::weibull(*shape, *scale_days, *t0_days),
            ArrivalSpec::LogNormal {
                log_mean,
                log_sd,
                t0_days,
            } => ArrivalProcess::log_normal(*log_mean, *log_sd, *t0_days),
            ArrivalSpec::PointMass {
                event_time_days,
                t0_days,
            } => ArrivalProcess::point_mass(*event_time_days, *t0_days),
            ArrivalSpec::EmpiricalHistogram {
                bin_edges_days,
                masses,
                t0_days,
            } => ArrivalProcess::empirical_histogram(
                bin_edges_days.clone(),
                masses.clone(),
                *t0_days,
            ),
        };
        built.map_err(|e| CliError::Validation(format!("arrival: {e}")))
    }
}

/// Premium spec, e.g. `{"kind": "constant", "p_per_day": 0.001}`. The
/// origin t0 is taken from the arrival spec.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PremiumSpec {
    Constant {
        p_per_day: f64,
    },
    Geometric {
        p0_per_day: f64,
        lambda_per_day: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantPremiumFields {
    p_per_day: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometricPremiumFields {
    p0_per_day: f64,
    lambda_per_day: f64,
}

impl<'de> Deserialize<'de> for PremiumSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (kind, rest) = split_kind(d, "premium")?;
        match kind.as_str() {
            "constant" => {
                let f: ConstantPremiumFields = fields::<D, _>(rest, "premium")?;
                Ok(PremiumSpec::Constant {
                    p_per_day: f.p_per_day,
                })
            }
            "geometric" => {
                let f: GeometricPremiumFields = fields::<D, _>(rest, "premium")?;
                Ok(PremiumSpec::Geometric {
                    p0_per_day: f.p0_per_day,
                    lambda_per_day: f.lambda_per_day,
                })
            }
            other => Err(D::Error::unknown_variant(other, &["constant", "geometric"])),
        }
    }
}

impl PremiumSpec {
    pub fn build(&self, t0: f64) -> Result<PremiumModel, CliError> {
        let built = match self {
            PremiumSpec::Constant { p_per_day } => PremiumModel::constant(*p_per_day, t0),
            PremiumSpec::Geometric {
                p0_per_day,
                lambda_per_day,
            } => PremiumModel::geometric(*p0_per_day, *lambda_per_day, t0),
        };
        built.map_err(|e| CliError::Validation(format!("premium: {e}")))
    }
}

/// Market block for `simulate`/`verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub mu_per_day: f64,
    pub sigma_per_sqrt_day: f64,
    #[serde(default = "default_one")]
    pub s0: f64,
    #[serde(default = "default_one")]
    pub dt_days: f64,
    pub horizon_days: f64,
}

fn default_one() -> f64 {
    1.0
}

/// Overrides for the numerical policy; omitted fields keep the documented
/// defaults (rel_tol 1e-8, tail_cutoff 1e-12, hazard_floor 1e-300,
/// max_evaluations 1e6).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hazard_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PremiumApplicationSpec {
    #[default]
    Additive,
    DriftAdjusted,
}

/// Simulation switches for `simulate`/`verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<u64>,
    #[serde(default)]
    pub clamp_at_zero: bool,
    #[serde(default)]
    pub premium_application: PremiumApplicationSpec,
}

/// One scenario: arrival + premium + optional market + run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub arrival: ArrivalSpec,
    pub premium: PremiumSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market: Option<MarketSpec>,
    pub setr_mode: SetrMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_days: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerics: Option<NumericsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
}

impl ScenarioConfig {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut tol = Tolerances::default();
        if let Some(n) = &self.numerics {
            if let Some(v) = n.rel_tol {
                tol.rel_tol = v;
            }
            if let Some(v) = n.tail_cutoff {
                tol.tail_cutoff = v;
            }
            if let Some(v) = n.hazard_floor {
                tol.hazard_floor = v;
            }
            if let Some(v) = n.max_evaluations {
                tol.max_evaluations = v;
            }
        }
        tol.validate()
            .map_err(|e| CliError::Validation(format!("numerics: {e}")))?;
        Ok(tol)
    }

    pub fn build_premium(&self, t0: f64) -> Result<PremiumModel, CliError> {
        self.premium.build(t0)
    }

    /// The flat rate `p`, required by weak-constant and strong-curve modes.
    pub fn constant_premium_rate(&self) -> Result<f64, CliError> {
        match &self.premium {
            PremiumSpec::Constant { p_per_day } => Ok(*p_per_day),
            PremiumSpec::Geometric { .. } => Err(CliError::Validation(format!(
                "setr_mode {} requires a constant premium",
                self.setr_mode.as_str()
            ))),
        }
    }

    pub fn geometric_premium(&self) -> Result<(f64, f64), CliError> {
        match &self.premium {
            PremiumSpec::Geometric {
                p0_per_day,
                lambda_per_day,
            } => Ok((*p0_per_day, *lambda_per_day)),
            PremiumSpec::Constant { .. } => Err(CliError::Validation(
                "setr_mode geometric requires a geometric premium".into(),
            )),
        }
    }

    pub fn market_params(&self, master_seed: u64) -> Result<MarketParams, CliError> {
        let m = self
            .market
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing field `market`".into()))?;
        let params = MarketParams {
            mu: m.mu_per_day,
            sigma: m.sigma_per_sqrt_day,
            s0: m.s0,
            dt: m.dt_days,
            horizon: m.horizon_days,
            master_seed,
        };
        params
            .validate()
            .map_err(|e| CliError::Validation(format!("market: {e}")))?;
        Ok(params)
    }

    pub fn sim_options(&self) -> SimOptions {
        let spec = self.simulation.clone().unwrap_or_default();
        SimOptions {
            premium_application: match spec.premium_application {
                PremiumApplicationSpec::Additive => PremiumApplication::AdditiveLevel,
                PremiumApplicationSpec::DriftAdjusted => PremiumApplication::DriftAdjusted,
            },
            clamp_at_zero: spec.clamp_at_zero,
        }
    }
}

/// A parsed config together with its canonical hash.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub hash: String,
}

/// SHA-256 of the canonical (sorted-key) JSON re-serialization.
pub fn canonical_hash(config: &ScenarioConfig) -> Result<String, CliError> {
    // serde_json maps are BTreeMaps, so Value serialization sorts keys.
    let value = serde_json::to_value(config)
        .map_err(|e| CliError::Io(format!("config hashing failed: {e}")))?;
    let canonical = value.to_string();
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

/// Reads and strictly parses a scenario file (JSON, or TOML by extension).
pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let is_toml = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("toml"))
        .unwrap_or(false);
    let value: serde_json::Value = if is_toml {
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config parse error: {e}")))?
    } else {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config parse error: {e}")))?
    };
    let config: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("config field `{path}`: {}", e.inner()))
    })?;
    let hash = canonical_hash(&config)?;
    Ok(LoadedConfig { config, hash })
}
