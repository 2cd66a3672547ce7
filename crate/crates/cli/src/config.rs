//! Run configuration: a TOML file of plain keys plus two tables, with
//! command-line flags taking precedence over file values.
//!
//! ```toml
//! window_days = 7
//! threshold = 0.5
//! significance_level = 0.05
//! temperature_unit = "celsius"
//! with_intercept = true
//! initial_leak = 0.0
//!
//! [exponents]
//! heating = -0.0874
//! cooling = -0.0104
//!
//! [sim]
//! hole_area_m2 = 1e-9
//! hole_volume_m3 = 1e-4
//! leak_velocity_m_s = 0.4
//! mass_control = 0.2
//! pressure_control = 0.27
//! initial_mass_kg = 18.0
//! initial_temperature_k = 350.0
//! initial_pressure_pa = 1803375.0
//! initial_density_kg_m3 = 50.0
//! pipe_volume_m3 = 0.36
//! heat_capacity_ratio = 1.22
//! compressibility = 0.9
//! gas_constant_j_kg_k = 114.5
//! leak_start_s = 3600.0
//! end_time_s = 86400.0
//! time_step_s = 60.0
//! noise_sigma = 0.0
//! seed = 42
//! mode = "heating"
//! cadence_s = 300.0
//! start = "2015-06-01T00:00:00Z"
//! ```
//!
//! Every key is optional; the values above are the defaults. Unknown keys
//! are rejected so typos surface instead of silently reverting to defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use leakscale::telemetry::{Kelvin, OperationMode};
use leakscale::SimParams;
use serde::Deserialize;

use crate::error::CliError;

/// Unit of the temperature columns in telemetry files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemperatureUnit {
    #[default]
    Celsius,
    Kelvin,
}

impl TemperatureUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TemperatureUnit::Celsius => "celsius",
            TemperatureUnit::Kelvin => "kelvin",
        }
    }
}

impl fmt::Display for TemperatureUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemperatureUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "celsius" => Ok(TemperatureUnit::Celsius),
            "kelvin" => Ok(TemperatureUnit::Kelvin),
            other => Err(format!("unknown temperature unit `{other}`")),
        }
    }
}

fn parse_mode(s: &str) -> Result<OperationMode, String> {
    s.trim().to_ascii_lowercase().parse()
}

/// `mode=value` pairs as accepted by the repeatable `--exponent` flag.
pub fn parse_exponent_flag(s: &str) -> Result<(OperationMode, f64), String> {
    let (mode, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected mode=value, got `{s}`"))?;
    let mode = parse_mode(mode.trim())?;
    if mode == OperationMode::Idle {
        return Err("idle has no scaling exponent".into());
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((mode, value))
}

/// File-level configuration. All fields optional; see module docs for the
/// schema and defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub window_days: Option<usize>,
    pub threshold: Option<f64>,
    pub significance_level: Option<f64>,
    pub temperature_unit: Option<TemperatureUnit>,
    pub with_intercept: Option<bool>,
    pub initial_leak: Option<f64>,
    #[serde(default)]
    pub exponents: BTreeMap<String, f64>,
    #[serde(default)]
    pub sim: SimFileConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// The exponent table keyed by operation mode.
    pub fn mode_exponents(&self) -> Result<BTreeMap<OperationMode, f64>, CliError> {
        let mut map = BTreeMap::new();
        for (name, &value) in &self.exponents {
            let mode = parse_mode(name).map_err(CliError::Config)?;
            if mode == OperationMode::Idle {
                return Err(CliError::Config("idle has no scaling exponent".into()));
            }
            map.insert(mode, value);
        }
        Ok(map)
    }
}

/// The `[sim]` table. Physics values are always SI with kelvin temperatures;
/// the telemetry unit setting applies only to telemetry files.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFileConfig {
    pub hole_area_m2: Option<f64>,
    pub hole_volume_m3: Option<f64>,
    pub leak_velocity_m_s: Option<f64>,
    pub mass_control: Option<f64>,
    pub pressure_control: Option<f64>,
    pub initial_mass_kg: Option<f64>,
    pub initial_temperature_k: Option<f64>,
    pub initial_pressure_pa: Option<f64>,
    pub initial_density_kg_m3: Option<f64>,
    pub pipe_volume_m3: Option<f64>,
    pub heat_capacity_ratio: Option<f64>,
    pub compressibility: Option<f64>,
    pub gas_constant_j_kg_k: Option<f64>,
    pub leak_start_s: Option<f64>,
    pub end_time_s: Option<f64>,
    pub time_step_s: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub cadence_s: Option<f64>,
    pub start: Option<String>,
}

/// Fully resolved simulation settings: file values under flag overrides,
/// defaults filling the rest.
#[derive(Debug, Clone)]
pub struct SimSettings {
    pub params: SimParams,
    pub mode: OperationMode,
    pub cadence_s: f64,
    pub start: DateTime<Utc>,
}

impl SimSettings {
    pub fn resolve(file: &SimFileConfig, seed_flag: Option<u64>) -> Result<Self, CliError> {
        let temperature = file.initial_temperature_k.unwrap_or(350.0);
        let density = file.initial_density_kg_m3.unwrap_or(50.0);
        let compressibility = file.compressibility.unwrap_or(0.9);
        let gas_constant = file.gas_constant_j_kg_k.unwrap_or(114.5);
        let params = SimParams {
            hole_area: file.hole_area_m2.unwrap_or(1e-9),
            hole_volume: file.hole_volume_m3.unwrap_or(1e-4),
            leak_velocity: file.leak_velocity_m_s.unwrap_or(0.4),
            mass_control: file.mass_control.unwrap_or(0.2),
            pressure_control: file.pressure_control.unwrap_or(0.27),
            initial_mass: file.initial_mass_kg.unwrap_or(18.0),
            initial_temperature: Kelvin::new(temperature)?,
            initial_pressure: file
                .initial_pressure_pa
                .unwrap_or(compressibility * density * gas_constant * temperature),
            initial_density: density,
            pipe_volume: file
                .pipe_volume_m3
                .unwrap_or(file.initial_mass_kg.unwrap_or(18.0) / density),
            heat_capacity_ratio: file.heat_capacity_ratio.unwrap_or(1.22),
            compressibility,
            gas_constant,
            leak_start: file.leak_start_s.unwrap_or(3600.0),
            end_time: file.end_time_s.unwrap_or(86_400.0),
            time_step: file.time_step_s.unwrap_or(60.0),
            noise_sigma: file.noise_sigma.unwrap_or(0.0),
            seed: seed_flag.or(file.seed).unwrap_or(42),
        };
        let mode = match &file.mode {
            Some(name) => parse_mode(name).map_err(CliError::Config)?,
            None => OperationMode::Heating,
        };
        let start_text = file.start.as_deref().unwrap_or("2015-06-01T00:00:00Z");
        let start = DateTime::parse_from_rfc3339(start_text)
            .map_err(|e| CliError::Config(format!("sim.start `{start_text}`: {e}")))?
            .with_timezone(&Utc);
        Ok(SimSettings {
            params,
            mode,
            cadence_s: file.cadence_s.unwrap_or(300.0),
            start,
        })
    }
}
