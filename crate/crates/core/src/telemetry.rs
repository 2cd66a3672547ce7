//! Domain types for equipment telemetry and daily aggregation.
//!
//! Everything downstream of ingestion works in absolute temperature, so the
//! [`Kelvin`] newtype is the only way a temperature enters the crate: it
//! cannot hold a non-positive or non-finite value. Raw telemetry arrives as
//! [`TelemetryRecord`]s; [`daily_aggregate`] reduces them to one
//! [`DailySample`] per calendar day and operation mode, which is the
//! granularity the fitting and estimation layers consume.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Offset between the Celsius and Kelvin scales.
pub const KELVIN_OFFSET: f64 = 273.15;

const SECONDS_PER_DAY: i64 = 86_400;

/// Errors from telemetry validation and aggregation.
#[derive(Debug, Clone, PartialEq)]
pub enum TelemetryError {
    /// A Celsius input at or below absolute zero.
    BelowAbsoluteZero { celsius: f64 },
    /// An absolute temperature that is not strictly positive and finite.
    NonPositiveTemperature { kelvin: f64 },
    /// The requested operation is undefined for Idle records.
    IdleMode,
    /// Record timestamps are not sorted ascending; `index` is the first
    /// offender.
    UnsortedTimestamps { index: usize },
}

impl fmt::Display for TelemetryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TelemetryError::BelowAbsoluteZero { celsius } => {
                write!(f, "temperature {celsius} C is at or below absolute zero")
            }
            TelemetryError::NonPositiveTemperature { kelvin } => {
                write!(f, "absolute temperature must be positive, got {kelvin} K")
            }
            TelemetryError::IdleMode => write!(f, "operation is undefined for idle records"),
            TelemetryError::UnsortedTimestamps { index } => {
                write!(f, "timestamps not sorted ascending at record {index}")
            }
        }
    }
}

impl core::error::Error for TelemetryError {}

/// Operating state of the heat pump when a record was taken.
///
/// Heating and cooling run the refrigerant cycle in opposite directions, so
/// each has its own temperature baseline and scaling exponent. Idle records
/// carry no usable signal and are excluded from fitting and estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperationMode {
    Heating,
    Cooling,
    Idle,
}

impl OperationMode {
    /// Lowercase name as used in file formats and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            OperationMode::Heating => "heating",
            OperationMode::Cooling => "cooling",
            OperationMode::Idle => "idle",
        }
    }
}

impl fmt::Display for OperationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for OperationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heating" => Ok(OperationMode::Heating),
            "cooling" => Ok(OperationMode::Cooling),
            "idle" => Ok(OperationMode::Idle),
            other => Err(format!("unknown operation mode `{other}`")),
        }
    }
}

/// An absolute temperature, guaranteed strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Kelvin(pub(crate) f64);

impl Kelvin {
    /// Validates and wraps an absolute temperature.
    pub fn new(kelvin: f64) -> Result<Self, TelemetryError> {
        if kelvin > 0.0 && kelvin.is_finite() {
            Ok(Kelvin(kelvin))
        } else {
            Err(TelemetryError::NonPositiveTemperature { kelvin })
        }
    }

    /// The temperature in kelvin.
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Kelvin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} K", self.0)
    }
}

/// Converts a Celsius reading to kelvin, rejecting values at or below
/// absolute zero.
pub fn celsius_to_kelvin(celsius: f64) -> Result<Kelvin, TelemetryError> {
    if !celsius.is_finite() || celsius <= -KELVIN_OFFSET {
        return Err(TelemetryError::BelowAbsoluteZero { celsius });
    }
    Kelvin::new(celsius + KELVIN_OFFSET)
}

/// A UTC calendar day, counted in whole days since 1970-01-01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Day(i64);

impl Day {
    pub fn new(days_since_epoch: i64) -> Self {
        Day(days_since_epoch)
    }

    /// The UTC day containing a Unix timestamp (seconds).
    pub fn from_timestamp(timestamp: i64) -> Self {
        Day(timestamp.div_euclid(SECONDS_PER_DAY))
    }

    pub fn days_since_epoch(self) -> i64 {
        self.0
    }

    /// Unix timestamp of this day's midnight UTC.
    pub fn start_timestamp(self) -> i64 {
        self.0 * SECONDS_PER_DAY
    }
}

/// One raw telemetry reading.
///
/// `timestamp` is a Unix timestamp in seconds (UTC, second resolution).
/// The discharge sensor sits on the compressor discharge pipe; the two intake
/// sensors sit on the indoor-unit intake pipes. `mass` is only present on
/// fault-test data where the refrigerant charge is instrumented.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryRecord {
    pub timestamp: i64,
    pub mode: OperationMode,
    pub temp_discharge: Kelvin,
    pub temp_intake_1: Kelvin,
    pub temp_intake_2: Kelvin,
    pub mass: Option<f64>,
}

/// One aggregated day of telemetry: the day's dominant mode and the mean
/// mode-relevant temperature over that mode's records.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySample {
    pub date: Day,
    pub mode: OperationMode,
    pub temp: Kelvin,
    pub mass: Option<f64>,
}

/// The temperature sensor that carries the leak signal in a given mode:
/// discharge pipe while heating, mean of the two intake pipes while cooling.
/// Idle records have no applicable sensor.
pub fn mode_temperature(record: &TelemetryRecord) -> Result<Kelvin, TelemetryError> {
    match record.mode {
        OperationMode::Heating => Ok(record.temp_discharge),
        OperationMode::Cooling => Ok(Kelvin(
            0.5 * (record.temp_intake_1.value() + record.temp_intake_2.value()),
        )),
        OperationMode::Idle => Err(TelemetryError::IdleMode),
    }
}

/// Reduces sorted telemetry to one [`DailySample`] per UTC calendar day.
///
/// A day's dominant mode is the non-idle mode with the most records; ties go
/// to the previous emitted day's mode, then to Heating. The sample
/// temperature is the mean of [`mode_temperature`] over the dominant mode's
/// records only. Mass is the mean over all of the day's records when every
/// record carries one, absent otherwise. Days whose records are all Idle are
/// omitted, so output dates may have gaps.
///
/// Records must be sorted ascending by timestamp; output dates are strictly
/// increasing. Empty input yields empty output.
pub fn daily_aggregate(records: &[TelemetryRecord]) -> Result<Vec<DailySample>, TelemetryError> {
    for (index, pair) in records.windows(2).enumerate() {
        if pair[1].timestamp < pair[0].timestamp {
            return Err(TelemetryError::UnsortedTimestamps { index: index + 1 });
        }
    }

    let mut samples = Vec::new();
    let mut previous_mode: Option<OperationMode> = None;
    let mut day_start = 0;
    while day_start < records.len() {
        let date = Day::from_timestamp(records[day_start].timestamp);
        let mut day_end = day_start + 1;
        while day_end < records.len() && Day::from_timestamp(records[day_end].timestamp) == date {
            day_end += 1;
        }
        let day = &records[day_start..day_end];
        day_start = day_end;

        let heating = day
            .iter()
            .filter(|r| r.mode == OperationMode::Heating)
            .count();
        let cooling = day
            .iter()
            .filter(|r| r.mode == OperationMode::Cooling)
            .count();
        if heating == 0 && cooling == 0 {
            continue;
        }

        let mode = if heating > cooling {
            OperationMode::Heating
        } else if cooling > heating {
            OperationMode::Cooling
        } else {
            match previous_mode {
                Some(m @ (OperationMode::Heating | OperationMode::Cooling)) => m,
                _ => OperationMode::Heating,
            }
        };

        let mut temp_sum = 0.0;
        let mut temp_count = 0usize;
        for record in day.iter().filter(|r| r.mode == mode) {
            temp_sum += mode_temperature(record)?.value();
            temp_count += 1;
        }

        let mass = if day.iter().all(|r| r.mass.is_some()) {
            let total: f64 = day.iter().map(|r| r.mass.unwrap_or(0.0)).sum();
            Some(total / day.len() as f64)
        } else {
            None
        };

        previous_mode = Some(mode);
        samples.push(DailySample {
            date,
            mode,
            temp: Kelvin(temp_sum / temp_count as f64),
            mass,
        });
    }
    Ok(samples)
}
