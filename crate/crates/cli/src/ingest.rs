//! CSV file formats: telemetry in, telemetry and result tables out.
//!
//! Output files carry full `f64` precision (shortest round-trip formatting)
//! and are written through a temporary file in the destination directory
//! followed by an atomic rename, so an interrupted run never leaves a
//! truncated file behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use leakscale::telemetry::{
    celsius_to_kelvin, Kelvin, OperationMode, TelemetryRecord, KELVIN_OFFSET,
};
use leakscale::{LeakTrace, ScalingFit, SimTrace};
use tempfile::NamedTempFile;

use crate::config::TemperatureUnit;
use crate::error::CliError;
use crate::report::day_to_date;

pub const TELEMETRY_HEADER: &str = "timestamp,mode,temp_discharge,temp_intake_1,temp_intake_2,mass";
pub const GROUND_TRUTH_HEADER: &str = "t_s,mass_kg,pressure_pa,temp_k,y";
pub const LEAK_TRACE_HEADER: &str = "date,mode,y_raw,y_smooth,y_mono,detected";
pub const FITS_HEADER: &str =
    "mode,n,with_intercept,c,se_c,intercept,se_intercept,residual_variance,r_squared,mass0_kg,temp0_k";

/// One row of the fit table written by the fit command.
#[derive(Debug, Clone)]
pub struct FitRow {
    pub mode: OperationMode,
    pub mass0: f64,
    pub temp0: Kelvin,
    pub fit: ScalingFit,
}

/// Reads a telemetry CSV. Temperatures are converted from `unit` to kelvin,
/// the mode column is matched case-insensitively, and an empty mass field
/// becomes an absent mass. Rows must not move backwards in time.
pub fn parse_telemetry_csv(
    path: &Path,
    unit: TemperatureUnit,
) -> Result<Vec<TelemetryRecord>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| CliError::malformed(path, 1, e.to_string()))?;
    let found = headers.iter().collect::<Vec<_>>().join(",");
    if found != TELEMETRY_HEADER {
        return Err(CliError::Schema {
            path: path.into(),
            expected: TELEMETRY_HEADER.into(),
            found,
        });
    }

    let mut records = Vec::new();
    let mut prev_timestamp = i64::MIN;
    for (index, row) in reader.records().enumerate() {
        let fallback_line = index as u64 + 2;
        let row = row.map_err(|e| {
            let line = e.position().map_or(fallback_line, |p| p.line());
            CliError::malformed(path, line, e.to_string())
        })?;
        let line = row.position().map_or(fallback_line, |p| p.line());

        let timestamp = DateTime::parse_from_rfc3339(&row[0])
            .map_err(|e| CliError::malformed(path, line, format!("timestamp `{}`: {e}", &row[0])))?
            .timestamp();
        if timestamp < prev_timestamp {
            return Err(CliError::Unsorted {
                path: path.into(),
                line,
            });
        }
        prev_timestamp = timestamp;

        let mode: OperationMode = row[1]
            .to_ascii_lowercase()
            .parse()
            .map_err(|e: String| CliError::malformed(path, line, e))?;

        let mut temps = [Kelvin::new(1.0).unwrap(); 3];
        for (slot, field) in temps.iter_mut().zip([&row[2], &row[3], &row[4]]) {
            *slot = parse_temperature(field, unit)
                .map_err(|message| CliError::malformed(path, line, message))?;
        }

        let mass = if row[5].is_empty() {
            None
        } else {
            let value: f64 = row[5].parse().map_err(|_| {
                CliError::malformed(path, line, format!("mass `{}` is not a number", &row[5]))
            })?;
            if !value.is_finite() {
                return Err(CliError::malformed(
                    path,
                    line,
                    format!("mass `{value}` is not finite"),
                ));
            }
            Some(value)
        };

        records.push(TelemetryRecord {
            timestamp,
            mode,
            temp_discharge: temps[0],
            temp_intake_1: temps[1],
            temp_intake_2: temps[2],
            mass,
        });
    }
    Ok(records)
}

fn parse_temperature(text: &str, unit: TemperatureUnit) -> Result<Kelvin, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("temperature `{text}` is not a number"))?;
    let converted = match unit {
        TemperatureUnit::Celsius => celsius_to_kelvin(value),
        TemperatureUnit::Kelvin => Kelvin::new(value),
    };
    converted.map_err(|e| e.to_string())
}

/// Writes telemetry in the same schema [`parse_telemetry_csv`] reads,
/// converting temperatures from kelvin to `unit`.
pub fn write_telemetry_csv(
    path: &Path,
    records: &[TelemetryRecord],
    unit: TemperatureUnit,
) -> Result<(), CliError> {
    let mut out = String::with_capacity(80 * (records.len() + 1));
    out.push_str(TELEMETRY_HEADER);
    out.push('\n');
    for record in records {
        let timestamp = DateTime::<Utc>::from_timestamp(record.timestamp, 0)
            .ok_or_else(|| {
                CliError::Config(format!("timestamp {} not representable", record.timestamp))
            })?
            .to_rfc3339_opts(SecondsFormat::Secs, true);
        write!(
            out,
            "{timestamp},{},{},{},{},",
            record.mode,
            temperature_out(record.temp_discharge, unit),
            temperature_out(record.temp_intake_1, unit),
            temperature_out(record.temp_intake_2, unit),
        )
        .expect("write to string");
        if let Some(mass) = record.mass {
            write!(out, "{mass}").expect("write to string");
        }
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

fn temperature_out(temperature: Kelvin, unit: TemperatureUnit) -> f64 {
    match unit {
        TemperatureUnit::Celsius => temperature.value() - KELVIN_OFFSET,
        TemperatureUnit::Kelvin => temperature.value(),
    }
}

/// Writes the noise-free state trajectory of a simulation run.
pub fn write_ground_truth_csv(path: &Path, trace: &SimTrace) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(GROUND_TRUTH_HEADER);
    out.push('\n');
    for i in 0..trace.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            trace.times[i],
            trace.mass[i],
            trace.pressure[i],
            trace.temperature[i],
            trace.leak_degree[i],
        )
        .expect("write to string");
    }
    atomic_write(path, out.as_bytes())
}

/// Writes the per-day diagnosis trace for external plotting.
pub fn write_leak_trace_csv(path: &Path, trace: &LeakTrace) -> Result<(), CliError> {
    let mut out = String::with_capacity(48 * (trace.points.len() + 1));
    out.push_str(LEAK_TRACE_HEADER);
    out.push('\n');
    for point in &trace.points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            day_to_date(point.date),
            point.mode,
            point.y_raw,
            point.y_smooth,
            point.y_mono,
            point.detected,
        )
        .expect("write to string");
    }
    atomic_write(path, out.as_bytes())
}

/// Writes one row per fitted mode.
pub fn write_fits_csv(path: &Path, rows: &[FitRow]) -> Result<(), CliError> {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(FITS_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.mode,
            row.fit.n,
            row.fit.with_intercept,
            row.fit.c,
            row.fit.se_c,
            row.fit.intercept,
            row.fit.se_intercept,
            row.fit.residual_variance,
            row.fit.r_squared,
            row.mass0,
            row.temp0.value(),
        )
        .expect("write to string");
    }
    atomic_write(path, out.as_bytes())
}

fn atomic_write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(parent).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use leakscale::telemetry::Day;
    use leakscale::LeakPoint;

    fn record(timestamp: i64, mode: OperationMode, mass: Option<f64>) -> TelemetryRecord {
        TelemetryRecord {
            timestamp,
            mode,
            temp_discharge: Kelvin::new(350.25).unwrap(),
            temp_intake_1: Kelvin::new(280.5).unwrap(),
            temp_intake_2: Kelvin::new(281.75).unwrap(),
            mass,
        }
    }

    #[test]
    fn round_trip_is_value_identical_in_both_units() {
        let records = vec![
            record(1_433_116_800, OperationMode::Heating, Some(17.938_271)),
            record(1_433_117_100, OperationMode::Cooling, None),
            record(1_433_117_100, OperationMode::Idle, Some(17.9)),
        ];
        for unit in [TemperatureUnit::Celsius, TemperatureUnit::Kelvin] {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("telemetry.csv");
            write_telemetry_csv(&path, &records, unit).unwrap();
            let back = parse_telemetry_csv(&path, unit).unwrap();
            assert_eq!(back.len(), records.len());
            for (a, b) in records.iter().zip(&back) {
                assert_eq!(a.timestamp, b.timestamp);
                assert_eq!(a.mode, b.mode);
                assert!((a.temp_discharge.value() - b.temp_discharge.value()).abs() < 1e-9);
                assert!((a.temp_intake_1.value() - b.temp_intake_1.value()).abs() < 1e-9);
                assert!((a.temp_intake_2.value() - b.temp_intake_2.value()).abs() < 1e-9);
                assert_eq!(a.mass, b.mass);
            }
        }
    }

    #[test]
    fn header_mismatch_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "time,mode,t1,t2,t3,mass\n").unwrap();
        match parse_telemetry_csv(&path, TemperatureUnit::Kelvin).unwrap_err() {
            CliError::Schema {
                expected, found, ..
            } => {
                assert_eq!(expected, TELEMETRY_HEADER);
                assert_eq!(found, "time,mode,t1,t2,t3,mass");
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let body = format!(
            "{TELEMETRY_HEADER}\n\
             2015-06-01T00:00:00Z,heating,350,280,281,18\n\
             2015-06-01T00:05:00Z,heating,oops,280,281,18\n"
        );
        std::fs::write(&path, body).unwrap();
        match parse_telemetry_csv(&path, TemperatureUnit::Kelvin).unwrap_err() {
            CliError::Malformed { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("oops"), "{message}");
            }
            other => panic!("expected malformed error, got {other}"),
        }
    }

    #[test]
    fn below_absolute_zero_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let body = format!(
            "{TELEMETRY_HEADER}\n\
             2015-06-01T00:00:00Z,heating,77.1,7.3,8.1,18\n\
             2015-06-01T00:05:00Z,heating,-300,7.3,8.1,18\n"
        );
        std::fs::write(&path, body).unwrap();
        match parse_telemetry_csv(&path, TemperatureUnit::Celsius).unwrap_err() {
            CliError::Malformed { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("absolute zero"), "{message}");
            }
            other => panic!("expected malformed error, got {other}"),
        }
    }

    #[test]
    fn backwards_timestamps_are_rejected_equal_allowed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let body = format!(
            "{TELEMETRY_HEADER}\n\
             2015-06-01T00:05:00Z,heating,350,280,281,\n\
             2015-06-01T00:05:00Z,heating,350,280,281,\n\
             2015-06-01T00:00:00Z,heating,350,280,281,\n"
        );
        std::fs::write(&path, body).unwrap();
        match parse_telemetry_csv(&path, TemperatureUnit::Kelvin).unwrap_err() {
            CliError::Unsorted { line, .. } => assert_eq!(line, 4),
            other => panic!("expected unsorted error, got {other}"),
        }
    }

    #[test]
    fn mode_column_is_case_insensitive() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mixed.csv");
        let body = format!(
            "{TELEMETRY_HEADER}\n\
             2015-06-01T00:00:00Z,Heating,350,280,281,18\n\
             2015-06-01T00:05:00Z,COOLING,350,280,281,\n"
        );
        std::fs::write(&path, body).unwrap();
        let records = parse_telemetry_csv(&path, TemperatureUnit::Kelvin).unwrap();
        assert_eq!(records[0].mode, OperationMode::Heating);
        assert_eq!(records[1].mode, OperationMode::Cooling);
    }

    #[test]
    fn leak_trace_rows_have_calendar_dates() {
        let trace = LeakTrace {
            points: vec![LeakPoint {
                date: Day::new(16_587),
                mode: OperationMode::Heating,
                y_raw: 0.1,
                y_smooth: 0.1,
                y_mono: 0.1,
                detected: false,
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_leak_trace_csv(&path, &trace).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            format!("{LEAK_TRACE_HEADER}\n2015-06-01,heating,0.1,0.1,0.1,false\n")
        );
    }

    #[test]
    fn atomic_write_replaces_existing_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        atomic_write(&path, b"first").unwrap();
        atomic_write(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    mod random_round_trip {
        use super::*;
        use proptest::prelude::*;

        fn record_strategy() -> impl Strategy<Value = (OperationMode, [f64; 3], Option<f64>)> {
            (
                prop_oneof![
                    Just(OperationMode::Heating),
                    Just(OperationMode::Cooling),
                    Just(OperationMode::Idle),
                ],
                [200.0..400.0f64, 200.0..400.0f64, 200.0..400.0f64],
                proptest::option::of(0.1..100.0f64),
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn any_telemetry_survives_the_file_format(
                rows in proptest::collection::vec(record_strategy(), 1..20),
                unit in prop_oneof![Just(TemperatureUnit::Celsius), Just(TemperatureUnit::Kelvin)],
            ) {
                let records: Vec<TelemetryRecord> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, (mode, temps, mass))| TelemetryRecord {
                        timestamp: 1_433_116_800 + 300 * i as i64,
                        mode: *mode,
                        temp_discharge: Kelvin::new(temps[0]).unwrap(),
                        temp_intake_1: Kelvin::new(temps[1]).unwrap(),
                        temp_intake_2: Kelvin::new(temps[2]).unwrap(),
                        mass: *mass,
                    })
                    .collect();
                let dir = tempfile::tempdir().unwrap();
                let path = dir.path().join("telemetry.csv");
                write_telemetry_csv(&path, &records, unit).unwrap();
                let back = parse_telemetry_csv(&path, unit).unwrap();
                prop_assert_eq!(back.len(), records.len());
                for (a, b) in records.iter().zip(&back) {
                    prop_assert_eq!(a.timestamp, b.timestamp);
                    prop_assert_eq!(a.mode, b.mode);
                    prop_assert!((a.temp_discharge.value() - b.temp_discharge.value()).abs() < 1e-9);
                    prop_assert!((a.temp_intake_1.value() - b.temp_intake_1.value()).abs() < 1e-9);
                    prop_assert!((a.temp_intake_2.value() - b.temp_intake_2.value()).abs() < 1e-9);
                    prop_assert_eq!(a.mass, b.mass);
                }
            }
        }
    }
}
