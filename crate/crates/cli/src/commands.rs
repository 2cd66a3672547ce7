//! The four subcommands as plain functions over parsed arguments, so
//! integration tests can drive them without spawning the binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use leakscale::fit::FitError;
use leakscale::sensor::diagnose_from;
use leakscale::telemetry::{
    daily_aggregate, mode_temperature, Kelvin, OperationMode, TelemetryRecord,
};
use leakscale::{
    build_log_ratios, control_exponent, detect, export_fault_test, fit_scaling_exponent,
    simulate_analytic, simulate_numeric, test_slope_homogeneity, LeakTrace, LogRatioPoint,
};

use crate::config::{SimSettings, TemperatureUnit};
use crate::error::CliError;
use crate::ingest::{
    parse_telemetry_csv, write_fits_csv, write_ground_truth_csv, write_leak_trace_csv,
    write_telemetry_csv, FitRow,
};
use crate::report::{DiagnoseReport, FitReport, SimulateReport, TtestReport};

pub struct SimulateArgs {
    pub settings: SimSettings,
    pub numeric: bool,
    pub unit: TemperatureUnit,
    pub out_dir: PathBuf,
}

/// Runs one simulated fault test and writes `telemetry.csv` (what a logger
/// would have recorded) and `ground_truth.csv` (the noise-free state).
pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateReport, CliError> {
    let params = &args.settings.params;
    let trace = if args.numeric {
        simulate_numeric(params)?
    } else {
        simulate_analytic(params)?
    };
    let records = export_fault_test(
        &trace,
        args.settings.mode,
        args.settings.cadence_s,
        args.settings.start.timestamp(),
    )?;

    create_out_dir(&args.out_dir)?;
    let telemetry_path = args.out_dir.join("telemetry.csv");
    let truth_path = args.out_dir.join("ground_truth.csv");
    write_telemetry_csv(&telemetry_path, &records, args.unit)?;
    write_ground_truth_csv(&truth_path, &trace)?;

    Ok(SimulateReport {
        mode: args.settings.mode,
        numeric: args.numeric,
        exponent: control_exponent(params.mass_control, params.pressure_control)?,
        leak_start_s: params.leak_start,
        end_time_s: params.end_time,
        time_step_s: params.time_step,
        cadence_s: args.settings.cadence_s,
        noise_sigma: params.noise_sigma,
        seed: params.seed,
        samples: trace.len(),
        records: records.len(),
        final_leak: trace.leak_degree.last().copied().unwrap_or(0.0),
        unit: args.unit,
        telemetry_path: telemetry_path.display().to_string(),
        truth_path: truth_path.display().to_string(),
    })
}

pub struct FitArgs {
    pub telemetry: PathBuf,
    pub unit: TemperatureUnit,
    pub with_intercept: bool,
    pub daily: bool,
    pub mass0: Option<f64>,
    pub temp0: Option<Kelvin>,
    pub out_dir: PathBuf,
}

/// Fits the scaling exponent for every non-idle mode in the file and writes
/// the fit table to `fits.csv`.
pub fn cmd_fit(args: &FitArgs) -> Result<FitReport, CliError> {
    let records = parse_telemetry_csv(&args.telemetry, args.unit)?;
    let rows = fit_modes(
        &records,
        args.daily,
        args.with_intercept,
        args.mass0,
        args.temp0,
    )?;

    create_out_dir(&args.out_dir)?;
    let fits_path = args.out_dir.join("fits.csv");
    write_fits_csv(&fits_path, &rows)?;

    Ok(FitReport {
        input: args.telemetry.display().to_string(),
        unit: args.unit,
        daily: args.daily,
        rows,
        fits_path: fits_path.display().to_string(),
    })
}

pub struct TtestArgs {
    pub telemetry_a: PathBuf,
    pub telemetry_b: PathBuf,
    pub unit: TemperatureUnit,
    pub alpha: f64,
    pub daily: bool,
    pub mass0_a: Option<f64>,
    pub temp0_a: Option<Kelvin>,
    pub mass0_b: Option<f64>,
    pub temp0_b: Option<Kelvin>,
}

/// Tests slope homogeneity per operation mode shared by the two files. The
/// comparison needs intercepts, so both sides are fitted with one regardless
/// of the configured fit shape.
pub fn cmd_ttest(args: &TtestArgs) -> Result<TtestReport, CliError> {
    let records_a = parse_telemetry_csv(&args.telemetry_a, args.unit)?;
    let records_b = parse_telemetry_csv(&args.telemetry_b, args.unit)?;
    let rows_a = fit_modes(&records_a, args.daily, true, args.mass0_a, args.temp0_a)?;
    let rows_b = fit_modes(&records_b, args.daily, true, args.mass0_b, args.temp0_b)?;

    let mut tests = Vec::new();
    for row_a in &rows_a {
        if let Some(row_b) = rows_b.iter().find(|r| r.mode == row_a.mode) {
            let test = test_slope_homogeneity(&row_a.fit, &row_b.fit, args.alpha)?;
            tests.push((row_a.mode, test));
        }
    }
    if tests.is_empty() {
        return Err(CliError::Config(
            "the two files share no operation mode".into(),
        ));
    }

    Ok(TtestReport {
        input_a: args.telemetry_a.display().to_string(),
        input_b: args.telemetry_b.display().to_string(),
        unit: args.unit,
        daily: args.daily,
        tests,
    })
}

pub struct DiagnoseArgs {
    pub telemetry: PathBuf,
    pub unit: TemperatureUnit,
    pub exponents: BTreeMap<OperationMode, f64>,
    pub window_days: usize,
    pub threshold: f64,
    pub initial_leak: f64,
    pub out_dir: PathBuf,
}

pub struct DiagnoseOutcome {
    pub report: DiagnoseReport,
    pub trace: LeakTrace,
}

/// Runs the day-by-day leak estimation over a telemetry file and writes the
/// trace to `leak_trace.csv`.
pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<DiagnoseOutcome, CliError> {
    if args.exponents.is_empty() {
        return Err(CliError::Config(
            "no scaling exponents configured; set [exponents] in the config file or pass --exponent".into(),
        ));
    }
    let records = parse_telemetry_csv(&args.telemetry, args.unit)?;
    let samples = daily_aggregate(&records)?;
    let trace = diagnose_from(
        &samples,
        &args.exponents,
        args.window_days,
        args.threshold,
        args.initial_leak,
    )?;
    let detected = detect(&trace, args.threshold)?;

    create_out_dir(&args.out_dir)?;
    let trace_path = args.out_dir.join("leak_trace.csv");
    write_leak_trace_csv(&trace_path, &trace)?;

    let report = DiagnoseReport {
        input: args.telemetry.display().to_string(),
        unit: args.unit,
        exponents: args.exponents.iter().map(|(&m, &c)| (m, c)).collect(),
        window_days: args.window_days,
        threshold: args.threshold,
        initial_leak: args.initial_leak,
        days: trace.points.len(),
        final_estimate: trace.points.last().map_or(0.0, |p| p.y_mono),
        detected,
        trace_path: trace_path.display().to_string(),
    };
    Ok(DiagnoseOutcome { report, trace })
}

fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Fits every non-idle mode present in the records, raw or daily-aggregated.
/// Reference values default to the mode's first mass and temperature; an
/// explicit reference temperature only makes sense when the file holds a
/// single mode, because each mode has its own baseline.
fn fit_modes(
    records: &[TelemetryRecord],
    daily: bool,
    with_intercept: bool,
    mass0: Option<f64>,
    temp0: Option<Kelvin>,
) -> Result<Vec<FitRow>, CliError> {
    let mut present: Vec<OperationMode> = Vec::new();
    for record in records {
        if record.mode != OperationMode::Idle && !present.contains(&record.mode) {
            present.push(record.mode);
        }
    }
    present.sort();
    if present.is_empty() {
        return Err(CliError::Config(
            "telemetry contains no non-idle records".into(),
        ));
    }
    if temp0.is_some() && present.len() > 1 {
        return Err(CliError::Config(
            "a reference temperature applies to one baseline; this file holds several modes".into(),
        ));
    }

    let mut rows = Vec::new();
    for &mode in &present {
        let (points, m0, t0) = if daily {
            daily_points(records, mode, mass0, temp0)?
        } else {
            raw_points(records, mode, mass0, temp0)?
        };
        let fit = fit_scaling_exponent(&points, with_intercept)?;
        rows.push(FitRow {
            mode,
            mass0: m0,
            temp0: t0,
            fit,
        });
    }
    Ok(rows)
}

fn raw_points(
    records: &[TelemetryRecord],
    mode: OperationMode,
    mass0: Option<f64>,
    temp0: Option<Kelvin>,
) -> Result<(Vec<LogRatioPoint>, f64, Kelvin), CliError> {
    let mut points = Vec::new();
    let mut m0 = mass0;
    let mut t0 = temp0;
    for (index, record) in records.iter().filter(|r| r.mode == mode).enumerate() {
        let temp = mode_temperature(record)?;
        let mass = record.mass.ok_or(FitError::MissingMass { index })?;
        let m0 = *m0.get_or_insert(mass);
        let t0 = *t0.get_or_insert(temp);
        points.push(LogRatioPoint::new(mass, m0, temp, t0)?);
    }
    match (m0, t0) {
        (Some(m0), Some(t0)) => Ok((points, m0, t0)),
        _ => unreachable!("mode was observed in the records"),
    }
}

fn daily_points(
    records: &[TelemetryRecord],
    mode: OperationMode,
    mass0: Option<f64>,
    temp0: Option<Kelvin>,
) -> Result<(Vec<LogRatioPoint>, f64, Kelvin), CliError> {
    let samples: Vec<_> = daily_aggregate(records)?
        .into_iter()
        .filter(|s| s.mode == mode)
        .collect();
    let first = samples
        .first()
        .ok_or_else(|| CliError::Config(format!("no {mode} days after aggregation")))?;
    let m0 = match mass0 {
        Some(m) => m,
        None => first.mass.ok_or(FitError::MissingMass { index: 0 })?,
    };
    let t0 = temp0.unwrap_or(first.temp);
    let points = build_log_ratios(&samples, m0, t0)?;
    Ok((points, m0, t0))
}
