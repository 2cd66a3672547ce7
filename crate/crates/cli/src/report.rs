//! Human-readable run summaries printed to stdout.
//!
//! Data files carry full `f64` precision; these reports round to six
//! significant digits for reading comfort. Each report repeats the settings
//! that shaped the run, so a pasted summary is auditable on its own.

use std::fmt;

use chrono::{DateTime, Utc};
use leakscale::telemetry::{Day, OperationMode};
use leakscale::SlopeTest;

use crate::config::TemperatureUnit;
use crate::ingest::FitRow;

/// A number rounded to six significant digits for display.
pub fn sig6(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let digits = value.abs().log10().floor() as i32;
    let decimals = (5 - digits).max(0) as usize;
    format!("{value:.decimals$}")
}

/// A calendar date for a day index (UTC midnight).
pub fn day_to_date(day: Day) -> String {
    match DateTime::<Utc>::from_timestamp(day.start_timestamp(), 0) {
        Some(dt) => dt.date_naive().to_string(),
        None => format!("day {}", day.days_since_epoch()),
    }
}

fn describe_source(daily: bool) -> &'static str {
    if daily {
        "daily averages"
    } else {
        "raw records"
    }
}

#[derive(Debug)]
pub struct SimulateReport {
    pub mode: OperationMode,
    pub numeric: bool,
    pub exponent: f64,
    pub leak_start_s: f64,
    pub end_time_s: f64,
    pub time_step_s: f64,
    pub cadence_s: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub samples: usize,
    pub records: usize,
    pub final_leak: f64,
    pub unit: TemperatureUnit,
    pub telemetry_path: String,
    pub truth_path: String,
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let method = if self.numeric { "numeric" } else { "analytic" };
        writeln!(f, "simulated {} run ({method})", self.mode)?;
        writeln!(
            f,
            "  horizon {} s, leak onset {} s, step {} s, {} trace samples",
            sig6(self.end_time_s),
            sig6(self.leak_start_s),
            sig6(self.time_step_s),
            self.samples
        )?;
        writeln!(
            f,
            "  noise sigma {}, seed {}",
            sig6(self.noise_sigma),
            self.seed
        )?;
        writeln!(f, "  true scaling exponent c = {}", sig6(self.exponent))?;
        writeln!(f, "  final leak degree {}", sig6(self.final_leak))?;
        writeln!(
            f,
            "  telemetry: {} ({} records, cadence {} s, {} temperatures)",
            self.telemetry_path,
            self.records,
            sig6(self.cadence_s),
            self.unit
        )?;
        write!(f, "  ground truth: {}", self.truth_path)
    }
}

#[derive(Debug)]
pub struct FitReport {
    pub input: String,
    pub unit: TemperatureUnit,
    pub daily: bool,
    pub rows: Vec<FitRow>,
    pub fits_path: String,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "fit of {} ({} temperatures, {})",
            self.input,
            self.unit,
            describe_source(self.daily)
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "  {}: c = {} (se {}), n = {}, r^2 = {}",
                row.mode,
                sig6(row.fit.c),
                sig6(row.fit.se_c),
                row.fit.n,
                sig6(row.fit.r_squared)
            )?;
            if row.fit.with_intercept {
                writeln!(
                    f,
                    "    intercept = {} (se {})",
                    sig6(row.fit.intercept),
                    sig6(row.fit.se_intercept)
                )?;
            } else {
                writeln!(f, "    intercept fixed at zero")?;
            }
            writeln!(
                f,
                "    reference mass {} kg, reference temperature {} K",
                sig6(row.mass0),
                sig6(row.temp0.value())
            )?;
        }
        write!(f, "  fit table: {}", self.fits_path)
    }
}

#[derive(Debug)]
pub struct TtestReport {
    pub input_a: String,
    pub input_b: String,
    pub unit: TemperatureUnit,
    pub daily: bool,
    pub tests: Vec<(OperationMode, SlopeTest)>,
}

impl TtestReport {
    pub fn any_rejected(&self) -> bool {
        self.tests.iter().any(|(_, test)| test.rejected)
    }
}

impl fmt::Display for TtestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "slope homogeneity, {} vs {} ({} temperatures, {})",
            self.input_a,
            self.input_b,
            self.unit,
            describe_source(self.daily)
        )?;
        let mut first = true;
        for (mode, test) in &self.tests {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(
                f,
                "  {mode}: c_a = {}, c_b = {}",
                sig6(test.c_a),
                sig6(test.c_b)
            )?;
            writeln!(
                f,
                "    t = {} on {} degrees of freedom, p = {}",
                sig6(test.t),
                test.dof,
                sig6(test.p)
            )?;
            if test.rejected {
                write!(
                    f,
                    "    parallelism rejected at alpha = {}",
                    sig6(test.alpha)
                )?;
            } else {
                write!(
                    f,
                    "    parallelism not rejected at alpha = {}",
                    sig6(test.alpha)
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct DiagnoseReport {
    pub input: String,
    pub unit: TemperatureUnit,
    pub exponents: Vec<(OperationMode, f64)>,
    pub window_days: usize,
    pub threshold: f64,
    pub initial_leak: f64,
    pub days: usize,
    pub final_estimate: f64,
    pub detected: Option<Day>,
    pub trace_path: String,
}

impl fmt::Display for DiagnoseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "diagnosis of {}: {} days ({} temperatures)",
            self.input, self.days, self.unit
        )?;
        write!(f, "  exponents:")?;
        for (mode, c) in &self.exponents {
            write!(f, " {mode}={}", sig6(*c))?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "  window {} days, threshold {}, initial leak {}",
            self.window_days,
            sig6(self.threshold),
            sig6(self.initial_leak)
        )?;
        writeln!(f, "  final leak estimate {}", sig6(self.final_estimate))?;
        match self.detected {
            Some(day) => writeln!(f, "  threshold crossed on {}", day_to_date(day))?,
            None => writeln!(f, "  threshold not crossed")?,
        }
        write!(f, "  leak trace: {}", self.trace_path)
    }
}
