//! Scaling-law soft sensor for refrigerant leak detection.
//!
//! A slow refrigerant leak through a small hole, with the expansion valve and
//! compressor partially compensating mass and pressure, leaves a power-law
//! fingerprint: the refrigerant temperature scales with the remaining mass as
//! `T/T0 = (M/M0)^c` for a mode-specific exponent `c`. This crate provides the
//! full pipeline built on that law:
//!
//! - [`telemetry`]: domain types, unit discipline, and daily aggregation of
//!   raw equipment telemetry.
//! - [`sim`]: analytic and Runge-Kutta simulation of a controlled leak, plus
//!   fault-test telemetry export.
//! - [`fit`]: log-ratio regression recovering the exponent from fault-test
//!   data, and a two-group slope-homogeneity test.
//! - [`stats`]: Student-t tail probabilities used by the slope test.
//! - [`sensor`]: the online estimator turning daily temperatures into a
//!   smoothed, monotone leak-degree trace with threshold detection.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the command
//! line live in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod fit;
pub mod sensor;
pub mod sim;
pub mod stats;
pub mod telemetry;

pub use fit::{
    build_log_ratios, fit_scaling_exponent, test_slope_homogeneity, LogRatioPoint, ScalingFit,
    SlopeTest,
};
pub use sensor::{
    compute_initial_temperature, detect, diagnose, enforce_monotone, estimate_leak, moving_average,
    on_mode_switch, LeakPoint, LeakTrace, ModeParams,
};
pub use sim::{
    control_exponent, export_fault_test, simulate_analytic, simulate_numeric, SimParams, SimTrace,
};
pub use stats::student_t_two_sided_p;
pub use telemetry::{
    celsius_to_kelvin, daily_aggregate, mode_temperature, DailySample, Day, Kelvin, OperationMode,
    TelemetryRecord,
};
