//! Online leak-degree estimation from daily telemetry.
//!
//! Field equipment reports temperatures but not mass, so the sensor inverts
//! the scaling law: with a mode's baseline temperature `T0`, exponent `c`,
//! and the leak degree `y0` at the time the baseline was taken, a daily
//! temperature `T` gives
//!
//! ```text
//! y = 1 - (1 - y0) * (T / T0)^(1/c)
//! ```
//!
//! [`diagnose`] runs the whole pipeline over aggregated daily samples: it
//! establishes each mode's baseline from the first `window_days` of that
//! mode's first episode, chains `y0` across mode switches so the estimate is
//! continuous, reuses stored baselines when a mode returns, then smooths with
//! a trailing moving average, enforces monotonicity (a leak never heals
//! itself), and flags the first crossing of the detection threshold.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::telemetry::{DailySample, Day, Kelvin, OperationMode};

/// Errors from baseline capture and estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum SensorError {
    /// Window length must be at least one day.
    InvalidWindow,
    /// Not enough samples to establish a baseline.
    InsufficientData { available: usize, required: usize },
    /// The baseline window mixes operation modes.
    ModeMismatch {
        expected: OperationMode,
        found: OperationMode,
    },
    /// A zero scaling exponent cannot be inverted.
    DegenerateExponent,
    /// Initial leak degree outside [0, 1).
    InvalidInitialLeak { value: f64 },
    /// The previous estimate says the charge is gone; re-basing on it is
    /// meaningless.
    Saturated { estimate: f64 },
    /// Detection threshold outside (0, 1).
    ThresholdOutOfRange { threshold: f64 },
    /// A mode appears in the data without a configured exponent.
    MissingExponent { mode: OperationMode },
    /// Sample dates must be strictly increasing; `index` is the offender.
    UnsortedDates { index: usize },
}

impl fmt::Display for SensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SensorError::InvalidWindow => write!(f, "window must be at least one day"),
            SensorError::InsufficientData {
                available,
                required,
            } => write!(
                f,
                "baseline needs {required} samples in the mode's first episode, got {available}"
            ),
            SensorError::ModeMismatch { expected, found } => {
                write!(
                    f,
                    "baseline window mixes modes: expected {expected}, found {found}"
                )
            }
            SensorError::DegenerateExponent => {
                write!(f, "scaling exponent must be nonzero to invert the law")
            }
            SensorError::InvalidInitialLeak { value } => {
                write!(f, "initial leak degree must lie in [0, 1), got {value}")
            }
            SensorError::Saturated { estimate } => {
                write!(
                    f,
                    "previous estimate {estimate} implies total loss; cannot re-base"
                )
            }
            SensorError::ThresholdOutOfRange { threshold } => {
                write!(f, "detection threshold must lie in (0, 1), got {threshold}")
            }
            SensorError::MissingExponent { mode } => {
                write!(f, "no scaling exponent configured for mode {mode}")
            }
            SensorError::UnsortedDates { index } => {
                write!(f, "sample dates not strictly increasing at index {index}")
            }
        }
    }
}

impl core::error::Error for SensorError {}

/// Estimation state of one operation mode: its scaling exponent, the
/// baseline temperature, and the leak degree at the moment that baseline was
/// taken. Constructed through [`ModeParams::new`] or [`on_mode_switch`] so
/// the invariants (`c != 0`, `0 <= y0 < 1`) always hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    exponent: f64,
    baseline: Kelvin,
    initial_leak: f64,
}

impl ModeParams {
    pub fn new(exponent: f64, baseline: Kelvin, initial_leak: f64) -> Result<Self, SensorError> {
        if exponent == 0.0 || !exponent.is_finite() {
            return Err(SensorError::DegenerateExponent);
        }
        if !(0.0..1.0).contains(&initial_leak) {
            return Err(SensorError::InvalidInitialLeak {
                value: initial_leak,
            });
        }
        Ok(ModeParams {
            exponent,
            baseline,
            initial_leak,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn baseline(&self) -> Kelvin {
        self.baseline
    }

    pub fn initial_leak(&self) -> f64 {
        self.initial_leak
    }
}

/// One diagnosed day.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakPoint {
    pub date: Day,
    pub mode: OperationMode,
    pub y_raw: f64,
    pub y_smooth: f64,
    pub y_mono: f64,
    pub detected: bool,
}

/// The diagnosed series, one point per non-idle daily sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeakTrace {
    pub points: Vec<LeakPoint>,
}

/// Mean temperature over the first `window_days` samples, which must all
/// share one operation mode.
pub fn compute_initial_temperature(
    samples: &[DailySample],
    window_days: usize,
) -> Result<Kelvin, SensorError> {
    if window_days == 0 {
        return Err(SensorError::InvalidWindow);
    }
    if samples.len() < window_days {
        return Err(SensorError::InsufficientData {
            available: samples.len(),
            required: window_days,
        });
    }
    let window = &samples[..window_days];
    let mode = window[0].mode;
    for sample in window {
        if sample.mode != mode {
            return Err(SensorError::ModeMismatch {
                expected: mode,
                found: sample.mode,
            });
        }
    }
    mean_temperature(window)
}

fn mean_temperature(samples: &[DailySample]) -> Result<Kelvin, SensorError> {
    let sum: f64 = samples.iter().map(|s| s.temp.value()).sum();
    // Mean of validated positive temperatures is positive.
    Ok(Kelvin::new(sum / samples.len() as f64).expect("mean of positive temperatures"))
}

/// Inverts the scaling law for one temperature reading. The result may
/// stray outside [0, 1) under measurement noise; downstream smoothing and
/// monotone enforcement clamp it.
pub fn estimate_leak(temp: Kelvin, params: &ModeParams) -> f64 {
    let ratio = temp.value() / params.baseline.value();
    1.0 - (1.0 - params.initial_leak) * libm::pow(ratio, 1.0 / params.exponent)
}

/// Builds the estimation state for a newly entered mode, re-basing on the
/// estimate carried over from the previous mode. Small negative carryover
/// (noise) clamps to zero; an estimate at or above one cannot be re-based.
pub fn on_mode_switch(
    prev_estimate: f64,
    new_baseline: Kelvin,
    new_exponent: f64,
) -> Result<ModeParams, SensorError> {
    if !prev_estimate.is_finite() {
        return Err(SensorError::InvalidInitialLeak {
            value: prev_estimate,
        });
    }
    if prev_estimate >= 1.0 {
        return Err(SensorError::Saturated {
            estimate: prev_estimate,
        });
    }
    ModeParams::new(new_exponent, new_baseline, prev_estimate.max(0.0))
}

/// Trailing moving average: `output[i]` is the mean of the last `window`
/// values ending at `i` (fewer near the start). Output length equals input
/// length; a window of one is the identity.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>, SensorError> {
    if window == 0 {
        return Err(SensorError::InvalidWindow);
    }
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        let len = (i + 1).min(window) as f64;
        out.push(sum / len);
    }
    Ok(out)
}

/// Running maximum clamped to [0, 1]. Leak degree cannot decrease (the
/// refrigerant does not return), and the clamp absorbs noise excursions
/// outside the physical range.
pub fn enforce_monotone(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut running = f64::NEG_INFINITY;
    for &v in values {
        running = running.max(v);
        out.push(running.clamp(0.0, 1.0));
    }
    out
}

/// First date whose monotone estimate reaches the threshold, if any.
pub fn detect(trace: &LeakTrace, threshold: f64) -> Result<Option<Day>, SensorError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SensorError::ThresholdOutOfRange { threshold });
    }
    Ok(trace
        .points
        .iter()
        .find(|p| p.y_mono >= threshold)
        .map(|p| p.date))
}

/// Runs the full estimation pipeline over daily samples with `y0 = 0` at
/// the start, i.e. the charge is assumed full when diagnosis begins.
pub fn diagnose(
    samples: &[DailySample],
    exponents: &BTreeMap<OperationMode, f64>,
    window_days: usize,
    threshold: f64,
) -> Result<LeakTrace, SensorError> {
    diagnose_from(samples, exponents, window_days, threshold, 0.0)
}

/// [`diagnose`] with a known leak degree at the start of the data, for
/// equipment whose charge state is already partially known.
///
/// Per mode episode: the first episode of a mode holds `y_raw` at the
/// carried-over `y0` for `window_days` while the baseline temperature is
/// collected as their mean, then estimates daily; later episodes of a seen
/// mode estimate immediately from the stored baseline. Idle samples are
/// skipped entirely and do not advance the smoothing window. The smoothed,
/// monotone, and detection columns are derived from the raw series at the
/// end.
pub fn diagnose_from(
    samples: &[DailySample],
    exponents: &BTreeMap<OperationMode, f64>,
    window_days: usize,
    threshold: f64,
    initial_leak: f64,
) -> Result<LeakTrace, SensorError> {
    if window_days == 0 {
        return Err(SensorError::InvalidWindow);
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SensorError::ThresholdOutOfRange { threshold });
    }
    if !(0.0..1.0).contains(&initial_leak) {
        return Err(SensorError::InvalidInitialLeak {
            value: initial_leak,
        });
    }

    let active: Vec<&DailySample> = samples
        .iter()
        .filter(|s| s.mode != OperationMode::Idle)
        .collect();
    if active.len() < window_days {
        return Err(SensorError::InsufficientData {
            available: active.len(),
            required: window_days,
        });
    }
    for (index, pair) in active.windows(2).enumerate() {
        if pair[1].date <= pair[0].date {
            return Err(SensorError::UnsortedDates { index: index + 1 });
        }
    }
    for sample in &active {
        if !exponents.contains_key(&sample.mode) {
            return Err(SensorError::MissingExponent { mode: sample.mode });
        }
    }

    let mut established: BTreeMap<OperationMode, ModeParams> = BTreeMap::new();
    let mut y_raw = Vec::with_capacity(active.len());
    let mut carried = initial_leak;

    let mut start = 0;
    while start < active.len() {
        let mode = active[start].mode;
        let mut end = start + 1;
        while end < active.len() && active[end].mode == mode {
            end += 1;
        }
        let episode = &active[start..end];
        start = end;

        if let Some(params) = established.get(&mode) {
            for sample in episode {
                carried = estimate_leak(sample.temp, params);
                y_raw.push(carried);
            }
            continue;
        }

        // First time in this mode: collect the baseline over the head
        // window, holding y_raw at the carried-over estimate meanwhile.
        if episode.len() < window_days {
            return Err(SensorError::InsufficientData {
                available: episode.len(),
                required: window_days,
            });
        }
        let sum: f64 = episode[..window_days].iter().map(|s| s.temp.value()).sum();
        let baseline =
            Kelvin::new(sum / window_days as f64).expect("mean of positive temperatures");
        let params = on_mode_switch(carried, baseline, exponents[&mode])?;
        for _ in 0..window_days {
            y_raw.push(params.initial_leak());
        }
        carried = params.initial_leak();
        for sample in &episode[window_days..] {
            carried = estimate_leak(sample.temp, &params);
            y_raw.push(carried);
        }
        established.insert(mode, params);
    }

    let y_smooth = moving_average(&y_raw, window_days)?;
    let y_mono = enforce_monotone(&y_smooth);
    let points = active
        .iter()
        .enumerate()
        .map(|(i, sample)| LeakPoint {
            date: sample.date,
            mode: sample.mode,
            y_raw: y_raw[i],
            y_smooth: y_smooth[i],
            y_mono: y_mono[i],
            detected: y_mono[i] >= threshold,
        })
        .collect();
    Ok(LeakTrace { points })
}
