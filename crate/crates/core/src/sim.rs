//! Controlled-leak simulation.
//!
//! The model: refrigerant escapes through a small hole at constant velocity
//! while the expansion valve replenishes a fraction `mass_control` of the
//! lost mass and the compressor restores a fraction `pressure_control` of the
//! lost pressure. With leak rate `k = (hole_area / hole_volume) *
//! leak_velocity` the reduced dynamics after leak onset `t0` are linear:
//!
//! ```text
//! d(rho)/dt = -(1 - c_M) k rho
//! d(p)/dt   = -(1 - c_p) k p
//! d(T)/dt   =  (c_p - c_M) k T
//! ```
//!
//! so mass, pressure, and temperature relax exponentially and temperature
//! obeys `T/T0 = (M/M0)^c` with [`control_exponent`] `c`. Both the
//! closed-form solution and a fixed-step Runge-Kutta integration of the same
//! ODEs are provided; they must agree, and the acceptance suite holds them to
//! that. Optional multiplicative lognormal noise models temperature-sensor
//! error; mass and pressure stay exact.

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::telemetry::{Kelvin, OperationMode, TelemetryRecord};

/// Relative tolerance for the consistency relations among initial values.
const CONSISTENCY_RTOL: f64 = 1e-9;

/// Hard cap on trace length to keep misconfigured horizons from exhausting
/// memory (five f64 columns per sample).
const MAX_TRACE_SAMPLES: usize = 10_000_000;

/// Errors from simulation setup and execution.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// A parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// Initial values violate a required relation.
    Inconsistent { relation: &'static str },
    /// `mass_control = 1` means the valve fully replaces lost mass; no mass
    /// signal exists and the exponent is undefined.
    FullCompensation,
    /// The integration step violates `(1 - c_M) k dt < 0.1`.
    StepTooLarge { rate_times_step: f64 },
    /// The requested horizon would produce an unreasonably long trace.
    TraceTooLong { samples: usize, max: usize },
    /// Fault tests run in heating or cooling, never idle.
    IdleExport,
    /// Integration produced a non-physical state.
    NonPhysicalState { name: &'static str, value: f64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidParameter { name, value } => {
                write!(f, "parameter {name} is out of range: {value}")
            }
            SimError::Inconsistent { relation } => {
                write!(f, "initial values violate {relation}")
            }
            SimError::FullCompensation => write!(
                f,
                "mass_control = 1 fully masks the leak; control exponent undefined"
            ),
            SimError::StepTooLarge { rate_times_step } => write!(
                f,
                "time step too large for the leak rate: (1 - c_M) k dt = {rate_times_step}, need < 0.1"
            ),
            SimError::TraceTooLong { samples, max } => {
                write!(f, "horizon yields {samples} samples, limit is {max}")
            }
            SimError::IdleExport => write!(f, "fault-test export requires heating or cooling"),
            SimError::NonPhysicalState { name, value } => {
                write!(f, "integration produced non-physical {name}: {value}")
            }
        }
    }
}

impl core::error::Error for SimError {}

/// Physical and numerical parameters of one controlled-leak run.
///
/// Initial values must satisfy the equation of state
/// `initial_pressure = compressibility * initial_density * gas_constant *
/// initial_temperature` and the geometric relation
/// `initial_mass = initial_density * pipe_volume`, both to within 1e-9
/// relative. `heat_capacity_ratio` documents the fluid and is carried into
/// reports; the reduced dynamics consume the leak velocity directly.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Leak hole cross-section, m^2.
    pub hole_area: f64,
    /// Leak hole channel volume, m^3.
    pub hole_volume: f64,
    /// Refrigerant velocity through the hole, m/s.
    pub leak_velocity: f64,
    /// Fraction of lost mass replaced by the expansion valve, in [0, 1).
    pub mass_control: f64,
    /// Fraction of lost pressure restored by the compressor, in [0, 1].
    pub pressure_control: f64,
    /// Initial refrigerant charge, kg.
    pub initial_mass: f64,
    /// Initial temperature at the mode's reference sensor.
    pub initial_temperature: Kelvin,
    /// Initial pressure, Pa.
    pub initial_pressure: f64,
    /// Initial density, kg/m^3.
    pub initial_density: f64,
    /// Internal circuit volume, m^3.
    pub pipe_volume: f64,
    /// Heat-capacity ratio of the refrigerant vapor.
    pub heat_capacity_ratio: f64,
    /// Compressibility factor in the equation of state.
    pub compressibility: f64,
    /// Specific gas constant, J/(kg K).
    pub gas_constant: f64,
    /// Leak onset, seconds from trace start.
    pub leak_start: f64,
    /// Trace horizon, seconds; the trace covers [0, end_time].
    pub end_time: f64,
    /// Sample spacing and integration step, seconds.
    pub time_step: f64,
    /// Std dev of Gaussian noise on log temperature; 0 disables noise.
    pub noise_sigma: f64,
    /// Seed for the noise stream.
    pub seed: u64,
}

impl SimParams {
    /// Leak rate `k = (hole_area / hole_volume) * leak_velocity`, 1/s.
    pub fn leak_rate(&self) -> f64 {
        self.hole_area / self.hole_volume * self.leak_velocity
    }

    /// Checks ranges and the two consistency relations.
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("hole_area", self.hole_area),
            ("hole_volume", self.hole_volume),
            ("leak_velocity", self.leak_velocity),
            ("initial_mass", self.initial_mass),
            ("initial_pressure", self.initial_pressure),
            ("initial_density", self.initial_density),
            ("pipe_volume", self.pipe_volume),
            ("compressibility", self.compressibility),
            ("gas_constant", self.gas_constant),
            ("time_step", self.time_step),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(SimError::InvalidParameter { name, value });
            }
        }
        if self.heat_capacity_ratio <= 1.0 || !self.heat_capacity_ratio.is_finite() {
            return Err(SimError::InvalidParameter {
                name: "heat_capacity_ratio",
                value: self.heat_capacity_ratio,
            });
        }
        if !(0.0..1.0).contains(&self.mass_control) {
            return Err(SimError::InvalidParameter {
                name: "mass_control",
                value: self.mass_control,
            });
        }
        if !(0.0..=1.0).contains(&self.pressure_control) {
            return Err(SimError::InvalidParameter {
                name: "pressure_control",
                value: self.pressure_control,
            });
        }
        if self.leak_start < 0.0 || !self.leak_start.is_finite() {
            return Err(SimError::InvalidParameter {
                name: "leak_start",
                value: self.leak_start,
            });
        }
        if self.end_time < self.leak_start || !self.end_time.is_finite() {
            return Err(SimError::InvalidParameter {
                name: "end_time",
                value: self.end_time,
            });
        }
        if self.noise_sigma < 0.0 || !self.noise_sigma.is_finite() {
            return Err(SimError::InvalidParameter {
                name: "noise_sigma",
                value: self.noise_sigma,
            });
        }

        let t0 = self.initial_temperature.value();
        let state = self.compressibility * self.initial_density * self.gas_constant * t0;
        if libm::fabs(self.initial_pressure - state) > CONSISTENCY_RTOL * self.initial_pressure {
            return Err(SimError::Inconsistent {
                relation: "p0 = z_c rho0 R T0",
            });
        }
        let mass = self.initial_density * self.pipe_volume;
        if libm::fabs(self.initial_mass - mass) > CONSISTENCY_RTOL * self.initial_mass {
            return Err(SimError::Inconsistent {
                relation: "M0 = rho0 V0",
            });
        }
        Ok(())
    }

    fn sample_count(&self) -> Result<usize, SimError> {
        let steps = libm::round(self.end_time / self.time_step) as i64;
        let samples = steps as usize + 1;
        if samples > MAX_TRACE_SAMPLES {
            return Err(SimError::TraceTooLong {
                samples,
                max: MAX_TRACE_SAMPLES,
            });
        }
        Ok(samples)
    }
}

/// Time series of one simulated run. All columns share one length; the leak
/// degree is mass-based (`1 - M/M0`) and therefore unaffected by temperature
/// noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// Sample times, seconds from trace start.
    pub times: Vec<f64>,
    /// Refrigerant mass, kg.
    pub mass: Vec<f64>,
    /// Pressure, Pa.
    pub pressure: Vec<f64>,
    /// Reference-sensor temperature, K (noisy when noise was requested).
    pub temperature: Vec<f64>,
    /// Ground-truth leak degree `1 - M/M0`.
    pub leak_degree: Vec<f64>,
    /// The run's initial temperature, kept for telemetry export fills.
    pub baseline_temperature: f64,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// The scaling exponent `c = -(c_p - c_M) / (1 - c_M)` linking temperature
/// to mass: `T/T0 = (M/M0)^c`. Negative whenever pressure is compensated
/// more strongly than mass, which is the physical regime; undefined at
/// `c_M = 1`.
pub fn control_exponent(mass_control: f64, pressure_control: f64) -> Result<f64, SimError> {
    if !(0.0..=1.0).contains(&mass_control) {
        return Err(SimError::InvalidParameter {
            name: "mass_control",
            value: mass_control,
        });
    }
    if !(0.0..=1.0).contains(&pressure_control) {
        return Err(SimError::InvalidParameter {
            name: "pressure_control",
            value: pressure_control,
        });
    }
    if mass_control == 1.0 {
        return Err(SimError::FullCompensation);
    }
    Ok(-(pressure_control - mass_control) / (1.0 - mass_control))
}

/// Simulates a run from the closed-form solution of the leak dynamics.
///
/// For `t >= leak_start`, with `tau = t - leak_start`:
///
/// ```text
/// M(t) = M0 exp(-(1 - c_M) k tau)
/// p(t) = p0 exp(-(1 - c_p) k tau)
/// T(t) = T0 exp( (c_p - c_M) k tau)
/// ```
///
/// Before the onset every state holds its initial value. Gaussian noise of
/// std `noise_sigma` on the log temperature (a multiplicative lognormal
/// factor) is applied per sample from the seeded stream.
pub fn simulate_analytic(params: &SimParams) -> Result<SimTrace, SimError> {
    params.validate()?;
    let samples = params.sample_count()?;
    let k = params.leak_rate();
    let mass_rate = -(1.0 - params.mass_control) * k;
    let pressure_rate = -(1.0 - params.pressure_control) * k;
    let temp_rate = (params.pressure_control - params.mass_control) * k;

    let mut trace = empty_trace(samples, params.initial_temperature.value());
    for i in 0..samples {
        let t = i as f64 * params.time_step;
        let tau = (t - params.leak_start).max(0.0);
        let mass_ratio = libm::exp(mass_rate * tau);
        trace.times.push(t);
        trace.mass.push(params.initial_mass * mass_ratio);
        trace
            .pressure
            .push(params.initial_pressure * libm::exp(pressure_rate * tau));
        trace
            .temperature
            .push(params.initial_temperature.value() * libm::exp(temp_rate * tau));
        trace.leak_degree.push(1.0 - mass_ratio);
    }
    apply_temperature_noise(&mut trace, params.noise_sigma, params.seed);
    Ok(trace)
}

/// Simulates a run by fixed-step fourth-order Runge-Kutta integration of the
/// density, pressure, and temperature ODEs, with mass recovered as
/// `rho * pipe_volume`. The step must satisfy `(1 - c_M) k dt < 0.1`; the
/// onset is handled exactly by starting the integration at `leak_start`
/// inside the first affected step. Noise handling matches
/// [`simulate_analytic`], so equal seeds produce equal noise streams.
pub fn simulate_numeric(params: &SimParams) -> Result<SimTrace, SimError> {
    params.validate()?;
    let samples = params.sample_count()?;
    let k = params.leak_rate();
    let rate_times_step = (1.0 - params.mass_control) * k * params.time_step;
    if rate_times_step >= 0.1 {
        return Err(SimError::StepTooLarge { rate_times_step });
    }

    let rates = [
        -(1.0 - params.mass_control) * k,
        -(1.0 - params.pressure_control) * k,
        (params.pressure_control - params.mass_control) * k,
    ];
    let derivative = |state: &[f64; 3]| {
        [
            rates[0] * state[0],
            rates[1] * state[1],
            rates[2] * state[2],
        ]
    };

    let mut state = [
        params.initial_density,
        params.initial_pressure,
        params.initial_temperature.value(),
    ];
    let mut trace = empty_trace(samples, params.initial_temperature.value());
    for i in 0..samples {
        let t = i as f64 * params.time_step;
        if i > 0 {
            let step_start = (i - 1) as f64 * params.time_step;
            // The dynamics switch on at leak_start; integrate only the live
            // part of a step that straddles it.
            if t > params.leak_start {
                let from = step_start.max(params.leak_start);
                state = rk4_step(&derivative, &state, t - from);
            }
        }
        let mass = state[0] * params.pipe_volume;
        if !state[2].is_finite() || state[2] <= 0.0 || !mass.is_finite() {
            return Err(SimError::NonPhysicalState {
                name: "temperature",
                value: state[2],
            });
        }
        trace.times.push(t);
        trace.mass.push(mass);
        trace.pressure.push(state[1]);
        trace.temperature.push(state[2]);
        trace.leak_degree.push(1.0 - mass / params.initial_mass);
    }
    apply_temperature_noise(&mut trace, params.noise_sigma, params.seed);
    Ok(trace)
}

/// Renders a simulated run as fault-test telemetry in one operation mode.
///
/// One record is emitted per `cadence_s` of trace time (at least one, the
/// trace start), sampling the nearest trace point; a cadence finer than the
/// trace step falls back to the trace step. The mode's reference sensor
/// carries the simulated temperature; the off-mode sensors are filled with
/// the constant baseline. Mass is always populated, as on instrumented test
/// rigs. Timestamps count seconds from `start_timestamp`.
pub fn export_fault_test(
    trace: &SimTrace,
    mode: OperationMode,
    cadence_s: f64,
    start_timestamp: i64,
) -> Result<Vec<TelemetryRecord>, SimError> {
    if mode == OperationMode::Idle {
        return Err(SimError::IdleExport);
    }
    if cadence_s <= 0.0 || !cadence_s.is_finite() {
        return Err(SimError::InvalidParameter {
            name: "cadence_s",
            value: cadence_s,
        });
    }
    let baseline =
        Kelvin::new(trace.baseline_temperature).map_err(|_| SimError::NonPhysicalState {
            name: "baseline_temperature",
            value: trace.baseline_temperature,
        })?;

    let step = if trace.len() > 1 {
        trace.times[1] - trace.times[0]
    } else {
        1.0
    };
    let horizon = *trace.times.last().unwrap_or(&0.0);

    let mut records = Vec::new();
    let mut previous_index = usize::MAX;
    let mut j = 0u64;
    loop {
        let target = j as f64 * cadence_s;
        if target > horizon && j > 0 {
            break;
        }
        let index = (libm::round(target / step) as usize).min(trace.len() - 1);
        j += 1;
        if index == previous_index {
            continue;
        }
        previous_index = index;

        let temp =
            Kelvin::new(trace.temperature[index]).map_err(|_| SimError::NonPhysicalState {
                name: "temperature",
                value: trace.temperature[index],
            })?;
        let (discharge, intake) = match mode {
            OperationMode::Heating => (temp, baseline),
            OperationMode::Cooling => (baseline, temp),
            OperationMode::Idle => unreachable!("rejected above"),
        };
        records.push(TelemetryRecord {
            timestamp: start_timestamp + libm::round(trace.times[index]) as i64,
            mode,
            temp_discharge: discharge,
            temp_intake_1: intake,
            temp_intake_2: intake,
            mass: Some(trace.mass[index]),
        });
        if trace.len() == 1 {
            break;
        }
    }
    Ok(records)
}

fn empty_trace(capacity: usize, baseline_temperature: f64) -> SimTrace {
    SimTrace {
        times: Vec::with_capacity(capacity),
        mass: Vec::with_capacity(capacity),
        pressure: Vec::with_capacity(capacity),
        temperature: Vec::with_capacity(capacity),
        leak_degree: Vec::with_capacity(capacity),
        baseline_temperature,
    }
}

/// Multiplies each temperature sample by `exp(eps)`, `eps ~ N(0, sigma^2)`,
/// drawn from a ChaCha stream seeded with `seed`. No-op at `sigma = 0`.
fn apply_temperature_noise(trace: &mut SimTrace, sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("validated sigma");
    for temp in &mut trace.temperature {
        *temp *= libm::exp(noise.sample(&mut rng));
    }
}

/// One classical fourth-order Runge-Kutta step of size `h` for an autonomous
/// three-state system.
fn rk4_step<F>(f: &F, state: &[f64; 3], h: f64) -> [f64; 3]
where
    F: Fn(&[f64; 3]) -> [f64; 3],
{
    let at = |base: &[f64; 3], slope: &[f64; 3], scale: f64| {
        [
            base[0] + scale * slope[0],
            base[1] + scale * slope[1],
            base[2] + scale * slope[2],
        ]
    };
    let k1 = f(state);
    let k2 = f(&at(state, &k1, 0.5 * h));
    let k3 = f(&at(state, &k2, 0.5 * h));
    let k4 = f(&at(state, &k3, h));
    let mut next = *state;
    for i in 0..3 {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A consistent parameter set: p0 = z_c rho0 R T0 and M0 = rho0 V0 hold
    /// exactly in the constructed values.
    pub(crate) fn base_params() -> SimParams {
        let compressibility = 0.9;
        let gas_constant = 114.5;
        let temperature = 350.0;
        let density = 50.0;
        let mass = 18.0;
        SimParams {
            hole_area: 1e-3,
            hole_volume: 1.0,
            leak_velocity: 1.0,
            mass_control: 0.2,
            pressure_control: 0.5,
            initial_mass: mass,
            initial_temperature: Kelvin::new(temperature).unwrap(),
            initial_pressure: compressibility * density * gas_constant * temperature,
            initial_density: density,
            pipe_volume: mass / density,
            heat_capacity_ratio: 1.22,
            compressibility,
            gas_constant,
            leak_start: 0.0,
            end_time: 100.0,
            time_step: 1.0,
            noise_sigma: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn control_exponent_matches_hand_value() {
        // -(0.5 - 0.1) / (1 - 0.1) = -4/9.
        let c = control_exponent(0.1, 0.5).unwrap();
        assert!((c + 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn control_exponent_rejects_full_mass_compensation() {
        assert_eq!(control_exponent(1.0, 0.5), Err(SimError::FullCompensation));
        assert!(control_exponent(-0.1, 0.5).is_err());
        assert!(control_exponent(0.1, 1.5).is_err());
    }

    #[test]
    fn equal_controls_leave_temperature_flat() {
        assert_eq!(control_exponent(0.3, 0.3).unwrap(), 0.0);
        let mut params = base_params();
        params.pressure_control = params.mass_control;
        params.initial_pressure = params.compressibility
            * params.initial_density
            * params.gas_constant
            * params.initial_temperature.value();
        let trace = simulate_analytic(&params).unwrap();
        for temp in &trace.temperature {
            assert_eq!(*temp, 350.0);
        }
        assert!(trace.leak_degree.last().unwrap() > &0.0);
    }

    #[test]
    fn analytic_mass_ratio_matches_exponential() {
        // k = 1e-3, c_M = 0.2, tau = 100: M/M0 = exp(-0.08), from 30-digit
        // arithmetic.
        let params = base_params();
        let trace = simulate_analytic(&params).unwrap();
        let ratio = trace.mass[100] / params.initial_mass;
        assert!((ratio - 0.923_116_346_386_635_8).abs() < 1e-15);
        assert!((trace.leak_degree[100] - (1.0 - 0.923_116_346_386_635_8)).abs() < 1e-15);
    }

    #[test]
    fn leak_degree_is_zero_until_onset() {
        let mut params = base_params();
        params.leak_start = 40.0;
        let trace = simulate_analytic(&params).unwrap();
        for i in 0..=40 {
            assert_eq!(trace.leak_degree[i], 0.0);
            assert_eq!(trace.mass[i], params.initial_mass);
        }
        assert!(trace.leak_degree[41] > 0.0);
    }

    #[test]
    fn degenerate_horizon_gives_flat_or_single_sample_trace() {
        let mut params = base_params();
        params.leak_start = 100.0;
        params.end_time = 100.0;
        let trace = simulate_analytic(&params).unwrap();
        assert!(trace.leak_degree.iter().all(|&y| y == 0.0));

        params.leak_start = 0.0;
        params.end_time = 0.0;
        let trace = simulate_analytic(&params).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.leak_degree[0], 0.0);
        assert_eq!(trace.times[0], 0.0);
    }

    #[test]
    fn numeric_tracks_analytic_within_rk4_accuracy() {
        let mut params = base_params();
        params.end_time = 2000.0;
        params.time_step = 0.2;
        params.leak_start = 137.7;
        let analytic = simulate_analytic(&params).unwrap();
        let numeric = simulate_numeric(&params).unwrap();
        for i in 0..analytic.len() {
            for (a, b) in [
                (analytic.mass[i], numeric.mass[i]),
                (analytic.pressure[i], numeric.pressure[i]),
                (analytic.temperature[i], numeric.temperature[i]),
            ] {
                assert!((a - b).abs() <= 1e-6 * a.abs(), "sample {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_controls_collapse_mass_and_pressure_ratios() {
        let mut params = base_params();
        params.mass_control = 0.0;
        params.pressure_control = 0.0;
        for trace in [
            simulate_analytic(&params).unwrap(),
            simulate_numeric(&params).unwrap(),
        ] {
            for i in 0..trace.len() {
                let mass_ratio = trace.mass[i] / params.initial_mass;
                let pressure_ratio = trace.pressure[i] / params.initial_pressure;
                assert!((mass_ratio - pressure_ratio).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn numeric_rejects_oversized_steps() {
        let mut params = base_params();
        // (1 - 0.2) * 1e-3 * 200 = 0.16 >= 0.1.
        params.time_step = 200.0;
        params.end_time = 2000.0;
        match simulate_numeric(&params) {
            Err(SimError::StepTooLarge { rate_times_step }) => {
                assert!((rate_times_step - 0.16).abs() < 1e-12)
            }
            other => panic!("expected StepTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_initial_values_are_rejected() {
        let mut params = base_params();
        params.initial_pressure *= 1.01;
        assert_eq!(
            simulate_analytic(&params),
            Err(SimError::Inconsistent {
                relation: "p0 = z_c rho0 R T0"
            })
        );
        let mut params = base_params();
        params.pipe_volume *= 2.0;
        assert_eq!(
            simulate_analytic(&params),
            Err(SimError::Inconsistent {
                relation: "M0 = rho0 V0"
            })
        );
    }

    #[test]
    fn noise_is_seed_deterministic_and_mass_exact() {
        let mut params = base_params();
        params.noise_sigma = 0.005;
        let a = simulate_analytic(&params).unwrap();
        let b = simulate_analytic(&params).unwrap();
        assert_eq!(a, b);

        params.seed = 8;
        let c = simulate_analytic(&params).unwrap();
        assert_ne!(a.temperature, c.temperature);
        assert_eq!(a.mass, c.mass);
        assert_eq!(a.leak_degree, c.leak_degree);

        let mut clean = base_params();
        clean.noise_sigma = 0.0;
        let clean = simulate_analytic(&clean).unwrap();
        assert_eq!(a.mass, clean.mass);
        assert_ne!(a.temperature, clean.temperature);
    }

    #[test]
    fn export_fills_off_mode_sensors_with_baseline() {
        let params = base_params();
        let trace = simulate_analytic(&params).unwrap();
        let records = export_fault_test(&trace, OperationMode::Heating, 10.0, 1_000).unwrap();
        assert_eq!(records.len(), 11);
        assert_eq!(records[0].timestamp, 1_000);
        assert_eq!(records[10].timestamp, 1_100);
        for (j, r) in records.iter().enumerate() {
            assert_eq!(r.mode, OperationMode::Heating);
            assert_eq!(r.temp_discharge.value(), trace.temperature[10 * j]);
            assert_eq!(r.temp_intake_1.value(), 350.0);
            assert_eq!(r.temp_intake_2.value(), 350.0);
            assert_eq!(r.mass, Some(trace.mass[10 * j]));
        }

        let records = export_fault_test(&trace, OperationMode::Cooling, 10.0, 0).unwrap();
        assert_eq!(records[3].temp_intake_1.value(), trace.temperature[30]);
        assert_eq!(records[3].temp_discharge.value(), 350.0);
    }

    #[test]
    fn export_cadence_beyond_horizon_yields_one_record() {
        let params = base_params();
        let trace = simulate_analytic(&params).unwrap();
        let records = export_fault_test(&trace, OperationMode::Heating, 1e6, 0).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].timestamp, 0);
    }

    #[test]
    fn export_rejects_idle_and_bad_cadence() {
        let trace = simulate_analytic(&base_params()).unwrap();
        assert_eq!(
            export_fault_test(&trace, OperationMode::Idle, 10.0, 0),
            Err(SimError::IdleExport)
        );
        assert!(export_fault_test(&trace, OperationMode::Heating, 0.0, 0).is_err());
    }

    #[test]
    fn scaling_law_holds_along_the_trace() {
        let params = base_params();
        let c = control_exponent(params.mass_control, params.pressure_control).unwrap();
        let trace = simulate_analytic(&params).unwrap();
        for i in 0..trace.len() {
            let lhs = libm::log(trace.temperature[i] / 350.0);
            let rhs = c * libm::log(trace.mass[i] / params.initial_mass);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
