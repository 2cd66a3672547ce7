//! Scaling-exponent recovery from fault-test data.
//!
//! A controlled leak obeys `T/T0 = (M/M0)^c`, so in log coordinates the data
//! fall on a line through the origin with slope `c`. [`build_log_ratios`]
//! turns daily samples into those log coordinates, [`fit_scaling_exponent`]
//! estimates the slope by ordinary least squares (with an optional intercept
//! as a diagnostic for baseline error), and [`test_slope_homogeneity`] asks
//! whether two independently fitted systems share one exponent, which is what
//! makes the exponent transferable across equipment sizes.

use alloc::vec::Vec;
use core::fmt;

use crate::stats::{student_t_two_sided_p, StatsError};
use crate::telemetry::{DailySample, Kelvin};

/// Errors from log-ratio construction and fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// A quantity that must be strictly positive was not.
    NonPositiveValue { name: &'static str, value: f64 },
    /// A sample lacked the mass needed for fitting; `index` is its position.
    MissingMass { index: usize },
    /// Too few points for the requested fit.
    InsufficientData { n: usize, required: usize },
    /// The x values carry no variation, so no slope is identifiable.
    DegenerateDesign,
    /// The slope test is defined for fits that included an intercept.
    InterceptRequired,
    /// Significance level outside (0, 1).
    InvalidAlpha { alpha: f64 },
    /// Error from the p-value kernel.
    Stats(StatsError),
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::NonPositiveValue { name, value } => {
                write!(f, "{name} must be strictly positive, got {value}")
            }
            FitError::MissingMass { index } => {
                write!(
                    f,
                    "sample {index} has no mass; fitting needs mass on every sample"
                )
            }
            FitError::InsufficientData { n, required } => {
                write!(f, "need at least {required} points, got {n}")
            }
            FitError::DegenerateDesign => {
                write!(f, "mass ratios are constant; slope is not identifiable")
            }
            FitError::InterceptRequired => {
                write!(f, "slope comparison requires fits with an intercept")
            }
            FitError::InvalidAlpha { alpha } => {
                write!(f, "significance level must lie in (0, 1), got {alpha}")
            }
            FitError::Stats(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FitError {}

impl From<StatsError> for FitError {
    fn from(e: StatsError) -> Self {
        FitError::Stats(e)
    }
}

/// One fitting point in log coordinates: `x = ln(M/M0)`, `y = ln(T/T0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRatioPoint {
    pub x: f64,
    pub y: f64,
}

impl LogRatioPoint {
    /// Builds a point from raw mass and temperature against their baselines.
    /// All four quantities must be strictly positive.
    pub fn new(mass: f64, mass0: f64, temp: Kelvin, temp0: Kelvin) -> Result<Self, FitError> {
        for (name, value) in [("mass", mass), ("initial mass", mass0)] {
            if value <= 0.0 || !value.is_finite() {
                return Err(FitError::NonPositiveValue { name, value });
            }
        }
        Ok(LogRatioPoint {
            x: libm::log(mass / mass0),
            y: libm::log(temp.value() / temp0.value()),
        })
    }
}

/// Result of a scaling-exponent fit.
///
/// `c` is the fitted exponent (slope in log coordinates). `sxx` is the sum
/// of squares that divides the residual variance in `se_c^2`: centered when
/// the fit had an intercept, `sum(x^2)` for a fit through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub c: f64,
    pub intercept: f64,
    pub se_c: f64,
    pub se_intercept: f64,
    pub n: usize,
    pub residual_variance: f64,
    pub r_squared: f64,
    pub with_intercept: bool,
    pub sxx: f64,
}

/// Outcome of the two-group slope-homogeneity test.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTest {
    pub c_a: f64,
    pub c_b: f64,
    pub se_diff: f64,
    pub t: f64,
    pub dof: u64,
    pub p: f64,
    pub alpha: f64,
    /// True when `p < alpha`: the two systems do not share one exponent.
    pub rejected: bool,
}

/// Converts daily samples to log-ratio points against the given baselines.
/// Every sample must carry a mass; idle-day samples never reach this layer
/// because aggregation drops them.
pub fn build_log_ratios(
    samples: &[DailySample],
    mass0: f64,
    temp0: Kelvin,
) -> Result<Vec<LogRatioPoint>, FitError> {
    samples
        .iter()
        .enumerate()
        .map(|(index, sample)| {
            let mass = sample.mass.ok_or(FitError::MissingMass { index })?;
            LogRatioPoint::new(mass, mass0, sample.temp, temp0)
        })
        .collect()
}

/// Ordinary least squares of `y` on `x` over log-ratio points.
///
/// With `with_intercept` the model is `y = intercept + c*x` and the residual
/// variance uses `n - 2` degrees of freedom; without it the line is forced
/// through the origin and the variance uses `n - 1`. At least three points
/// are required either way, and the x values must vary.
pub fn fit_scaling_exponent(
    points: &[LogRatioPoint],
    with_intercept: bool,
) -> Result<ScalingFit, FitError> {
    let n = points.len();
    if n < 3 {
        return Err(FitError::InsufficientData { n, required: 3 });
    }
    let nf = n as f64;

    if with_intercept {
        let mean_x = points.iter().map(|p| p.x).sum::<f64>() / nf;
        let mean_y = points.iter().map(|p| p.y).sum::<f64>() / nf;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut syy = 0.0;
        for p in points {
            let dx = p.x - mean_x;
            let dy = p.y - mean_y;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if sxx <= 0.0 {
            return Err(FitError::DegenerateDesign);
        }
        let c = sxy / sxx;
        let intercept = mean_y - c * mean_x;
        let sse: f64 = points
            .iter()
            .map(|p| {
                let e = p.y - (intercept + c * p.x);
                e * e
            })
            .sum();
        let residual_variance = sse / (nf - 2.0);
        let se_c = libm::sqrt(residual_variance / sxx);
        let se_intercept = libm::sqrt(residual_variance * (1.0 / nf + mean_x * mean_x / sxx));
        let r_squared = if syy > 0.0 {
            (1.0 - sse / syy).clamp(0.0, 1.0)
        } else {
            // Constant y is reproduced exactly by the zero slope.
            1.0
        };
        Ok(ScalingFit {
            c,
            intercept,
            se_c,
            se_intercept,
            n,
            residual_variance,
            r_squared,
            with_intercept,
            sxx,
        })
    } else {
        let sxx: f64 = points.iter().map(|p| p.x * p.x).sum();
        let sxy: f64 = points.iter().map(|p| p.x * p.y).sum();
        if sxx <= 0.0 {
            return Err(FitError::DegenerateDesign);
        }
        let c = sxy / sxx;
        let sse: f64 = points
            .iter()
            .map(|p| {
                let e = p.y - c * p.x;
                e * e
            })
            .sum();
        let residual_variance = sse / (nf - 1.0);
        let se_c = libm::sqrt(residual_variance / sxx);
        let syy: f64 = points.iter().map(|p| p.y * p.y).sum();
        let r_squared = if syy > 0.0 {
            (1.0 - sse / syy).clamp(0.0, 1.0)
        } else {
            1.0
        };
        Ok(ScalingFit {
            c,
            intercept: 0.0,
            se_c,
            se_intercept: 0.0,
            n,
            residual_variance,
            r_squared,
            with_intercept,
            sxx,
        })
    }
}

/// Tests whether two intercept fits share one slope.
///
/// Classical pooled-variance comparison: the group residual sums of squares
/// pool into `s2` on `n_a + n_b - 4` degrees of freedom, the slope-difference
/// standard error is `sqrt(s2 * (1/sxx_a + 1/sxx_b))`, and the two-sided
/// p-value comes from the Student-t distribution. `rejected` is `p < alpha`.
pub fn test_slope_homogeneity(
    fit_a: &ScalingFit,
    fit_b: &ScalingFit,
    alpha: f64,
) -> Result<SlopeTest, FitError> {
    if !fit_a.with_intercept || !fit_b.with_intercept {
        return Err(FitError::InterceptRequired);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FitError::InvalidAlpha { alpha });
    }
    let dof_total = fit_a.n + fit_b.n;
    if dof_total < 5 {
        return Err(FitError::InsufficientData {
            n: dof_total,
            required: 5,
        });
    }
    let dof = (dof_total - 4) as u64;

    let sse_a = fit_a.residual_variance * (fit_a.n as f64 - 2.0);
    let sse_b = fit_b.residual_variance * (fit_b.n as f64 - 2.0);
    let pooled_variance = (sse_a + sse_b) / dof as f64;
    let se_diff = libm::sqrt(pooled_variance * (1.0 / fit_a.sxx + 1.0 / fit_b.sxx));

    let diff = fit_a.c - fit_b.c;
    // Equal slopes give t = 0 even on noise-free data where se_diff is 0;
    // unequal slopes with zero residual noise are infinitely significant.
    let t = if diff == 0.0 {
        0.0
    } else if se_diff == 0.0 {
        if diff > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        diff / se_diff
    };
    let p = student_t_two_sided_p(t, dof)?;

    Ok(SlopeTest {
        c_a: fit_a.c,
        c_b: fit_b.c,
        se_diff,
        t,
        dof,
        p,
        alpha,
        rejected: p < alpha,
    })
}
