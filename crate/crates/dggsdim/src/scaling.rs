//! Scaling-range selection and dimension fitting.
//!
//! The covering counts follow `N ~ delta^(-D)` only over a middle band of
//! resolutions: the coarsest cells saturate the bounding box and the finest
//! cells exhaust the detail of the input.  [`select_range`] trims both ends
//! with slope and ratio rules, then [`fit_dimension`] runs ordinary least
//! squares of `ln N` on `ln delta^-1` over the retained rows.
//!
//! Counts at successive resolutions are strongly correlated (each cell's
//! children inherit its intersections), so the naive OLS standard error is
//! not trustworthy.  The reported `se_corrected` comes from the per-step
//! slopes between consecutive retained rows instead: the steps are nearly
//! uncorrelated, so the spread of their slopes measures the real
//! uncertainty of the fitted dimension.  The p-value is a two-sided t-test
//! of slope != 0 with (number of steps - 1) degrees of freedom.
//!
//! Natural logarithms throughout; the slope is base-invariant and delta is
//! taken in radians (any fixed rescaling of delta only shifts the
//! intercept).

use serde::{Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::cover::CoverRecord;
use crate::dggs::GridKind;

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("INSUFFICIENT_RANGE: longest usable run has {retained} rows, need {needed}")]
    InsufficientRange { retained: usize, needed: usize },
    #[error("DEGENERATE_ABSCISSA: cell scales do not vary")]
    DegenerateAbscissa,
    #[error("EMPTY_INPUT: nothing to aggregate")]
    EmptyInput,
}

/// Rules for trimming the resolution range before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangePolicy {
    /// Drop rows where `n_cells / n_bbox_cells` falls below this.
    pub bbox_ratio_min: f64,
    /// Drop the fine row of a step whose slope falls below this.
    pub slope_low: f64,
    /// Drop the coarse row of a step whose slope rises above this
    /// (slopes near 2 mean the covering is filling the surface).
    pub slope_high: f64,
    /// Minimum retained rows for a fit.
    pub min_points: usize,
}

impl Default for RangePolicy {
    fn default() -> Self {
        RangePolicy {
            bbox_ratio_min: 0.1,
            slope_low: 0.10,
            slope_high: 1.95,
            min_points: 4,
        }
    }
}

fn ser_grid<S: Serializer>(g: &GridKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(g.name())
}

/// One grid's fitted dimension.  Field order is the report order.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    #[serde(serialize_with = "ser_grid")]
    pub grid: GridKind,
    /// Fitted box-counting dimension (the OLS slope).
    pub d_b: f64,
    pub intercept: f64,
    /// Naive OLS standard error of the slope.
    pub se_ols: f64,
    /// Successive-difference standard error of the slope.
    pub se_corrected: f64,
    pub p_value: f64,
    pub resolutions_used: Vec<u8>,
    pub n_points: usize,
    pub policy: RangePolicy,
}

/// Arithmetic aggregation across grids.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateFit {
    pub d_b_mean: f64,
    pub se_mean: f64,
    pub per_grid: Vec<ScalingFit>,
}

fn log_inv_delta(r: &CoverRecord) -> f64 {
    -(r.delta_rad.ln())
}

fn step_slope(coarse: &CoverRecord, fine: &CoverRecord) -> Result<f64, ScalingError> {
    let dx = log_inv_delta(fine) - log_inv_delta(coarse);
    if dx.abs() < 1e-14 {
        return Err(ScalingError::DegenerateAbscissa);
    }
    Ok(((fine.n_cells as f64).ln() - (coarse.n_cells as f64).ln()) / dx)
}

/// Indices of the longest contiguous run of rows that survive the policy.
///
/// A row is dropped when it saturates its bounding box, when its count
/// ratio falls below `bbox_ratio_min`, when the step ending at it has
/// slope below `slope_low` (it is the fine row of a flat step), or when
/// the step starting at it has slope above `slope_high` (it is the coarse
/// row of a space-filling step).  Rows inside a surviving run therefore
/// see only in-band steps, which makes the selection idempotent.
pub fn select_range(
    records: &[CoverRecord],
    policy: &RangePolicy,
) -> Result<Vec<usize>, ScalingError> {
    let n = records.len();
    let mut keep = vec![true; n];
    for (i, r) in records.iter().enumerate() {
        if r.n_cells == r.n_bbox_cells {
            keep[i] = false;
        }
        if (r.n_cells as f64) < policy.bbox_ratio_min * r.n_bbox_cells as f64 {
            keep[i] = false;
        }
    }
    for i in 0..n.saturating_sub(1) {
        let s = step_slope(&records[i], &records[i + 1])?;
        if s > policy.slope_high {
            keep[i] = false;
        }
        if s < policy.slope_low {
            keep[i + 1] = false;
        }
    }

    let mut best: (usize, usize) = (0, 0);
    let mut run_start = 0;
    for i in 0..=n {
        if i < n && keep[i] {
            continue;
        }
        if i - run_start > best.1 - best.0 {
            best = (run_start, i);
        }
        run_start = i + 1;
    }
    let retained: Vec<usize> = (best.0..best.1).collect();
    if retained.len() < policy.min_points {
        return Err(ScalingError::InsufficientRange {
            retained: retained.len(),
            needed: policy.min_points,
        });
    }
    Ok(retained)
}

/// Successive-difference standard error: the sample standard deviation of
/// the per-step slopes divided by the square root of the step count.
pub fn corrected_se(log_n: &[f64], log_inv_d: &[f64]) -> Result<f64, ScalingError> {
    assert_eq!(log_n.len(), log_inv_d.len());
    assert!(log_n.len() >= 3, "need at least two steps");
    let mut slopes = Vec::with_capacity(log_n.len() - 1);
    for i in 0..log_n.len() - 1 {
        let dx = log_inv_d[i + 1] - log_inv_d[i];
        if dx.abs() < 1e-14 {
            return Err(ScalingError::DegenerateAbscissa);
        }
        slopes.push((log_n[i + 1] - log_n[i]) / dx);
    }
    let m = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / m;
    let var = slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((var / m).sqrt())
}

/// Ordinary least squares over the retained rows.
pub fn fit_dimension(
    records: &[CoverRecord],
    retained: &[usize],
    policy: &RangePolicy,
) -> Result<ScalingFit, ScalingError> {
    if retained.len() < policy.min_points {
        return Err(ScalingError::InsufficientRange {
            retained: retained.len(),
            needed: policy.min_points,
        });
    }
    let xs: Vec<f64> = retained.iter().map(|&i| log_inv_delta(&records[i])).collect();
    let ys: Vec<f64> = retained
        .iter()
        .map(|&i| (records[i].n_cells as f64).ln())
        .collect();
    let m = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar).powi(2)).sum();
    if sxx < 1e-20 {
        return Err(ScalingError::DegenerateAbscissa);
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_bar) * (y - y_bar))
        .sum();
    let d_b = sxy / sxx;
    let intercept = y_bar - d_b * x_bar;

    let se_ols = if xs.len() > 2 {
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (intercept + d_b * x)).powi(2))
            .sum();
        (ss_res / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };

    let se_corr = corrected_se(&ys, &xs)?;
    let steps = xs.len() - 1;
    let p_value = if se_corr > 0.0 && steps >= 2 {
        let t = (d_b / se_corr).abs();
        let dist = StudentsT::new(0.0, 1.0, (steps - 1) as f64)
            .expect("valid t distribution for >= 1 dof");
        2.0 * (1.0 - dist.cdf(t))
    } else {
        0.0
    };
    let p_value = p_value.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);

    Ok(ScalingFit {
        grid: records[retained[0]].grid,
        d_b,
        intercept,
        se_ols,
        se_corrected: se_corr,
        p_value,
        resolutions_used: retained.iter().map(|&i| records[i].resolution).collect(),
        n_points: retained.len(),
        policy: *policy,
    })
}

/// Range selection followed by the fit.
pub fn fit_table(records: &[CoverRecord], policy: &RangePolicy) -> Result<ScalingFit, ScalingError> {
    let retained = select_range(records, policy)?;
    fit_dimension(records, &retained, policy)
}

/// Arithmetic means of the fitted dimensions and their corrected errors.
pub fn aggregate(fits: Vec<ScalingFit>) -> Result<AggregateFit, ScalingError> {
    if fits.is_empty() {
        return Err(ScalingError::EmptyInput);
    }
    let m = fits.len() as f64;
    let d_b_mean = fits.iter().map(|f| f.d_b).sum::<f64>() / m;
    let se_mean = fits.iter().map(|f| f.se_corrected).sum::<f64>() / m;
    Ok(AggregateFit {
        d_b_mean,
        se_mean,
        per_grid: fits,
    })
}
