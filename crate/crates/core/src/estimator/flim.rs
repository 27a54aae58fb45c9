use serde::Serialize;

use super::sampling::{height_samples, ratio_windows, resolve_thresholds};
use super::{Region, SampleSchedule};
use crate::error::{Error, Result};
use crate::geometry::{is_ample, is_nef, DivisorClass, Model, ModelPoint};

/// Windowed estimate of `liminf h_E / h_D` over a region.
#[derive(Debug, Clone, PartialEq)]
pub struct FlimEstimate {
    pub region: Region,
    pub thresholds: Vec<f64>,
    /// Nondecreasing: each window is a subset of the previous one.
    pub per_window_min: Vec<f64>,
    pub per_window_max: Vec<f64>,
    pub per_window_samples: Vec<u64>,
    /// The last window's minimum.
    pub estimate: f64,
    /// Points with `h_D ≥ T_1`.
    pub sample_count: u64,
    pub min_witness: ModelPoint,
}

/// `Flim_D(E, U)` by windows: window `k` holds the sampled points with
/// `h_D ≥ T_k`, and its minimum of `h_E/h_D` is reported.
pub fn flim(
    model: &dyn Model,
    e: &DivisorClass,
    d: &DivisorClass,
    region: &Region,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
) -> Result<FlimEstimate> {
    model.check_class(e)?;
    if !is_ample(model, d)? {
        return Err(Error::RequiresAmple(d.to_string()));
    }
    schedule.validate()?;
    let rows = height_samples(model, region, coordinate_bound, &[d, e])?;
    let thresholds = resolve_thresholds(schedule, &rows, 0)?;
    let windows = ratio_windows(&rows, &thresholds, 1, 0, false)?;
    let last = windows.last().expect("at least two windows");
    Ok(FlimEstimate {
        region: region.clone(),
        thresholds,
        per_window_min: windows.iter().map(|w| w.min_ratio).collect(),
        per_window_max: windows.iter().map(|w| w.max_ratio).collect(),
        per_window_samples: windows.iter().map(|w| w.samples).collect(),
        estimate: last.min_ratio,
        sample_count: windows[0].samples,
        min_witness: last.min_witness.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalLabel {
    Ample,
    NefNotAmple,
    Indeterminate,
    NotNef,
}

impl EmpiricalLabel {
    pub fn from_estimate(estimate: f64, tol: f64) -> Self {
        if estimate > tol {
            EmpiricalLabel::Ample
        } else if estimate >= -tol {
            EmpiricalLabel::NefNotAmple
        } else {
            EmpiricalLabel::NotNef
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EmpiricalLabel::Ample => "ample",
            EmpiricalLabel::NefNotAmple => "nef_not_ample",
            EmpiricalLabel::Indeterminate => "indeterminate",
            EmpiricalLabel::NotNef => "not_nef",
        }
    }
}

/// Exact label from the cone tests, on the same scale as the empirical one.
pub fn exact_label(model: &dyn Model, e: &DivisorClass) -> Result<EmpiricalLabel> {
    Ok(if is_ample(model, e)? {
        EmpiricalLabel::Ample
    } else if is_nef(model, e)? {
        EmpiricalLabel::NefNotAmple
    } else {
        EmpiricalLabel::NotNef
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: EmpiricalLabel,
    pub estimate: FlimEstimate,
    pub tol: f64,
}

/// Sign classification of the fraction limit. When the last two windows
/// fall on different sides of a cutoff the trace has not settled, and the
/// label is `indeterminate`.
pub fn classify_empirical(
    model: &dyn Model,
    e: &DivisorClass,
    d: &DivisorClass,
    region: &Region,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
    tol: f64,
) -> Result<Classification> {
    let estimate = flim(model, e, d, region, schedule, coordinate_bound)?;
    let k = estimate.per_window_min.len();
    let last = EmpiricalLabel::from_estimate(estimate.per_window_min[k - 1], tol);
    let previous = EmpiricalLabel::from_estimate(estimate.per_window_min[k - 2], tol);
    let label = if last == previous {
        last
    } else {
        EmpiricalLabel::Indeterminate
    };
    Ok(Classification {
        label,
        estimate,
        tol,
    })
}
