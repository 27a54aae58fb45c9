use rayon::prelude::*;

use super::{Region, SampleSchedule};
use crate::error::{Error, Result};
use crate::geometry::{DivisorClass, Model, ModelPoint};

/// Heights of several classes on one profile entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub witness: ModelPoint,
    pub count: u64,
    pub shell: bool,
    pub heights: Vec<f64>,
}

/// Evaluates every class on every profile entry of the region. Evaluation
/// runs in parallel; the rows come back in profile order.
pub fn height_samples(
    model: &dyn Model,
    region: &Region,
    coordinate_bound: u64,
    classes: &[&DivisorClass],
) -> Result<Vec<SampleRow>> {
    region.check_model(model)?;
    if coordinate_bound < 1 {
        return Err(Error::InvalidRegion("coordinate bound must be at least 1".into()));
    }
    let profile = model.profile(region.excluded(), coordinate_bound)?;
    profile
        .entries
        .into_par_iter()
        .map(|e| {
            let heights = classes
                .iter()
                .map(|d| model.height(d, &e.witness).map(|h| h.value()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(SampleRow {
                witness: e.witness,
                count: e.count,
                shell: e.shell,
                heights,
            })
        })
        .collect()
}

/// Smallest value of column `col` among rows attaining the coordinate bound.
pub fn shell_horizon(rows: &[SampleRow], col: usize) -> Option<f64> {
    rows.iter()
        .filter(|r| r.shell)
        .map(|r| r.heights[col])
        .reduce(f64::min)
}

/// Thresholds for the schedule, taking the horizon of the reference class
/// when no height bound is set.
pub fn resolve_thresholds(
    schedule: &SampleSchedule,
    rows: &[SampleRow],
    reference_col: usize,
) -> Result<Vec<f64>> {
    let bound = match schedule.height_bound {
        Some(b) => b,
        None => shell_horizon(rows, reference_col).ok_or_else(|| {
            Error::InvalidSchedule(
                "no sampled point reaches the coordinate bound; set a height bound".into(),
            )
        })?,
    };
    schedule.thresholds(bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats {
    pub threshold: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: u64,
    pub min_witness: ModelPoint,
    pub max_witness: ModelPoint,
}

/// For each threshold `T_k`, the extreme values of `num/den` over rows with
/// `den ≥ T_k`. Ties keep the earliest row, so the result does not depend on
/// how evaluation was scheduled.
pub fn ratio_windows(
    rows: &[SampleRow],
    thresholds: &[f64],
    num: usize,
    den: usize,
    abs: bool,
) -> Result<Vec<WindowStats>> {
    thresholds
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut stats: Option<WindowStats> = None;
            for r in rows.iter().filter(|r| r.heights[den] >= t) {
                let mut ratio = r.heights[num] / r.heights[den];
                if abs {
                    ratio = ratio.abs();
                }
                match stats.as_mut() {
                    None => {
                        stats = Some(WindowStats {
                            threshold: t,
                            min_ratio: ratio,
                            max_ratio: ratio,
                            samples: r.count,
                            min_witness: r.witness.clone(),
                            max_witness: r.witness.clone(),
                        })
                    }
                    Some(s) => {
                        s.samples += r.count;
                        if ratio < s.min_ratio {
                            s.min_ratio = ratio;
                            s.min_witness = r.witness.clone();
                        }
                        if ratio > s.max_ratio {
                            s.max_ratio = ratio;
                            s.max_witness = r.witness.clone();
                        }
                    }
                }
            }
            stats.ok_or_else(|| {
                Error::Unsupported(format!(
                    "window {} (threshold {t:.6}) contains no sampled point",
                    k + 1
                ))
            })
        })
        .collect()
}
