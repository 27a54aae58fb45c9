use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::sampling::{ratio_windows, resolve_thresholds, SampleRow};
use super::SampleSchedule;
use crate::error::{Error, Result};
use crate::geometry::points::CoprimeTuples;
use crate::geometry::{restriction_degree, DivisorClass, Model};
use crate::heights::ProjPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionEstimate {
    pub curve: String,
    /// `(E·C) / (D·C)`.
    pub exact_ratio: BigRational,
    pub thresholds: Vec<f64>,
    pub per_window_mean: Vec<f64>,
    pub per_window_min: Vec<f64>,
    pub per_window_max: Vec<f64>,
    pub per_window_samples: Vec<u64>,
    pub final_mean: f64,
}

impl RestrictionEstimate {
    pub fn final_error(&self) -> f64 {
        (self.final_mean - self.exact_ratio.to_f64().unwrap_or(f64::NAN)).abs()
    }
}

/// `h_E / h_D` along the points of a parametrized curve, windowed by `h_D`.
/// On the curve both heights are heights of `P^1` up to bounded error, so the
/// ratio tends to the ratio of restriction degrees.
pub fn restriction_trace(
    model: &dyn Model,
    e: &DivisorClass,
    d: &DivisorClass,
    curve: &str,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
) -> Result<RestrictionEstimate> {
    schedule.validate()?;
    let de = restriction_degree(model, e, curve)?;
    let dd = restriction_degree(model, d, curve)?;
    if dd <= BigRational::zero() {
        return Err(Error::Unsupported(format!(
            "{d} has degree {dd} on {curve}; the reference needs positive degree"
        )));
    }
    if !model.curve(curve)?.parametrized {
        return Err(Error::Unsupported(format!(
            "curve {curve} of {} is not parametrized",
            model.name()
        )));
    }
    let params: Vec<Vec<i64>> = CoprimeTuples::new(1, coordinate_bound).collect();
    let rows: Vec<Option<SampleRow>> = params
        .into_par_iter()
        .map(|c| {
            let t = ProjPoint::from_i64(&c)?;
            let Some(p) = model.parametrize(curve, &t)? else {
                return Ok(None);
            };
            let hd = model.height(d, &p)?.value();
            let he = model.height(e, &p)?.value();
            Ok(Some(SampleRow {
                witness: p,
                count: 1,
                shell: c.iter().any(|x| x.unsigned_abs() == coordinate_bound),
                heights: vec![hd, he],
            }))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SampleRow> = rows.into_iter().flatten().collect();
    let thresholds = resolve_thresholds(schedule, &rows, 0)?;
    let windows = ratio_windows(&rows, &thresholds, 1, 0, false)?;
    let per_window_mean: Vec<f64> = thresholds
        .iter()
        .map(|&t| {
            let (sum, n) = rows
                .iter()
                .filter(|r| r.heights[0] >= t)
                .fold((0.0, 0u64), |(s, n), r| (s + r.heights[1] / r.heights[0], n + 1));
            sum / n as f64
        })
        .collect();
    Ok(RestrictionEstimate {
        curve: curve.to_string(),
        exact_ratio: de / dd,
        final_mean: *per_window_mean.last().expect("windows"),
        per_window_mean,
        per_window_min: windows.iter().map(|w| w.min_ratio).collect(),
        per_window_max: windows.iter().map(|w| w.max_ratio).collect(),
        per_window_samples: windows.iter().map(|w| w.samples).collect(),
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BlowupP2, P1xP1, ProjectiveSpace};

    #[test]
    fn line_in_projective_space_is_exact() {
        let m = ProjectiveSpace::new(2).unwrap();
        let r = restriction_trace(
            &m,
            &DivisorClass::new("p2", vec![3]),
            &DivisorClass::new("p2", vec![1]),
            "line",
            &SampleSchedule::default(),
            30,
        )
        .unwrap();
        assert_eq!(r.exact_ratio, BigRational::from_integer(3.into()));
        assert!(r.per_window_mean.iter().all(|&v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn diagonal_of_product() {
        let m = P1xP1::new();
        let r = restriction_trace(
            &m,
            &DivisorClass::new("p1xp1", vec![2, -1]),
            &DivisorClass::new("p1xp1", vec![1, 1]),
            "diag",
            &SampleSchedule::default(),
            30,
        )
        .unwrap();
        assert_eq!(r.exact_ratio, BigRational::new(1.into(), 2.into()));
        assert!(r.final_error() < 1e-12);
    }

    #[test]
    fn strict_transform_of_line_through_center() {
        let m = BlowupP2::new();
        let r = restriction_trace(
            &m,
            &DivisorClass::new("blowup_p2", vec![1, -1]),
            &DivisorClass::new("blowup_p2", vec![3, -1]),
            "L",
            &SampleSchedule::default(),
            200,
        )
        .unwrap();
        assert!(r.final_error() < 0.1, "{r:?}");
    }

    #[test]
    fn exceptional_curve_is_not_sampled() {
        let m = BlowupP2::new();
        let d = DivisorClass::new("blowup_p2", vec![3, -1]);
        assert!(restriction_trace(&m, &d, &d, "E", &SampleSchedule::default(), 10).is_err());
    }
}
