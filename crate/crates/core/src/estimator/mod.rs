//! Windowed estimators over bounded-height samples: fraction limits,
//! numerical-equivalence and boundedness probes, and height expansion
//! coefficients.

mod equiv;
mod flim;
mod mu;
mod probe;
mod restriction;
mod sampling;

use serde::{Deserialize, Serialize};

pub use equiv::{numeric_equiv_empirical, EquivalenceEstimate};
pub use flim::{classify_empirical, exact_label, flim, Classification, EmpiricalLabel, FlimEstimate};
pub use mu::{mu_estimate, mu_samples, HeightMap, MapFactory, MapRegistry, MuEstimate};
pub use probe::{boundedness_probe, BandStats, Boundedness, ProbeOptions, ProbeResult, ProbeWitness};
pub use restriction::{restriction_trace, RestrictionEstimate};
pub use sampling::{height_samples, ratio_windows, resolve_thresholds, shell_horizon, SampleRow, WindowStats};

use crate::error::{Error, Result};
use crate::geometry::{check_exclusions, Model, ModelPoint};

/// A model minus finitely many named curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    model: String,
    excluded: Vec<String>,
}

impl Region {
    pub fn new(model: &dyn Model, excluded: &[String]) -> Result<Self> {
        check_exclusions(model, excluded)?;
        let mut excluded = excluded.to_vec();
        excluded.sort();
        excluded.dedup();
        Ok(Region {
            model: model.name().to_string(),
            excluded,
        })
    }

    pub fn whole(model: &dyn Model) -> Self {
        Region {
            model: model.name().to_string(),
            excluded: Vec::new(),
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn excluded(&self) -> &[String] {
        &self.excluded
    }

    /// True when the sampled set misses some curve of the model, either by
    /// explicit exclusion or because the curve's points are never sampled.
    pub fn is_punctured(&self, model: &dyn Model) -> bool {
        !self.excluded.is_empty()
            || model.curves().iter().any(|c| c.excludable && !c.parametrized)
    }

    pub(crate) fn check_model(&self, model: &dyn Model) -> Result<()> {
        if model.name() != self.model {
            return Err(Error::ModelMismatch {
                left: self.model.clone(),
                right: model.name().to_string(),
            });
        }
        Ok(())
    }
}

/// `K` evenly spaced thresholds from `T_1 = min_threshold` to `T_K`.
/// Without a height bound, `T_K` is the smallest reference height among
/// points on the coordinate-bound shell: below it the sample is complete.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSchedule {
    pub height_bound: Option<f64>,
    pub window_count: usize,
    pub min_threshold: f64,
}

impl Default for SampleSchedule {
    fn default() -> Self {
        SampleSchedule {
            height_bound: None,
            window_count: 8,
            min_threshold: 1.0,
        }
    }
}

impl SampleSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.window_count < 2 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 2 windows, got {}",
                self.window_count
            )));
        }
        if !(self.min_threshold > 0.0) || !self.min_threshold.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "minimum threshold must be positive, got {}",
                self.min_threshold
            )));
        }
        if let Some(b) = self.height_bound {
            if !(b > self.min_threshold) || !b.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "height bound {b} must exceed the minimum threshold {}",
                    self.min_threshold
                )));
            }
        }
        Ok(())
    }

    pub fn thresholds(&self, height_bound: f64) -> Result<Vec<f64>> {
        self.validate()?;
        let t1 = self.min_threshold;
        if !(height_bound > t1) {
            return Err(Error::InvalidSchedule(format!(
                "height bound {height_bound} does not exceed the minimum threshold {t1}; raise the coordinate bound"
            )));
        }
        let k = self.window_count;
        let step = (height_bound - t1) / (k - 1) as f64;
        let mut t: Vec<f64> = (0..k).map(|i| t1 + step * i as f64).collect();
        t[k - 1] = height_bound;
        Ok(t)
    }
}

/// Every point of the region with coordinate data bounded by
/// `coordinate_bound`, in the model's fixed order.
pub fn enumerate_points<'a>(
    model: &'a dyn Model,
    region: &Region,
    coordinate_bound: u64,
) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
    region.check_model(model)?;
    if coordinate_bound < 1 {
        return Err(Error::InvalidRegion("coordinate bound must be at least 1".into()));
    }
    model.enumerate(region.excluded(), coordinate_bound)
}

/// Number of region points, from the profile rather than by enumeration.
pub fn count_points(model: &dyn Model, region: &Region, coordinate_bound: u64) -> Result<u64> {
    region.check_model(model)?;
    if coordinate_bound < 1 {
        return Err(Error::InvalidRegion("coordinate bound must be at least 1".into()));
    }
    Ok(model.profile(region.excluded(), coordinate_bound)?.point_count())
}
