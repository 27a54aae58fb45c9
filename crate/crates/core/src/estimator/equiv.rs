use super::sampling::{height_samples, ratio_windows, resolve_thresholds};
use super::{Region, SampleSchedule};
use crate::error::{Error, Result};
use crate::geometry::{is_ample, numerically_equivalent, DivisorClass, Model};

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceEstimate {
    pub difference: DivisorClass,
    pub thresholds: Vec<f64>,
    /// Per-window maximum of `|h_{D1−D2} / h_D|`.
    pub ratio_trace: Vec<f64>,
    /// Per-window minimum of `|h_{D1−D2} / h_D|`.
    pub min_trace: Vec<f64>,
    pub per_window_samples: Vec<u64>,
    pub final_value: f64,
    pub nonincreasing: bool,
    pub equivalent: bool,
    pub exact_equivalent: bool,
    pub tol: f64,
}

impl EquivalenceEstimate {
    pub fn agrees(&self) -> bool {
        self.equivalent == self.exact_equivalent
    }
}

/// `D1 ≡ D2` exactly when `h_{D1−D2} / h_D → 0`; the verdict asks for a
/// nonincreasing trace whose last value is at most `tol`.
#[allow(clippy::too_many_arguments)]
pub fn numeric_equiv_empirical(
    model: &dyn Model,
    d1: &DivisorClass,
    d2: &DivisorClass,
    d_ample: &DivisorClass,
    region: &Region,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
    tol: f64,
) -> Result<EquivalenceEstimate> {
    if !is_ample(model, d_ample)? {
        return Err(Error::RequiresAmple(d_ample.to_string()));
    }
    schedule.validate()?;
    let exact_equivalent = numerically_equivalent(model, d1, d2)?;
    let difference = model.combine(&[(1, d1), (-1, d2)])?;
    let rows = height_samples(model, region, coordinate_bound, &[d_ample, &difference])?;
    let thresholds = resolve_thresholds(schedule, &rows, 0)?;
    let windows = ratio_windows(&rows, &thresholds, 1, 0, true)?;
    let ratio_trace: Vec<f64> = windows.iter().map(|w| w.max_ratio).collect();
    let final_value = *ratio_trace.last().expect("at least two windows");
    let nonincreasing = ratio_trace.windows(2).all(|w| w[1] <= w[0]);
    Ok(EquivalenceEstimate {
        difference,
        per_window_samples: windows.iter().map(|w| w.samples).collect(),
        min_trace: windows.iter().map(|w| w.min_ratio).collect(),
        thresholds,
        final_value,
        nonincreasing,
        equivalent: nonincreasing && final_value <= tol,
        exact_equivalent,
        ratio_trace,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{CurvePoint, EllipticCurve};
    use crate::geometry::{EllipticModel, P1xP1};

    #[test]
    fn identical_classes() {
        let m = P1xP1::new();
        let d = DivisorClass::new("p1xp1", vec![1, 2]);
        let a = DivisorClass::new("p1xp1", vec![1, 1]);
        let r = numeric_equiv_empirical(&m, &d, &d, &a, &Region::whole(&m), &SampleSchedule::default(), 30, 0.1)
            .unwrap();
        assert!(r.ratio_trace.iter().all(|&v| v == 0.0));
        assert!(r.equivalent && r.exact_equivalent && r.agrees());
    }

    #[test]
    fn fibers_are_not_equivalent() {
        let m = P1xP1::new();
        let f1 = DivisorClass::new("p1xp1", vec![1, 0]);
        let f2 = DivisorClass::new("p1xp1", vec![0, 1]);
        let a = DivisorClass::new("p1xp1", vec![1, 1]);
        let r = numeric_equiv_empirical(&m, &f1, &f2, &a, &Region::whole(&m), &SampleSchedule::default(), 60, 0.1)
            .unwrap();
        assert_eq!(r.final_value, 1.0);
        assert!(!r.equivalent && !r.exact_equivalent);
    }

    #[test]
    fn degree_zero_class_ratio_decays_along_multiples() {
        let g = CurvePoint::from_i64(3, 5);
        let c = EllipticCurve::from_i64(0, -2).unwrap().with_generators(vec![g]).unwrap();
        let m = EllipticModel::new(c, 1e-10);
        let d1 = m.parse_divisor("0,3,5", None).unwrap();
        let d2 = m.parse_divisor("0", Some("O")).unwrap();
        let a = m.parse_divisor("1", Some("O")).unwrap();
        let r = numeric_equiv_empirical(&m, &d1, &d2, &a, &Region::whole(&m), &SampleSchedule::default(), 48, 0.05)
            .unwrap();
        assert!(r.nonincreasing);
        // Along nG the ratio is exactly 2/|n|.
        assert!((r.final_value - 2.0 / 48.0).abs() < 1e-6, "{}", r.final_value);
        assert!(r.equivalent && r.exact_equivalent);
    }
}
