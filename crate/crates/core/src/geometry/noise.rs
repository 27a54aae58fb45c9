use std::sync::Arc;

use super::lattice::Lattice;
use super::model::{DivisorClass, HeightProfile, Model, ModelPoint, NamedCurve};
use crate::error::{Error, Result};
use crate::heights::{HeightValue, ProjPoint};

pub const MAX_NOISE_AMPLITUDE: f64 = 1.0;

/// Wraps a model and adds a fixed bounded function to every height
/// representative: `h'_D(P) = h_D(P) + A·sin(κ·h_D(P) + φ(D))`.
///
/// The perturbation depends on `P` only through `h_D(P)`, so grouping points
/// by height signature stays valid.
#[derive(Debug)]
pub struct NoisyModel {
    inner: Arc<dyn Model>,
    amplitude: f64,
}

impl NoisyModel {
    pub fn new(inner: Arc<dyn Model>, amplitude: f64) -> Result<Self> {
        if !(0.0..=MAX_NOISE_AMPLITUDE).contains(&amplitude) {
            return Err(Error::InvalidSchedule(format!(
                "noise amplitude must lie in [0, {MAX_NOISE_AMPLITUDE}], got {amplitude}"
            )));
        }
        Ok(NoisyModel { inner, amplitude })
    }

    fn phase(d: &DivisorClass) -> f64 {
        d.vector()
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * (0.618_033_988_75 * (i + 1) as f64))
            .sum()
    }
}

impl Model for NoisyModel {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn lattice(&self) -> &Lattice {
        self.inner.lattice()
    }

    fn curves(&self) -> &[NamedCurve] {
        self.inner.curves()
    }

    fn parse_point(&self, s: &str) -> Result<ModelPoint> {
        self.inner.parse_point(s)
    }

    fn contains(&self, p: &ModelPoint) -> bool {
        self.inner.contains(p)
    }

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool> {
        self.inner.on_curve(curve, p)
    }

    fn parametrize(&self, curve: &str, t: &ProjPoint) -> Result<Option<ModelPoint>> {
        self.inner.parametrize(curve, t)
    }

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue> {
        let h = self.inner.height(d, p)?.value();
        let nu = self.amplitude * (1.7 * h + Self::phase(d)).sin();
        Ok(HeightValue::approximate(h + nu))
    }

    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
        self.inner.enumerate(excluded, bound)
    }

    fn signature(&self, p: &ModelPoint) -> Option<Vec<i64>> {
        self.inner.signature(p)
    }

    fn on_shell(&self, p: &ModelPoint, bound: u64) -> bool {
        self.inner.on_shell(p, bound)
    }

    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        self.inner.profile(excluded, bound)
    }

    /// The representative shifts by at most `A` on each side.
    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)> {
        let (m, c) = self.inner.changelimit_constants(d1, d2)?;
        Ok((m, c + self.amplitude / m + self.amplitude))
    }

    fn parse_divisor(&self, vector: &str, point: Option<&str>) -> Result<DivisorClass> {
        self.inner.parse_divisor(vector, point)
    }

    fn check_class(&self, d: &DivisorClass) -> Result<()> {
        self.inner.check_class(d)
    }

    fn combine(&self, terms: &[(i64, &DivisorClass)]) -> Result<DivisorClass> {
        self.inner.combine(terms)
    }

    fn is_effective(&self, d: &DivisorClass) -> Result<bool> {
        self.inner.is_effective(d)
    }

    fn has_divisor_pairing(&self) -> bool {
        self.inner.has_divisor_pairing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::product::P1xP1;

    #[test]
    fn perturbation_is_bounded() {
        let inner: Arc<dyn Model> = Arc::new(P1xP1::new());
        let noisy = NoisyModel::new(inner.clone(), 0.5).unwrap();
        let d = DivisorClass::new("p1xp1", vec![2, -1]);
        for p in inner.enumerate(&[], 6).unwrap() {
            let a = inner.height(&d, &p).unwrap().value();
            let b = noisy.height(&d, &p).unwrap().value();
            assert!((a - b).abs() <= 0.5);
        }
        assert!(NoisyModel::new(inner, 1.5).is_err());
    }
}
