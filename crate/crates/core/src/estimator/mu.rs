use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::sampling::{ratio_windows, resolve_thresholds, SampleRow};
use super::{Region, SampleSchedule};
use crate::error::{Error, Result};
use crate::geometry::{is_ample, BlowupP2, DivisorClass, Model, ModelPoint, P1xP1};
use crate::heights::ProjPoint;

/// A morphism between models, with its pullback on Picard classes.
///
/// The target height of `φ(P)` must depend only on the source point's
/// height signature, so that the source profile can stand in for all points.
pub trait HeightMap: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn source(&self) -> &str;
    fn target(&self) -> &str;
    fn apply(&self, p: &ModelPoint) -> Result<ModelPoint>;
    /// `φ*D` in the source basis.
    fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass>;
}

fn check_target(map: &dyn HeightMap, d: &DivisorClass) -> Result<i64> {
    if d.model() != map.target() {
        return Err(Error::ModelMismatch {
            left: d.model().to_string(),
            right: map.target().to_string(),
        });
    }
    Ok(d.vector()[0])
}

fn pair_of(p: &ModelPoint) -> Result<(&ProjPoint, &ProjPoint)> {
    match p {
        ModelPoint::Pair(x, y) => Ok((x, y)),
        other => Err(Error::InvalidPoint(format!("{other} is not a point of p1xp1"))),
    }
}

/// `((x0:x1),(y0:y1)) ↦ (x0y0 : x0y1 : x1y0 : x1y1)`.
#[derive(Debug)]
struct Segre;

impl HeightMap for Segre {
    fn name(&self) -> &str {
        "segre"
    }
    fn source(&self) -> &str {
        P1xP1::NAME
    }
    fn target(&self) -> &str {
        "p3"
    }
    fn apply(&self, p: &ModelPoint) -> Result<ModelPoint> {
        let (x, y) = pair_of(p)?;
        let (x, y) = (x.coords(), y.coords());
        let c: Vec<BigInt> = vec![&x[0] * &y[0], &x[0] * &y[1], &x[1] * &y[0], &x[1] * &y[1]];
        Ok(ModelPoint::Projective(ProjPoint::new(&c)?))
    }
    fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        let k = check_target(self, d)?;
        Ok(DivisorClass::new(P1xP1::NAME, vec![k, k]))
    }
}

/// First-factor projection `p1xp1 → P^1`.
#[derive(Debug)]
struct FirstProjection;

impl HeightMap for FirstProjection {
    fn name(&self) -> &str {
        "proj1"
    }
    fn source(&self) -> &str {
        P1xP1::NAME
    }
    fn target(&self) -> &str {
        "p1"
    }
    fn apply(&self, p: &ModelPoint) -> Result<ModelPoint> {
        Ok(ModelPoint::Projective(pair_of(p)?.0.clone()))
    }
    fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        let k = check_target(self, d)?;
        Ok(DivisorClass::new(P1xP1::NAME, vec![k, 0]))
    }
}

/// The blow-down `blowup_p2 → P^2`; points are already stored by image.
#[derive(Debug)]
struct BlowDown;

impl HeightMap for BlowDown {
    fn name(&self) -> &str {
        "blowdown"
    }
    fn source(&self) -> &str {
        BlowupP2::NAME
    }
    fn target(&self) -> &str {
        "p2"
    }
    fn apply(&self, p: &ModelPoint) -> Result<ModelPoint> {
        match p {
            ModelPoint::Projective(q) if q.ambient_dim() == 2 => Ok(p.clone()),
            other => Err(Error::InvalidPoint(format!("{other} is not a point of blowup_p2"))),
        }
    }
    fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        let k = check_target(self, d)?;
        Ok(DivisorClass::new(BlowupP2::NAME, vec![k, 0]))
    }
}

#[derive(Debug)]
struct Identity {
    model: String,
}

impl HeightMap for Identity {
    fn name(&self) -> &str {
        "identity"
    }
    fn source(&self) -> &str {
        &self.model
    }
    fn target(&self) -> &str {
        &self.model
    }
    fn apply(&self, p: &ModelPoint) -> Result<ModelPoint> {
        Ok(p.clone())
    }
    fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        check_target(self, d)?;
        Ok(d.clone())
    }
}

pub type MapFactory = Box<dyn Fn(&str) -> Result<Arc<dyn HeightMap>> + Send + Sync>;

/// Maps registered by name; a factory receives the source model name.
pub struct MapRegistry {
    factories: BTreeMap<String, MapFactory>,
}

impl Default for MapRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl MapRegistry {
    pub fn empty() -> Self {
        MapRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register("segre", |_| Ok(Arc::new(Segre) as Arc<dyn HeightMap>));
        r.register("proj1", |_| Ok(Arc::new(FirstProjection) as Arc<dyn HeightMap>));
        r.register("blowdown", |_| Ok(Arc::new(BlowDown) as Arc<dyn HeightMap>));
        r.register("identity", |source| {
            Ok(Arc::new(Identity {
                model: source.to_string(),
            }) as Arc<dyn HeightMap>)
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&str) -> Result<Arc<dyn HeightMap>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, source: &str) -> Result<Arc<dyn HeightMap>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownMap(name.to_string()))?;
        let map = factory(source)?;
        if map.source() != source {
            return Err(Error::ModelMismatch {
                left: format!("{name} (from {})", map.source()),
                right: source.to_string(),
            });
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuEstimate {
    pub map: String,
    pub value: f64,
    /// `sup{α : φ*D_V − α·D_W pseudo-effective}`.
    pub exact_upper_bound: BigRational,
    pub region: Region,
    pub thresholds: Vec<f64>,
    pub per_window_min: Vec<f64>,
    pub per_window_max: Vec<f64>,
    pub per_window_samples: Vec<u64>,
    pub sample_count: u64,
    pub tol: f64,
}

impl MuEstimate {
    pub fn within_bound(&self) -> bool {
        let bound = self.exact_upper_bound.to_f64().unwrap_or(f64::INFINITY);
        self.value <= bound + self.tol
    }
}

/// Rows of `[h_{D_W}(P), h_{D_V}(φ(P))]` over the source profile.
pub fn mu_samples(
    map: &dyn HeightMap,
    source: &dyn Model,
    target: &dyn Model,
    d_w: &DivisorClass,
    d_v: &DivisorClass,
    region: &Region,
    coordinate_bound: u64,
) -> Result<Vec<SampleRow>> {
    region.check_model(source)?;
    let profile = source.profile(region.excluded(), coordinate_bound)?;
    profile
        .entries
        .into_par_iter()
        .map(|e| {
            let hw = source.height(d_w, &e.witness)?.value();
            let hv = target.height(d_v, &map.apply(&e.witness)?)?.value();
            Ok(SampleRow {
                witness: e.witness,
                count: e.count,
                shell: e.shell,
                heights: vec![hw, hv],
            })
        })
        .collect()
}

/// Windowed `liminf h_{D_V}(φ(P)) / h_{D_W}(P)` over the source region, next
/// to the exact bound from the source's effective cone.
#[allow(clippy::too_many_arguments)]
pub fn mu_estimate(
    map: &dyn HeightMap,
    source: &dyn Model,
    target: &dyn Model,
    d_w: &DivisorClass,
    d_v: &DivisorClass,
    region: &Region,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
    tol: f64,
) -> Result<MuEstimate> {
    for (m, expected) in [(source.name(), map.source()), (target.name(), map.target())] {
        if m != expected {
            return Err(Error::ModelMismatch {
                left: m.to_string(),
                right: expected.to_string(),
            });
        }
    }
    if !is_ample(source, d_w)? {
        return Err(Error::RequiresAmple(d_w.to_string()));
    }
    if !is_ample(target, d_v)? {
        return Err(Error::RequiresAmple(d_v.to_string()));
    }
    schedule.validate()?;
    let pulled = map.pullback(d_v)?;
    let exact_upper_bound = source
        .lattice()
        .sup_alpha(&pulled.q_vector(), &d_w.q_vector())
        .ok_or_else(|| Error::RequiresAmple(d_w.to_string()))?;

    let rows = mu_samples(map, source, target, d_w, d_v, region, coordinate_bound)?;
    let thresholds = resolve_thresholds(schedule, &rows, 0)?;
    let windows = ratio_windows(&rows, &thresholds, 1, 0, false)?;
    Ok(MuEstimate {
        map: map.name().to_string(),
        value: windows.last().expect("windows").min_ratio,
        exact_upper_bound,
        region: region.clone(),
        per_window_min: windows.iter().map(|w| w.min_ratio).collect(),
        per_window_max: windows.iter().map(|w| w.max_ratio).collect(),
        per_window_samples: windows.iter().map(|w| w.samples).collect(),
        sample_count: windows[0].samples,
        thresholds,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ModelParams, ModelRegistry};
    use crate::heights::height_pn;

    fn run(map: &str, source: &str, target: &str, dw: Vec<i64>, bound: u64) -> MuEstimate {
        let models = ModelRegistry::with_defaults();
        let s = models.build(source, &ModelParams::default()).unwrap();
        let t = models.build(target, &ModelParams::default()).unwrap();
        let m = MapRegistry::with_defaults().build(map, source).unwrap();
        mu_estimate(
            m.as_ref(),
            s.as_ref(),
            t.as_ref(),
            &DivisorClass::new(source, dw),
            &DivisorClass::new(target, vec![1]),
            &Region::whole(s.as_ref()),
            &SampleSchedule::default(),
            bound,
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn segre_is_height_preserving() {
        let r = run("segre", "p1xp1", "p3", vec![1, 1], 40);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.exact_upper_bound, BigRational::from_integer(1.into()));
        assert!(r.within_bound());
    }

    #[test]
    fn projection_and_blowdown() {
        let r = run("proj1", "p1xp1", "p1", vec![1, 1], 40);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.exact_upper_bound, BigRational::from_integer(0.into()));
        let r = run("blowdown", "blowup_p2", "p2", vec![3, -1], 30);
        assert_eq!(r.exact_upper_bound, BigRational::new(1.into(), 3.into()));
        assert!(r.within_bound());
        let r = run("identity", "p2", "p2", vec![1], 20);
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn segre_identity_on_points() {
        let m = P1xP1::new();
        let d = DivisorClass::new("p1xp1", vec![1, 1]);
        for p in m.enumerate(&[], 6).unwrap() {
            let ModelPoint::Projective(image) = Segre.apply(&p).unwrap() else {
                panic!("segre lands in P^3")
            };
            assert!(height_pn(&image).exactly_equals(&m.height(&d, &p).unwrap()));
        }
    }

    #[test]
    fn unknown_and_mismatched_maps() {
        let r = MapRegistry::with_defaults();
        assert!(matches!(r.build("veronese", "p1"), Err(Error::UnknownMap(_))));
        assert!(matches!(r.build("segre", "p2"), Err(Error::ModelMismatch { .. })));
    }
}
