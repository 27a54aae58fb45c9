use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::lattice::{to_q, Lattice};
use crate::elliptic::CurvePoint;
use crate::error::{Error, Result};
use crate::heights::{HeightValue, ProjPoint};

/// A point of a model variety.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelPoint {
    Projective(ProjPoint),
    Pair(ProjPoint, ProjPoint),
    Curve(CurvePoint),
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPoint::Projective(p) => write!(f, "{p}"),
            ModelPoint::Pair(p, q) => write!(f, "{p},{q}"),
            ModelPoint::Curve(c) => write!(f, "{c}"),
        }
    }
}

/// An integer class in a model's Picard basis, plus the point `P₀` of the
/// degree-zero part `(P₀) − (O)` on the elliptic model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    model: String,
    vector: Vec<i64>,
    point: Option<CurvePoint>,
}

impl DivisorClass {
    pub fn new(model: impl Into<String>, vector: Vec<i64>) -> Self {
        DivisorClass {
            model: model.into(),
            vector,
            point: None,
        }
    }

    pub fn with_point(mut self, point: CurvePoint) -> Self {
        self.point = Some(point);
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn vector(&self) -> &[i64] {
        &self.vector
    }

    pub fn point(&self) -> Option<&CurvePoint> {
        self.point.as_ref()
    }

    /// The point component with `O` for an absent one.
    pub fn point_or_origin(&self) -> CurvePoint {
        self.point.clone().unwrap_or(CurvePoint::Infinity)
    }

    pub fn q_vector(&self) -> Vec<BigRational> {
        to_q(&self.vector)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vector.iter().map(i64::to_string).collect();
        write!(f, "{}", v.join(","))?;
        if let Some(p) = &self.point {
            write!(f, " @ {p}")?;
        }
        Ok(())
    }
}

/// A class with rational coefficients (parts of a Zariski decomposition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalClass {
    pub model: String,
    pub vector: Vec<BigRational>,
}

impl fmt::Display for RationalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vector.iter().map(|c| c.to_string()).collect();
        f.write_str(&v.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCurve {
    pub name: &'static str,
    pub class: Vec<i64>,
    /// Parametrized by `P^1`; points can be sampled along it.
    pub parametrized: bool,
    /// May be removed from a region (its complement is dense).
    pub excludable: bool,
}

/// Points grouped so that every class takes the same height on each member.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub witness: ModelPoint,
    pub count: u64,
    /// Some member attains the coordinate bound.
    pub shell: bool,
    pub signature: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeightProfile {
    pub entries: Vec<ProfileEntry>,
}

impl HeightProfile {
    pub fn point_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }
}

/// A model variety: lattice data, named curves, a point enumerator, and
/// closed-form height representatives linear in the class vector.
pub trait Model: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn lattice(&self) -> &Lattice;

    fn curves(&self) -> &[NamedCurve];

    fn parse_point(&self, s: &str) -> Result<ModelPoint>;

    fn contains(&self, p: &ModelPoint) -> bool;

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool>;

    /// Image of `t ∈ P^1` under the curve's parametrization; `None` when the
    /// image is not a point of the model (the blow-up center).
    fn parametrize(&self, curve: &str, t: &ProjPoint) -> Result<Option<ModelPoint>>;

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue>;

    /// All model points with coordinate data bounded by `bound`, minus the
    /// named curves, in a fixed order.
    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>>;

    /// Points with equal signatures have equal heights for every class.
    fn signature(&self, p: &ModelPoint) -> Option<Vec<i64>>;

    fn on_shell(&self, p: &ModelPoint, bound: u64) -> bool;

    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        grouped_profile(self, excluded, bound)
    }

    /// `(m, c)` with `h_{D1}(P) ≥ T ⇒ h_{D2}(P) ≥ T/m − c` for ample `D1, D2`.
    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)>;

    fn curve(&self, name: &str) -> Result<&NamedCurve> {
        self.curves()
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurve {
                model: self.name().to_string(),
                name: name.to_string(),
            })
    }

    /// Comma-separated integers in the Picard basis.
    fn parse_divisor(&self, vector: &str, point: Option<&str>) -> Result<DivisorClass> {
        if point.is_some() {
            return Err(Error::InvalidDivisor(format!(
                "point components exist only on the elliptic model, not {}",
                self.name()
            )));
        }
        let v = parse_vector(vector)?;
        let d = DivisorClass::new(self.name(), v);
        self.check_class(&d)?;
        Ok(d)
    }

    fn check_class(&self, d: &DivisorClass) -> Result<()> {
        if d.model() != self.name() {
            return Err(Error::ModelMismatch {
                left: d.model().to_string(),
                right: self.name().to_string(),
            });
        }
        if d.vector().len() != self.lattice().rank() {
            return Err(Error::InvalidDivisor(format!(
                "{} needs {} coefficients, got {}",
                self.name(),
                self.lattice().rank(),
                d.vector().len()
            )));
        }
        if d.point().is_some() {
            return Err(Error::InvalidDivisor(format!(
                "point component on non-elliptic model {}",
                self.name()
            )));
        }
        Ok(())
    }

    /// `Σ k_i D_i`.
    fn combine(&self, terms: &[(i64, &DivisorClass)]) -> Result<DivisorClass> {
        let mut v = vec![0i64; self.lattice().rank()];
        for (k, d) in terms {
            self.check_class(d)?;
            for (acc, c) in v.iter_mut().zip(d.vector()) {
                *acc += k * c;
            }
        }
        Ok(DivisorClass::new(self.name(), v))
    }

    fn is_effective(&self, d: &DivisorClass) -> Result<bool> {
        self.check_class(d)?;
        Ok(self.lattice().is_pseudo_effective(&d.q_vector()))
    }

    /// Whether the bilinear pairing between two divisor classes is defined.
    fn has_divisor_pairing(&self) -> bool {
        self.dimension() == 2
    }
}

pub fn parse_vector(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|e| Error::InvalidDivisor(format!("bad coefficient `{c}` in `{s}`: {e}")))
        })
        .collect()
}

/// Validates exclusion names against the model.
pub fn check_exclusions(model: &(impl Model + ?Sized), excluded: &[String]) -> Result<()> {
    for name in excluded {
        let c = model.curve(name)?;
        if !c.excludable {
            return Err(Error::InvalidRegion(format!(
                "removing `{name}` from {} does not leave a dense open set",
                model.name()
            )));
        }
    }
    Ok(())
}

/// Profile built by enumerating every point and grouping by signature; the
/// witness is the first point met in enumeration order.
pub fn grouped_profile(
    model: &(impl Model + ?Sized),
    excluded: &[String],
    bound: u64,
) -> Result<HeightProfile> {
    let mut grouped: BTreeMap<Vec<i64>, ProfileEntry> = BTreeMap::new();
    let mut loose = Vec::new();
    for p in model.enumerate(excluded, bound)? {
        let shell = model.on_shell(&p, bound);
        match model.signature(&p) {
            Some(sig) => {
                let e = grouped.entry(sig.clone()).or_insert_with(|| ProfileEntry {
                    witness: p.clone(),
                    count: 0,
                    shell: false,
                    signature: Some(sig),
                });
                e.count += 1;
                e.shell |= shell;
            }
            None => loose.push(ProfileEntry {
                witness: p,
                count: 1,
                shell,
                signature: None,
            }),
        }
    }
    let mut entries: Vec<ProfileEntry> = grouped.into_values().collect();
    entries.extend(loose);
    Ok(HeightProfile { entries })
}
