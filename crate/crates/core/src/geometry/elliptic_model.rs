use super::lattice::Lattice;
use super::model::{check_exclusions, DivisorClass, HeightProfile, Model, ModelPoint, NamedCurve, ProfileEntry};
use crate::elliptic::{CurvePoint, EllipticCurve};
use crate::error::{Error, Result};
use crate::heights::{HeightValue, ProjPoint};

/// An elliptic curve as a model variety. A class is `(d, P₀)`, meaning
/// `d·(O) + (P₀) − (O)`; its height at `Q` is `d·ĥ(Q) + 2⟨Q, P₀⟩`. Points are
/// the Mordell–Weil box `Σ n_i G_i + T`, `|n_i| ≤ bound`.
#[derive(Debug)]
pub struct EllipticModel {
    curve: EllipticCurve,
    tol: f64,
    lattice: Lattice,
    curves: Vec<NamedCurve>,
}

impl EllipticModel {
    pub const NAME: &'static str = "elliptic";

    /// `tol` is the certified accuracy of each canonical height used.
    pub fn new(curve: EllipticCurve, tol: f64) -> Self {
        EllipticModel {
            curve,
            tol,
            lattice: Lattice::new(vec![vec![1]], vec![vec![1]], vec![vec![1]]),
            curves: vec![NamedCurve {
                name: "curve",
                class: vec![1],
                parametrized: false,
                excludable: false,
            }],
        }
    }

    pub fn curve_data(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn point<'a>(&self, p: &'a ModelPoint) -> Result<&'a CurvePoint> {
        match p {
            ModelPoint::Curve(c) if self.curve.contains(c) => Ok(c),
            other => Err(Error::InvalidPoint(format!("{other} is not a point of the curve"))),
        }
    }
}

impl Model for EllipticModel {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn dimension(&self) -> usize {
        1
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn curves(&self) -> &[NamedCurve] {
        &self.curves
    }

    fn parse_point(&self, s: &str) -> Result<ModelPoint> {
        let c: CurvePoint = s.parse()?;
        self.curve.check(&c)?;
        Ok(ModelPoint::Curve(c))
    }

    fn contains(&self, p: &ModelPoint) -> bool {
        self.point(p).is_ok()
    }

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool> {
        self.curve(curve)?;
        Ok(self.contains(p))
    }

    fn parametrize(&self, curve: &str, _t: &ProjPoint) -> Result<Option<ModelPoint>> {
        self.curve(curve)?;
        Err(Error::Unsupported(
            "an elliptic curve has no rational parametrization".into(),
        ))
    }

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue> {
        self.check_class(d)?;
        let q = self.point(p)?;
        let deg = d.vector()[0];
        let hq = self.curve.canonical_height(q, self.tol)?;
        let base = if hq.is_certified_zero() { 0.0 } else { deg as f64 * hq.value };
        let p0 = d.point_or_origin();
        let twice_pairing = if p0.is_infinity() || hq.is_certified_zero() {
            0.0
        } else {
            let hp = self.curve.canonical_height(&p0, self.tol)?;
            if hp.is_certified_zero() {
                0.0
            } else {
                let hqp = self.curve.canonical_height(&self.curve.add(q, &p0), self.tol)?;
                hqp.value - hq.value - hp.value
            }
        };
        if base == 0.0 && twice_pairing == 0.0 && (deg == 0 || hq.is_certified_zero()) {
            return Ok(HeightValue::zero());
        }
        Ok(HeightValue::approximate(base + twice_pairing))
    }

    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
        check_exclusions(self, excluded)?;
        let pts: Vec<ModelPoint> = self
            .curve
            .box_points(bound)
            .map(|(_, p)| ModelPoint::Curve(p))
            .collect();
        Ok(Box::new(pts.into_iter()))
    }

    fn signature(&self, _p: &ModelPoint) -> Option<Vec<i64>> {
        None
    }

    /// Box membership alone does not determine the shell; see `profile`.
    fn on_shell(&self, _p: &ModelPoint, _bound: u64) -> bool {
        false
    }

    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        check_exclusions(self, excluded)?;
        let b = bound as i64;
        let entries = self
            .curve
            .box_points(bound)
            .map(|(coeffs, p)| ProfileEntry {
                shell: !coeffs.is_empty() && coeffs.iter().any(|n| n.abs() == b),
                witness: ModelPoint::Curve(p),
                count: 1,
                signature: None,
            })
            .collect();
        Ok(HeightProfile { entries })
    }

    /// With `x = √ĥ(Q)`, `p_i = √ĥ(P_i)` and `|⟨Q,P⟩| ≤ x·p`:
    /// `h1 ≤ 2d1·x² + p1²/d1` and `h2 ≥ (d2/2)·x² − 2p2²/d2`.
    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)> {
        self.check_class(d1)?;
        self.check_class(d2)?;
        let (e1, e2) = (d1.vector()[0], d2.vector()[0]);
        if e1 <= 0 || e2 <= 0 {
            return Err(Error::RequiresAmple(format!("{d1} and {d2} must have positive degree")));
        }
        let (e1, e2) = (e1 as f64, e2 as f64);
        let h1 = self.curve.canonical_height(&d1.point_or_origin(), self.tol)?;
        let h2 = self.curve.canonical_height(&d2.point_or_origin(), self.tol)?;
        let p1 = h1.value + h1.error_radius;
        let p2 = h2.value + h2.error_radius;
        let m = 4.0 * e1 / e2;
        let c = e2 * p1 / (4.0 * e1 * e1) + 2.0 * p2 / e2 + 4.0 * self.tol;
        Ok((m, c))
    }

    fn parse_divisor(&self, vector: &str, point: Option<&str>) -> Result<DivisorClass> {
        let (deg, inline) = match vector.split_once(',') {
            Some((d, rest)) => (d, Some(rest)),
            None => (vector, None),
        };
        let deg: i64 = deg
            .trim()
            .parse()
            .map_err(|e| Error::InvalidDivisor(format!("bad degree in `{vector}`: {e}")))?;
        let p = match (inline, point) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidDivisor(
                    "point component given both inline and separately".into(),
                ))
            }
            (Some(s), None) | (None, Some(s)) => Some(s.parse::<CurvePoint>()?),
            (None, None) => None,
        };
        let mut d = DivisorClass::new(Self::NAME, vec![deg]);
        if let Some(p) = p {
            d = d.with_point(p);
        }
        self.check_class(&d)?;
        Ok(d)
    }

    fn check_class(&self, d: &DivisorClass) -> Result<()> {
        if d.model() != Self::NAME {
            return Err(Error::ModelMismatch {
                left: d.model().to_string(),
                right: Self::NAME.to_string(),
            });
        }
        if d.vector().len() != 1 {
            return Err(Error::InvalidDivisor(format!(
                "elliptic classes have one degree coefficient, got {}",
                d.vector().len()
            )));
        }
        if let Some(p) = d.point() {
            self.curve.check(p)?;
        }
        Ok(())
    }

    fn combine(&self, terms: &[(i64, &DivisorClass)]) -> Result<DivisorClass> {
        let mut deg = 0;
        let mut point = CurvePoint::Infinity;
        for (k, d) in terms {
            self.check_class(d)?;
            deg += k * d.vector()[0];
            point = self.curve.add(&point, &self.curve.multiply(*k, &d.point_or_origin()));
        }
        let d = DivisorClass::new(Self::NAME, vec![deg]);
        Ok(if point.is_infinity() { d } else { d.with_point(point) })
    }

    /// Only `d > 0`, or the trivial class, is effective on a curve.
    fn is_effective(&self, d: &DivisorClass) -> Result<bool> {
        self.check_class(d)?;
        let deg = d.vector()[0];
        Ok(deg > 0 || (deg == 0 && d.point_or_origin().is_infinity()))
    }

    fn has_divisor_pairing(&self) -> bool {
        false
    }
}
