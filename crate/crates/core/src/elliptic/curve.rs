use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::heights::{height_rational, HeightValue};

/// A rational point of a short Weierstrass curve; `Infinity` is the origin O.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl CurvePoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        CurvePoint::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("O"),
            CurvePoint::Affine { x, y } => write!(f, "{x},{y}"),
        }
    }
}

impl FromStr for CurvePoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("o") {
            return Ok(CurvePoint::Infinity);
        }
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("curve point must be `x,y` or `O`: `{s}`")))?;
        Ok(CurvePoint::Affine {
            x: parse_rational(x)?,
            y: parse_rational(y)?,
        })
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// `y^2 = x^3 + a x + b` over Q, with user-supplied Mordell–Weil generators
/// and torsion points.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCurve {
    a: BigRational,
    b: BigRational,
    generators: Vec<CurvePoint>,
    torsion: Vec<CurvePoint>,
}

impl EllipticCurve {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        let four = BigRational::from_integer(4.into());
        let twenty_seven = BigRational::from_integer(27.into());
        let d = &four * &a * &a * &a + &twenty_seven * &b * &b;
        if d.is_zero() {
            return Err(Error::InvalidCurve(format!(
                "singular curve: 4a^3 + 27b^2 = 0 for a = {a}, b = {b}"
            )));
        }
        Ok(EllipticCurve {
            a,
            b,
            generators: Vec::new(),
            torsion: Vec::new(),
        })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Self::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn with_generators(mut self, generators: Vec<CurvePoint>) -> Result<Self> {
        for g in &generators {
            self.check(g)?;
        }
        self.generators = generators;
        Ok(self)
    }

    pub fn with_torsion(mut self, torsion: Vec<CurvePoint>) -> Result<Self> {
        for t in &torsion {
            self.check(t)?;
        }
        self.torsion = torsion;
        Ok(self)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn generators(&self) -> &[CurvePoint] {
        &self.generators
    }

    pub fn torsion(&self) -> &[CurvePoint] {
        &self.torsion
    }

    /// `-16 (4a^3 + 27b^2)`.
    pub fn discriminant(&self) -> BigRational {
        let c = BigRational::from_integer(4.into()) * &self.a * &self.a * &self.a
            + BigRational::from_integer(27.into()) * &self.b * &self.b;
        c * BigRational::from_integer((-16).into())
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y * y == x * x * x + &self.a * x + &self.b,
        }
    }

    pub fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(p.to_string()))
        }
    }

    pub fn negate(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: -y,
            },
        }
    }

    /// Chord-tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return CurvePoint::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            (three * x1 * x1 + &self.a) / (y1 + y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        self.add(p, p)
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.negate(q))
    }

    /// `n·P` by double-and-add.
    pub fn multiply(&self, n: i64, p: &CurvePoint) -> CurvePoint {
        let mut base = if n < 0 { self.negate(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// The Weil height of the class `2(O)` through the x-coordinate map:
    /// `h(x(P))`, with `h(O) = 0`.
    pub fn naive_height(&self, p: &CurvePoint) -> HeightValue {
        match p.x() {
            None => HeightValue::zero(),
            Some(x) => height_rational(x),
        }
    }

    /// Every point `Σ n_i G_i + T` with `|n_i| <= radius` and `T` in the
    /// listed torsion (O is always included), deduplicated, in lexicographic
    /// order of the coefficient vector and then torsion order.
    pub fn box_points(&self, radius: u64) -> BoxPoints<'_> {
        BoxPoints::new(self, radius)
    }

    pub(crate) fn torsion_or_origin(&self) -> Vec<CurvePoint> {
        let mut out = vec![CurvePoint::Infinity];
        for t in &self.torsion {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }
}

/// Lazy stream of Mordell–Weil box points together with their generator
/// coefficients.
pub struct BoxPoints<'a> {
    curve: &'a EllipticCurve,
    radius: i64,
    multiples: Vec<Vec<CurvePoint>>,
    torsion: Vec<CurvePoint>,
    coeffs: Option<Vec<i64>>,
    torsion_index: usize,
    current_sum: Option<CurvePoint>,
    seen: HashSet<CurvePoint>,
}

impl<'a> BoxPoints<'a> {
    fn new(curve: &'a EllipticCurve, radius: u64) -> Self {
        let r = radius as i64;
        let multiples = curve
            .generators
            .iter()
            .map(|g| (-r..=r).map(|n| curve.multiply(n, g)).collect())
            .collect();
        BoxPoints {
            curve,
            radius: r,
            multiples,
            torsion: curve.torsion_or_origin(),
            coeffs: Some(vec![-r; curve.generators.len()]),
            torsion_index: 0,
            current_sum: None,
            seen: HashSet::new(),
        }
    }

    fn advance_coeffs(&mut self) {
        let Some(c) = self.coeffs.as_mut() else {
            return;
        };
        for i in (0..c.len()).rev() {
            if c[i] < self.radius {
                c[i] += 1;
                for later in c.iter_mut().skip(i + 1) {
                    *later = -self.radius;
                }
                return;
            }
        }
        self.coeffs = None;
    }
}

impl Iterator for BoxPoints<'_> {
    type Item = (Vec<i64>, CurvePoint);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let coeffs = self.coeffs.clone()?;
            if self.current_sum.is_none() {
                let mut sum = CurvePoint::Infinity;
                for (i, &n) in coeffs.iter().enumerate() {
                    let idx = (n + self.radius) as usize;
                    sum = self.curve.add(&sum, &self.multiples[i][idx]);
                }
                self.current_sum = Some(sum);
            }
            if self.torsion_index >= self.torsion.len() {
                self.torsion_index = 0;
                self.current_sum = None;
                self.advance_coeffs();
                continue;
            }
            let t = &self.torsion[self.torsion_index];
            self.torsion_index += 1;
            let p = self
                .curve
                .add(self.current_sum.as_ref().expect("sum computed"), t);
            if self.seen.insert(p.clone()) {
                return Some((coeffs, p));
            }
        }
    }
}

/// Integral model data: `y^2 = x^3 + A x + B` with `A = u^4 a`, `B = u^6 b`.
pub(crate) struct IntegralModel {
    pub a: BigInt,
    pub b: BigInt,
    pub u2: BigInt,
}

impl EllipticCurve {
    pub(crate) fn integral_model(&self) -> IntegralModel {
        use num_integer::Integer;
        let u = self.a.denom().lcm(self.b.denom());
        let u2 = &u * &u;
        let u4 = &u2 * &u2;
        let u6 = &u4 * &u2;
        let a = (&self.a * BigRational::from_integer(u4)).to_integer();
        let b = (&self.b * BigRational::from_integer(u6)).to_integer();
        debug_assert!(!u.is_zero() && !u2.is_zero() && u2 >= BigInt::one());
        IntegralModel { a, b, u2 }
    }
}
