//! Exact points of projective space over Q and the absolute logarithmic height.
//!
//! Heights are carried in natural-log units. Whenever a height comes from
//! integer data, the rational number whose logarithm it is (the "argument")
//! is kept alongside the float, so equalities between heights can be checked
//! without rounding.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A point of `P^n(Q)` with coprime integer coordinates whose first nonzero
/// coordinate is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    pub fn new(raw: &[BigInt]) -> Result<Self> {
        normalize_point(raw)
    }

    pub fn from_i64(raw: &[i64]) -> Result<Self> {
        let raw: Vec<BigInt> = raw.iter().map(|&c| BigInt::from(c)).collect();
        normalize_point(&raw)
    }

    pub fn from_rationals(raw: &[BigRational]) -> Result<Self> {
        if raw.is_empty() || raw.iter().all(Zero::is_zero) {
            return Err(Error::InvalidPoint("all coordinates are zero".into()));
        }
        let lcm = raw
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let cleared: Vec<BigInt> = raw
            .iter()
            .map(|q| q.numer() * (&lcm / q.denom()))
            .collect();
        normalize_point(&cleared)
    }

    /// Builds a point from coordinates that already satisfy every invariant.
    /// Used by enumerators that generate normalized tuples directly.
    pub(crate) fn from_normalized_i64(raw: &[i64]) -> Self {
        debug_assert!(is_normalized_i64(raw));
        ProjPoint {
            coords: raw.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn max_abs(&self) -> BigInt {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .expect("projective point has coordinates")
    }

    pub fn is_zero_at(&self, index: usize) -> bool {
        self.coords[index].is_zero()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() < 2 {
            return Err(Error::Parse(format!(
                "projective point needs at least two colon-separated coordinates: `{s}`"
            )));
        }
        let coords = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad coordinate `{p}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        normalize_point(&coords)
    }
}

/// Returns the unique normalized representative of the projective point with
/// the given homogeneous coordinates.
pub fn normalize_point(raw: &[BigInt]) -> Result<ProjPoint> {
    if raw.len() < 2 {
        return Err(Error::InvalidPoint(
            "a projective point needs at least two coordinates".into(),
        ));
    }
    let g = raw.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Err(Error::InvalidPoint("all coordinates are zero".into()));
    }
    let first = raw.iter().find(|c| !c.is_zero()).expect("nonzero entry");
    let g = if first.is_negative() { -g } else { g };
    Ok(ProjPoint {
        coords: raw.iter().map(|c| c / &g).collect(),
    })
}

pub(crate) fn is_normalized_i64(raw: &[i64]) -> bool {
    let g = raw.iter().fold(0i64, |acc, &c| acc.gcd(&c));
    g == 1 && raw.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// A height in natural-log units.
///
/// `arg` is present when the height is `ln(arg)` for an exactly known positive
/// rational; additive combinations of such heights multiply the arguments, and
/// the float is recomputed from the argument with a single logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightValue {
    value: f64,
    arg: Option<BigRational>,
}

impl HeightValue {
    pub fn zero() -> Self {
        HeightValue {
            value: 0.0,
            arg: Some(BigRational::one()),
        }
    }

    /// The height `ln(arg)`; `arg` must be positive.
    pub fn from_arg(arg: BigRational) -> Self {
        assert!(arg.is_positive(), "height argument must be positive");
        HeightValue {
            value: ln_rational(&arg),
            arg: Some(arg),
        }
    }

    pub fn from_integer(n: &BigInt) -> Self {
        Self::from_arg(BigRational::from_integer(n.abs()))
    }

    /// A height known only approximately (canonical heights, noisy
    /// representatives).
    pub fn approximate(value: f64) -> Self {
        HeightValue { value, arg: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_exact(&self) -> bool {
        self.arg.is_some()
    }

    pub fn exact_arg(&self) -> Option<&BigRational> {
        self.arg.as_ref()
    }

    pub fn scale(&self, k: i64) -> HeightValue {
        match &self.arg {
            Some(arg) => {
                let powered = pow_rational(arg, k);
                HeightValue::from_arg(powered)
            }
            None => HeightValue::approximate(self.value * k as f64),
        }
    }

    /// Exact identity test; falls back to bitwise float equality when either
    /// side is approximate.
    pub fn exactly_equals(&self, other: &HeightValue) -> bool {
        match (&self.arg, &other.arg) {
            (Some(a), Some(b)) => a == b,
            _ => self.value.to_bits() == other.value.to_bits(),
        }
    }
}

impl Add for &HeightValue {
    type Output = HeightValue;

    fn add(self, rhs: &HeightValue) -> HeightValue {
        match (&self.arg, &rhs.arg) {
            (Some(a), Some(b)) => HeightValue::from_arg(a * b),
            _ => HeightValue::approximate(self.value + rhs.value),
        }
    }
}

impl Add for HeightValue {
    type Output = HeightValue;

    fn add(self, rhs: HeightValue) -> HeightValue {
        &self + &rhs
    }
}

impl Neg for &HeightValue {
    type Output = HeightValue;

    fn neg(self) -> HeightValue {
        self.scale(-1)
    }
}

impl Sub for &HeightValue {
    type Output = HeightValue;

    fn sub(self, rhs: &HeightValue) -> HeightValue {
        self + &(-rhs)
    }
}

fn pow_rational(q: &BigRational, k: i64) -> BigRational {
    if k == 0 {
        return BigRational::one();
    }
    let e = k.unsigned_abs() as u32;
    let p = BigRational::new_raw(
        num_traits::pow(q.numer().clone(), e as usize),
        num_traits::pow(q.denom().clone(), e as usize),
    );
    if k > 0 {
        p
    } else {
        p.recip()
    }
}

/// Absolute logarithmic height of a normalized point: `ln max |x_i|`.
pub fn height_pn(p: &ProjPoint) -> HeightValue {
    HeightValue::from_integer(&p.max_abs())
}

/// `ln max(|numerator|, denominator)` of a reduced rational.
pub fn height_rational(q: &BigRational) -> HeightValue {
    let m = std::cmp::max(q.numer().abs(), q.denom().abs());
    HeightValue::from_integer(&m)
}

/// Natural logarithm of `|n|`, accurate for integers of any size.
pub fn ln_bigint(n: &BigInt) -> f64 {
    let n = n.magnitude();
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite for <= 1000 bits").ln();
    }
    let shift = bits - 960;
    let top = (n >> shift).to_f64().expect("finite after shift");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(q: &BigRational) -> f64 {
    let num = ln_bigint(q.numer());
    if q.denom().is_one() {
        num
    } else {
        num - ln_bigint(q.denom())
    }
}

/// Nearest `f64` to a rational of any size.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let sign = if q.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * (ln_bigint(q.numer()) - ln_bigint(q.denom())).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> ProjPoint {
        ProjPoint::from_i64(c).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(pt(&[4, 6]).to_string(), "2:3");
        assert_eq!(pt(&[0, -5]).to_string(), "0:1");
        assert_eq!(pt(&[-3, 2, 0]).to_string(), "3:-2:0");
        // (1/2, 1/3): clearing by lcm 6 gives (3, 2); check by cross-multiplication.
        let p = ProjPoint::from_rationals(&[q(1, 2), q(1, 3)]).unwrap();
        assert_eq!(p.to_string(), "3:2");
        let (a, b) = (&p.coords()[0], &p.coords()[1]);
        assert_eq!(
            q(1, 2) * BigRational::from_integer(b.clone()),
            q(1, 3) * BigRational::from_integer(a.clone())
        );
    }

    #[test]
    fn all_zero_rejected() {
        assert!(matches!(
            ProjPoint::from_i64(&[0, 0]),
            Err(Error::InvalidPoint(_))
        ));
        assert!("0:0".parse::<ProjPoint>().is_err());
        assert!("3".parse::<ProjPoint>().is_err());
    }

    #[test]
    fn parse_renormalizes() {
        let p: ProjPoint = "-6:4".parse().unwrap();
        assert_eq!(p.to_string(), "3:-2");
    }

    #[test]
    fn height_examples() {
        assert_eq!(height_pn(&pt(&[1, 0])).value(), 0.0);
        assert_eq!(height_pn(&pt(&[3, 2])).value(), 3f64.ln());
        assert_eq!(height_pn(&pt(&[4, 6])).value(), 3f64.ln());
        assert_eq!(height_rational(&BigRational::zero()).value(), 0.0);
        assert_eq!(height_rational(&q(3, 2)).value(), 3f64.ln());
        assert_eq!(height_rational(&q(-7, 5)).value(), 7f64.ln());
    }

    #[test]
    fn exact_arithmetic_on_heights() {
        let a = height_pn(&pt(&[3, 2]));
        let b = height_pn(&pt(&[5, 1]));
        let s = &a + &b;
        assert_eq!(s.exact_arg().unwrap(), &q(15, 1));
        let d = &s - &b;
        assert!(d.exactly_equals(&a));
        assert_eq!(a.scale(-2).exact_arg().unwrap(), &q(1, 9));
        assert_eq!(a.scale(0).value(), 0.0);
    }

    #[test]
    fn ln_of_huge_integers() {
        let n = num_traits::pow(BigInt::from(10), 2000);
        let expected = 2000.0 * 10f64.ln();
        assert!((ln_bigint(&n) - expected).abs() < 1e-9 * expected);
    }

    fn raw_vec() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-1000i64..1000, 2..5)
            .prop_filter("not all zero", |v| v.iter().any(|&c| c != 0))
    }

    proptest! {
        #[test]
        fn scaling_invariance(v in raw_vec(), num in 1i64..50, den in 1i64..50, neg in any::<bool>()) {
            let lambda = if neg { q(-num, den) } else { q(num, den) };
            let raw: Vec<BigRational> = v.iter().map(|&c| BigRational::from_integer(c.into())).collect();
            let scaled: Vec<BigRational> = raw.iter().map(|c| c * &lambda).collect();
            let p = ProjPoint::from_rationals(&raw).unwrap();
            let ps = ProjPoint::from_rationals(&scaled).unwrap();
            prop_assert_eq!(&p, &ps);
            prop_assert!(height_pn(&p).exactly_equals(&height_pn(&ps)));
        }

        #[test]
        fn permutation_invariance(v in raw_vec(), rot in 0usize..4) {
            let mut w = v.clone();
            let k = rot % w.len();
            w.rotate_left(k);
            w.reverse();
            prop_assert!(height_pn(&pt(&v)).exactly_equals(&height_pn(&pt(&w))));
        }

        #[test]
        fn nonnegative_with_zero_iff_unit_coordinates(v in raw_vec()) {
            let p = pt(&v);
            let h = height_pn(&p).value();
            prop_assert!(h >= 0.0);
            let units = p.coords().iter().all(|c| c.abs() <= BigInt::one());
            prop_assert_eq!(h == 0.0, units);
        }

        #[test]
        fn rational_height_matches_projective(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = q(n, d);
            let p = normalize_point(&[r.numer().clone(), r.denom().clone()]).unwrap();
            prop_assert!(height_rational(&r).exactly_equals(&height_pn(&p)));
        }
    }
}
