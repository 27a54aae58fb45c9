use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::lattice::Lattice;
use super::model::{
    check_exclusions, DivisorClass, HeightProfile, Model, ModelPoint, NamedCurve, ProfileEntry,
};
use super::points::{proj, CoprimeTuples};
use crate::error::{Error, Result};
use crate::heights::{height_pn, HeightValue, ProjPoint};

/// `P^2` blown up at `(0:0:1)`, basis `(H, E)`. Points are their images in
/// `P^2` away from the center, so points of `E` itself are never sampled.
/// Height of `aH + bE` at `(x:y:z)`: `a·h(x:y:z) + b·(h(x:y:z) − h(x:y))`.
///
/// Named curves: `E` (exceptional), `L` the strict transform of `x = 0`
/// (class `H − E`), `H` the line `z = 0`.
#[derive(Debug)]
pub struct BlowupP2 {
    lattice: Lattice,
    curves: Vec<NamedCurve>,
}

impl Default for BlowupP2 {
    fn default() -> Self {
        Self::new()
    }
}

struct Exclusions {
    l: bool,
    h: bool,
}

impl Exclusions {
    fn new(excluded: &[String]) -> Self {
        Exclusions {
            l: excluded.iter().any(|e| e == "L"),
            h: excluded.iter().any(|e| e == "H"),
        }
    }

    fn drops(&self, c: &[i64]) -> bool {
        (c[0] == 0 && c[1] == 0) || (self.l && c[0] == 0) || (self.h && c[2] == 0)
    }
}

impl BlowupP2 {
    pub const NAME: &'static str = "blowup_p2";

    pub fn new() -> Self {
        BlowupP2 {
            lattice: Lattice::new(
                vec![vec![1, 0], vec![0, -1]],
                vec![vec![1, 0], vec![1, -1]],
                vec![vec![0, 1], vec![1, -1]],
            ),
            curves: vec![
                NamedCurve {
                    name: "E",
                    class: vec![0, 1],
                    parametrized: false,
                    excludable: true,
                },
                NamedCurve {
                    name: "L",
                    class: vec![1, -1],
                    parametrized: true,
                    excludable: true,
                },
                NamedCurve {
                    name: "H",
                    class: vec![1, 0],
                    parametrized: true,
                    excludable: true,
                },
            ],
        }
    }

    fn point<'a>(&self, p: &'a ModelPoint) -> Result<&'a ProjPoint> {
        match p {
            ModelPoint::Projective(q) if q.ambient_dim() == 2 => Ok(q),
            other => Err(Error::InvalidPoint(format!("{other} is not a point of blowup_p2"))),
        }
    }

    fn is_center(p: &ProjPoint) -> bool {
        p.is_zero_at(0) && p.is_zero_at(1)
    }

    /// `max(|x|,|y|) / gcd(x, y)`, the height of the image in `P^1`.
    fn pencil_height(p: &ProjPoint) -> BigInt {
        let c = p.coords();
        let g = c[0].gcd(&c[1]);
        let m = if c[0].magnitude() > c[1].magnitude() { &c[0] } else { &c[1] };
        num_traits::Signed::abs(m) / g
    }
}

impl Model for BlowupP2 {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn dimension(&self) -> usize {
        2
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn curves(&self) -> &[NamedCurve] {
        &self.curves
    }

    fn parse_point(&self, s: &str) -> Result<ModelPoint> {
        let p = ModelPoint::Projective(s.parse()?);
        if !self.contains(&p) {
            return Err(Error::InvalidPoint(format!(
                "{s} is not a point of blowup_p2 away from the center"
            )));
        }
        Ok(p)
    }

    fn contains(&self, p: &ModelPoint) -> bool {
        self.point(p).map(|q| !Self::is_center(q)).unwrap_or(false)
    }

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool> {
        self.curve(curve)?;
        let q = self.point(p)?;
        Ok(match curve {
            "E" => false,
            "L" => q.is_zero_at(0) && !Self::is_center(q),
            _ => q.is_zero_at(2),
        })
    }

    fn parametrize(&self, curve: &str, t: &ProjPoint) -> Result<Option<ModelPoint>> {
        let c = self.curve(curve)?;
        if !c.parametrized {
            return Err(Error::Unsupported(format!(
                "curve {curve} of blowup_p2 has no sampled points"
            )));
        }
        let (s, u) = (t.coords()[0].clone(), t.coords()[1].clone());
        let coords = match curve {
            "L" => [BigInt::zero(), s, u],
            _ => [s, u, BigInt::zero()],
        };
        let p = ProjPoint::new(&coords)?;
        Ok(if Self::is_center(&p) {
            None
        } else {
            Some(ModelPoint::Projective(p))
        })
    }

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue> {
        self.check_class(d)?;
        let q = self.point(p)?;
        let (a, b) = (d.vector()[0], d.vector()[1]);
        let full = height_pn(q);
        if b == 0 {
            return Ok(full.scale(a));
        }
        if Self::is_center(q) {
            return Err(Error::UndefinedAtPoint(format!(
                "{q} is the blow-up center; the E summand of {d} is undefined there"
            )));
        }
        let pencil = HeightValue::from_integer(&Self::pencil_height(q));
        Ok(&full.scale(a + b) + &pencil.scale(-b))
    }

    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
        check_exclusions(self, excluded)?;
        let ex = Exclusions::new(excluded);
        Ok(Box::new(CoprimeTuples::new(2, bound).filter_map(move |c| {
            if ex.drops(&c) {
                None
            } else {
                Some(ModelPoint::Projective(proj(&c)))
            }
        })))
    }

    fn signature(&self, p: &ModelPoint) -> Option<Vec<i64>> {
        let q = self.point(p).ok()?;
        if Self::is_center(q) {
            return None;
        }
        Some(vec![
            i64::try_from(q.max_abs()).ok()?,
            i64::try_from(Self::pencil_height(q)).ok()?,
        ])
    }

    fn on_shell(&self, p: &ModelPoint, bound: u64) -> bool {
        self.point(p)
            .map(|q| q.max_abs() == BigInt::from(bound))
            .unwrap_or(false)
    }

    /// Walks the pairs `(x, y)` and counts the admissible `z` per signature
    /// instead of visiting every triple.
    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        check_exclusions(self, excluded)?;
        let ex = Exclusions::new(excluded);
        let b = bound as i64;
        let n = bound as usize + 1;
        let coprime: Vec<Vec<bool>> = (0..n)
            .map(|g| (0..n).map(|z| (g as i64).gcd(&(z as i64)) == 1).collect())
            .collect();
        let mut counts = vec![0u64; n * n];
        let mut witness: Vec<Option<[i64; 3]>> = vec![None; n * n];
        let mut record = |m3: i64, m2: i64, k: u64, w: [i64; 3]| {
            let idx = m3 as usize * n + m2 as usize;
            counts[idx] += k;
            witness[idx].get_or_insert(w);
        };

        for x in 0..=b {
            if ex.l && x == 0 {
                continue;
            }
            for y in -b..=b {
                if x == 0 && y <= 0 {
                    continue;
                }
                let g = x.gcd(&y) as usize;
                let big = x.abs().max(y.abs());
                let m2 = big / g as i64;
                // |z| ≤ big: the maximum stays big.
                let mut inner = 0u64;
                let mut first = None;
                for z in -big..=big {
                    if (ex.h && z == 0) || !coprime[g][z.unsigned_abs() as usize] {
                        continue;
                    }
                    inner += 1;
                    first.get_or_insert(z);
                }
                if let Some(z) = first {
                    record(big, m2, inner, [x, y, z]);
                }
                // |z| > big: the maximum is |z|.
                for k in big + 1..=b {
                    if coprime[g][k as usize] {
                        record(k, m2, 2, [x, y, -k]);
                    }
                }
            }
        }

        let mut entries = Vec::new();
        for m3 in 1..=b {
            for m2 in 1..=m3 {
                let idx = m3 as usize * n + m2 as usize;
                if counts[idx] == 0 {
                    continue;
                }
                entries.push(ProfileEntry {
                    witness: ModelPoint::Projective(proj(&witness[idx].expect("counted"))),
                    count: counts[idx],
                    shell: m3 == b,
                    signature: Some(vec![m3, m2]),
                });
            }
        }
        Ok(HeightProfile { entries })
    }

    /// With `u = h(x:y:z) ≥ v = h(x:y)`, an ample `aH + bE` has height
    /// between `(a+b)u` and `a·u`.
    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)> {
        self.check_class(d1)?;
        self.check_class(d2)?;
        let (v1, v2) = (d1.vector(), d2.vector());
        if !self.lattice.is_ample(&d1.q_vector()) || !self.lattice.is_ample(&d2.q_vector()) {
            return Err(Error::RequiresAmple(format!("{d1} and {d2} must both be ample")));
        }
        Ok((v1[0] as f64 / (v2[0] + v2[1]) as f64, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::grouped_profile;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn exceptional_height_example() {
        let m = BlowupP2::new();
        let p = m.parse_point("3:2:7").unwrap();
        let h = m.height(&DivisorClass::new("blowup_p2", vec![0, 1]), &p).unwrap();
        assert!((h.value() - (7f64.ln() - 3f64.ln())).abs() < 1e-12);
        assert!(h.value() >= 0.0);
    }

    #[test]
    fn center_is_not_a_point() {
        let m = BlowupP2::new();
        assert!(m.parse_point("0:0:3").is_err());
        let center = ModelPoint::Projective(ProjPoint::from_i64(&[0, 0, 1]).unwrap());
        assert!(matches!(
            m.height(&DivisorClass::new("blowup_p2", vec![1, 1]), &center),
            Err(Error::UndefinedAtPoint(_))
        ));
    }

    #[test]
    fn bound_one_points() {
        let m = BlowupP2::new();
        let pts: Vec<ModelPoint> = m.enumerate(&names(&["E"]), 1).unwrap().collect();
        // 13 normalized triples in {-1,0,1}^3, minus the center.
        assert_eq!(pts.len(), 12);
        let mut brute = Vec::new();
        for x in -1i64..=1 {
            for y in -1i64..=1 {
                for z in -1i64..=1 {
                    let first = [x, y, z].into_iter().find(|&c| c != 0);
                    if first.is_some_and(|c| c > 0) && !(x == 0 && y == 0) {
                        brute.push(ModelPoint::Projective(proj(&[x, y, z])));
                    }
                }
            }
        }
        brute.sort();
        let mut got = pts.clone();
        got.sort();
        assert_eq!(got, brute);
    }

    #[test]
    fn fast_profile_matches_enumeration() {
        let m = BlowupP2::new();
        for excluded in [names(&[]), names(&["E"]), names(&["L"]), names(&["H", "L", "E"])] {
            for bound in [1, 2, 3, 6, 10] {
                let fast = m.profile(&excluded, bound).unwrap();
                let slow = grouped_profile(&m, &excluded, bound).unwrap();
                assert_eq!(fast, slow, "{excluded:?} bound {bound}");
            }
        }
    }

    #[test]
    fn curves_parametrize_onto_themselves() {
        let m = BlowupP2::new();
        let t = ProjPoint::from_i64(&[3, -7]).unwrap();
        for c in ["L", "H"] {
            let p = m.parametrize(c, &t).unwrap().unwrap();
            assert!(m.on_curve(c, &p).unwrap());
        }
        let origin = ProjPoint::from_i64(&[0, 1]).unwrap();
        assert_eq!(m.parametrize("L", &origin).unwrap(), None);
        assert!(m.parametrize("E", &t).is_err());
    }
}
