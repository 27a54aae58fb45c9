use num_bigint::BigInt;
use num_traits::Zero;

use super::lattice::Lattice;
use super::model::{
    check_exclusions, DivisorClass, HeightProfile, Model, ModelPoint, NamedCurve, ProfileEntry,
};
use super::points::{mobius_table, p1_count_of_height, proj, CoprimeTuples};
use crate::error::{Error, Result};
use crate::heights::{height_pn, HeightValue, ProjPoint};

/// `P^n` for `n ≤ 3`, Picard basis `H`. The named curve `line` is
/// `x_2 = … = x_n = 0`.
#[derive(Debug)]
pub struct ProjectiveSpace {
    n: usize,
    name: String,
    lattice: Lattice,
    curves: Vec<NamedCurve>,
}

impl ProjectiveSpace {
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnknownModel(format!("p{n}")));
        }
        Ok(ProjectiveSpace {
            n,
            name: format!("p{n}"),
            lattice: Lattice::new(vec![vec![1]], vec![vec![1]], vec![vec![1]]),
            curves: vec![NamedCurve {
                name: "line",
                class: vec![1],
                parametrized: true,
                excludable: n >= 2,
            }],
        })
    }

    fn point<'a>(&self, p: &'a ModelPoint) -> Result<&'a ProjPoint> {
        match p {
            ModelPoint::Projective(q) if q.ambient_dim() == self.n => Ok(q),
            other => Err(Error::InvalidPoint(format!("{other} is not a point of {}", self.name))),
        }
    }

    fn on_line(p: &ProjPoint) -> bool {
        p.coords()[2..].iter().all(Zero::is_zero)
    }
}

/// Number of primitive nonzero vectors in `[-m, m]^k`.
fn primitive_in_box(m: u64, k: u32, mu: &[i64]) -> i128 {
    (1..=m)
        .map(|d| {
            let side = 2 * (m / d) as i128 + 1;
            mu[d as usize] as i128 * (side.pow(k) - 1)
        })
        .sum()
}

impl Model for ProjectiveSpace {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.n
    }

    fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn curves(&self) -> &[NamedCurve] {
        &self.curves
    }

    fn parse_point(&self, s: &str) -> Result<ModelPoint> {
        let p: ProjPoint = s.parse()?;
        let p = ModelPoint::Projective(p);
        self.point(&p)?;
        Ok(p)
    }

    fn contains(&self, p: &ModelPoint) -> bool {
        self.point(p).is_ok()
    }

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool> {
        self.curve(curve)?;
        Ok(Self::on_line(self.point(p)?))
    }

    fn parametrize(&self, curve: &str, t: &ProjPoint) -> Result<Option<ModelPoint>> {
        self.curve(curve)?;
        let mut coords = t.coords().to_vec();
        coords.resize(self.n + 1, BigInt::zero());
        Ok(Some(ModelPoint::Projective(ProjPoint::new(&coords)?)))
    }

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue> {
        self.check_class(d)?;
        Ok(height_pn(self.point(p)?).scale(d.vector()[0]))
    }

    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
        check_exclusions(self, excluded)?;
        let drop_line = !excluded.is_empty();
        Ok(Box::new(CoprimeTuples::new(self.n, bound).filter_map(
            move |c| {
                if drop_line && c[2..].iter().all(|&x| x == 0) {
                    None
                } else {
                    Some(ModelPoint::Projective(proj(&c)))
                }
            },
        )))
    }

    fn signature(&self, p: &ModelPoint) -> Option<Vec<i64>> {
        let q = self.point(p).ok()?;
        i64::try_from(q.max_abs()).ok().map(|m| vec![m])
    }

    fn on_shell(&self, p: &ModelPoint, bound: u64) -> bool {
        self.point(p)
            .map(|q| q.max_abs() == BigInt::from(bound))
            .unwrap_or(false)
    }

    /// Counts by height from Möbius inversion instead of enumerating.
    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        check_exclusions(self, excluded)?;
        let drop_line = !excluded.is_empty();
        let mu = mobius_table(bound as usize);
        let k = self.n as u32 + 1;
        let mut entries = Vec::with_capacity(bound as usize);
        let mut previous = 0i128;
        for m in 1..=bound {
            let total = primitive_in_box(m, k, &mu);
            let mut count = ((total - previous) / 2) as u64;
            previous = total;
            if drop_line {
                count -= p1_count_of_height(m);
            }
            let mi = m as i64;
            let mut w = vec![0i64; self.n + 1];
            w[0] = mi;
            if self.n == 1 {
                w[1] = 1;
            } else {
                w[2] = 1;
            }
            entries.push(ProfileEntry {
                witness: ModelPoint::Projective(proj(&w)),
                count,
                shell: m == bound,
                signature: Some(vec![mi]),
            });
        }
        Ok(HeightProfile { entries })
    }

    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)> {
        self.check_class(d1)?;
        self.check_class(d2)?;
        Ok((d1.vector()[0] as f64 / d2.vector()[0] as f64, 0.0))
    }
}
