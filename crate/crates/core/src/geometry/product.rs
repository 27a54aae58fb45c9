use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;

use super::lattice::Lattice;
use super::model::{
    check_exclusions, DivisorClass, HeightProfile, Model, ModelPoint, NamedCurve, ProfileEntry,
};
use super::points::{p1_count_of_height, p1_points_of_height, proj, CoprimeTuples};
use crate::error::{Error, Result};
use crate::heights::{height_pn, HeightValue, ProjPoint};

type Pair = ((i64, i64), (i64, i64));

/// `P^1 × P^1` with basis `(F1, F2)`: `F1` is the class of `{x = const}`,
/// `F2` of `{y = const}`, so `(a, b)` has height `a·h(x) + b·h(y)`. Named
/// curves: `F1 = {(1:0)} × P^1`, `F2 = P^1 × {(1:0)}`, `diag = {x = y}`.
#[derive(Debug)]
pub struct P1xP1 {
    lattice: Lattice,
    curves: Vec<NamedCurve>,
}

impl Default for P1xP1 {
    fn default() -> Self {
        Self::new()
    }
}

impl P1xP1 {
    pub const NAME: &'static str = "p1xp1";

    pub fn new() -> Self {
        P1xP1 {
            lattice: Lattice::new(
                vec![vec![0, 1], vec![1, 0]],
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![1, 0], vec![0, 1]],
            ),
            curves: vec![
                NamedCurve {
                    name: "F1",
                    class: vec![1, 0],
                    parametrized: true,
                    excludable: true,
                },
                NamedCurve {
                    name: "F2",
                    class: vec![0, 1],
                    parametrized: true,
                    excludable: true,
                },
                NamedCurve {
                    name: "diag",
                    class: vec![1, 1],
                    parametrized: true,
                    excludable: true,
                },
            ],
        }
    }

    fn pair<'a>(&self, p: &'a ModelPoint) -> Result<(&'a ProjPoint, &'a ProjPoint)> {
        match p {
            ModelPoint::Pair(x, y) if x.ambient_dim() == 1 && y.ambient_dim() == 1 => Ok((x, y)),
            other => Err(Error::InvalidPoint(format!("{other} is not a point of p1xp1"))),
        }
    }
}

struct Exclusions {
    f1: bool,
    f2: bool,
    diag: bool,
}

impl Exclusions {
    fn new(excluded: &[String]) -> Self {
        let has = |n: &str| excluded.iter().any(|e| e == n);
        Exclusions {
            f1: has("F1"),
            f2: has("F2"),
            diag: has("diag"),
        }
    }

    fn drops(&self, x: (i64, i64), y: (i64, i64)) -> bool {
        (self.f1 && x == (1, 0)) || (self.f2 && y == (1, 0)) || (self.diag && x == y)
    }
}

fn height_of(p: (i64, i64)) -> i64 {
    p.0.abs().max(p.1.abs())
}

impl Model for P1xP1 {
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

    /// `x0:x1,y0:y1`.
    fn parse_point(&self, s: &str) -> Result<ModelPoint> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("p1xp1 point must be `x0:x1,y0:y1`: `{s}`")))?;
        let p = ModelPoint::Pair(x.parse()?, y.parse()?);
        self.pair(&p)?;
        Ok(p)
    }

    fn contains(&self, p: &ModelPoint) -> bool {
        self.pair(p).is_ok()
    }

    fn on_curve(&self, curve: &str, p: &ModelPoint) -> Result<bool> {
        self.curve(curve)?;
        let (x, y) = self.pair(p)?;
        let inf = ProjPoint::from_i64(&[1, 0])?;
        Ok(match curve {
            "F1" => *x == inf,
            "F2" => *y == inf,
            _ => x == y,
        })
    }

    fn parametrize(&self, curve: &str, t: &ProjPoint) -> Result<Option<ModelPoint>> {
        self.curve(curve)?;
        if t.ambient_dim() != 1 {
            return Err(Error::InvalidPoint(format!("{t} is not a point of P^1")));
        }
        let inf = ProjPoint::from_i64(&[1, 0])?;
        Ok(Some(match curve {
            "F1" => ModelPoint::Pair(inf, t.clone()),
            "F2" => ModelPoint::Pair(t.clone(), inf),
            _ => ModelPoint::Pair(t.clone(), t.clone()),
        }))
    }

    fn height(&self, d: &DivisorClass, p: &ModelPoint) -> Result<HeightValue> {
        self.check_class(d)?;
        let (x, y) = self.pair(p)?;
        let v = d.vector();
        Ok(&height_pn(x).scale(v[0]) + &height_pn(y).scale(v[1]))
    }

    fn enumerate<'a>(
        &'a self,
        excluded: &[String],
        bound: u64,
    ) -> Result<Box<dyn Iterator<Item = ModelPoint> + Send + 'a>> {
        check_exclusions(self, excluded)?;
        let ex = Exclusions::new(excluded);
        let line: Vec<(i64, i64)> = CoprimeTuples::new(1, bound).map(|c| (c[0], c[1])).collect();
        let inner = line.clone();
        Ok(Box::new(line.into_iter().flat_map(move |x| {
            let keep: Vec<ModelPoint> = inner
                .iter()
                .filter(|&&y| !ex.drops(x, y))
                .map(|&y| ModelPoint::Pair(proj(&[x.0, x.1]), proj(&[y.0, y.1])))
                .collect();
            keep
        })))
    }

    fn signature(&self, p: &ModelPoint) -> Option<Vec<i64>> {
        let (x, y) = self.pair(p).ok()?;
        Some(vec![
            i64::try_from(x.max_abs()).ok()?,
            i64::try_from(y.max_abs()).ok()?,
        ])
    }

    fn on_shell(&self, p: &ModelPoint, bound: u64) -> bool {
        let b = BigInt::from(bound);
        self.pair(p)
            .map(|(x, y)| x.max_abs() == b || y.max_abs() == b)
            .unwrap_or(false)
    }

    /// Counts from the product formula `c(m1)·c(m2)`, corrected by the
    /// excluded pairs, which are listed explicitly.
    fn profile(&self, excluded: &[String], bound: u64) -> Result<HeightProfile> {
        check_exclusions(self, excluded)?;
        let ex = Exclusions::new(excluded);
        let b = bound as i64;
        let by_height: Vec<Vec<(i64, i64)>> = (0..=b)
            .map(|m| if m == 0 { vec![] } else { p1_points_of_height(m) })
            .collect();
        let line: Vec<(i64, i64)> = by_height.iter().flatten().copied().collect();

        let mut dropped: HashSet<Pair> = HashSet::new();
        if ex.f1 {
            dropped.extend(line.iter().map(|&y| ((1, 0), y)));
        }
        if ex.f2 {
            dropped.extend(line.iter().map(|&x| (x, (1, 0))));
        }
        if ex.diag {
            dropped.extend(line.iter().map(|&x| (x, x)));
        }
        let mut dropped_by_sig: BTreeMap<(i64, i64), u64> = BTreeMap::new();
        for (x, y) in &dropped {
            *dropped_by_sig.entry((height_of(*x), height_of(*y))).or_default() += 1;
        }

        let mut entries = Vec::new();
        for m1 in 1..=b {
            for m2 in 1..=b {
                let full = p1_count_of_height(m1 as u64) * p1_count_of_height(m2 as u64);
                let count = full - dropped_by_sig.get(&(m1, m2)).copied().unwrap_or(0);
                if count == 0 {
                    continue;
                }
                let witness = by_height[m1 as usize]
                    .iter()
                    .flat_map(|&x| by_height[m2 as usize].iter().map(move |&y| (x, y)))
                    .find(|&(x, y)| !ex.drops(x, y))
                    .expect("nonzero count has a member");
                entries.push(ProfileEntry {
                    witness: ModelPoint::Pair(
                        proj(&[witness.0 .0, witness.0 .1]),
                        proj(&[witness.1 .0, witness.1 .1]),
                    ),
                    count,
                    shell: m1 == b || m2 == b,
                    signature: Some(vec![m1, m2]),
                });
            }
        }
        Ok(HeightProfile { entries })
    }

    /// `h1 ≤ max(a1,b1)(h(x)+h(y))` and `h2 ≥ min(a2,b2)(h(x)+h(y))`.
    fn changelimit_constants(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<(f64, f64)> {
        self.check_class(d1)?;
        self.check_class(d2)?;
        let (v1, v2) = (d1.vector(), d2.vector());
        let hi = v1[0].max(v1[1]) as f64;
        let lo = v2[0].min(v2[1]) as f64;
        if lo <= 0.0 || v1[0].min(v1[1]) <= 0 {
            return Err(Error::RequiresAmple(format!("{d1} and {d2} must both be ample")));
        }
        Ok((hi / lo, 0.0))
    }
}
