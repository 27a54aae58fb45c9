//! Picard lattices of rank at most 2 and exact cone membership.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type QVec = Vec<BigRational>;

pub fn to_q(v: &[i64]) -> QVec {
    v.iter().map(|&c| BigRational::from_integer(c.into())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    matrix: Vec<Vec<i64>>,
    nef_generators: Vec<Vec<i64>>,
    effective_generators: Vec<Vec<i64>>,
}

impl Lattice {
    /// Panics if the data is inconsistent; lattices are compile-time constants
    /// of the shipped models.
    pub fn new(
        matrix: Vec<Vec<i64>>,
        nef_generators: Vec<Vec<i64>>,
        effective_generators: Vec<Vec<i64>>,
    ) -> Self {
        let r = matrix.len();
        assert!((1..=2).contains(&r), "only ranks 1 and 2 are supported");
        for (i, row) in matrix.iter().enumerate() {
            assert_eq!(row.len(), r);
            for (j, &m) in row.iter().enumerate() {
                assert_eq!(m, matrix[j][i], "intersection matrix must be symmetric");
            }
        }
        let lattice = Lattice {
            matrix,
            nef_generators,
            effective_generators,
        };
        for n in &lattice.nef_generators {
            for e in &lattice.effective_generators {
                assert!(lattice.pair_i64(n, e) >= 0, "nef generator {n:?} negative on {e:?}");
            }
        }
        lattice
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn nef_generators(&self) -> &[Vec<i64>] {
        &self.nef_generators
    }

    pub fn effective_generators(&self) -> &[Vec<i64>] {
        &self.effective_generators
    }

    pub fn pair_i64(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut s = 0;
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                s += vi * self.matrix[i][j] * wj;
            }
        }
        s
    }

    pub fn pair(&self, v: &[BigRational], w: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                if self.matrix[i][j] != 0 {
                    s += vi * wj * BigRational::from_integer(self.matrix[i][j].into());
                }
            }
        }
        s
    }

    /// Pairs `>= 0` with every effective generator. The effective generators
    /// span the closed cone of curves on every supported model.
    pub fn is_nef(&self, v: &[BigRational]) -> bool {
        self.effective_generators
            .iter()
            .all(|e| !self.pair(v, &to_q(e)).is_negative())
    }

    /// Strictly positive on every effective generator and positive
    /// self-intersection.
    pub fn is_ample(&self, v: &[BigRational]) -> bool {
        self.effective_generators
            .iter()
            .all(|e| self.pair(v, &to_q(e)).is_positive())
            && self.pair(v, v).is_positive()
    }

    pub fn is_pseudo_effective(&self, v: &[BigRational]) -> bool {
        let gens: Vec<QVec> = self.effective_generators.iter().map(|g| to_q(g)).collect();
        in_cone(v, &gens)
    }

    /// Linear functionals cutting out the effective cone, each nonnegative
    /// on the cone and vanishing on one boundary ray.
    pub fn effective_facets(&self) -> Vec<QVec> {
        match self.rank() {
            1 => vec![to_q(&[self.effective_generators[0][0].signum()])],
            _ => {
                let (g1, g2) = self.extremal_pair();
                // ℓ(x) = det(g, x), sign chosen positive on the other ray.
                let facet = |g: &[i64], other: &[i64]| {
                    let s = (g[0] * other[1] - g[1] * other[0]).signum();
                    to_q(&[-g[1] * s, g[0] * s])
                };
                vec![facet(&g1, &g2), facet(&g2, &g1)]
            }
        }
    }

    fn extremal_pair(&self) -> (Vec<i64>, Vec<i64>) {
        let gens = &self.effective_generators;
        assert!(gens.len() == 2, "rank-2 effective cone needs two extremal rays");
        assert!(gens[0][0] * gens[1][1] - gens[0][1] * gens[1][0] != 0);
        (gens[0].clone(), gens[1].clone())
    }

    /// `sup{α : w − α·v pseudo-effective}` for `v` in the interior of the
    /// effective cone.
    pub fn sup_alpha(&self, w: &[BigRational], v: &[BigRational]) -> Option<BigRational> {
        let facets = self.effective_facets();
        let mut best: Option<BigRational> = None;
        for l in &facets {
            let lv = dot(l, v);
            if !lv.is_positive() {
                return None;
            }
            let ratio = dot(l, w) / lv;
            best = Some(match best {
                Some(b) if b <= ratio => b,
                _ => ratio,
            });
        }
        best
    }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact membership of `v` in the closed convex cone spanned by `gens`
/// (ambient dimension 1 or 2).
pub fn in_cone(v: &[BigRational], gens: &[QVec]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    match v.len() {
        1 => gens
            .iter()
            .any(|g| !g[0].is_zero() && (&v[0] / &g[0]).is_positive()),
        2 => {
            let det = |a: &[BigRational], b: &[BigRational]| &a[0] * &b[1] - &a[1] * &b[0];
            // A nonnegative multiple of a single generator.
            for g in gens {
                if det(g, v).is_zero() && dot(g, v).is_positive() {
                    return true;
                }
            }
            // A nonnegative combination of two independent generators.
            for (i, gi) in gens.iter().enumerate() {
                for gj in &gens[i + 1..] {
                    let d = det(gi, gj);
                    if d.is_zero() {
                        continue;
                    }
                    let alpha = det(v, gj) / &d;
                    let beta = det(gi, v) / &d;
                    if !alpha.is_negative() && !beta.is_negative() {
                        return true;
                    }
                }
            }
            false
        }
        n => panic!("cone membership only implemented in dimension <= 2, got {n}"),
    }
}
