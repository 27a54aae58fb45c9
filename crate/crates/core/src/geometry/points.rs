//! Enumeration helpers for normalized integer tuples.

use num_integer::Integer;

use crate::heights::{is_normalized_i64, ProjPoint};

/// Normalized points of `P^n` with all coordinates in `[-bound, bound]`, in
/// lexicographic order of the coordinate tuple.
pub struct CoprimeTuples {
    bound: i64,
    current: Option<Vec<i64>>,
}

impl CoprimeTuples {
    pub fn new(dim: usize, bound: u64) -> Self {
        let b = bound as i64;
        let mut start = vec![-b; dim + 1];
        start[0] = 0;
        CoprimeTuples {
            bound: b,
            current: Some(start),
        }
    }

    fn advance(&mut self) {
        let Some(c) = self.current.as_mut() else {
            return;
        };
        for i in (0..c.len()).rev() {
            if c[i] < self.bound {
                c[i] += 1;
                for later in c.iter_mut().skip(i + 1) {
                    *later = -self.bound;
                }
                return;
            }
        }
        self.current = None;
    }
}

impl Iterator for CoprimeTuples {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            let c = self.current.clone()?;
            self.advance();
            if is_normalized_i64(&c) {
                return Some(c);
            }
        }
    }
}

/// Normalized points `(x:y)` of `P^1` with `max(|x|,|y|) = m`, sorted.
pub fn p1_points_of_height(m: i64) -> Vec<(i64, i64)> {
    if m == 1 {
        return vec![(0, 1), (1, -1), (1, 0), (1, 1)];
    }
    let mut out = Vec::new();
    for k in 1..m {
        if k.gcd(&m) == 1 {
            out.push((k, -m));
            out.push((k, m));
            out.push((m, -k));
            out.push((m, k));
        }
    }
    out.sort_unstable();
    out
}

/// `#{P in P^1 : H(P) = m}`.
pub fn p1_count_of_height(m: u64) -> u64 {
    if m == 1 {
        4
    } else {
        4 * totient(m)
    }
}

pub fn totient(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Möbius function values `μ(0..=n)` by sieve (`μ(0)` is unused and 0).
pub fn mobius_table(n: usize) -> Vec<i64> {
    let mut mu = vec![1i64; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    let mut is_composite = vec![false; n + 1];
    for p in 2..=n {
        if is_composite[p] {
            continue;
        }
        for k in (p..=n).step_by(p) {
            if k > p {
                is_composite[k] = true;
            }
            mu[k] = -mu[k];
        }
        let sq = p * p;
        for k in (sq..=n).step_by(sq) {
            mu[k] = 0;
        }
    }
    mu
}

pub(crate) fn proj(c: &[i64]) -> ProjPoint {
    ProjPoint::from_normalized_i64(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_bound_one() {
        let pts: Vec<_> = CoprimeTuples::new(1, 1).collect();
        assert_eq!(pts, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn heights_partition_the_box() {
        for b in 1..=12 {
            let mut direct: Vec<(i64, i64)> = CoprimeTuples::new(1, b)
                .map(|c| (c[0], c[1]))
                .collect();
            direct.sort_unstable();
            let mut by_height: Vec<(i64, i64)> =
                (1..=b as i64).flat_map(p1_points_of_height).collect();
            by_height.sort_unstable();
            assert_eq!(direct, by_height);
            let total: u64 = (1..=b).map(p1_count_of_height).sum();
            assert_eq!(total, direct.len() as u64);
        }
    }

    #[test]
    fn totient_and_mobius() {
        let phi: Vec<u64> = (1..=12).map(totient).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
        let mu = mobius_table(12);
        assert_eq!(&mu[1..], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }
}
