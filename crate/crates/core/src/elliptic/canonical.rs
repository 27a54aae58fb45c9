//! Canonical (Néron–Tate) heights, normalized so that `ĥ(P) ≈ ½·h(x(P))`.
//!
//! `ĥ(P) = lim 4^{-m} · ½ h(x([2^m]P))`. Writing `ℓ_m = h(x([2^m]P))` and
//! `δ_m = ℓ_{m+1} − 4ℓ_m`, the limit is `½(ℓ_0 + Σ 4^{-(m+1)} δ_m)`, and the
//! increments `δ_m` stay bounded, which gives the geometric tail bound.
//!
//! Early doublings are carried out on exact rationals. Once the coordinates
//! grow past a few hundred bits the exact numerator and denominator are no
//! longer formed: `δ_m` only needs the real value of `x([2^m]P)` and the
//! common factor cancelled from the duplication formula, and that factor
//! divides a fixed resultant, so it is recovered from the coordinates taken
//! modulo a large power of that resultant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::curve::{CurvePoint, EllipticCurve, IntegralModel};
use crate::error::{Error, Result};
use crate::heights::{ln_bigint, rational_to_f64};

/// Exact doublings are abandoned once numerator plus denominator exceed this.
const EXACT_BIT_LIMIT: u64 = 512;
/// Torsion points over Q have order at most 12; 16 leaves slack.
const TORSION_ORDER_BOUND: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalHeightValue {
    pub value: f64,
    pub error_radius: f64,
    pub iterations: u32,
}

impl CanonicalHeightValue {
    /// True when the value is a certified exact zero (the point is torsion).
    pub fn is_certified_zero(&self) -> bool {
        self.value == 0.0 && self.error_radius == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalHeightOptions {
    pub max_iterations: u32,
    pub min_iterations: u32,
    pub safety_factor: f64,
}

impl Default for CanonicalHeightOptions {
    fn default() -> Self {
        CanonicalHeightOptions {
            max_iterations: 40,
            min_iterations: 4,
            safety_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorsionCertificate {
    pub is_torsion: bool,
    /// Smallest `n ≥ 1` with `n·P = O`, when torsion.
    pub order: Option<u32>,
    pub height: CanonicalHeightValue,
}

struct Series {
    ell0: f64,
    sum: f64,
    abs_sum: f64,
    log_magnitude: f64,
    max_delta: f64,
    steps: u32,
}

impl Series {
    fn new(ell0: f64) -> Self {
        Series {
            ell0,
            sum: 0.0,
            abs_sum: 0.0,
            log_magnitude: ell0.abs(),
            max_delta: 0.0,
            steps: 0,
        }
    }

    /// Adds `δ_m`; `magnitude` bounds the logarithms it was computed from.
    fn push(&mut self, delta: f64, magnitude: f64) {
        let w = 0.25f64.powi(self.steps as i32 + 1);
        self.sum += w * delta;
        self.abs_sum += w * delta.abs();
        self.log_magnitude += w * magnitude;
        self.max_delta = self.max_delta.max(delta.abs());
        self.steps += 1;
    }

    fn value(&self) -> f64 {
        0.5 * (self.ell0 + self.sum)
    }

    fn radius(&self, safety: f64) -> f64 {
        let c = safety * self.max_delta;
        let tail = c * 0.25f64.powi(self.steps as i32) / 6.0;
        let rounding = 64.0 * f64::EPSILON * (self.ell0.abs() + self.abs_sum + self.log_magnitude);
        tail + rounding
    }
}

impl EllipticCurve {
    pub fn canonical_height(&self, p: &CurvePoint, tol: f64) -> Result<CanonicalHeightValue> {
        self.canonical_height_with(p, tol, &CanonicalHeightOptions::default())
    }

    pub fn canonical_height_with(
        &self,
        p: &CurvePoint,
        tol: f64,
        opts: &CanonicalHeightOptions,
    ) -> Result<CanonicalHeightValue> {
        if !(tol > 0.0) {
            return Err(Error::InvalidSchedule(format!("tolerance must be positive, got {tol}")));
        }
        self.check(p)?;
        let x = match p {
            CurvePoint::Infinity => {
                return Ok(CanonicalHeightValue {
                    value: 0.0,
                    error_radius: 0.0,
                    iterations: 0,
                })
            }
            CurvePoint::Affine { x, .. } => x,
        };
        let model = self.integral_model();
        let mut x = x * BigRational::from_integer(model.u2.clone());
        let mut series = Series::new(ln_max(&x));
        let mut seen = vec![x.clone()];

        let finish = |series: &Series| CanonicalHeightValue {
            value: series.value(),
            error_radius: series.radius(opts.safety_factor),
            iterations: series.steps,
        };

        // Exact phase: also detects torsion, whose doubling orbit is finite.
        while x.numer().bits() + x.denom().bits() <= EXACT_BIT_LIMIT {
            if series.steps >= opts.max_iterations {
                return Err(not_converged(p, &series, opts));
            }
            let Some(next) = exact_double_x(&model, &x) else {
                return Ok(torsion_zero(series.steps + 1));
            };
            if seen.contains(&next) {
                return Ok(torsion_zero(series.steps + 1));
            }
            let (l0, l1) = (ln_max(&x), ln_max(&next));
            series.push(l1 - 4.0 * l0, l1 + 4.0 * l0);
            seen.push(next.clone());
            x = next;
            if series.steps >= opts.min_iterations && series.radius(opts.safety_factor) <= tol {
                return Ok(finish(&series));
            }
        }

        // Residue phase.
        let mut state = ResidueState::new(&model, &x, opts.max_iterations)?;
        loop {
            if series.steps >= opts.min_iterations && series.radius(opts.safety_factor) <= tol {
                return Ok(finish(&series));
            }
            if series.steps >= opts.max_iterations {
                return Err(not_converged(p, &series, opts));
            }
            let (delta, magnitude) = state.step().ok_or_else(|| {
                Error::ConvergenceFailure(format!(
                    "floating orbit of {p} left the finite range after {} doublings",
                    series.steps
                ))
            })?;
            series.push(delta, magnitude);
        }
    }

    /// `⟨P, Q⟩ = ½(ĥ(P+Q) − ĥ(P) − ĥ(Q))`; exactly 0 when either point is
    /// certified torsion.
    pub fn pairing(&self, p: &CurvePoint, q: &CurvePoint, tol: f64) -> Result<f64> {
        let hp = self.canonical_height(p, tol)?;
        if hp.is_certified_zero() {
            self.check(q)?;
            return Ok(0.0);
        }
        let hq = self.canonical_height(q, tol)?;
        if hq.is_certified_zero() {
            return Ok(0.0);
        }
        let hpq = self.canonical_height(&self.add(p, q), tol)?;
        Ok(0.5 * (hpq.value - hp.value - hq.value))
    }

    pub fn is_torsion(&self, p: &CurvePoint, tol: f64) -> Result<TorsionCertificate> {
        let height = self.canonical_height(p, tol)?;
        if height.value > tol {
            return Ok(TorsionCertificate {
                is_torsion: false,
                order: None,
                height,
            });
        }
        let mut acc = p.clone();
        for n in 1..=TORSION_ORDER_BOUND {
            if acc.is_infinity() {
                return Ok(TorsionCertificate {
                    is_torsion: true,
                    order: Some(n),
                    height,
                });
            }
            acc = self.add(&acc, p);
        }
        Err(Error::Inconclusive(format!(
            "canonical height of {p} is {} <= {tol} but no n <= {TORSION_ORDER_BOUND} has n·P = O",
            height.value
        )))
    }
}

fn torsion_zero(iterations: u32) -> CanonicalHeightValue {
    CanonicalHeightValue {
        value: 0.0,
        error_radius: 0.0,
        iterations,
    }
}

fn not_converged(p: &CurvePoint, series: &Series, opts: &CanonicalHeightOptions) -> Error {
    Error::ConvergenceFailure(format!(
        "tail bound for {p} still {:.3e} after {} doublings",
        series.radius(opts.safety_factor),
        opts.max_iterations
    ))
}

fn ln_max(x: &BigRational) -> f64 {
    let n = x.numer().abs();
    let m = if &n > x.denom() { n } else { x.denom().clone() };
    ln_bigint(&m)
}

/// `x(2R)` from `x(R)` on `y² = x³ + Ax + B`; `None` when `2R = O`.
fn exact_double_x(model: &IntegralModel, x: &BigRational) -> Option<BigRational> {
    let a = BigRational::from_integer(model.a.clone());
    let b = BigRational::from_integer(model.b.clone());
    let x2 = x * x;
    let psi = (&x2 * x + &a * x + &b) * BigRational::from_integer(4.into());
    if psi.is_zero() {
        return None;
    }
    let phi = &x2 * &x2 - BigRational::from_integer(2.into()) * &a * &x2
        - BigRational::from_integer(8.into()) * &b * x
        + &a * &a;
    Some(phi / psi)
}

/// Real value of the orbit point plus its homogeneous coordinates modulo `n`.
struct ResidueState {
    a: BigInt,
    b: BigInt,
    a_f: f64,
    b_f: f64,
    x: f64,
    num: BigInt,
    den: BigInt,
    modulus: BigInt,
}

impl ResidueState {
    fn new(model: &IntegralModel, x: &BigRational, max_iterations: u32) -> Result<Self> {
        let a = model.a.clone();
        let b = model.b.clone();
        // Homogeneous resultant of the duplication pair is 256(4A^3 + 27B^2)^2.
        let d = BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b;
        let res = BigInt::from(256) * &d * &d;
        let base = BigInt::from(256) * res.abs();
        let modulus = num_traits::pow(base, max_iterations as usize + 2);
        let xf = rational_to_f64(x);
        if !xf.is_finite() {
            return Err(Error::ConvergenceFailure(format!(
                "x-coordinate {x} is outside the floating range"
            )));
        }
        Ok(ResidueState {
            a_f: a.to_f64().unwrap_or(f64::INFINITY),
            b_f: b.to_f64().unwrap_or(f64::INFINITY),
            num: x.numer().mod_floor(&modulus),
            den: x.denom().mod_floor(&modulus),
            a,
            b,
            x: xf,
            modulus,
        })
    }

    /// Advances one doubling and returns `(δ, magnitude)`.
    fn step(&mut self) -> Option<(f64, f64)> {
        let (u, v, n) = (&self.num, &self.den, &self.modulus);
        let u2 = (u * u) % n;
        let v2 = (v * v) % n;
        let uv = (u * v) % n;
        let phi = (&u2 * &u2 - BigInt::from(2) * &self.a * &u2 % n * &v2
            - BigInt::from(8) * &self.b * &uv % n * &v2
            + &self.a * &self.a % n * &v2 % n * &v2)
            .mod_floor(n);
        let psi = (BigInt::from(4) * v
            * ((&u2 * u + &self.a * &uv % n * v + &self.b * &v2 % n * v) % n))
            .mod_floor(n);
        let g = phi.gcd(&psi).gcd(n);
        if &g == n {
            return None;
        }
        let next_modulus = n / &g;
        self.num = (phi / &g).mod_floor(&next_modulus);
        self.den = (psi / &g).mod_floor(&next_modulus);
        self.modulus = next_modulus;

        let (ln_psi, next_x) = float_double(self.x, self.a_f, self.b_f)?;
        let ln_g = ln_bigint(&g);
        let big_x = self.x.abs().ln().max(0.0);
        let big_next = next_x.abs().ln().max(0.0);
        let delta = std::f64::consts::LN_2 * 2.0 + ln_psi - ln_g + big_next - 4.0 * big_x;
        let magnitude = ln_psi.abs() + ln_g + big_next + 4.0 * big_x;
        self.x = next_x;
        Some((delta, magnitude))
    }
}

/// `(ln|x³ + ax + b|, x(2R))` in floating point, rescaled for large `|x|`.
fn float_double(x: f64, a: f64, b: f64) -> Option<(f64, f64)> {
    if !x.is_finite() || !a.is_finite() || !b.is_finite() {
        return None;
    }
    let (ln_psi, next) = if x.abs() > 1e40 {
        let r = 1.0 / x;
        let r2 = r * r;
        let s = 1.0 + a * r2 + b * r2 * r;
        let t = 1.0 - 2.0 * a * r2 - 8.0 * b * r2 * r + a * a * r2 * r2;
        (3.0 * x.abs().ln() + s.abs().ln(), x * t / (4.0 * s))
    } else {
        let psi = x * x * x + a * x + b;
        let phi = x * x * x * x - 2.0 * a * x * x - 8.0 * b * x + a * a;
        (psi.abs().ln(), phi / (4.0 * psi))
    };
    if ln_psi.is_finite() && next.is_finite() {
        Some((ln_psi, next))
    } else {
        None
    }
}
