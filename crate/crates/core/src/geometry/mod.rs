//! Model varieties, their Picard lattices, exact cone tests, and Weil height
//! representatives.

mod blowup;
mod elliptic_model;
mod lattice;
mod model;
mod noise;
pub mod points;
mod product;
mod projective;
mod registry;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub use blowup::BlowupP2;
pub use elliptic_model::EllipticModel;
pub use lattice::{in_cone, to_q, Lattice, QVec};
pub use model::{
    check_exclusions, grouped_profile, parse_vector, DivisorClass, HeightProfile, Model,
    ModelPoint, NamedCurve, ProfileEntry, RationalClass,
};
pub use noise::{NoisyModel, MAX_NOISE_AMPLITUDE};
pub use product::P1xP1;
pub use projective::ProjectiveSpace;
pub use registry::{ModelFactory, ModelParams, ModelRegistry};

use crate::error::{Error, Result};
use crate::heights::HeightValue;

fn same_model(a: &DivisorClass, b: &DivisorClass) -> Result<()> {
    if a.model() != b.model() {
        return Err(Error::ModelMismatch {
            left: a.model().to_string(),
            right: b.model().to_string(),
        });
    }
    Ok(())
}

/// `D1 · D2` on a surface.
pub fn intersect(model: &dyn Model, d1: &DivisorClass, d2: &DivisorClass) -> Result<BigRational> {
    same_model(d1, d2)?;
    model.check_class(d1)?;
    model.check_class(d2)?;
    if !model.has_divisor_pairing() {
        return Err(Error::PairingUndefined(format!(
            "{} (use restriction_degree against a named curve)",
            model.name()
        )));
    }
    Ok(model.lattice().pair(&d1.q_vector(), &d2.q_vector()))
}

/// `D · C` for a named curve `C`.
pub fn restriction_degree(model: &dyn Model, d: &DivisorClass, curve: &str) -> Result<BigRational> {
    model.check_class(d)?;
    let c = model.curve(curve)?;
    Ok(model.lattice().pair(&d.q_vector(), &to_q(&c.class)))
}

/// Interior of the nef cone: strictly positive on the cone of curves, with
/// positive self-intersection.
pub fn is_ample(model: &dyn Model, d: &DivisorClass) -> Result<bool> {
    model.check_class(d)?;
    Ok(model.lattice().is_ample(&d.q_vector()))
}

pub fn is_nef(model: &dyn Model, d: &DivisorClass) -> Result<bool> {
    model.check_class(d)?;
    Ok(model.lattice().is_nef(&d.q_vector()))
}

pub fn is_pseudo_effective(model: &dyn Model, d: &DivisorClass) -> Result<bool> {
    model.check_class(d)?;
    Ok(model.lattice().is_pseudo_effective(&d.q_vector()))
}

pub fn is_effective(model: &dyn Model, d: &DivisorClass) -> Result<bool> {
    model.is_effective(d)
}

/// Equal lattice vectors; the point component is numerically trivial.
pub fn numerically_equivalent(
    model: &dyn Model,
    d1: &DivisorClass,
    d2: &DivisorClass,
) -> Result<bool> {
    same_model(d1, d2)?;
    model.check_class(d1)?;
    model.check_class(d2)?;
    Ok(d1.vector() == d2.vector())
}

pub fn model_height(model: &dyn Model, d: &DivisorClass, p: &model::ModelPoint) -> Result<HeightValue> {
    model.height(d, p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZariskiDecomposition {
    pub positive: RationalClass,
    pub negative: RationalClass,
}

/// `D = P + N` with `P` nef, `N` supported on negative curves, and `P·C = 0`
/// for each curve `C` in the support of `N`.
pub fn zariski_decompose(model: &dyn Model, d: &DivisorClass) -> Result<ZariskiDecomposition> {
    model.check_class(d)?;
    if model.dimension() != 2 {
        return Err(Error::PairingUndefined(model.name().to_string()));
    }
    let lat = model.lattice();
    let v = d.q_vector();
    if !lat.is_pseudo_effective(&v) {
        return Err(Error::NotPseudoEffective(d.to_string()));
    }
    let negative_curves: Vec<QVec> = model
        .curves()
        .iter()
        .map(|c| to_q(&c.class))
        .filter(|c| lat.pair(c, c).is_negative())
        .collect();
    let mut support: Vec<&QVec> = Vec::new();
    let mut n: QVec = vec![BigRational::zero(); v.len()];
    loop {
        let p: QVec = v.iter().zip(&n).map(|(a, b)| a - b).collect();
        let next = negative_curves
            .iter()
            .find(|c| !support.contains(c) && lat.pair(&p, c).is_negative());
        let Some(c) = next else {
            if !lat.is_nef(&p) {
                return Err(Error::Unsupported(format!(
                    "positive part {p:?} of {d} is not nef"
                )));
            }
            return Ok(ZariskiDecomposition {
                positive: RationalClass {
                    model: d.model().to_string(),
                    vector: p,
                },
                negative: RationalClass {
                    model: d.model().to_string(),
                    vector: n,
                },
            });
        };
        if !support.is_empty() {
            return Err(Error::Unsupported(
                "Zariski decomposition with several negative curves".into(),
            ));
        }
        // Solve (D − xC)·C = 0.
        let x = lat.pair(&v, c) / lat.pair(c, c);
        n = c.iter().map(|ci| ci * &x).collect();
        support.push(c);
    }
}
