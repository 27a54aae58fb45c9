//! Elliptic curves in short Weierstrass form over Q.

mod canonical;
mod config;
mod curve;

pub use canonical::{CanonicalHeightOptions, CanonicalHeightValue, TorsionCertificate};
pub use config::{load_curve_config, parse_curve_config};
pub use curve::{BoxPoints, CurvePoint, EllipticCurve};
