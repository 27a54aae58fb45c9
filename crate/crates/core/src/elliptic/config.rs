//! Curve config files: `key = value` lines, `#` comments.
//!
//! ```text
//! # y^2 = x^3 - 2
//! a = 0
//! b = -2
//! generators = 3,5
//! torsion = O
//! ```
//!
//! List entries are separated by `;` or whitespace; each entry is `x,y` or `O`.

use std::path::Path;

use super::curve::{parse_rational, CurvePoint, EllipticCurve};
use crate::error::{Error, Result};

const LONG_FORM_KEYS: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

pub fn parse_curve_config(text: &str) -> Result<EllipticCurve> {
    let mut a = None;
    let mut b = None;
    let mut generators = Vec::new();
    let mut torsion = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        match key.as_str() {
            "a" => a = Some(parse_rational(value)?),
            "b" => b = Some(parse_rational(value)?),
            "generators" => generators = parse_point_list(value)?,
            "torsion" => torsion = parse_point_list(value)?,
            k if LONG_FORM_KEYS.contains(&k) => {
                return Err(Error::InvalidCurve(format!(
                    "long Weierstrass coefficient `{k}`: only y^2 = x^3 + a x + b is accepted"
                )))
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }
    let a = a.ok_or_else(|| Error::Parse("missing coefficient `a`".into()))?;
    let b = b.ok_or_else(|| Error::Parse("missing coefficient `b`".into()))?;
    EllipticCurve::new(a, b)?
        .with_generators(generators)?
        .with_torsion(torsion)
}

pub fn load_curve_config(path: &Path) -> Result<EllipticCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_curve_config(&text)
}

fn parse_point_list(value: &str) -> Result<Vec<CurvePoint>> {
    value
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}
