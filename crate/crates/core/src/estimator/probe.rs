use serde::Serialize;

use super::sampling::{height_samples, resolve_thresholds, SampleRow};
use super::{Region, SampleSchedule};
use crate::error::{Error, Result};
use crate::geometry::{is_ample, DivisorClass, Model, ModelPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    UnboundedAboveAndBelow,
    BoundedBelowOnly,
    BoundedAboveOnly,
    Inconclusive,
}

impl Boundedness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundedness::Bounded => "bounded",
            Boundedness::UnboundedAboveAndBelow => "unbounded_above_and_below",
            Boundedness::BoundedBelowOnly => "bounded_below_only",
            Boundedness::BoundedAboveOnly => "bounded_above_only",
            Boundedness::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Growth of a band envelope, in log units, that counts as unbounded.
    pub growth_margin: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { growth_margin: 1.0 }
    }
}

/// Statistics of `h_D` over points whose reference height lies in
/// `[lower, upper)`; the last band is unbounded above.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStats {
    pub lower: f64,
    pub upper: Option<f64>,
    pub samples: u64,
    pub max_height: f64,
    pub min_height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeWitness {
    pub point: ModelPoint,
    pub height: f64,
    pub reference_height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub label: Boundedness,
    pub bands: Vec<BandStats>,
    pub max_height: f64,
    pub min_height: f64,
    /// Least-squares slopes of the band maxima and minima against the band
    /// lower thresholds.
    pub upper_slope: f64,
    pub lower_slope: f64,
    pub witnesses: Vec<ProbeWitness>,
    /// True when no sampled point reached the first threshold and the
    /// verdict rests on the finite sample alone.
    pub finite_sample: bool,
}

impl ProbeResult {
    pub fn range(&self) -> f64 {
        self.max_height - self.min_height
    }
}

/// Tracks the envelope of `h_D` as the reference height grows. Envelopes
/// that move by more than the growth margin from the first occupied band to
/// the last count as unbounded in that direction.
pub fn boundedness_probe(
    model: &dyn Model,
    d: &DivisorClass,
    d_ample: &DivisorClass,
    region: &Region,
    schedule: &SampleSchedule,
    coordinate_bound: u64,
    opts: &ProbeOptions,
) -> Result<ProbeResult> {
    model.check_class(d)?;
    if !is_ample(model, d_ample)? {
        return Err(Error::RequiresAmple(d_ample.to_string()));
    }
    schedule.validate()?;
    let rows = height_samples(model, region, coordinate_bound, &[d_ample, d])?;
    if rows.is_empty() {
        return Err(Error::Unsupported("the region has no sampled points".into()));
    }

    let reaches = rows.iter().any(|r| r.heights[0] >= schedule.min_threshold);
    if !reaches {
        // A finite set of points: its range is the whole story.
        let (lo, hi) = extremes(rows.iter());
        return Ok(ProbeResult {
            label: Boundedness::Bounded,
            bands: Vec::new(),
            max_height: hi.heights[1],
            min_height: lo.heights[1],
            upper_slope: 0.0,
            lower_slope: 0.0,
            witnesses: vec![witness(hi), witness(lo)],
            finite_sample: true,
        });
    }

    let thresholds = resolve_thresholds(schedule, &rows, 0)?;
    let mut bands = Vec::new();
    for (k, &lower) in thresholds.iter().enumerate() {
        let upper = thresholds.get(k + 1).copied();
        let members: Vec<&SampleRow> = rows
            .iter()
            .filter(|r| r.heights[0] >= lower && upper.is_none_or(|u| r.heights[0] < u))
            .collect();
        if members.is_empty() {
            continue;
        }
        let (lo, hi) = extremes(members.iter().copied());
        bands.push(BandStats {
            lower,
            upper,
            samples: members.iter().map(|r| r.count).sum(),
            max_height: hi.heights[1],
            min_height: lo.heights[1],
        });
    }
    let (lo, hi) = extremes(rows.iter().filter(|r| r.heights[0] >= thresholds[0]));
    let mut result = ProbeResult {
        label: Boundedness::Inconclusive,
        max_height: hi.heights[1],
        min_height: lo.heights[1],
        upper_slope: slope(&bands, |b| b.max_height),
        lower_slope: slope(&bands, |b| b.min_height),
        witnesses: vec![witness(hi), witness(lo)],
        bands,
        finite_sample: false,
    };
    if result.bands.len() < 2 {
        return Ok(result);
    }
    let first = &result.bands[0];
    let last = result.bands.last().expect("two bands");
    let up = last.max_height - first.max_height > opts.growth_margin;
    let down = first.min_height - last.min_height > opts.growth_margin;
    result.label = match (up, down) {
        (true, true) => Boundedness::UnboundedAboveAndBelow,
        (true, false) => Boundedness::BoundedBelowOnly,
        (false, true) => Boundedness::BoundedAboveOnly,
        (false, false) => Boundedness::Bounded,
    };
    Ok(result)
}

fn extremes<'a>(rows: impl Iterator<Item = &'a SampleRow>) -> (&'a SampleRow, &'a SampleRow) {
    let mut lo: Option<&SampleRow> = None;
    let mut hi: Option<&SampleRow> = None;
    for r in rows {
        if lo.is_none_or(|l| r.heights[1] < l.heights[1]) {
            lo = Some(r);
        }
        if hi.is_none_or(|h| r.heights[1] > h.heights[1]) {
            hi = Some(r);
        }
    }
    (lo.expect("nonempty"), hi.expect("nonempty"))
}

fn witness(r: &SampleRow) -> ProbeWitness {
    ProbeWitness {
        point: r.witness.clone(),
        height: r.heights[1],
        reference_height: r.heights[0],
    }
}

fn slope(bands: &[BandStats], f: impl Fn(&BandStats) -> f64) -> f64 {
    let n = bands.len() as f64;
    if bands.len() < 2 {
        return 0.0;
    }
    let mx = bands.iter().map(|b| b.lower).sum::<f64>() / n;
    let my = bands.iter().map(&f).sum::<f64>() / n;
    let sxy: f64 = bands.iter().map(|b| (b.lower - mx) * (f(b) - my)).sum();
    let sxx: f64 = bands.iter().map(|b| (b.lower - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
