use std::sync::Arc;

use anyhow::{bail, Context, Result};
use heightlab::elliptic::{load_curve_config, CurvePoint, EllipticCurve};
use heightlab::estimator::{
    boundedness_probe, classify_empirical, count_points, enumerate_points, exact_label,
    height_samples, mu_estimate, mu_samples, numeric_equiv_empirical, EmpiricalLabel,
    MapRegistry, ProbeOptions, Region, SampleRow, SampleSchedule,
};
use heightlab::geometry::{
    is_ample, is_effective, is_nef, is_pseudo_effective, DivisorClass, Model, ModelParams,
    ModelRegistry,
};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::output::{fmt_float, to_csv, to_json, trace_csv, write_text};

/// Listing more points than this needs `--count-only`.
const MAX_LISTED_POINTS: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn render<T: Serialize>(command: &str, cfg: &RunConfig, body: T, csv: impl FnOnce(&T) -> Result<String>) -> Result<String> {
    match cfg.format {
        Format::Json => to_json(&Report {
            tool: "heightlab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: cfg,
            body,
        }),
        Format::Csv => csv(&body),
    }
}

struct Setup {
    model: Arc<dyn Model>,
    region: Region,
    schedule: SampleSchedule,
    bound: u64,
    tol: f64,
}

fn load_curve(cfg: &RunConfig) -> Result<Option<EllipticCurve>> {
    cfg.curve
        .as_deref()
        .map(|p| load_curve_config(p).with_context(|| format!("loading curve {}", p.display())))
        .transpose()
}

fn build_model(name: &str, cfg: &RunConfig) -> Result<Arc<dyn Model>> {
    let params = ModelParams {
        curve: if name == "elliptic" { load_curve(cfg)? } else { None },
        noise: cfg.noise,
        ..Default::default()
    };
    Ok(ModelRegistry::with_defaults().build(name, &params)?)
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let model = build_model(cfg.model.as_deref().expect("resolved"), cfg)?;
    let region = Region::new(model.as_ref(), &cfg.exclude)?;
    let schedule = SampleSchedule {
        height_bound: cfg.height_bound,
        window_count: cfg.windows,
        min_threshold: cfg.min_threshold,
    };
    schedule.validate()?;
    Ok(Setup {
        model,
        region,
        schedule,
        bound: cfg.bound.expect("resolved"),
        tol: cfg.tol.expect("resolved"),
    })
}

fn divisor(model: &dyn Model, vector: Option<&str>, point: Option<&str>, flag: &str) -> Result<DivisorClass> {
    let v = vector.with_context(|| format!("missing --{flag}"))?;
    model
        .parse_divisor(v, point)
        .with_context(|| format!("parsing --{flag} {v}"))
}

fn ample(s: &Setup, cfg: &RunConfig) -> Result<DivisorClass> {
    divisor(s.model.as_ref(), cfg.ample.as_deref(), None, "ample")
}

fn write_plot_data(cfg: &RunConfig, rows: &[SampleRow], abs: bool, ratio: bool) -> Result<()> {
    let Some(path) = cfg.emit_plot_data.as_deref() else {
        return Ok(());
    };
    let (header, second) = if ratio { ("h_d", "ratio") } else { ("h_ample", "h_d") };
    let body: Vec<Vec<String>> = rows
        .iter()
        .filter(|r| !ratio || r.heights[0] >= cfg.min_threshold)
        .map(|r| {
            let mut y = if ratio { r.heights[1] / r.heights[0] } else { r.heights[1] };
            if abs {
                y = y.abs();
            }
            vec![fmt_float(r.heights[0]), fmt_float(y), r.count.to_string(), r.witness.to_string()]
        })
        .collect();
    write_text(&to_csv(&[header, second, "count", "point"], &body)?, Some(path))
}

#[derive(Serialize)]
struct WindowTrace {
    thresholds: Vec<f64>,
    per_window_min: Vec<f64>,
    per_window_max: Vec<f64>,
    per_window_samples: Vec<u64>,
}

impl WindowTrace {
    fn csv(&self) -> Result<String> {
        trace_csv(&self.thresholds, &self.per_window_min, &self.per_window_max, &self.per_window_samples)
    }
}

#[derive(Serialize)]
struct ExactVerdict {
    ample: bool,
    nef: bool,
    pseudo_effective: bool,
    effective: bool,
    label: &'static str,
}

#[derive(Serialize)]
struct FlimBody {
    model: String,
    #[serde(rename = "E")]
    e: String,
    #[serde(rename = "D")]
    d: String,
    region: Region,
    schedule: SampleSchedule,
    coordinate_bound: u64,
    #[serde(flatten)]
    trace: WindowTrace,
    estimate: f64,
    sample_count: u64,
    min_witness: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactVerdict>,
    /// What the empirical verdict is compared with: the nef cone on the
    /// whole variety, pseudo-effectivity on a punctured region.
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
}

fn flim_like(cfg: &RunConfig, command: &str) -> Result<Outcome> {
    let s = setup(cfg)?;
    let m = s.model.as_ref();
    let e = divisor(m, cfg.divisor.as_deref(), cfg.point.as_deref(), "divisor")?;
    let d = ample(&s, cfg)?;
    let c = classify_empirical(m, &e, &d, &s.region, &s.schedule, s.bound, s.tol)?;
    if cfg.emit_plot_data.is_some() {
        let rows = height_samples(m, &s.region, s.bound, &[&d, &e])?;
        write_plot_data(cfg, &rows, false, true)?;
    }
    let f = &c.estimate;
    let mut body = FlimBody {
        model: m.name().to_string(),
        e: e.to_string(),
        d: d.to_string(),
        region: s.region.clone(),
        schedule: s.schedule,
        coordinate_bound: s.bound,
        trace: WindowTrace {
            thresholds: f.thresholds.clone(),
            per_window_min: f.per_window_min.clone(),
            per_window_max: f.per_window_max.clone(),
            per_window_samples: f.per_window_samples.clone(),
        },
        estimate: f.estimate,
        sample_count: f.sample_count,
        min_witness: f.min_witness.to_string(),
        verdict: c.label.as_str(),
        exact: None,
        comparison: None,
        agreement: None,
    };
    let mut code = 0;
    if command == "classify" {
        let pe = is_pseudo_effective(m, &e)?;
        let label = exact_label(m, &e)?;
        body.exact = Some(ExactVerdict {
            ample: is_ample(m, &e)?,
            nef: is_nef(m, &e)?,
            pseudo_effective: pe,
            effective: is_effective(m, &e)?,
            label: label.as_str(),
        });
        let agree = if s.region.is_punctured(m) {
            body.comparison = Some("pseudo_effective_on_region");
            (f.estimate >= -s.tol) == pe
        } else {
            body.comparison = Some("nef_cone");
            c.label == label
        };
        body.agreement = Some(agree);
        code = if c.label == EmpiricalLabel::Indeterminate {
            2
        } else if agree {
            0
        } else {
            3
        };
    }
    let report = render(command, cfg, body, |b| b.trace.csv())?;
    Ok(Outcome { code, report })
}

pub fn classify(cfg: &RunConfig) -> Result<Outcome> {
    flim_like(cfg, "classify")
}

pub fn flim(cfg: &RunConfig) -> Result<Outcome> {
    flim_like(cfg, "flim")
}

#[derive(Serialize)]
struct EquivBody {
    model: String,
    #[serde(rename = "D1")]
    d1: String,
    #[serde(rename = "D2")]
    d2: String,
    #[serde(rename = "D")]
    d: String,
    difference: String,
    region: Region,
    schedule: SampleSchedule,
    coordinate_bound: u64,
    thresholds: Vec<f64>,
    ratio_trace: Vec<f64>,
    min_trace: Vec<f64>,
    per_window_samples: Vec<u64>,
    final_value: f64,
    nonincreasing: bool,
    verdict: &'static str,
    exact_equivalent: bool,
    agreement: bool,
}

pub fn equiv(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let m = s.model.as_ref();
    let d1 = divisor(m, cfg.divisor.as_deref(), cfg.point.as_deref(), "divisor")?;
    let d2 = divisor(m, cfg.versus.as_deref(), cfg.versus_point.as_deref(), "versus")?;
    let d = ample(&s, cfg)?;
    let r = numeric_equiv_empirical(m, &d1, &d2, &d, &s.region, &s.schedule, s.bound, s.tol)?;
    if cfg.emit_plot_data.is_some() {
        let rows = height_samples(m, &s.region, s.bound, &[&d, &r.difference])?;
        write_plot_data(cfg, &rows, true, true)?;
    }
    let body = EquivBody {
        model: m.name().to_string(),
        d1: d1.to_string(),
        d2: d2.to_string(),
        d: d.to_string(),
        difference: r.difference.to_string(),
        region: s.region.clone(),
        schedule: s.schedule,
        coordinate_bound: s.bound,
        thresholds: r.thresholds.clone(),
        ratio_trace: r.ratio_trace.clone(),
        min_trace: r.min_trace.clone(),
        per_window_samples: r.per_window_samples.clone(),
        final_value: r.final_value,
        nonincreasing: r.nonincreasing,
        verdict: if r.equivalent { "equivalent" } else { "not_equivalent" },
        exact_equivalent: r.exact_equivalent,
        agreement: r.agrees(),
    };
    let report = render("equiv", cfg, body, |b| {
        trace_csv(&b.thresholds, &b.min_trace, &b.ratio_trace, &b.per_window_samples)
    })?;
    Ok(Outcome { code: 0, report })
}

#[derive(Serialize)]
struct Band {
    lower: f64,
    upper: Option<f64>,
    samples: u64,
    min_height: f64,
    max_height: f64,
}

#[derive(Serialize)]
struct Witness {
    point: String,
    height: f64,
    reference_height: f64,
}

#[derive(Serialize)]
struct ProbeBody {
    model: String,
    #[serde(rename = "D")]
    d: String,
    ample: String,
    region: Region,
    schedule: SampleSchedule,
    coordinate_bound: u64,
    verdict: &'static str,
    max_height: f64,
    min_height: f64,
    range: f64,
    upper_slope: f64,
    lower_slope: f64,
    finite_sample: bool,
    bands: Vec<Band>,
    witnesses: Vec<Witness>,
}

pub fn probe(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let m = s.model.as_ref();
    let d = divisor(m, cfg.divisor.as_deref(), cfg.point.as_deref(), "divisor")?;
    let a = ample(&s, cfg)?;
    let r = boundedness_probe(m, &d, &a, &s.region, &s.schedule, s.bound, &ProbeOptions::default())?;
    if cfg.emit_plot_data.is_some() {
        let rows = height_samples(m, &s.region, s.bound, &[&a, &d])?;
        write_plot_data(cfg, &rows, false, false)?;
    }
    let code = if r.label == heightlab::estimator::Boundedness::Inconclusive { 2 } else { 0 };
    let body = ProbeBody {
        model: m.name().to_string(),
        d: d.to_string(),
        ample: a.to_string(),
        region: s.region.clone(),
        schedule: s.schedule,
        coordinate_bound: s.bound,
        verdict: r.label.as_str(),
        max_height: r.max_height,
        min_height: r.min_height,
        range: r.range(),
        upper_slope: r.upper_slope,
        lower_slope: r.lower_slope,
        finite_sample: r.finite_sample,
        bands: r
            .bands
            .iter()
            .map(|b| Band {
                lower: b.lower,
                upper: b.upper,
                samples: b.samples,
                min_height: b.min_height,
                max_height: b.max_height,
            })
            .collect(),
        witnesses: r
            .witnesses
            .iter()
            .map(|w| Witness {
                point: w.point.to_string(),
                height: w.height,
                reference_height: w.reference_height,
            })
            .collect(),
    };
    let report = render("probe", cfg, body, |b| {
        let rows: Vec<Vec<String>> = b
            .bands
            .iter()
            .enumerate()
            .map(|(k, band)| {
                vec![
                    (k + 1).to_string(),
                    fmt_float(band.lower),
                    band.upper.map(fmt_float).unwrap_or_default(),
                    fmt_float(band.min_height),
                    fmt_float(band.max_height),
                    band.samples.to_string(),
                ]
            })
            .collect();
        to_csv(&["window", "lower", "upper", "min_height", "max_height", "samples"], &rows)
    })?;
    Ok(Outcome { code, report })
}

#[derive(Serialize)]
struct MuBody {
    map: String,
    source: String,
    target: String,
    #[serde(rename = "D_W")]
    d_w: String,
    #[serde(rename = "D_V")]
    d_v: String,
    pullback: String,
    region: Region,
    schedule: SampleSchedule,
    coordinate_bound: u64,
    #[serde(flatten)]
    trace: WindowTrace,
    value: f64,
    exact_upper_bound: String,
    exact_upper_bound_value: f64,
    within_bound: bool,
    sample_count: u64,
}

pub fn mu(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let source = s.model.as_ref();
    let map = MapRegistry::with_defaults().build(cfg.map.as_deref().expect("resolved"), source.name())?;
    let target = build_model(map.target(), cfg)?;
    let d_w = ample(&s, cfg)?;
    let d_v = divisor(target.as_ref(), cfg.target_ample.as_deref(), None, "target-ample")?;
    let r = mu_estimate(map.as_ref(), source, target.as_ref(), &d_w, &d_v, &s.region, &s.schedule, s.bound, s.tol)?;
    if cfg.emit_plot_data.is_some() {
        let rows = mu_samples(map.as_ref(), source, target.as_ref(), &d_w, &d_v, &s.region, s.bound)?;
        write_plot_data(cfg, &rows, false, true)?;
    }
    let body = MuBody {
        map: r.map.clone(),
        source: source.name().to_string(),
        target: target.name().to_string(),
        d_w: d_w.to_string(),
        d_v: d_v.to_string(),
        pullback: map.pullback(&d_v)?.to_string(),
        region: s.region.clone(),
        schedule: s.schedule,
        coordinate_bound: s.bound,
        trace: WindowTrace {
            thresholds: r.thresholds.clone(),
            per_window_min: r.per_window_min.clone(),
            per_window_max: r.per_window_max.clone(),
            per_window_samples: r.per_window_samples.clone(),
        },
        value: r.value,
        exact_upper_bound: r.exact_upper_bound.to_string(),
        exact_upper_bound_value: heightlab::heights::rational_to_f64(&r.exact_upper_bound),
        within_bound: r.within_bound(),
        sample_count: r.sample_count,
    };
    let report = render("mu", cfg, body, |b| b.trace.csv())?;
    Ok(Outcome { code: 0, report })
}

#[derive(Serialize)]
struct CanonicalBody {
    a: String,
    b: String,
    point: String,
    value: f64,
    error_radius: f64,
    iterations: u32,
    tol: f64,
    certified_zero: bool,
    naive_height: f64,
}

pub fn canonical(cfg: &RunConfig) -> Result<Outcome> {
    let curve = load_curve(cfg)?.expect("resolved");
    let text = cfg.point.as_deref().context("canonical needs --point")?;
    let p: CurvePoint = text.parse().with_context(|| format!("parsing --point {text}"))?;
    let tol = cfg.tol.expect("resolved");
    let h = curve.canonical_height(&p, tol)?;
    let body = CanonicalBody {
        a: curve.a().to_string(),
        b: curve.b().to_string(),
        point: p.to_string(),
        value: h.value,
        error_radius: h.error_radius,
        iterations: h.iterations,
        tol,
        certified_zero: h.is_certified_zero(),
        naive_height: curve.naive_height(&p).value(),
    };
    let report = render("canonical", cfg, body, |b| {
        to_csv(
            &["point", "value", "error_radius", "iterations"],
            &[vec![b.point.clone(), fmt_float(b.value), fmt_float(b.error_radius), b.iterations.to_string()]],
        )
    })?;
    Ok(Outcome { code: 0, report })
}

#[derive(Serialize)]
struct EnumerateBody {
    model: String,
    region: Region,
    coordinate_bound: u64,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<String>>,
}

pub fn enumerate(cfg: &RunConfig) -> Result<Outcome> {
    let model = build_model(cfg.model.as_deref().expect("resolved"), cfg)?;
    let m = model.as_ref();
    let region = Region::new(m, &cfg.exclude)?;
    let bound = cfg.bound.expect("resolved");
    let count = count_points(m, &region, bound)?;
    let points = if cfg.count_only {
        None
    } else {
        if count > MAX_LISTED_POINTS {
            bail!("{count} points at bound {bound}; use --count-only or a smaller --bound");
        }
        Some(enumerate_points(m, &region, bound)?.map(|p| p.to_string()).collect())
    };
    let body = EnumerateBody {
        model: m.name().to_string(),
        region,
        coordinate_bound: bound,
        count,
        points,
    };
    let report = render("enumerate", cfg, body, |b| match &b.points {
        Some(pts) => to_csv(&["point"], &pts.iter().map(|p| vec![p.clone()]).collect::<Vec<_>>()),
        None => to_csv(&["count"], &[vec![b.count.to_string()]]),
    })?;
    Ok(Outcome { code: 0, report })
}
