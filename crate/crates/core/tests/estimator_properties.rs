use heightlab::elliptic::{CurvePoint, EllipticCurve};
use heightlab::estimator::{
    classify_empirical, exact_label, flim, height_samples, restriction_trace, EmpiricalLabel,
    Region, SampleSchedule,
};
use heightlab::geometry::{
    is_ample, is_pseudo_effective, BlowupP2, DivisorClass, EllipticModel, Model, P1xP1,
    ProjectiveSpace,
};

const TOL: f64 = 0.1;

fn grid(lo: i64, hi: i64) -> Vec<(i64, i64)> {
    (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| (a, b))).collect()
}

fn ample_classes(model: &dyn Model, max: i64) -> Vec<DivisorClass> {
    grid(-max, max)
        .into_iter()
        .map(|(a, b)| DivisorClass::new(model.name(), vec![a, b]))
        .filter(|d| is_ample(model, d).unwrap())
        .collect()
}

fn x3m2() -> EllipticModel {
    let c = EllipticCurve::from_i64(0, -2)
        .unwrap()
        .with_generators(vec![CurvePoint::from_i64(3, 5)])
        .unwrap();
    EllipticModel::new(c, 1e-10)
}

#[test]
fn changelimit_constants_hold_on_samples() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    for model in [&product as &dyn Model, &blowup] {
        let amples = ample_classes(model, 5);
        let region = Region::whole(model);
        for d1 in amples.iter().step_by(3) {
            for d2 in amples.iter().step_by(4) {
                let (m, c) = model.changelimit_constants(d1, d2).unwrap();
                let rows = height_samples(model, &region, 40, &[d1, d2]).unwrap();
                for r in &rows {
                    // Taking T = h_{D1}(P) is the tightest instance.
                    assert!(
                        r.heights[1] >= r.heights[0] / m - c - 1e-12,
                        "{d1} {d2} at {}",
                        r.witness
                    );
                }
            }
        }
    }
    let e = x3m2();
    let degrees = [
        e.parse_divisor("1", Some("O")).unwrap(),
        e.parse_divisor("3", Some("3,5")).unwrap(),
        e.parse_divisor("2,3,-5", None).unwrap(),
    ];
    let region = Region::whole(&e);
    for d1 in &degrees {
        for d2 in &degrees {
            let (m, c) = e.changelimit_constants(d1, d2).unwrap();
            for r in height_samples(&e, &region, 12, &[d1, d2]).unwrap() {
                assert!(r.heights[1] >= r.heights[0] / m - c, "{d1} {d2} at {}", r.witness);
            }
        }
    }
}

#[test]
fn ratios_of_ample_heights_stay_positive() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    for model in [&product as &dyn Model, &blowup] {
        let amples = ample_classes(model, 5);
        let region = Region::whole(model);
        for d1 in &amples {
            for d2 in amples.iter().step_by(2) {
                let f = flim(model, d1, d2, &region, &SampleSchedule::default(), 60).unwrap();
                assert!(f.per_window_max.iter().all(|v| v.is_finite()));
                assert!(f.estimate >= 1.0 / 64.0, "{d1} over {d2}: {}", f.estimate);
            }
        }
    }
}

#[test]
fn restriction_ratio_matches_intersection_numbers() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    let p2 = ProjectiveSpace::new(2).unwrap();
    let cases: [(&dyn Model, Vec<i64>); 3] = [(&product, vec![1, 1]), (&blowup, vec![3, -1]), (&p2, vec![1])];
    for (model, reference) in cases {
        let d = DivisorClass::new(model.name(), reference);
        let es: Vec<DivisorClass> = if model.lattice().rank() == 1 {
            vec![DivisorClass::new(model.name(), vec![-2]), DivisorClass::new(model.name(), vec![3])]
        } else {
            [(2, -1), (0, 1), (-1, 3), (1, -1)]
                .iter()
                .map(|&(a, b)| DivisorClass::new(model.name(), vec![a, b]))
                .collect()
        };
        for curve in model.curves().iter().filter(|c| c.parametrized) {
            for e in &es {
                let r = restriction_trace(model, e, &d, curve.name, &SampleSchedule::default(), 200)
                    .unwrap();
                assert!(
                    r.final_error() <= 0.1,
                    "{} {e} on {}: {} vs {}",
                    model.name(),
                    curve.name,
                    r.final_mean,
                    r.exact_ratio
                );
            }
        }
    }
}

#[test]
fn flim_sign_matches_exact_cones_on_product() {
    let m = P1xP1::new();
    let d = DivisorClass::new("p1xp1", vec![1, 1]);
    let region = Region::whole(&m);
    for (a, b) in grid(-2, 3) {
        let e = DivisorClass::new("p1xp1", vec![a, b]);
        let c = classify_empirical(&m, &e, &d, &region, &SampleSchedule::default(), 80, TOL).unwrap();
        assert!(c.estimate.per_window_min.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(c.label, exact_label(&m, &e).unwrap(), "({a},{b})");
        assert!((c.estimate.estimate - a.min(b) as f64).abs() <= 0.15);
    }
}

#[test]
fn flim_sign_matches_exact_cones_on_projective_spaces() {
    for n in 1..=3 {
        let m = ProjectiveSpace::new(n).unwrap();
        let d = DivisorClass::new(m.name(), vec![1]);
        let bound = if n == 3 { 6 } else { 30 };
        for a in -2..=3 {
            let e = DivisorClass::new(m.name(), vec![a]);
            let c = classify_empirical(&m, &e, &d, &Region::whole(&m), &SampleSchedule::default(), bound, TOL)
                .unwrap();
            assert_eq!(c.label, exact_label(&m, &e).unwrap());
        }
    }
}

/// On the blow-up every region misses E, so the sign of Flim detects pseudo-
/// effectivity rather than nefness.
#[test]
fn punctured_flim_detects_pseudo_effective_classes() {
    let m = BlowupP2::new();
    let d = DivisorClass::new("blowup_p2", vec![3, -1]);
    let region = Region::new(&m, &["E".to_string()]).unwrap();
    for (a, b) in grid(-2, 3) {
        let e = DivisorClass::new("blowup_p2", vec![a, b]);
        let f = flim(&m, &e, &d, &region, &SampleSchedule::default(), 80).unwrap();
        let pe = is_pseudo_effective(&m, &e).unwrap();
        assert_eq!(f.estimate >= -TOL, pe, "({a},{b}): {}", f.estimate);
        if pe {
            let z = heightlab::geometry::zariski_decompose(&m, &e).unwrap();
            assert!(m.lattice().is_nef(&z.positive.vector));
        }
    }
}

#[test]
fn parallel_evaluation_is_deterministic() {
    let m = BlowupP2::new();
    let d = DivisorClass::new("blowup_p2", vec![3, -1]);
    let e = DivisorClass::new("blowup_p2", vec![1, 1]);
    let region = Region::new(&m, &["E".to_string()]).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| flim(&m, &e, &d, &region, &SampleSchedule::default(), 50).unwrap())
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one, many);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&one.per_window_min), bits(&many.per_window_min));
}

#[test]
fn labels_are_ordered_by_strength() {
    let m = P1xP1::new();
    let d = DivisorClass::new("p1xp1", vec![1, 1]);
    let r = Region::whole(&m);
    let label = |a, b| {
        classify_empirical(&m, &DivisorClass::new("p1xp1", vec![a, b]), &d, &r, &SampleSchedule::default(), 40, TOL)
            .unwrap()
            .label
    };
    assert_eq!(label(2, 3), EmpiricalLabel::Ample);
    assert_eq!(label(0, 3), EmpiricalLabel::NefNotAmple);
    assert_eq!(label(-1, 3), EmpiricalLabel::NotNef);
}
