use heightlab::geometry::{
    intersect, is_ample, is_effective, is_nef, is_pseudo_effective, numerically_equivalent,
    restriction_degree, zariski_decompose, BlowupP2, DivisorClass, Model, P1xP1,
    ProjectiveSpace,
};
use num_rational::BigRational;
use num_traits::Zero;

// Closed-form cones, written from the intersection numbers rather than the
// lattice code. p1xp1: D=(a,b) meets the fibers in b and a. blowup_p2:
// D=aH+bE meets E in -b and the strict transform of a line through the
// center in a+b; E and that line span the effective cone.
fn product_oracle(a: i64, b: i64) -> (bool, bool, bool) {
    (a > 0 && b > 0, a >= 0 && b >= 0, a >= 0 && b >= 0)
}

fn blowup_oracle(a: i64, b: i64) -> (bool, bool, bool) {
    (-b > 0 && a + b > 0, -b >= 0 && a + b >= 0, a >= 0 && a + b >= 0)
}

fn grid() -> impl Iterator<Item = (i64, i64)> {
    (-5..=5).flat_map(|a| (-5..=5).map(move |b| (a, b)))
}

#[test]
fn surface_cones_match_closed_forms() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    let cases: [(&dyn Model, fn(i64, i64) -> (bool, bool, bool)); 2] =
        [(&product, product_oracle), (&blowup, blowup_oracle)];
    for (model, oracle) in cases {
        for (a, b) in grid() {
            let d = DivisorClass::new(model.name(), vec![a, b]);
            let got = (
                is_ample(model, &d).unwrap(),
                is_nef(model, &d).unwrap(),
                is_pseudo_effective(model, &d).unwrap(),
            );
            assert_eq!(got, oracle(a, b), "{} ({a},{b})", model.name());
        }
    }
}

#[test]
fn cone_chain_holds_on_grid() {
    let models: Vec<Box<dyn Model>> = vec![
        Box::new(ProjectiveSpace::new(1).unwrap()),
        Box::new(ProjectiveSpace::new(2).unwrap()),
        Box::new(ProjectiveSpace::new(3).unwrap()),
        Box::new(P1xP1::new()),
        Box::new(BlowupP2::new()),
    ];
    for m in &models {
        let vectors: Vec<Vec<i64>> = if m.lattice().rank() == 1 {
            (-5..=5).map(|a| vec![a]).collect()
        } else {
            grid().map(|(a, b)| vec![a, b]).collect()
        };
        for v in vectors {
            let d = DivisorClass::new(m.name(), v);
            let m = m.as_ref();
            let (amp, nef, pe) = (
                is_ample(m, &d).unwrap(),
                is_nef(m, &d).unwrap(),
                is_pseudo_effective(m, &d).unwrap(),
            );
            assert!(!amp || nef, "{d}");
            assert!(!nef || pe, "{d}");
            assert!(!is_effective(m, &d).unwrap() || pe, "{d}");
        }
    }
}

fn ample_grid(model: &dyn Model) -> Vec<DivisorClass> {
    grid()
        .map(|(a, b)| DivisorClass::new(model.name(), vec![a, b]))
        .filter(|d| is_ample(model, d).unwrap())
        .collect()
}

#[test]
fn multiples_of_an_ample_class_dominate() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    for (model, oracle) in [
        (&product as &dyn Model, product_oracle as fn(i64, i64) -> _),
        (&blowup, blowup_oracle),
    ] {
        let amples = ample_grid(model);
        assert!(!amples.is_empty());
        for d1 in &amples {
            for d2 in &amples {
                let m = (1..=64)
                    .find(|&m| {
                        let diff = model.combine(&[(m, d1), (-1, d2)]).unwrap();
                        is_ample(model, &diff).unwrap()
                    })
                    .unwrap_or_else(|| panic!("no m <= 64 for {d1}, {d2}"));
                let v = model.combine(&[(m, d1), (-1, d2)]).unwrap();
                assert!(oracle(v.vector()[0], v.vector()[1]).0);
            }
        }
    }
}

#[test]
fn zariski_decomposition_on_blowup() {
    let m = BlowupP2::new();
    let e = DivisorClass::new("blowup_p2", vec![0, 1]);
    for (a, b) in grid() {
        let d = DivisorClass::new("blowup_p2", vec![a, b]);
        let Ok(z) = zariski_decompose(&m, &d) else {
            assert!(!blowup_oracle(a, b).2, "{d} should decompose");
            continue;
        };
        assert!(blowup_oracle(a, b).2);
        let q = |n: i64| BigRational::from_integer(n.into());
        for i in 0..2 {
            assert_eq!(&z.positive.vector[i] + &z.negative.vector[i], q(d.vector()[i]));
        }
        // Closed form: the negative part is b·E when D·E < 0.
        let expected_n = if b > 0 { b } else { 0 };
        assert_eq!(z.negative.vector, vec![q(0), q(expected_n)]);
        assert!(m.lattice().is_nef(&z.positive.vector));
        assert!(m.lattice().is_pseudo_effective(&z.negative.vector));
        if !z.negative.vector.iter().all(Zero::is_zero) {
            assert!(m.lattice().pair(&z.positive.vector, &e.q_vector()).is_zero());
        }
    }
}

#[test]
fn numerical_equivalence_is_pairing_with_named_curves() {
    let product = P1xP1::new();
    let blowup = BlowupP2::new();
    for model in [&product as &dyn Model, &blowup] {
        let small: Vec<(i64, i64)> = (-2..=2).flat_map(|a| (-2..=2).map(move |b| (a, b))).collect();
        for &(a1, b1) in &small {
            for &(a2, b2) in &small {
                let d1 = DivisorClass::new(model.name(), vec![a1, b1]);
                let d2 = DivisorClass::new(model.name(), vec![a2, b2]);
                let diff = model.combine(&[(1, &d1), (-1, &d2)]).unwrap();
                let trivial = model
                    .curves()
                    .iter()
                    .all(|c| restriction_degree(model, &diff, c.name).unwrap().is_zero());
                assert_eq!(numerically_equivalent(model, &d1, &d2).unwrap(), trivial);
                let paired = model.curves().iter().all(|c| {
                    let cc = DivisorClass::new(model.name(), c.class.clone());
                    intersect(model, &diff, &cc).unwrap().is_zero()
                });
                assert_eq!(paired, trivial);
            }
        }
    }
}
