use std::f64::consts::{PI, TAU};

use dsm_lab::cycles::{classify, find_attracting_cycle, OrbitType};
use dsm_lab::linearize::{koenigs_value, KoenigsFrame};
use dsm_lab::map::{circle_distance, reflect, PuncturedPlanePoint};
use dsm_lab::qc_model::{chi_eval, conjugated_multiplier, RadialPowerMap};
use dsm_lab::Parameter;
use num_complex::Complex64;
use proptest::prelude::*;

fn parameter() -> impl Strategy<Value = Parameter> {
    (-0.5f64..0.5, 0.0f64..1.0).prop_map(|(a, b)| Parameter::new(a, b).unwrap())
}

fn punctured() -> impl Strategy<Value = Complex64> {
    (0.2f64..5.0, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #[test]
    fn circle_is_invariant(p in parameter(), x in 0.0f64..1.0) {
        let w = p.complex(Complex64::from_polar(1.0, TAU * x)).unwrap();
        prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        let y = w.arg() / TAU;
        prop_assert!(circle_distance(y, p.circle(x)) < 1e-12);
    }

    #[test]
    fn commutes_with_reflection(p in parameter(), z in punctured()) {
        let lhs = p.complex(reflect(PuncturedPlanePoint::new(z).unwrap()).z()).unwrap();
        let rhs = reflect(PuncturedPlanePoint::new(p.complex(z).unwrap()).unwrap()).z();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn lift_has_degree_two(p in parameter(), x in -3.0f64..3.0, n in -4i32..4) {
        let shift = p.lift(x + n as f64) - p.lift(x);
        prop_assert!((shift - 2.0 * n as f64).abs() < 1e-12);
    }

    #[test]
    fn mirror_conjugates_the_step(p in parameter(), x in -0.5f64..0.5) {
        let y = p.mirror().step_centered(-x);
        prop_assert!(circle_distance(y, -p.step_centered(x)) < 1e-14);
    }

    #[test]
    fn critical_points_are_reciprocal(p in (-0.5f64..0.5, 0.05f64..1.0).prop_map(|(a, b)| Parameter::new(a, b).unwrap())) {
        let (c1, c2) = p.critical_points().unwrap();
        prop_assert!((c1 * c2 - 1.0).norm() < 1e-12);
        let d = p.complex_deriv(c1).unwrap();
        prop_assert!(d.norm() < 1e-9 * p.complex(c1).unwrap().norm().max(1.0));
    }

    #[test]
    fn no_attracting_cycle_below_half(a in -0.5f64..0.5, b in 0.0f64..0.5) {
        let p = Parameter::new(a, b).unwrap();
        prop_assert!(!classify(&p, 6).unwrap().is_hyperbolic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_mirror_symmetric(a in -0.5f64..0.5, b in 0.5f64..1.0) {
        let p = Parameter::new(a, b).unwrap();
        let here = classify(&p, 8).unwrap().label();
        let there = classify(&p.mirror(), 8).unwrap().label();
        let expected = here.map(|(q, k)| {
            let t = OrbitType { k, q }.mirrored();
            (t.q, t.k)
        });
        prop_assert_eq!(there, expected);
    }

    #[test]
    fn koenigs_functional_equation(b in 0.55f64..0.97, r in 1e-3f64..2e-2, t in -PI..PI) {
        let p = Parameter::new(0.5, b).unwrap();
        let cycle = find_attracting_cycle(&p, 4, 1e-6).unwrap();
        let frame = KoenigsFrame::new(&p, &cycle).unwrap();
        let z = frame.x_star * (Complex64::new(1.0, 0.0) + Complex64::from_polar(r, t));
        let mut w = z;
        for _ in 0..cycle.period {
            w = p.complex(w).unwrap();
        }
        let lhs = koenigs_value(&frame, w).unwrap();
        let rhs = koenigs_value(&frame, z).unwrap() * frame.lambda;
        prop_assert!((lhs - rhs).norm() <= 1e-7 * rhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn model_map_round_trip(
        l0 in 0.05f64..0.95,
        l1 in 0.05f64..0.95,
        nu0 in 0.05f64..3.1,
        nu1 in 0.05f64..3.1,
        z in punctured(),
    ) {
        let m = RadialPowerMap::between(l0, nu0, l1, nu1).unwrap();
        let w = chi_eval(&m, z);
        prop_assert!((m.invert(w) - z).norm() < 1e-10 * z.norm().max(1.0));
        prop_assert!((chi_eval(&m, z.conj()) - w.conj()).norm() < 1e-12 * w.norm().max(1.0));
        prop_assert!((conjugated_multiplier(&m, l0).unwrap() - l1).abs() < 1e-12);
        let inv = m.inverse();
        prop_assert!((chi_eval(&inv, w) - z).norm() < 1e-10 * z.norm().max(1.0));
    }
}
