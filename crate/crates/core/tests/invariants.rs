use proptest::prelude::*;
use shadowlab_core::conditions::ConditionReport;
use shadowlab_core::maps::INVERSE_TOL;
use shadowlab_core::pseudo::{generate, validate_errors};
use shadowlab_core::solver::{shadow_1d_constructive, shadow_2d_search, shadow_weighted, verify_shadowing};
use shadowlab_core::*;
use std::collections::BTreeMap;

fn saddle_point() -> impl Strategy<Value = Point2> {
    (-0.3f64..0.3, -0.5f64..0.5).prop_map(|(x, y)| Point2::new(x, y))
}

fn skew_point() -> impl Strategy<Value = Point2> {
    (-0.99f64..0.99, -2.0f64..2.0).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cubic_inverse_roundtrip(x in -1.0f64..1.0) {
        let spec = MapSpec::cubic();
        let back = spec.inverse1(spec.apply1(x), INVERSE_TOL).unwrap();
        prop_assert!((back - x).abs() <= 1e-10);
    }

    #[test]
    fn saddle_inverse_roundtrip(p in saddle_point()) {
        let spec = MapSpec::saddle(1, 1);
        let back = spec.inverse2(spec.apply2(p), INVERSE_TOL).unwrap();
        prop_assert!(back.dist(p) <= 1e-10);
    }

    #[test]
    fn skew_inverse_roundtrip(p in skew_point()) {
        let spec = MapSpec::NonisolatedSkew;
        let back = spec.inverse2(spec.apply2(p), INVERSE_TOL).unwrap();
        prop_assert!(back.dist(p) <= 1e-10);
    }

    #[test]
    fn generated_trajectories_respect_their_budget(seed in any::<u64>(), d in 1e-6f64..1e-2, x0 in -0.3f64..0.3, y0 in -0.3f64..0.3) {
        let spec = MapSpec::saddle(1, 2);
        let t = generate(&spec, Point::Two(Point2::new(x0, y0)), 40, ErrorModel::Uniform { d }, &Neighborhood::new(0.4), seed).unwrap();
        prop_assert!(validate_errors(&spec, &t).unwrap().max_violation <= 1e-15);
        let again = generate(&spec, Point::Two(Point2::new(x0, y0)), 40, ErrorModel::Uniform { d }, &Neighborhood::new(0.4), seed).unwrap();
        prop_assert_eq!(t, again);
    }

    #[test]
    fn weighted_trajectories_respect_their_budget(seed in any::<u64>(), x0 in 0.01f64..0.5, y0 in -0.5f64..0.5) {
        let spec = MapSpec::NonisolatedSkew;
        let t = generate(&spec, Point::Two(Point2::new(x0, y0)), 60, ErrorModel::Weighted { d: 0.005 }, &Neighborhood::excluding_axis(0.9), seed).unwrap();
        prop_assert!(validate_errors(&spec, &t).unwrap().max_violation <= 1e-15);
    }

    #[test]
    fn region_parts_are_consistent(cx in 0.05f64..0.9, cy in -1.0f64..1.0, delta in 1e-4f64..0.05, u in -1.5f64..1.5, v in -1.5f64..1.5, weighted in any::<bool>()) {
        let pair = if weighted { LyapunovPair::WeightedPair } else { LyapunovPair::BoxPair };
        let region = Region::new(Point2::new(cx, cy), delta, pair).unwrap();
        let (hx, hy) = region.half_widths();
        let q = Point2::new(cx + u * hx, cy + v * hy);
        let part = region.classify(q);
        prop_assert!(region.is_in(part, q));
        prop_assert_eq!(part == RegionPart::Outside, !region.contains(q) && !region.is_in(RegionPart::QFace, q) && !region.is_in(RegionPart::RFace, q));
        if region.is_in(RegionPart::IntQFace, q) {
            prop_assert!(region.is_in(RegionPart::QFace, q));
        }
    }

    #[test]
    fn sampled_parts_classify_back(cx in 0.05f64..0.9, cy in -1.0f64..1.0, delta in 1e-4f64..0.05, count in 2usize..40) {
        let region = Region::new(Point2::new(cx, cy), delta, LyapunovPair::WeightedPair).unwrap();
        for part in [RegionPart::QFace, RegionPart::RFace, RegionPart::TCore, RegionPart::IntQFace, RegionPart::Interior] {
            for q in region.sample_part(part, count).unwrap() {
                prop_assert!(region.is_in(part, q), "{:?} {:?}", part, q);
            }
        }
    }

    #[test]
    fn one_d_certificate_is_sound(seed in any::<u64>(), x0 in -0.4f64..0.4, eps in 0.03f64..0.2) {
        let spec = MapSpec::cubic();
        let d = eps * eps * eps / 5.0;
        let t = generate(&spec, Point::One(x0), 60, ErrorModel::Uniform { d }, &Neighborhood::new(0.5), seed).unwrap();
        let res = shadow_1d_constructive(&spec, &t, eps).unwrap();
        prop_assert!(res.found);
        let Some(Certificate::Interval { lo, hi }) = res.certificate else { panic!("interval certificate expected") };
        for i in 0..=10 {
            let r = lo + (hi - lo) * i as f64 / 10.0;
            prop_assert!(verify_shadowing(&spec, &t, Point::One(r), eps * (1.0 + 1e-9)).unwrap().found);
        }
        // found at ε implies found at 2ε
        prop_assert!(shadow_1d_constructive(&spec, &t, 2.0 * eps).unwrap().found);
    }

    #[test]
    fn found_results_reverify(seed in any::<u64>(), d in 1e-5f64..2e-2, x0 in -0.4f64..0.4, eps in 0.02f64..0.2) {
        let spec = MapSpec::cubic();
        let t = generate(&spec, Point::One(x0), 30, ErrorModel::Uniform { d }, &Neighborhood::new(0.5), seed).unwrap();
        let res = shadow_1d_constructive(&spec, &t, eps).unwrap();
        if res.found {
            let again = verify_shadowing(&spec, &t, res.r.unwrap(), eps).unwrap();
            prop_assert!(again.found && again.max_dist <= eps);
            prop_assert!(shadow_1d_constructive(&spec, &t, 2.0 * eps).unwrap().found);
        }
    }

    #[test]
    fn report_merge_commutes(a in -1.0f64..1.0, b in -1.0f64..1.0, wa in -1.0f64..1.0, wb in -1.0f64..1.0) {
        let mk = |m: f64, w: f64| ConditionReport {
            condition: "c".into(), passed: m > 0.0, margin: m, witness: vec![w], samples_used: 3,
            params: BTreeMap::new(), parts: vec![],
        };
        let l = mk(a, wa).merge(mk(b, wb));
        let r = mk(b, wb).merge(mk(a, wa));
        prop_assert_eq!(&l, &r);
        prop_assert_eq!(l.passed, l.margin > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn box_search_results_reverify(seed in any::<u64>(), x0 in -0.05f64..0.05, y0 in -0.05f64..0.05) {
        let spec = MapSpec::saddle(1, 1);
        let t = generate(&spec, Point::Two(Point2::new(x0, y0)), 30, ErrorModel::Uniform { d: 1e-4 }, &Neighborhood::new(0.1), seed).unwrap();
        let res = shadow_2d_search(&spec, &t, 0.01, LyapunovPair::BoxPair, &SearchOptions::default()).unwrap();
        if res.found {
            prop_assert!(verify_shadowing(&spec, &t, res.r.unwrap(), 0.01).unwrap().found);
        }
    }

    #[test]
    fn weighted_solver_is_monotone_in_eps(seed in any::<u64>(), x0 in 0.05f64..0.5, y0 in -0.2f64..0.2) {
        let spec = MapSpec::NonisolatedSkew;
        let eps = 0.05;
        let t = generate(&spec, Point::Two(Point2::new(x0, y0)), 80, ErrorModel::Weighted { d: 0.05 * eps }, &Neighborhood::excluding_axis(0.9), seed).unwrap();
        let res = shadow_weighted(&spec, &t, eps, 4.0).unwrap();
        prop_assert!(res.found);
        prop_assert!(shadow_weighted(&spec, &t, 2.0 * eps, 4.0).unwrap().found);
    }
}
