use foliamap::delisle::{build_conic, max_deviation, optimize_standard_parallels, pair_deviation};
use foliamap::fit::{fit_line, line_distance};
use foliamap::projections::PlanePoint;
use foliamap::sphere::sample_meridian;
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..1.4, 0.02f64..0.5).prop_map(|(a, w)| (a, (a + w).min(1.5)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_parallels_are_true_to_scale((a, b) in pair()) {
        let p = build_conic(a, b).unwrap();
        prop_assert!(p.n() > 0.0 && p.n() < 1.0);
        prop_assert!((p.parallel_scale(a).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((p.parallel_scale(b).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(p.apex_latitude() > b);
        // between the standard parallels the map shrinks parallels
        prop_assert!(p.parallel_scale((a + b) / 2.0).unwrap() < 1.0);
    }

    #[test]
    fn meridians_meet_at_the_apex((a, b) in pair(), lon in -2.5f64..2.5) {
        let p = build_conic(a, b).unwrap();
        let spec = p.spec();
        let pts: Vec<PlanePoint<f64>> = sample_meridian(lon, (a - 0.02, b), 64)
            .unwrap()
            .into_iter()
            .map(|q| spec.forward(q).unwrap())
            .collect();
        let f = fit_line(&pts).unwrap();
        prop_assert!(f.max_residual < 1e-10);
        prop_assert!(line_distance(PlanePoint::new(0.0, p.rho1()), f.centroid, f.direction) < 1e-10);
    }

    #[test]
    fn dense_and_analytic_objectives_agree((a, b) in pair()) {
        let p = build_conic(a, b).unwrap();
        let (s, n) = ((a - 0.1).max(0.0), (b + 0.05).min(p.apex_latitude().min(1.55)));
        let dense = max_deviation(&p, s, n).unwrap().value;
        prop_assert!((dense - pair_deviation(a, b, s, n)).abs() < 1e-9);
    }
}

#[test]
fn optimizer_never_loses_to_midpoints() {
    for (s, n) in [(40.0f64, 70.0f64), (10.0, 30.0), (20.0, 80.0), (45.0, 50.0)] {
        let r = optimize_standard_parallels(s.to_radians(), n.to_radians()).unwrap();
        assert!(r.minimax_deviation <= r.midpoint_deviation, "{s}..{n}");
        assert!(r.improvement_ratio >= 1.0);
        assert!(r.phi1_opt < r.phi2_opt);
    }
}
