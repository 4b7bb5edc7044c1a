use slopekit::cone::Interval;
use slopekit::criteria::CriteriaConfig;
use slopekit::setval::*;
use slopekit::slopes::Settings;
use slopekit::{Combiner, ExtReal, FiniteMetricSpace, Grid, NormKind, RadiusSchedule, Vector};

fn fx_settings() -> Settings {
    mapping_fixture("identity-mapping").unwrap().settings()
}

fn mapping(name: &str) -> LineMapping {
    mapping_fixture(name).unwrap().mapping().unwrap()
}

fn graph_index(f: &LineMapping, x: f64, y: f64) -> usize {
    (0..f.len())
        .find(|&k| {
            let (px, py) = &f.induced.points[k];
            (px.get(0) - x).abs() < 1e-12 && (py.get(0) - y).abs() < 1e-12
        })
        .unwrap()
}

#[test]
fn subregularity_constants_of_fixtures() {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping().unwrap();
        let sr = subregularity_constant(&f, &s).unwrap();
        println!("{}: {:?}", fx.name, sr.per_radius);
        if fx.subregularity > 0.0 {
            assert!((sr.reported.value() - fx.subregularity).abs() < 1e-9, "{}", fx.name);
        } else {
            assert!(sr.reported.value() < 0.01, "{}", fx.name);
        }
    }
}

#[test]
fn coderivatives() {
    let id = mapping("identity-mapping");
    let k = graph_index(&id, 0.5, 0.5);
    assert_eq!(coderivative(&id, k, 1.0).unwrap(), Some(Interval { lo: 1.0, hi: 1.0 }));
    let half = mapping("halfline-mapping");
    let interior = graph_index(&half, 0.0, 0.5);
    assert_eq!(coderivative(&half, interior, 1.0).unwrap(), None);
    assert_eq!(coderivative(&half, interior, 0.0).unwrap(), Some(Interval { lo: 0.0, hi: 0.0 }));
    let boundary = graph_index(&half, 0.5, 0.5);
    assert_eq!(coderivative(&half, boundary, 1.0).unwrap(), Some(Interval { lo: 1.0, hi: 1.0 }));
    assert_eq!(coderivative(&half, boundary, -1.0).unwrap(), None);
    let par = mapping("parabola-mapping");
    let k = graph_index(&par, 0.5, 0.25);
    let d = coderivative(&par, k, 1.0).unwrap().unwrap();
    assert!((d.lo - 1.0).abs() < 1e-12 && (d.hi - 1.0).abs() < 1e-12);
}

#[test]
fn subdifferential_slopes_of_identity() {
    let id = mapping("identity-mapping");
    let k = graph_index(&id, 0.5, 0.5);
    let v = f_subdiff_rho_slope(&id, k, 0.1).unwrap();
    assert!((v.value() - 0.9).abs() < 1e-12);
    let a = f_approx_subdiff_rho_slope(&id, k, 0.1, VGrid::at(0.1)).unwrap();
    assert!(a.value() <= v.value() + 1e-12);
    let base = id.induced.base;
    assert!(f_subdiff_rho_slope(&id, base, 0.1).is_err());
    let (strict, cov) = f_strict_subdiff_slope(&id, &fx_settings()).unwrap();
    assert!((strict.reported.value() - 1.0).abs() < 0.05, "{:?}", strict.per_radius);
    assert_eq!(cov.skipped, 0);
}

#[test]
fn limit_set_test() {
    let s = fx_settings();
    for (name, excluded) in [("identity-mapping", true), ("halfline-mapping", true), ("parabola-mapping", false)] {
        let fx = mapping_fixture(name).unwrap();
        let r = gfrerer_limit_test(fx.oracle.as_ref(), fx.base, &s.schedule, 2, LimitSetParams::default()).unwrap();
        assert_eq!(r.excludes_origin, excluded, "{name}: {:?}", r.witnesses);
        assert!(!r.exhausted);
    }
}

#[test]
fn limit_set_test_implies_dual_criterion() {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let r = gfrerer_limit_test(fx.oracle.as_ref(), fx.base, &s.schedule, 2, LimitSetParams::default()).unwrap();
        if r.excludes_origin {
            let f = fx.mapping().unwrap();
            let (g, _) = f_max_approx_ratio(&f, &s).unwrap();
            assert!(g.reported.value() > CriteriaConfig::GRID_ZERO_FLOOR, "{}", fx.name);
        }
    }
}

#[test]
fn verdicts() {
    let s = fx_settings();
    let v = subregularity_verdict(&mapping("identity-mapping"), CriteriaConfig::new(0.5), &s).unwrap();
    for c in &v.conditions {
        assert_eq!(c.holds, Some(true), "identity ({}) = {:?}", c.label, c.value);
    }
    let v = subregularity_verdict(&mapping("parabola-mapping"), CriteriaConfig::new(0.25), &s).unwrap();
    assert_eq!(v.holds('a'), Some(false));
    assert_eq!(v.holds('b'), Some(false));
    let half = mapping("halfline-mapping");
    let v = subregularity_verdict(&half, CriteriaConfig::new(0.5), &s).unwrap();
    let sr = v.condition('a').value.unwrap().value();
    let h = v.condition('h').value.unwrap().value();
    assert!((h - sr).abs() < 0.05, "{h} vs {sr}");
}

#[test]
fn primal_slopes_bound_subregularity() {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping().unwrap();
        let sr = subregularity_constant(&f, &s).unwrap();
        let us = f_uniform_strict_slope(&f, &s, Combiner::Max).unwrap();
        let st = f_strict_slope(&f, &s, Combiner::Max).unwrap();
        assert!(st.reported.value() <= us.reported.value() + 1e-9, "{}", fx.name);
        assert!((us.reported.value() - sr.reported.value()).abs() < 0.05, "{}", fx.name);
    }
}

#[test]
fn induced_and_coderivative_rho_slopes_agree() {
    use slopekit::slopes2::subdiff_rho_slope;
    for fx in mapping_fixtures() {
        let f = fx.mapping().unwrap();
        for k in (0..f.len()).step_by(7) {
            if f.offset(k) == 0.0 || f.offset(k).abs() > 0.9 {
                continue;
            }
            for rho in [0.3, 2.5] {
                let a = subdiff_rho_slope(&f.induced, k, rho).unwrap();
                let b = f_subdiff_rho_slope(&f, k, rho).unwrap();
                assert!(a == b || (a.value() - b.value()).abs() < 1e-9, "{} at {k}, rho {rho}: {a} vs {b}", fx.name);
            }
        }
    }
}

fn relation() -> (SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace>, f64) {
    let xs: Vec<Vector> = [0.0, 1.0, 2.0, 3.5].iter().map(|&t| Vector::scalar(t)).collect();
    let ys: Vec<Vector> = [0.0, 0.5, 2.0].iter().map(|&t| Vector::scalar(t)).collect();
    let left = FiniteMetricSpace::from_points(&xs, NormKind::L2).unwrap();
    let right = FiniteMetricSpace::from_points(&ys, NormKind::L2).unwrap();
    let pairs = [(0, 0), (1, 1), (2, 1), (2, 2), (3, 2)];
    // x = 1: 0.5/1, x = 2: 0.5/2, x = 3.5: 2/3.5
    (SetValuedMapping::finite(left, right, &pairs, (0, 0)).unwrap(), 0.25)
}

#[test]
fn finite_relation_duality() {
    let (f, tau) = relation();
    let sr = global_subregularity_ratio(&f);
    assert!((sr.value() - tau).abs() < 1e-12);
    let kappa = global_calmness_constant(&f.inverse().unwrap());
    assert!((kappa.value() - 1.0 / tau).abs() < 1e-12);
    let v = subregularity_verdict_primal(&f, CriteriaConfig::new(0.1), &fx_settings()).unwrap();
    assert_eq!(v.condition('f').value, None);
}

#[test]
fn empty_image_is_infinite() {
    let xs: Vec<Vector> = [0.0, 1.0].iter().map(|&t| Vector::scalar(t)).collect();
    let space = FiniteMetricSpace::from_points(&xs, NormKind::L2).unwrap();
    let f = SetValuedMapping::finite(space.clone(), space, &[(0, 0)], (0, 0)).unwrap();
    assert_eq!(global_subregularity_ratio(&f), ExtReal::INFINITY);
    assert_eq!(global_calmness_constant(&f.inverse().unwrap()), ExtReal::ZERO);
    let s = Settings::with_schedule(RadiusSchedule::new(2.0, 0.5, 2).unwrap());
    assert_eq!(subregularity_constant(&f, &s).unwrap().reported, ExtReal::INFINITY);
    let _ = Grid::new(1, 0.0, 1.0, 0.5).unwrap();
}

#[test]
fn approximate_slopes_are_below_exact_ones() {
    use slopekit::slopes2::strict_outer_subdiff_slope2;
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping().unwrap();
        for k in 0..f.len() {
            if f.offset(k) == 0.0 {
                continue;
            }
            for rho in [0.5, 0.1, 0.01] {
                let a = f_approx_subdiff_rho_slope(&f, k, rho, VGrid::at(rho)).unwrap();
                let e = f_subdiff_rho_slope(&f, k, rho).unwrap();
                assert!(a.value() <= e.value() + 1e-12, "{} at {k}", fx.name);
            }
        }
        let (a, _) = f_approx_strict_subdiff_slope(&f, &s).unwrap();
        let (e, _) = f_strict_subdiff_slope(&f, &s).unwrap();
        let (induced, _) = strict_outer_subdiff_slope2(&f.induced, &s).unwrap();
        for (((_, a), (_, e)), (_, i)) in a.per_radius.iter().zip(&e.per_radius).zip(&induced.per_radius) {
            assert!(a.value() <= e.value() + 1e-12, "{}", fx.name);
            assert!(i.value() >= a.value() - 1e-9, "{}: induced {i} vs approx {a}", fx.name);
        }
    }
}

#[test]
fn convex_graphs_have_strict_subdifferential_slope_equal_to_sr() {
    for name in ["halfline-mapping", "identity-mapping"] {
        let fx = mapping_fixture(name).unwrap();
        let s = fx.settings();
        let f = fx.mapping().unwrap();
        assert!(f.convex);
        let sr = subregularity_constant(&f, &s).unwrap().reported.value();
        let (st, _) = f_strict_subdiff_slope(&f, &s).unwrap();
        assert!((st.reported.value() - sr).abs() <= 0.05 * sr.max(st.reported.value()), "{name}");
    }
}
