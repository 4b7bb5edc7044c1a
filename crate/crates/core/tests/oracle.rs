mod common;

use common::probe_strategy;
use proptest::prelude::*;
use slopekit::catalog::function_fixture;
use slopekit::function::Probe;
use slopekit::oracle::*;
use slopekit::slopes::Settings;
use slopekit::{ExtReal, FiniteMetricSpace, RadiusSchedule};

fn chain(values: &[f64]) -> Probe<FiniteMetricSpace> {
    let n = values.len();
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
    let space = FiniteMetricSpace::from_graph(n, &edges).unwrap();
    let base = values.iter().position(|&v| v == 0.0).unwrap();
    Probe::finite(space, values.iter().map(|&v| ExtReal::finite(v)).collect(), base).unwrap()
}

fn wide() -> Settings {
    Settings::with_schedule(RadiusSchedule::new(8.0, 0.5, 6).unwrap())
}

#[test]
fn two_point_space() {
    let p = chain(&[1.0, 0.0]);
    let r = brute_force_all(&p).unwrap();
    assert_eq!(r.points[0].unwrap().nonlocal_slope, ExtReal::finite(1.0));
    assert_eq!(r.er.eval(1.5), ExtReal::finite(1.0));
    assert_eq!(r.er.limit(), ExtReal::INFINITY);
    assert_eq!(sampling_discrepancy(&p, &wide()).unwrap(), 0.0);
}

#[test]
fn zero_function() {
    let p = chain(&[0.0, 0.0, 0.0]);
    let r = brute_force_all(&p).unwrap();
    for e in r.points.iter().flatten() {
        assert_eq!(e.local_slope, ExtReal::ZERO);
        assert_eq!(e.nonlocal_slope, ExtReal::ZERO);
    }
    assert!(r.er.values.iter().all(|v| v.is_infinite()));
}

#[test]
fn singleton_is_isolated() {
    let p = chain(&[0.0]);
    let e = brute_force_all(&p).unwrap().points[0].unwrap();
    assert!(e.isolated);
    assert_eq!(e.local_slope, ExtReal::ZERO);
}

#[test]
fn step_functions_change_only_at_breaks() {
    let p = chain(&[2.0, 0.5, 0.0, 3.0]);
    let r = brute_force_all(&p).unwrap();
    for s in [&r.er, &r.uniform_strict, &r.ratio] {
        for w in s.breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert_eq!(s.eval(mid), s.eval(w[1]));
        }
    }
}

#[test]
fn ekeland_examples() {
    let p = chain(&[2.0, 1.0, 0.0]);
    let e = ekeland_point(&p, 0, 2.5, 3.0).unwrap();
    assert_eq!(e.point, 2);
    assert!(e.check.holds() && e.check.a_strict);

    let at_min = ekeland_point(&p, 2, 0.5, 1.0).unwrap();
    assert_eq!(at_min.point, 2);
    assert_eq!(at_min.steps, 0);

    // the descent rate 1 never beats eps/lambda = 2: x = v
    let flat = chain(&[0.0, 0.3]);
    let stay = ekeland_point(&flat, 1, 1.0, 0.5).unwrap();
    assert_eq!(stay.point, 1);

    assert!(ekeland_point(&p, 0, 1.0, 1.0).is_err());
    assert!(ekeland_point(&p, 0, -1.0, 1.0).is_err());
}

#[test]
fn cross_check_examples() {
    let abs = cross_check(&function_fixture("abs").unwrap(), 0.01).unwrap();
    assert_eq!(abs.points, 201);
    assert!(abs.passed(1e-9), "{abs:?}");
    let er = &abs.entries[0];
    assert!((er.grid.value() - 1.0).abs() < 1e-9);

    let sq = cross_check(&function_fixture("parabola").unwrap(), 0.01).unwrap();
    assert!(sq.brute_discrepancy <= 1e-12);
    assert!(sq.entries[0].grid.value() <= 0.02);
    assert!(cross_check(&function_fixture("abs").unwrap(), 0.001).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_path_matches_brute_force(p in probe_strategy()) {
        prop_assert!(sampling_discrepancy(&p, &wide()).unwrap() <= 1e-12);
    }

    #[test]
    fn ekeland_conclusions(p in probe_strategy(), v in any::<prop::sample::Index>(), eps in 0.1f64..3.0, lambda in 0.1f64..4.0) {
        let v = v.index(p.len());
        let inf = p.values.iter().copied().fold(ExtReal::INFINITY, ExtReal::min).value();
        let fv = p.value(v);
        if fv.is_finite() && fv.value() < inf + eps {
            let e = ekeland_point(&p, v, eps, lambda).unwrap();
            prop_assert!(e.check.holds());
            prop_assert!(e.check.a_strict);
        } else {
            prop_assert!(ekeland_point(&p, v, eps, lambda).is_err());
        }
    }
}
