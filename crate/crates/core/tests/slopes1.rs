use slopekit::catalog::{function_fixture, function_fixtures};
use slopekit::slopes::*;
use slopekit::{ExtReal, Vector};

fn settings(name: &str) -> Settings {
    Settings::with_schedule(function_fixture(name).unwrap().schedule)
}

fn index_of(p: &slopekit::function::Probe<slopekit::EuclideanSpace>, x: f64) -> usize {
    p.points.iter().position(|v| *v == Vector::scalar(x)).unwrap()
}

#[test]
fn catalog_summary() {
    for fx in function_fixtures() {
        let p = fx.probe().unwrap();
        let s = Settings::with_schedule(fx.schedule);
        let er = er_modulus(&p, &s).unwrap().reported;
        let us = uniform_strict_slope(&p, &s).unwrap().reported;
        let so = strict_outer_slope(&p, &s).unwrap().reported;
        let (sd, cov) = strict_outer_subdiff_slope(&p, &s).unwrap();
        std::println!("{}: er={er} us={us} so={so} sd={} cov={cov:?}", fx.name, sd.reported);
    }
}

#[test]
fn abs_values() {
    let fx = function_fixture("abs").unwrap();
    let p = fx.probe().unwrap();
    let s = settings("abs");
    let i = index_of(&p, 0.5);
    assert_eq!(local_slope(&p, i).unwrap().value, ExtReal::finite(1.0));
    assert_eq!(nonlocal_slope(&p, i, 0.1).unwrap(), ExtReal::finite(1.0));
    assert_eq!(restricted_nonlocal_slope(&p, i, Region::LevelSet).unwrap().value, ExtReal::finite(1.0));
    assert_eq!(subdiff_slope(&p, i).unwrap(), ExtReal::finite(1.0));
    assert_eq!(er_modulus(&p, &s).unwrap().reported, ExtReal::finite(1.0));
    assert_eq!(ratio_liminf(&p, &s).unwrap().reported, ExtReal::finite(1.0));
    assert_eq!(local_slope(&p, p.base).unwrap().value, ExtReal::ZERO);
}

#[test]
fn parabola_at_one() {
    let fx = function_fixture("parabola").unwrap();
    let p = fx.probe().unwrap();
    let i = index_of(&p, 1.0);
    let v = local_slope(&p, i).unwrap().value.value();
    assert!((v - 2.0).abs() <= 2.0 * fx.grid.h, "{v}");
}

use slopekit::criteria::CriteriaConfig;

#[test]
fn catalog_verdicts() {
    let abs = function_fixture("abs").unwrap();
    let v = criteria_verdict(&abs.probe().unwrap(), CriteriaConfig::new(0.5), &settings("abs")).unwrap();
    for l in ['a', 'b', 'c', 'd', 'e', 'f', 'g'] {
        assert_eq!(v.holds(l), Some(true), "({l})");
    }
    let par = function_fixture("parabola").unwrap();
    let v = criteria_verdict(&par.probe().unwrap(), CriteriaConfig::new(0.5), &settings("parabola")).unwrap();
    assert_eq!(v.holds('a'), Some(false));
    assert_eq!(v.holds('b'), Some(false));
    let v = criteria_verdict(&abs.probe().unwrap(), CriteriaConfig::new(10.0), &settings("abs")).unwrap();
    for l in ['b', 'c', 'd', 'e', 'f', 'g'] {
        assert_eq!(v.holds(l), Some(false));
    }
    assert!(v.audits.iter().all(|a| a.antecedent != Some(true) || a.consequent == Some(true)));
    let saw = function_fixture("nonconvex-lipschitz-counterexample").unwrap();
    let v = criteria_verdict(&saw.probe().unwrap(), CriteriaConfig::new(0.5), &settings(saw.name)).unwrap();
    assert_eq!(v.holds('a'), Some(true));
    assert_eq!(v.holds('b'), Some(true));
    assert_eq!(v.holds('d'), Some(false));
    assert_eq!(v.holds('f'), Some(false));
}
