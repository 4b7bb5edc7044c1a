use slopekit::catalog::function_fixture;
use slopekit::criteria::CriteriaConfig;
use slopekit::function::Probe;
use slopekit::product::{embed_tilde, embed_tilde_normed, SubgradientSet, TwoVarProbe};
use slopekit::slopes::{self, Settings};
use slopekit::slopes2::*;
use slopekit::{Combiner, EuclideanSpace, ExtReal, FiniteMetricSpace, Grid, NormKind, RadiusSchedule, Vector};

const TOL: f64 = 1e-9;

fn ys(h: f64) -> Vec<Vector> {
    Grid::new(1, -0.5, 0.5, h).unwrap().points()
}

/// Tabulated functions on finite subsets of the line.
fn finite_fixtures() -> Vec<(&'static str, Probe<FiniteMetricSpace>)> {
    let xs: Vec<f64> = (0..=16).map(|k| -1.0 + 0.125 * k as f64).collect();
    let pts: Vec<Vector> = xs.iter().map(|&x| Vector::scalar(x)).collect();
    let space = FiniteMetricSpace::from_points(&pts, NormKind::L2).unwrap();
    let table = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&x| ExtReal::finite(f(x))).collect::<Vec<_>>();
    let base = 8;
    vec![
        ("abs", Probe::finite(space.clone(), table(&|x: f64| x.abs()), base).unwrap()),
        ("square", Probe::finite(space.clone(), table(&|x: f64| x * x), base).unwrap()),
        ("positive part", Probe::finite(space.clone(), table(&|x: f64| x.max(0.0)), base).unwrap()),
        (
            "zigzag",
            Probe::finite(space.clone(), table(&|x: f64| if (x * 8.0).round() as i64 % 2 == 0 { x.abs() } else { 0.5 * x.abs() }), base).unwrap(),
        ),
        ("signed", Probe::finite(space, table(&|x: f64| x), base).unwrap()),
    ]
}

fn finite_settings() -> Settings {
    Settings::with_schedule(RadiusSchedule::new(1.0, 0.5, 3).unwrap())
}

#[test]
fn tilde_reduces_to_single_variable_on_finite_spaces() {
    let s = finite_settings();
    for (name, p) in finite_fixtures() {
        let g = embed_tilde(&p, EuclideanSpace::line(), &ys(0.25), &Vector::scalar(0.0)).unwrap();
        let close = |a: ExtReal, b: ExtReal| a == b || (a.value() - b.value()).abs() <= TOL;
        let pairs = [
            ("er", er2_modulus(&g, &s).unwrap(), slopes::er_modulus(&p, &s).unwrap()),
            ("uniform", uniform_strict_slope2(&g, &s, Combiner::Max).unwrap(), slopes::uniform_strict_slope(&p, &s).unwrap()),
            ("outer", strict_outer_slope2(&g, &s, Combiner::Max).unwrap(), slopes::strict_outer_slope(&p, &s).unwrap()),
            ("ratio", ratio_liminf2(&g, &s).unwrap(), slopes::ratio_liminf(&p, &s).unwrap()),
        ];
        for (what, two, one) in pairs {
            for ((_, a), (_, b)) in two.per_radius.iter().zip(&one.per_radius) {
                assert!(close(*a, *b), "{name}/{what}: {a} vs {b}");
            }
        }
        for k in 0..g.len() {
            if !g.on_slice(k) || g.value(k).is_infinite() {
                continue;
            }
            let i = g.points[k].0;
            let single = slopes::nonlocal_slope(&p, i, f64::INFINITY).unwrap();
            for rho in [1.0, 0.3, 0.01] {
                assert!(close(nonlocal_rho_slope(&g, k, rho, Combiner::Max).unwrap(), single), "{name} at {i}");
            }
            let local = slopes::local_slope(&p, i).unwrap().value;
            assert!(close(local_rho_slope(&g, k, 0.3, Combiner::Max).unwrap().value, local));
        }
    }
}

fn abs_tilde() -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
    let p = function_fixture("abs").unwrap().probe().unwrap();
    embed_tilde_normed(&p, EuclideanSpace::line(), &ys(0.125), &Vector::scalar(0.0)).unwrap()
}

fn grid_settings() -> Settings {
    Settings::with_schedule(slopekit::catalog::catalog_schedule())
}

#[test]
fn tilde_abs_values() {
    let g = abs_tilde();
    let s = grid_settings();
    for form in er2_equivalent_forms(&g, &s).unwrap() {
        assert!((form.reported.value() - 1.0).abs() < 1e-9, "{form:?}");
    }
    assert!((uniform_strict_slope2(&g, &s, Combiner::Max).unwrap().reported.value() - 1.0).abs() < 1e-9);
    assert!((strict_outer_slope2(&g, &s, Combiner::Max).unwrap().reported.value() - 1.0).abs() < 1e-9);
    let (sd, cov) = strict_outer_subdiff_slope2(&g, &s).unwrap();
    assert_eq!(cov.skipped, 0);
    assert!((sd.reported.value() - 1.0).abs() < 1e-9);
}

/// `f(x, y) = w(y)` on `{(x, x)}` and `+∞` elsewhere, sampled on the diagonal.
fn diagonal(w: impl Fn(f64, f64) -> f64, h: f64) -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
    let pts = Grid::new(1, -1.0, 1.0, h).unwrap().points();
    let base = pts.iter().position(|p| p.get(0) == 0.0).unwrap();
    let values = pts.iter().map(|p| ExtReal::finite(w(p.get(0), p.get(0)))).collect();
    let points = pts.iter().map(|p| (*p, *p)).collect();
    TwoVarProbe::new(EuclideanSpace::line(), EuclideanSpace::line(), points, values, base).unwrap()
}

#[test]
fn diagonal_examples() {
    let s = grid_settings();
    let g = diagonal(|_, y| y.abs(), 1.0 / 64.0);
    assert!((er2_modulus(&g, &s).unwrap().reported.value() - 1.0).abs() < 1e-9);
    let g = diagonal(|x, y| x.abs() + y.abs(), 1.0 / 256.0);
    let forms = er2_equivalent_forms(&g, &s).unwrap();
    for f in &forms {
        assert!((f.reported.value() - 2.0).abs() < 1e-9, "{f:?}");
    }
}

#[test]
fn empty_band_is_infinite() {
    let s = grid_settings();
    let g = diagonal(|_, _| 0.0, 0.25);
    assert_eq!(er2_modulus(&g, &s).unwrap().reported, ExtReal::INFINITY);
    assert_eq!(uniform_strict_slope2(&g, &s, Combiner::Max).unwrap().reported, ExtReal::INFINITY);
}

#[test]
fn constant_and_monotone_in_rho() {
    let g = diagonal(|_, _| 0.0, 0.25);
    assert_eq!(nonlocal_rho_slope(&g, 1, 0.5, Combiner::Max).unwrap(), ExtReal::ZERO);

    let g = product(|x, y| y.abs() + x * x, 1.0 / 8.0);
    for k in (0..g.len()).step_by(7) {
        let mut last = ExtReal::INFINITY;
        for rho in [0.05, 0.1, 0.5, 1.0, 4.0] {
            let v = nonlocal_rho_slope(&g, k, rho, Combiner::Max).unwrap();
            assert!(v <= last);
            last = v;
        }
    }
}

/// A finite-valued function on `[−1,1]²` with base `(0,0)` and subgradients
/// `(f_x, ∂_y)` where `∂_y` is represented by its least-norm element.
fn product(f: impl Fn(f64, f64) -> f64, h: f64) -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
    product_with(f, |_, _| None, h)
}

fn product_with(
    f: impl Fn(f64, f64) -> f64,
    sub: impl Fn(f64, f64) -> Option<Vec<(f64, f64)>>,
    h: f64,
) -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
    let axis = Grid::new(1, -1.0, 1.0, h).unwrap().points();
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut subs = Vec::new();
    let mut base = 0;
    for x in &axis {
        for y in &axis {
            let (a, b) = (x.get(0), y.get(0));
            if a == 0.0 && b == 0.0 {
                base = points.len();
            }
            points.push((*x, *y));
            values.push(ExtReal::finite(f(a, b)));
            subs.push(sub(a, b).map(|v| {
                SubgradientSet::Finite(v.into_iter().map(|(p, q)| (Vector::scalar(p), Vector::scalar(q))).collect())
            }));
        }
    }
    let mut g = TwoVarProbe::new(EuclideanSpace::line(), EuclideanSpace::line(), points, values, base).unwrap();
    g.subgradients = subs;
    g.norms = Some((NormKind::L2, NormKind::L2));
    g.depth = g.points.iter().map(|(x, _)| 1.0 - x.get(0).abs()).collect();
    g
}

fn smooth_plus_abs() -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
    product_with(
        |x, y| y.abs() + x * x,
        |x, y| Some(vec![(2.0 * x, if y > 0.0 { 1.0 } else if y < 0.0 { -1.0 } else { 0.0 })]),
        1.0 / 16.0,
    )
}

#[test]
fn subgradient_rho_slopes() {
    let g = smooth_plus_abs();
    let k = g.points.iter().position(|(x, y)| x.get(0) == 0.5 && y.get(0) == 0.25).unwrap();
    // y* = 1 is excluded for ρ ≤ 1
    assert_eq!(subdiff_rho_slope(&g, k, 0.5).unwrap(), ExtReal::INFINITY);
    assert!((subdiff_rho_slope(&g, k, 2.0).unwrap().value() - 1.0).abs() < 1e-12);
    assert!((subdiff_rho_slope_primed(&g, k, 0.5).unwrap().value() - 3.0).abs() < 1e-12);
}

#[test]
fn primed_and_unprimed_relations() {
    let g = smooth_plus_abs();
    for k in 0..g.len() {
        for rho in [0.25, 0.5, 1.0, 2.0] {
            let un = subdiff_rho_slope(&g, k, rho).unwrap();
            for rho2 in [0.1, 0.5, 3.0] {
                let primed = subdiff_rho_slope_primed(&g, k, rho2).unwrap();
                if un.is_finite() {
                    assert!(primed.value() <= un.value() + rho / rho2 + 1e-12);
                }
            }
            let primed = subdiff_rho_slope_primed(&g, k, rho).unwrap();
            for gamma in [0.5, 1.0, 2.5, 5.0] {
                if primed.value() < gamma {
                    assert!(subdiff_rho_slope(&g, k, gamma * rho).unwrap().value() < gamma);
                }
            }
        }
    }
}

#[test]
fn local_rho_slope_is_below_subdifferential_bound() {
    let g = smooth_plus_abs();
    for k in 0..g.len() {
        for rho in [0.25, 0.5, 1.0] {
            let local = local_rho_slope(&g, k, rho, Combiner::Max).unwrap().value;
            let sd = subdiff_rho_slope(&g, k, rho * rho).unwrap();
            // discretized difference quotients of x² carry an O(h) excess
            assert!(local.value() <= sd.value() + rho + 1.0 / 16.0 + 1e-9, "{k} {rho}: {local} vs {sd}");
        }
    }
}

#[test]
fn verdict_examples() {
    let s = grid_settings();
    let g = abs_tilde();
    let v = criteria_verdict2(&g, CriteriaConfig::new(0.5), &s).unwrap();
    for c in &v.conditions {
        assert_eq!(c.holds, Some(true), "{c:?}");
    }
    let v = criteria_verdict2(&g, CriteriaConfig::new(10.0), &s).unwrap();
    for c in v.conditions.iter().filter(|c| c.label != 'a') {
        assert_eq!(c.holds, Some(false), "{c:?}");
    }
    let v = criteria_verdict2(&diagonal(|_, y| y.abs(), 1.0 / 64.0), CriteriaConfig::new(0.5), &s).unwrap();
    assert_eq!(v.holds('b'), Some(true));
    assert_eq!(v.holds('a'), Some(true));
    assert_eq!(v.holds('f'), None);
}

#[test]
fn two_var_catalog() {
    use slopekit::catalog::two_var_fixtures;
    let close = |a: ExtReal, b: f64| {
        if b == 0.0 {
            a.value() <= 1e-2 + 1e-9
        } else {
            (a.value() - b).abs() <= 0.05 * b
        }
    };
    for fx in two_var_fixtures() {
        let g = fx.probe().unwrap();
        let s = Settings::with_schedule(fx.schedule);
        let er = er2_modulus(&g, &s).unwrap().reported;
        let us = uniform_strict_slope2(&g, &s, Combiner::Max).unwrap().reported;
        let sum = uniform_strict_slope2(&g, &s, Combiner::Sum).unwrap().reported;
        assert!(close(er, fx.er), "{}: er {er}", fx.name);
        assert!(close(us, fx.er), "{}: uniform {us}", fx.name);
        assert!(close(sum, fx.er), "{}: sum variant {sum}", fx.name);
        for k in 0..g.len() {
            if g.value(k).is_infinite() || g.subgradients[k].is_none() {
                continue;
            }
            for rho in [0.5, 0.1, 0.01] {
                let local = local_rho_slope(&g, k, rho, Combiner::Max).unwrap().value;
                let sd = subdiff_rho_slope(&g, k, rho * rho).unwrap();
                assert!(sd.is_infinite() || local.value() <= sd.value() + rho + 1e-9, "{} at {k}", fx.name);
            }
        }
    }
}
