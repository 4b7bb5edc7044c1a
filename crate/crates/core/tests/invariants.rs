mod common;

use common::{probe_strategy, relation_strategy};
use proptest::prelude::*;
use slopekit::limit::estimate_limit;
use slopekit::product::embed_tilde;
use slopekit::setval::*;
use slopekit::slopes::{self, Settings};
use slopekit::slopes2::*;
use slopekit::{dual_rho_norm, duality_map, rho_dist, Combiner, EuclideanSpace, ExtReal, Grid, NormKind, RadiusSchedule, Vector};

fn wide() -> Settings {
    Settings::with_schedule(RadiusSchedule::new(8.0, 0.5, 6).unwrap())
}

fn le(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    b.is_infinite() || (a.is_finite() && a.value() <= b.value() + tol)
}

fn norm_kind() -> impl Strategy<Value = NormKind> {
    prop_oneof![Just(NormKind::L1), Just(NormKind::L2), Just(NormKind::LInf)]
}

fn vector(dim: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-3.0f64..3.0, dim).prop_map(|c| Vector::new(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nested_bands_give_monotone_estimates(pts in proptest::collection::vec((0.0f64..2.0, 0.0f64..5.0), 1..40)) {
        let s = RadiusSchedule::new(1.0, 0.5, 8).unwrap();
        let e = estimate_limit(
            |rho| pts.iter().filter(|(d, _)| *d < rho).map(|(_, v)| *v).fold(f64::INFINITY, f64::min),
            &s,
            1e-6,
        ).unwrap();
        prop_assert!(e.monotone);
        prop_assert!(le(e.first(), e.reported, 0.0));
    }

    #[test]
    fn rho_metric_variants_are_equivalent(a in 0.0f64..10.0, b in 0.0f64..10.0, rho in 0.01f64..10.0) {
        let m = rho_dist(a, b, rho, Combiner::Max);
        let s = rho_dist(a, b, rho, Combiner::Sum);
        prop_assert!(m <= s && s <= 2.0 * m + 1e-12);
    }

    #[test]
    fn dual_rho_norm_is_a_support_function(
        dims in (1usize..=3, 1usize..=3),
        nx in norm_kind(), ny in norm_kind(),
        seed in (vector(3), vector(3), vector(3), vector(3)),
        rho in 0.05f64..5.0,
    ) {
        let (dx, dy) = dims;
        let cut = |v: &Vector, d: usize| Vector::new(&v.coords()[..d]);
        let (u, v, xs, ys) = (cut(&seed.0, dx), cut(&seed.1, dy), cut(&seed.2, dx), cut(&seed.3, dy));
        let left = EuclideanSpace::new(dx, nx).unwrap();
        let right = EuclideanSpace::new(dy, ny).unwrap();
        let scale = left.norm_of(&u).max(rho * right.norm_of(&v));
        prop_assume!(scale > 1e-9);
        let pairing = (xs.dot(&u) + ys.dot(&v)) / scale;
        prop_assert!(pairing <= dual_rho_norm(&xs, &ys, rho, &left, &right).unwrap() + 1e-9);
    }

    #[test]
    fn duality_map_faces(dim in 1usize..=3, norm in norm_kind(), y in vector(3)) {
        let y = Vector::new(&y.coords()[..dim]);
        prop_assume!(!y.is_zero());
        for j in duality_map(&y, norm).unwrap() {
            prop_assert!((norm.dual().norm(&j) - 1.0).abs() < 1e-9);
            prop_assert!((j.dot(&y) - norm.norm(&y)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_variable_inequalities(p in probe_strategy()) {
        let s = wide();
        let base = p.base;
        for i in 0..p.len() {
            let f = p.value(i);
            if f.is_infinite() {
                continue;
            }
            let local = slopes::local_slope(&p, i).unwrap().value;
            let nonlocal = slopes::nonlocal_slope(&p, i, f64::INFINITY).unwrap();
            if f > ExtReal::ZERO {
                prop_assert!(le(local, nonlocal, 1e-9));
            }
            if i != base {
                prop_assert!(f.value() / p.dist(i, base) <= nonlocal.value() + 1e-9);
            }
        }
        let er = slopes::er_modulus(&p, &s).unwrap();
        let us = slopes::uniform_strict_slope(&p, &s).unwrap();
        let so = slopes::strict_outer_slope(&p, &s).unwrap();
        let ratio = slopes::ratio_liminf(&p, &s).unwrap();
        for k in 0..er.per_radius.len() {
            prop_assert!(le(er.per_radius[k].1, us.per_radius[k].1, 1e-9));
            prop_assert!(le(so.per_radius[k].1, us.per_radius[k].1, 1e-9));
            prop_assert!(le(ratio.per_radius[k].1, us.per_radius[k].1, 1e-9));
        }
    }

    #[test]
    fn tilde_reduction_is_exact(p in probe_strategy()) {
        let s = wide();
        let ys = Grid::new(1, -0.5, 0.5, 0.25).unwrap().points();
        let g = embed_tilde(&p, EuclideanSpace::line(), &ys, &Vector::scalar(0.0)).unwrap();
        let pairs = [
            (er2_modulus(&g, &s).unwrap(), slopes::er_modulus(&p, &s).unwrap()),
            (uniform_strict_slope2(&g, &s, Combiner::Max).unwrap(), slopes::uniform_strict_slope(&p, &s).unwrap()),
            (strict_outer_slope2(&g, &s, Combiner::Max).unwrap(), slopes::strict_outer_slope(&p, &s).unwrap()),
            (ratio_liminf2(&g, &s).unwrap(), slopes::ratio_liminf(&p, &s).unwrap()),
            (max_local_ratio_liminf2(&g, &s, Combiner::Max).unwrap(), slopes::max_local_ratio_liminf(&p, &s).unwrap()),
        ];
        for (two, one) in pairs {
            for ((_, a), (_, b)) in two.per_radius.iter().zip(&one.per_radius) {
                prop_assert!(a == b || (a.value() - b.value()).abs() <= 1e-12, "{a} vs {b}");
            }
        }
        for k in 0..g.len() {
            if !g.on_slice(k) || g.value(k).is_infinite() {
                continue;
            }
            let i = g.points[k].0;
            for rho in [0.5, 0.1] {
                let here = nonlocal_rho_slope(&g, k, rho, Combiner::Max).unwrap();
                let local = local_rho_slope(&g, k, rho, Combiner::Max).unwrap().value;
                prop_assert!(le(local, here, 1e-9) || g.value(k) == ExtReal::ZERO);
                prop_assert_eq!(here, slopes::nonlocal_slope(&p, i, f64::INFINITY).unwrap());
                prop_assert_eq!(local, slopes::local_slope(&p, i).unwrap().value);
            }
        }
    }

    #[test]
    fn subregularity_against_slopes_of_relations(f in relation_strategy()) {
        let s = wide();
        let sr = subregularity_constant(&f, &s).unwrap();
        let us = f_uniform_strict_slope(&f, &s, Combiner::Max).unwrap();
        let st = f_strict_slope(&f, &s, Combiner::Max).unwrap();
        for k in 0..sr.per_radius.len() {
            let (rho, u) = us.per_radius[k];
            if u.value() < 1.0 / rho {
                prop_assert!(le(sr.per_radius[k].1, u, 1e-9), "at rho {rho}: {} vs {u}", sr.per_radius[k].1);
            }
            prop_assert!(le(st.per_radius[k].1, u, 1e-9));
        }
        for k in 0..f.len() {
            for rho in [0.5, 2.0] {
                let local = f_local_rho_slope(&f, k, rho).unwrap().value;
                let nonlocal = f_nonlocal_rho_slope(&f, k, rho).unwrap();
                prop_assert!(le(local, nonlocal, 1e-9));
            }
        }
    }

    #[test]
    fn calmness_of_the_inverse_is_reciprocal(f in relation_strategy()) {
        let tau = global_subregularity_ratio(&f);
        let kappa = global_calmness_constant(&f.inverse().unwrap());
        if kappa == ExtReal::ZERO {
            prop_assert!(tau.is_infinite());
        } else {
            prop_assert!((tau.value() * kappa.value() - 1.0).abs() <= 1e-12);
        }
    }
}
