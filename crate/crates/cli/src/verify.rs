//! The cross-module property suite behind `slopekit verify`.
//!
//! Each check draws its random inputs from a ChaCha8 stream selected by the
//! check's position in the full list, so filtering never changes what the
//! remaining checks see. Reports contain no timings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use slopekit::catalog::{function_fixtures, two_var_fixtures};
use slopekit::criteria::CriteriaConfig;
use slopekit::function::Probe;
use slopekit::oracle::{cross_check, ekeland_point, sampling_discrepancy, verify_ekeland};
use slopekit::product::{embed_tilde, TwoVarProbe};
use slopekit::setval::{self, gfrerer_limit_test, mapping_fixture, mapping_fixtures, LimitSetParams, SetValuedMapping, VGrid};
use slopekit::slopes::{self, Settings};
use slopekit::slopes2;
use slopekit::{Combiner, EuclideanSpace, ExtReal, FiniteMetricSpace, Grid, Metric, RadiusSchedule, Vector};

/// Tolerance for exact arithmetic on finite spaces.
const EXACT: f64 = 1e-9;
/// Tolerance for pointwise comparisons on grids.
const GRID: f64 = 1e-3;
/// Relative tolerance for limit equalities.
const REL: f64 = 0.05;
/// Absolute tolerance when the limit is zero.
const ZERO: f64 = 1e-2;
const MAX_LISTED_FAILURES: usize = 10;

pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    run: fn(&mut Ctx) -> slopekit::Result<()>,
}

pub const CHECKS: &[Check] = &[
    Check { id: "oracle", title: "sampling path equals brute force on random finite spaces", run: oracle },
    Check { id: "prop1", title: "slope hierarchy at every probe point", run: prop1 },
    Check { id: "thm2", title: "error bound modulus versus uniform strict slope", run: thm2 },
    Check { id: "prop6", title: "equivalent representations of the two-variable modulus", run: prop6 },
    Check { id: "prop7", title: "two-variable slope hierarchy", run: prop7 },
    Check { id: "thm8", title: "rho-slopes versus subdifferential rho-slopes", run: thm8 },
    Check { id: "thm8-outer", title: "strict outer slope versus its subdifferential counterpart", run: thm8_outer },
    Check { id: "thm9", title: "two-variable modulus versus uniform strict slope", run: thm9 },
    Check { id: "prop10", title: "MAX and SUM rho-metrics give the same uniform strict slope", run: prop10 },
    Check { id: "prop13", title: "primal slopes of set-valued mappings", run: prop13 },
    Check { id: "prop14", title: "approximate subdifferential slopes are below exact ones", run: prop14 },
    Check { id: "prop15", title: "induced-function subdifferential slope bounds the approximate one", run: prop15 },
    Check { id: "prop16", title: "induced and coderivative subdifferential rho-slopes agree", run: prop16 },
    Check { id: "prop17", title: "convex graphs: strict subdifferential slope equals sr", run: prop17 },
    Check { id: "thm18", title: "subregularity constant versus uniform strict slope of F", run: thm18 },
    Check { id: "prop22", title: "limit-set exclusion implies the dual criterion", run: prop22 },
    Check { id: "reduction", title: "two-variable quantities of the extension reduce exactly", run: reduction },
    Check { id: "ekeland", title: "Ekeland points on random finite spaces", run: ekeland },
    Check { id: "calmness", title: "calmness of the inverse is reciprocal to subregularity", run: calmness },
    Check { id: "desk", title: "subregularity desk values of the mapping fixtures", run: desk },
    Check { id: "catalog", title: "catalog ground truths and headline verdicts", run: catalog },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    pub cases: usize,
    pub failure_count: usize,
    /// The first few failures.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub filter: Option<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Ctx {
    rng: ChaCha8Rng,
    cases: usize,
    failure_count: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Ctx {
    fn expect(&mut self, ok: bool, message: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(message());
            }
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

/// Glob match with `*` as the only wildcard.
fn glob(pattern: &str, s: &str) -> bool {
    match pattern.split_once('*') {
        None => pattern == s,
        Some((head, rest)) => {
            let Some(tail) = s.strip_prefix(head) else { return false };
            (0..=tail.len()).any(|k| tail.is_char_boundary(k) && glob(rest, &tail[k..]))
        }
    }
}

/// `filter` is a comma-separated list of patterns matched against check ids.
pub fn selected(filter: Option<&str>) -> Vec<&'static Check> {
    CHECKS
        .iter()
        .filter(|c| match filter {
            None => true,
            Some(f) => f.split(',').map(str::trim).any(|p| glob(p, c.id)),
        })
        .collect()
}

pub fn run(filter: Option<&str>, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    for (index, check) in CHECKS.iter().enumerate() {
        if !selected(filter).iter().any(|c| c.id == check.id) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let mut ctx = Ctx { rng, cases: 0, failure_count: 0, failures: Vec::new(), notes: Vec::new() };
        if let Err(e) = (check.run)(&mut ctx) {
            ctx.failure_count += 1;
            ctx.failures.push(format!("error: {e}"));
        }
        checks.push(CheckResult {
            id: check.id.into(),
            title: check.title.into(),
            cases: ctx.cases,
            failure_count: ctx.failure_count,
            failures: ctx.failures,
            notes: ctx.notes,
            passed: ctx.failure_count == 0 && ctx.cases > 0,
        });
    }
    let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    VerifyReport { seed, filter: filter.map(str::to_string), checks, passed }
}

pub fn render_text(r: &VerifyReport) -> String {
    let mut out = format!("verify seed={} filter={}\n", r.seed, r.filter.as_deref().unwrap_or("*"));
    for c in &r.checks {
        out.push_str(&format!(
            "{} {:<10} {:>6} cases {:>4} failures  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.cases,
            c.failure_count,
            c.title
        ));
        for n in &c.notes {
            out.push_str(&format!("     note: {n}\n"));
        }
        for f in &c.failures {
            out.push_str(&format!("     fail: {f}\n"));
        }
    }
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", r.checks.len(), failed));
    out
}

// ---------------------------------------------------------------------------
// random inputs

/// A connected weighted graph metric: a random spanning tree plus extra edges,
/// weights in `{0.5, 1, 1.5, 2}`.
fn random_space(rng: &mut ChaCha8Rng, max: usize) -> FiniteMetricSpace {
    let n = rng.gen_range(1..=max);
    let weight = |rng: &mut ChaCha8Rng| 0.5 * rng.gen_range(1..=4) as f64;
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|k| (k, rng.gen_range(0..k), weight(rng))).collect();
    for _ in 0..rng.gen_range(0..n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        edges.push((a, b, weight(rng)));
    }
    FiniteMetricSpace::from_graph(n, &edges).expect("spanning tree keeps the graph connected")
}

/// Values in `{0, 0.25, …, 2} ∪ {+∞}` with `f(base) = 0`.
fn random_probe(rng: &mut ChaCha8Rng, max: usize) -> Probe<FiniteMetricSpace> {
    let space = random_space(rng, max);
    let n = space.len();
    let mut values: Vec<ExtReal> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                ExtReal::INFINITY
            } else {
                ExtReal::finite(0.25 * rng.gen_range(0..=8) as f64)
            }
        })
        .collect();
    let base = rng.gen_range(0..n);
    values[base] = ExtReal::ZERO;
    Probe::finite(space, values, base).expect("one value per point")
}

fn random_relation(rng: &mut ChaCha8Rng) -> SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace> {
    let left = random_space(rng, 12);
    let right = random_space(rng, 8);
    let (n, m) = (left.len(), right.len());
    let mut pairs: Vec<(usize, usize)> = (0..rng.gen_range(0..3 * n)).map(|_| (rng.gen_range(0..n), rng.gen_range(0..m))).collect();
    let base = (rng.gen_range(0..n), rng.gen_range(0..m));
    pairs.push(base);
    pairs.sort_unstable();
    pairs.dedup();
    SetValuedMapping::finite(left, right, &pairs, base).expect("pairs lie in range")
}

fn wide() -> Settings {
    Settings::with_schedule(RadiusSchedule { rho0: 8.0, gamma: 0.5, steps: 6 })
}

fn tilde(p: &Probe<FiniteMetricSpace>) -> slopekit::Result<TwoVarProbe<FiniteMetricSpace, EuclideanSpace>> {
    let ys = Grid::new(1, -0.5, 0.5, 0.25)?.points();
    embed_tilde(p, EuclideanSpace::line(), &ys, &Vector::scalar(0.0))
}

/// Up to `k` distinct indices below `n`, sorted.
fn sample_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut picked = rand::seq::index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

// ---------------------------------------------------------------------------
// comparisons

fn le(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    b.is_infinite() || (a.is_finite() && a.value() <= b.value() + tol)
}

fn same(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    a == b || (a.is_finite() && b.is_finite() && (a.value() - b.value()).abs() <= tol)
}

/// Equality of limits: relative `REL`, or both below `ZERO` when one side is
/// (near) zero.
fn close_limits(a: ExtReal, b: ExtReal) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let (a, b) = (a.value(), b.value());
    if a.min(b) <= ZERO {
        return a.max(b) <= ZERO + EXACT;
    }
    (a - b).abs() <= REL * a.max(b)
}

fn close_to_truth(v: ExtReal, truth: f64) -> bool {
    if truth == 0.0 {
        v.is_finite() && v.value() <= ZERO + EXACT
    } else {
        v.is_finite() && (v.value() - truth).abs() <= REL * truth
    }
}

// ---------------------------------------------------------------------------
// checks

fn oracle(cx: &mut Ctx) -> slopekit::Result<()> {
    let s = wide();
    for case in 0..24 {
        let p = random_probe(&mut cx.rng, 50);
        let d = sampling_discrepancy(&p, &s)?;
        cx.expect(d <= 1e-12, || format!("random space {case} ({} points): discrepancy {d}", p.len()));
    }
    for (name, h) in [("abs", 0.01), ("parabola", 0.01), ("positive-part", 0.01)] {
        let fx = slopekit::catalog::function_fixture(name).expect("catalog entry");
        let c = cross_check(&fx, h)?;
        cx.expect(c.brute_discrepancy <= 1e-12, || format!("{name}: grid path differs from brute force by {}", c.brute_discrepancy));
    }
    Ok(())
}

/// Pointwise parts of the hierarchy at every finite-valued probe point.
fn pointwise_hierarchy<M: Metric>(cx: &mut Ctx, name: &str, p: &Probe<M>, tol: f64) -> slopekit::Result<()> {
    for i in 0..p.len() {
        let f = p.value(i);
        if f.is_infinite() {
            continue;
        }
        let local = slopes::local_slope(p, i)?.value;
        let nonlocal = slopes::nonlocal_slope(p, i, f64::INFINITY)?;
        if f > ExtReal::ZERO {
            cx.expect(le(local, nonlocal, tol), || format!("{name} #{i}: local {local} > nonlocal {nonlocal}"));
        }
        if i != p.base {
            let ratio = f.value() / p.dist(i, p.base);
            cx.expect(ratio <= nonlocal.value() + tol, || format!("{name} #{i}: f/d = {ratio} > nonlocal {nonlocal}"));
        }
        for region in [slopes::Region::SublevelDist, slopes::Region::LevelSet] {
            let r = slopes::restricted_nonlocal_slope(p, i, region)?;
            if !r.truncated {
                cx.expect(le(r.value, nonlocal, tol), || format!("{name} #{i}: restricted {} > nonlocal {nonlocal}", r.value));
            }
        }
        if p.subgradients[i].is_some() {
            let sd = slopes::subdiff_slope(p, i)?;
            cx.expect(le(local, sd, tol), || format!("{name} #{i}: local {local} > subdifferential {sd}"));
            if p.convex {
                cx.expect(same(local, sd, tol), || format!("{name} #{i} (convex): local {local} != subdifferential {sd}"));
            }
        }
    }
    Ok(())
}

fn band_hierarchy<M: Metric>(cx: &mut Ctx, name: &str, p: &Probe<M>, s: &Settings, tol: f64) -> slopekit::Result<()> {
    let us = slopes::uniform_strict_slope(p, s)?;
    let so = slopes::strict_outer_slope(p, s)?;
    let ratio = slopes::ratio_liminf(p, s)?;
    for k in 0..us.per_radius.len() {
        let (rho, u) = us.per_radius[k];
        let (o, r) = (so.per_radius[k].1, ratio.per_radius[k].1);
        cx.expect(le(o, u, tol), || format!("{name} at rho {rho}: strict outer {o} > uniform strict {u}"));
        cx.expect(le(r, u, tol), || format!("{name} at rho {rho}: ratio {r} > uniform strict {u}"));
    }
    if p.subgradients.iter().any(Option::is_some) {
        let (sd, cov) = slopes::strict_outer_subdiff_slope(p, s)?;
        if cov.skipped == 0 {
            for ((rho, o), (_, d)) in so.per_radius.iter().zip(&sd.per_radius) {
                cx.expect(le(*o, *d, tol), || format!("{name} at rho {rho}: strict outer {o} > subdifferential {d}"));
            }
            if p.convex {
                let (u, o, d) = (us.reported, so.reported, sd.reported);
                cx.expect(same(u, o, tol) && same(o, d, tol), || format!("{name} (convex): uniform {u}, outer {o}, subdifferential {d}"));
            }
        }
    }
    Ok(())
}

fn prop1(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in function_fixtures() {
        let p = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        pointwise_hierarchy(cx, fx.name, &p, GRID)?;
        band_hierarchy(cx, fx.name, &p, &s, GRID)?;
    }
    let s = wide();
    for case in 0..20 {
        let p = random_probe(&mut cx.rng, 50);
        let name = format!("random space {case}");
        pointwise_hierarchy(cx, &name, &p, EXACT)?;
        band_hierarchy(cx, &name, &p, &s, EXACT)?;
    }
    Ok(())
}

fn thm2(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in function_fixtures() {
        let p = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        let er = slopes::er_modulus(&p, &s)?;
        let us = slopes::uniform_strict_slope(&p, &s)?;
        for ((rho, e), (_, u)) in er.per_radius.iter().zip(&us.per_radius) {
            cx.expect(le(*e, *u, EXACT), || format!("{} at rho {rho}: Er {e} > uniform strict {u}", fx.name));
        }
        if p.complete && p.lsc {
            let (e, u) = (er.reported, us.reported);
            cx.expect(close_limits(e, u), || format!("{}: Er {e} vs uniform strict {u}", fx.name));
        }
    }
    let s = wide();
    for case in 0..20 {
        let p = random_probe(&mut cx.rng, 50);
        let er = slopes::er_modulus(&p, &s)?;
        let us = slopes::uniform_strict_slope(&p, &s)?;
        for ((rho, e), (_, u)) in er.per_radius.iter().zip(&us.per_radius) {
            cx.expect(le(*e, *u, EXACT), || format!("random space {case} at rho {rho}: Er {e} > uniform strict {u}"));
        }
    }
    Ok(())
}

fn prop6(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let forms = slopes2::er2_equivalent_forms(&g, &Settings::with_schedule(fx.schedule))?;
        for f in &forms[1..] {
            let (a, b) = (forms[0].reported, f.reported);
            cx.expect(close_limits(a, b), || format!("{}: representations {a} vs {b}", fx.name));
        }
    }
    let s = wide();
    for case in 0..20 {
        let p = random_probe(&mut cx.rng, 30);
        let g = tilde(&p)?;
        let forms = slopes2::er2_equivalent_forms(&g, &s)?;
        for f in &forms[1..] {
            let (a, b) = (forms[0].reported, f.reported);
            cx.expect(same(a, b, EXACT), || format!("random extension {case}: representations {a} vs {b}"));
        }
    }
    Ok(())
}

fn two_var_hierarchy<MX: Metric, MY: Metric>(
    cx: &mut Ctx,
    name: &str,
    g: &TwoVarProbe<MX, MY>,
    s: &Settings,
    points: &[usize],
    tol: f64,
) -> slopekit::Result<()> {
    for &k in points {
        let f = g.value(k);
        if !(f > ExtReal::ZERO && f.is_finite()) {
            continue;
        }
        for rho in [0.5, 0.1] {
            let local = slopes2::local_rho_slope(g, k, rho, Combiner::Max)?.value;
            let nonlocal = slopes2::nonlocal_rho_slope(g, k, rho, Combiner::Max)?;
            cx.expect(le(local, nonlocal, tol), || format!("{name} #{k} rho {rho}: local {local} > nonlocal {nonlocal}"));
        }
    }
    let us = slopes2::uniform_strict_slope2(g, s, Combiner::Max)?;
    let so = slopes2::strict_outer_slope2(g, s, Combiner::Max)?;
    let ratio = slopes2::ratio_liminf2(g, s)?;
    for k in 0..us.per_radius.len() {
        let (rho, u) = us.per_radius[k];
        let (o, r) = (so.per_radius[k].1, ratio.per_radius[k].1);
        cx.expect(le(o, u, tol), || format!("{name} at rho {rho}: strict outer {o} > uniform strict {u}"));
        cx.expect(le(r, u, tol), || format!("{name} at rho {rho}: ratio {r} > uniform strict {u}"));
    }
    Ok(())
}

fn prop7(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let points = sample_indices(&mut cx.rng, g.len(), 48);
        two_var_hierarchy(cx, fx.name, &g, &Settings::with_schedule(fx.schedule), &points, GRID)?;
    }
    let s = wide();
    for case in 0..12 {
        let p = random_probe(&mut cx.rng, 30);
        let g = tilde(&p)?;
        let all: Vec<usize> = (0..g.len()).collect();
        two_var_hierarchy(cx, &format!("random extension {case}"), &g, &s, &all, EXACT)?;
    }
    Ok(())
}

fn thm8(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        for k in 0..g.len() {
            if g.value(k).is_infinite() || g.subgradients[k].is_none() {
                continue;
            }
            for rho in [0.5, 0.1, 0.01] {
                let local = slopes2::local_rho_slope(&g, k, rho, Combiner::Max)?.value;
                let sd = slopes2::subdiff_rho_slope(&g, k, rho * rho)?;
                cx.expect(sd.is_infinite() || local.value() <= sd.value() + rho + EXACT, || {
                    format!("{} #{k} rho {rho}: rho-slope {local} > {sd} + rho", fx.name)
                });
            }
        }
    }
    Ok(())
}

fn thm8_outer(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        let so = slopes2::strict_outer_slope2(&g, &s, Combiner::Max)?;
        match slopes2::strict_outer_subdiff_slope2(&g, &s) {
            Ok((sd, cov)) if cov.skipped == 0 => {
                // the rho-weighted dual norm biases the subdifferential side by up to rho
                let (o, d) = (so.reported, sd.reported);
                let bias = s.schedule.finest() + GRID;
                cx.expect(le(o, d, bias), || format!("{}: strict outer {o} > subdifferential {d} + {bias}", fx.name));
                if g.lsc && g.norms.is_some() {
                    cx.expect(close_limits(o, d) || same(o, d, bias), || {
                        format!("{}: strict outer {o} vs subdifferential {d}", fx.name)
                    });
                }
            }
            Ok(_) | Err(slopekit::Error::NotEvaluable(_)) => cx.note(format!("{}: subdifferential data incomplete", fx.name)),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn thm9(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        let er = slopes2::er2_modulus(&g, &s)?.reported;
        let us = slopes2::uniform_strict_slope2(&g, &s, Combiner::Max)?.reported;
        cx.expect(le(er, us, GRID), || format!("{}: Er {er} > uniform strict {us}", fx.name));
        if g.complete && g.lsc {
            cx.expect(close_limits(er, us), || format!("{}: Er {er} vs uniform strict {us}", fx.name));
        }
    }
    let s = wide();
    for case in 0..12 {
        let g = tilde(&random_probe(&mut cx.rng, 30))?;
        let er = slopes2::er2_modulus(&g, &s)?;
        let us = slopes2::uniform_strict_slope2(&g, &s, Combiner::Max)?;
        for ((rho, e), (_, u)) in er.per_radius.iter().zip(&us.per_radius) {
            cx.expect(le(*e, *u, EXACT), || format!("random extension {case} at rho {rho}: Er {e} > uniform strict {u}"));
        }
    }
    Ok(())
}

fn prop10(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        let m = slopes2::uniform_strict_slope2(&g, &s, Combiner::Max)?.reported;
        let sum = slopes2::uniform_strict_slope2(&g, &s, Combiner::Sum)?.reported;
        cx.expect(close_limits(m, sum), || format!("{}: MAX {m} vs SUM {sum}", fx.name));
    }
    Ok(())
}

fn sr_en_bloc<MX: Metric + Clone, MY: Metric + Clone>(
    cx: &mut Ctx,
    name: &str,
    f: &SetValuedMapping<MX, MY>,
    s: &Settings,
    points: &[usize],
) -> slopekit::Result<()> {
    for &k in points {
        for rho in [0.5, 2.0] {
            let local = setval::f_local_rho_slope(f, k, rho)?.value;
            let nonlocal = setval::f_nonlocal_rho_slope(f, k, rho)?;
            cx.expect(le(local, nonlocal, EXACT), || format!("{name} #{k} rho {rho}: local {local} > nonlocal {nonlocal}"));
        }
    }
    let us = setval::f_uniform_strict_slope(f, s, Combiner::Max)?;
    let st = setval::f_strict_slope(f, s, Combiner::Max)?;
    for ((rho, a), (_, u)) in st.per_radius.iter().zip(&us.per_radius) {
        cx.expect(le(*a, *u, EXACT), || format!("{name} at rho {rho}: strict {a} > uniform strict {u}"));
    }
    Ok(())
}

fn prop13(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let f = fx.mapping()?;
        let points = sample_indices(&mut cx.rng, f.len(), 48);
        sr_en_bloc(cx, fx.name, &f, &fx.settings(), &points)?;
    }
    let s = wide();
    for case in 0..20 {
        let f = random_relation(&mut cx.rng);
        let all: Vec<usize> = (0..f.len()).collect();
        sr_en_bloc(cx, &format!("random relation {case}"), &f, &s, &all)?;
    }
    Ok(())
}

fn prop14(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping()?;
        for k in sample_indices(&mut cx.rng, f.len(), 96) {
            if f.offset(k) == 0.0 {
                continue;
            }
            for rho in [0.5, 0.1, 0.01] {
                let a = setval::f_approx_subdiff_rho_slope(&f, k, rho, VGrid::at(rho))?;
                let e = setval::f_subdiff_rho_slope(&f, k, rho)?;
                cx.expect(le(a, e, 1e-12), || format!("{} #{k} rho {rho}: approximate {a} > exact {e}", fx.name));
            }
        }
        let (a, _) = setval::f_approx_strict_subdiff_slope(&f, &s)?;
        let (e, _) = setval::f_strict_subdiff_slope(&f, &s)?;
        for ((rho, a), (_, e)) in a.per_radius.iter().zip(&e.per_radius) {
            cx.expect(le(*a, *e, 1e-12), || format!("{} at rho {rho}: approximate strict {a} > exact {e}", fx.name));
        }
    }
    Ok(())
}

fn prop15(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping()?;
        let (a, _) = setval::f_approx_strict_subdiff_slope(&f, &s)?;
        let (induced, _) = slopes2::strict_outer_subdiff_slope2(&f.induced, &s)?;
        for ((rho, i), (_, a)) in induced.per_radius.iter().zip(&a.per_radius) {
            cx.expect(le(*a, *i, EXACT), || format!("{} at rho {rho}: induced {i} < approximate {a}", fx.name));
        }
    }
    Ok(())
}

fn prop16(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let f = fx.mapping()?;
        for k in sample_indices(&mut cx.rng, f.len(), 128) {
            // the image window cuts the duality faces near its edge
            if f.offset(k) == 0.0 || f.offset(k).abs() > 0.9 {
                continue;
            }
            for rho in [0.3, 2.5] {
                let a = slopes2::subdiff_rho_slope(&f.induced, k, rho)?;
                let b = setval::f_subdiff_rho_slope(&f, k, rho)?;
                cx.expect(same(a, b, EXACT), || format!("{} #{k} rho {rho}: induced {a} vs coderivative {b}", fx.name));
            }
        }
    }
    Ok(())
}

fn prop17(cx: &mut Ctx) -> slopekit::Result<()> {
    for name in ["halfline-mapping", "identity-mapping"] {
        let fx = mapping_fixture(name).expect("catalog entry");
        let s = fx.settings();
        let f = fx.mapping()?;
        cx.expect(f.convex && f.closed, || format!("{name}: graph not flagged convex and closed"));
        let sr = setval::subregularity_constant(&f, &s)?.reported;
        let (st, _) = setval::f_strict_subdiff_slope(&f, &s)?;
        cx.expect(close_limits(sr, st.reported), || format!("{name}: sr {sr} vs strict subdifferential {}", st.reported));
        cx.note(format!("{name}: sr = {sr}, strict subdifferential slope = {}", st.reported));
    }
    Ok(())
}

fn thm18(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let f = fx.mapping()?;
        let sr = setval::subregularity_constant(&f, &s)?.reported;
        let us = setval::f_uniform_strict_slope(&f, &s, Combiner::Max)?.reported;
        cx.expect(le(sr, us, GRID), || format!("{}: sr {sr} > uniform strict {us}", fx.name));
        if f.closed {
            cx.expect(close_limits(sr, us), || format!("{}: sr {sr} vs uniform strict {us}", fx.name));
        }
    }
    let s = wide();
    for case in 0..20 {
        let f = random_relation(&mut cx.rng);
        let sr = setval::subregularity_constant(&f, &s)?;
        let us = setval::f_uniform_strict_slope(&f, &s, Combiner::Max)?;
        for ((rho, a), (_, u)) in sr.per_radius.iter().zip(&us.per_radius) {
            // below 1/ρ the slope candidates along the graph dominate
            if u.value() < 1.0 / rho {
                cx.expect(le(*a, *u, EXACT), || format!("random relation {case} at rho {rho}: sr {a} > uniform strict {u}"));
            }
        }
    }
    Ok(())
}

fn prop22(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let r = gfrerer_limit_test(fx.oracle.as_ref(), fx.base, &s.schedule, 2, LimitSetParams::default())?;
        if r.excludes_origin {
            let f = fx.mapping()?;
            let (g, _) = setval::f_max_approx_ratio(&f, &s)?;
            let v = g.reported;
            cx.expect(v.value() > CriteriaConfig::GRID_ZERO_FLOOR, || format!("{}: exclusion evidence but dual criterion {v}", fx.name));
            cx.note(format!("{}: excludes origin, dual criterion value {v}", fx.name));
        } else {
            cx.note(format!("{}: origin approached", fx.name));
        }
        if fx.name == "parabola-mapping" {
            cx.expect(!r.excludes_origin, || "parabola-mapping: origin reported excluded".into());
        }
    }
    Ok(())
}

fn reduction(cx: &mut Ctx) -> slopekit::Result<()> {
    let s = wide();
    for case in 0..20 {
        let p = random_probe(&mut cx.rng, 40);
        let g = tilde(&p)?;
        let pairs = [
            ("er", slopes2::er2_modulus(&g, &s)?, slopes::er_modulus(&p, &s)?),
            ("uniform strict", slopes2::uniform_strict_slope2(&g, &s, Combiner::Max)?, slopes::uniform_strict_slope(&p, &s)?),
            ("strict outer", slopes2::strict_outer_slope2(&g, &s, Combiner::Max)?, slopes::strict_outer_slope(&p, &s)?),
            ("ratio", slopes2::ratio_liminf2(&g, &s)?, slopes::ratio_liminf(&p, &s)?),
            (
                "max local ratio",
                slopes2::max_local_ratio_liminf2(&g, &s, Combiner::Max)?,
                slopes::max_local_ratio_liminf(&p, &s)?,
            ),
        ];
        for (what, two, one) in pairs {
            for ((rho, a), (_, b)) in two.per_radius.iter().zip(&one.per_radius) {
                cx.expect(same(*a, *b, 1e-12), || format!("random space {case} {what} at rho {rho}: {a} vs {b}"));
            }
        }
        for k in 0..g.len() {
            if !g.on_slice(k) || g.value(k).is_infinite() {
                continue;
            }
            let i = g.points[k].0;
            let nonlocal = slopes::nonlocal_slope(&p, i, f64::INFINITY)?;
            let local = slopes::local_slope(&p, i)?.value;
            for rho in [0.5, 0.1, 0.01] {
                let a = slopes2::nonlocal_rho_slope(&g, k, rho, Combiner::Max)?;
                let b = slopes2::local_rho_slope(&g, k, rho, Combiner::Max)?.value;
                cx.expect(same(a, nonlocal, 1e-12), || format!("random space {case} #{i} rho {rho}: nonlocal {a} vs {nonlocal}"));
                cx.expect(same(b, local, 1e-12), || format!("random space {case} #{i} rho {rho}: local {b} vs {local}"));
            }
        }
    }
    Ok(())
}

fn ekeland(cx: &mut Ctx) -> slopekit::Result<()> {
    let mut non_strict = 0;
    let mut instances = 0;
    while instances < 100 {
        let p = random_probe(&mut cx.rng, 30);
        let finite: Vec<usize> = (0..p.len()).filter(|&i| p.value(i).is_finite()).collect();
        let v = finite[cx.rng.gen_range(0..finite.len())];
        let inf = p.values.iter().copied().fold(ExtReal::INFINITY, ExtReal::min).value();
        let eps = (p.value(v).value() - inf) + cx.rng.gen_range(0.05..2.0);
        let lambda = cx.rng.gen_range(0.1..4.0);
        instances += 1;
        let e = ekeland_point(&p, v, eps, lambda)?;
        let again = verify_ekeland(&p, v, eps, lambda, e.point);
        cx.expect(e.check.holds() && again.holds(), || {
            format!("instance {instances}: v=#{v} eps={eps} lambda={lambda} gave #{} with {:?}", e.point, again)
        });
        if !again.a_strict {
            non_strict += 1;
        }
    }
    cx.note(format!("{instances} instances, {non_strict} with d(x, v) = lambda"));
    Ok(())
}

fn calmness(cx: &mut Ctx) -> slopekit::Result<()> {
    for case in 0..24 {
        let f = random_relation(&mut cx.rng);
        let tau = setval::global_subregularity_ratio(&f);
        let kappa = setval::global_calmness_constant(&f.inverse()?);
        let ok = if kappa == ExtReal::ZERO {
            tau.is_infinite()
        } else {
            tau.is_finite() && kappa.is_finite() && (tau.value() * kappa.value() - 1.0).abs() <= 1e-12
        };
        cx.expect(ok, || format!("random relation {case}: tau {tau}, kappa {kappa}"));
    }
    Ok(())
}

fn catalog(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in function_fixtures() {
        let p = fx.probe()?;
        let s = Settings::with_schedule(fx.schedule);
        let t = fx.truth;
        let got = [
            ("er", slopes::er_modulus(&p, &s)?.reported, Some(t.er)),
            ("uniform strict", slopes::uniform_strict_slope(&p, &s)?.reported, Some(t.uniform_strict)),
            ("strict outer", slopes::strict_outer_slope(&p, &s)?.reported, Some(t.strict_outer)),
            ("strict outer subdifferential", slopes::strict_outer_subdiff_slope(&p, &s)?.0.reported, t.strict_outer_subdiff),
        ];
        for (what, v, truth) in got {
            if let Some(truth) = truth {
                cx.expect(close_to_truth(v, truth), || format!("{} {what}: {v}, expected {truth}", fx.name));
            }
        }
    }
    for fx in two_var_fixtures() {
        let g = fx.probe()?;
        let er = slopes2::er2_modulus(&g, &Settings::with_schedule(fx.schedule))?.reported;
        cx.expect(close_to_truth(er, fx.er), || format!("{} er: {er}, expected {}", fx.name, fx.er));
    }
    let abs = slopekit::catalog::function_fixture("abs").expect("catalog entry");
    let v = slopes::criteria_verdict(&abs.probe()?, CriteriaConfig::new(0.5), &Settings::with_schedule(abs.schedule))?;
    cx.expect(v.conditions.iter().all(|c| c.holds == Some(true)), || "abs: some condition fails at gamma 0.5".into());
    let par = mapping_fixture("parabola-mapping").expect("catalog entry");
    let v = setval::subregularity_verdict(&par.mapping()?, CriteriaConfig::new(0.25), &par.settings())?;
    cx.expect(v.holds('a') == Some(false) && v.holds('b') == Some(false), || "parabola-mapping: reported subregular".into());
    Ok(())
}

fn desk(cx: &mut Ctx) -> slopekit::Result<()> {
    for fx in mapping_fixtures() {
        let s = fx.settings();
        let sr = setval::subregularity_constant(&fx.mapping()?, &s)?;
        let v = sr.reported;
        let ok = match fx.name {
            "identity-mapping" => v.is_finite() && (v.value() - 1.0).abs() <= 1e-6,
            "halfline-mapping" => v.is_finite() && (v.value() - 1.0).abs() <= 1e-2,
            _ if fx.subregularity == 0.0 => {
                let finest = sr.per_radius.last().map(|&(_, b)| b).unwrap_or(ExtReal::INFINITY);
                finest.is_finite() && finest.value() <= 0.1
            }
            _ => close_to_truth(v, fx.subregularity),
        };
        cx.expect(ok, || format!("{} sr: {v}, expected {}", fx.name, fx.subregularity));
        cx.note(format!("{}: sr = {v}", fx.name));
    }
    Ok(())
}
