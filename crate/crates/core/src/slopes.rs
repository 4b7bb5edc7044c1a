//! Primal and dual slopes of a single-variable function and the error bound
//! modulus.
//!
//! Pointwise slopes are suprema over the probe set. The strict slopes and the
//! modulus are infima over the bands `{d(x,x̄) < ρ, 0 < f(x) < ρ}` (or
//! `{d(x,x̄) < ρ, f(x) > 0}` for the modulus) along a radius schedule.
//!
//! Local slopes need a notion of "arbitrarily close" on a discrete probe set.
//! The resolution at `x` is the distance `r` to the nearest other point with a
//! finite value, and the limsup is read off the closed ball of radius `r`
//! (with coarser balls `4r`, `2r` kept as diagnostics).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::{extreal_div, ExtReal};
use crate::function::Probe;
use crate::limit::{estimate_limit, LimitEstimate, RadiusSchedule, DEFAULT_TOL};
use crate::space::Metric;

/// Band and schedule settings shared by all strict quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Settings {
    pub schedule: RadiusSchedule,
    pub tol: f64,
    /// Use the two-sided band `|f(x)| < ρ` (with `x ≠ x̄`) instead of `0 < f(x) < ρ`.
    pub two_sided: bool,
    /// Initial search radius for nonlocal slopes (expanded automatically).
    pub search_radius: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            schedule: RadiusSchedule::default(),
            tol: DEFAULT_TOL,
            two_sided: false,
            search_radius: f64::INFINITY,
        }
    }
}

impl Settings {
    pub fn with_schedule(schedule: RadiusSchedule) -> Self {
        Settings { schedule, ..Settings::default() }
    }
}

/// A limsup over shrinking punctured balls.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocalSlope {
    pub value: ExtReal,
    /// `(r, sup over 0 < d(u,x) ≤ r)` for each probe radius.
    pub per_radius: Vec<(f64, ExtReal)>,
    /// The punctured ball was empty at the finest radius.
    pub isolated: bool,
}

/// Descent ratio `[f(x) − g]₊ / d` with `g` possibly `+∞`.
#[inline]
pub(crate) fn descent_ratio(fx: ExtReal, g: ExtReal, d: f64) -> ExtReal {
    extreal_div(ExtReal::finite(fx.descent(g)), ExtReal::finite(d), ExtReal::ZERO)
}

fn require_finite<M: Metric>(p: &Probe<M>, i: usize) -> Result<ExtReal> {
    if i >= p.len() {
        return Err(Error::PointOutOfRange(i));
    }
    let fx = p.value(i);
    if fx.is_infinite() {
        return Err(Error::InfiniteValue);
    }
    Ok(fx)
}

/// Local slope with explicit probe radii (decreasing); the last radius is
/// the resolution at which the value is reported.
pub fn local_slope_with<M: Metric>(p: &Probe<M>, i: usize, radii: &[f64]) -> Result<LocalSlope> {
    let fx = require_finite(p, i)?;
    local_slope_radii(fx, radii, (0..p.len()).filter(|&j| j != i).map(|j| (p.dist(i, j), p.value(j))))
}

/// Sups of the descent ratio over the closed punctured balls of `radii`,
/// given the `(distance, value)` pairs of the other points.
pub(crate) fn local_slope_radii<I>(fx: ExtReal, radii: &[f64], others: I) -> Result<LocalSlope>
where
    I: Iterator<Item = (f64, ExtReal)>,
{
    if radii.is_empty() || radii.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Precondition("probe radii must be a nonempty decreasing list".into()));
    }
    let mut sups = alloc::vec![ExtReal::ZERO; radii.len()];
    let mut nonempty = alloc::vec![false; radii.len()];
    for (d, fj) in others {
        if d == 0.0 || d > radii[0] {
            continue;
        }
        let r = descent_ratio(fx, fj, d);
        for k in 0..radii.len() {
            if d <= radii[k] {
                nonempty[k] = true;
                sups[k] = sups[k].max(r);
            }
        }
    }
    let isolated = !nonempty[radii.len() - 1];
    Ok(LocalSlope {
        value: sups[radii.len() - 1],
        per_radius: radii.iter().copied().zip(sups).collect(),
        isolated,
    })
}

/// Default probe radii `[4r, 2r, r]` at the resolution `r` of point `i`.
pub fn default_radii<M: Metric>(p: &Probe<M>, i: usize) -> [f64; 3] {
    let r = p.finite_neighbour_distance(i);
    [4.0 * r, 2.0 * r, r]
}

/// `|∇f|(x) = limsup_{u→x} [f(x) − f(u)]₊ / d(u,x)` at the probe resolution.
pub fn local_slope<M: Metric>(p: &Probe<M>, i: usize) -> Result<LocalSlope> {
    local_slope_with(p, i, &default_radii(p, i))
}

/// `|∇f|◇(x) = sup_{u≠x} [f(x) − f₊(u)]₊ / d(u,x)`.
///
/// Candidates are first taken from `B_R(x)` with `R = search_radius`; `R` is
/// doubled while a farther point could still beat the current best, that is
/// while `f(x)/R` exceeds it.
pub fn nonlocal_slope<M: Metric>(p: &Probe<M>, i: usize, search_radius: f64) -> Result<ExtReal> {
    let fx = require_finite(p, i)?;
    if !(search_radius > 0.0) {
        return Err(Error::Precondition("search radius must be positive".into()));
    }
    let dists: Vec<f64> = (0..p.len()).map(|j| p.dist(i, j)).collect();
    let far = dists.iter().copied().fold(0.0, f64::max);
    let mut radius = search_radius;
    loop {
        let mut best = ExtReal::ZERO;
        for (j, &d) in dists.iter().enumerate() {
            if j != i && d > 0.0 && d <= radius {
                best = best.max(descent_ratio(fx, p.positive_part(j), d));
            }
        }
        if radius >= far || ExtReal::finite(fx.positive_part().value() / radius) <= best {
            return Ok(best);
        }
        radius *= 2.0;
    }
}

/// Region `D(x)` of a restricted nonlocal slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Region {
    /// `D(x) = {u : d(u, S(f)) ≤ d(x, S(f))}`
    SublevelDist,
    /// `D(x) = S(f)`, giving `f₊(x) / d(x, S(f))` with `0/0 = 0`.
    LevelSet,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Restricted {
    pub value: ExtReal,
    /// `S(f)` has no probe point (or the sampled region may clip it).
    pub truncated: bool,
}

/// `sup_{u ∈ D(x), u ≠ x} [f(x) − f₊(u)]₊ / d(u,x)`.
pub fn restricted_nonlocal_slope<M: Metric>(p: &Probe<M>, i: usize, region: Region) -> Result<Restricted> {
    let fx = require_finite(p, i)?;
    let level = p.dist_to_level_set(i, f64::INFINITY);
    if level.value.is_infinite() {
        return Ok(Restricted { value: ExtReal::INFINITY, truncated: true });
    }
    let value = match region {
        Region::LevelSet => extreal_div(fx.positive_part(), level.value, ExtReal::ZERO),
        Region::SublevelDist => {
            let ds = p.level_distances();
            let dx = ds[i];
            let mut best = ExtReal::ZERO;
            for j in 0..p.len() {
                let d = p.dist(i, j);
                if j != i && d > 0.0 && ds[j] <= dx {
                    best = best.max(descent_ratio(fx, p.positive_part(j), d));
                }
            }
            best
        }
    };
    Ok(Restricted { value, truncated: level.truncated })
}

/// `|∂f|(x) = inf_{x* ∈ ∂f(x)} ‖x*‖` (`+∞` for an empty subdifferential).
pub fn subdiff_slope<M: Metric>(p: &Probe<M>, i: usize) -> Result<ExtReal> {
    require_finite(p, i)?;
    let norm = p.dual_norm.ok_or(Error::NotEvaluable("subgradients need a normed space"))?;
    let grads = p.subgradients[i]
        .as_ref()
        .ok_or(Error::NotEvaluable("no subgradient data at this point"))?;
    Ok(grads
        .iter()
        .map(|g| ExtReal::finite(norm.norm(g)))
        .fold(ExtReal::INFINITY, ExtReal::min))
}

/// Which band a strict quantity ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BandKind {
    /// `{d(x,x̄) < ρ, f(x) > 0}`
    Positive,
    /// `{d(x,x̄) < ρ, 0 < f(x) < ρ}` (or the two-sided variant)
    Level,
}

pub(crate) fn in_band(f: ExtReal, d_base: f64, rho: f64, kind: BandKind, two_sided: bool) -> bool {
    if !(d_base < rho) {
        return false;
    }
    match kind {
        BandKind::Positive => f > ExtReal::ZERO,
        BandKind::Level if two_sided => d_base > 0.0 && f.value().abs() < rho,
        BandKind::Level => f > ExtReal::ZERO && f.value() < rho,
    }
}

/// Infimum of `q` over the bands, one value per schedule radius.
///
/// `q` is evaluated once per point of the widest band; `None` marks points
/// without data, which are skipped and counted.
pub(crate) fn band_estimate<F>(
    f_values: &[ExtReal],
    d_base: &[f64],
    settings: &Settings,
    kind: BandKind,
    mut q: F,
) -> Result<(LimitEstimate, Coverage)>
where
    F: FnMut(usize) -> Result<Option<ExtReal>>,
{
    settings.schedule.validate()?;
    let rho0 = settings.schedule.rho0;
    let mut members = Vec::new();
    for i in 0..f_values.len() {
        if in_band(f_values[i], d_base[i], rho0, kind, settings.two_sided) {
            members.push((i, q(i)?));
        }
    }
    let coverage = Coverage {
        covered: members.iter().filter(|m| m.1.is_some()).count(),
        skipped: members.iter().filter(|m| m.1.is_none()).count(),
    };
    let est = estimate_limit(
        |rho| {
            members
                .iter()
                .filter(|(i, _)| in_band(f_values[*i], d_base[*i], rho, kind, settings.two_sided))
                .filter_map(|(_, v)| v.map(ExtReal::value))
                .fold(f64::INFINITY, f64::min)
        },
        &settings.schedule,
        settings.tol,
    )?;
    Ok((est, coverage))
}

/// Band points with and without oracle data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coverage {
    pub covered: usize,
    pub skipped: usize,
}

fn base_distances<M: Metric>(p: &Probe<M>) -> Vec<f64> {
    (0..p.len()).map(|i| p.dist(i, p.base)).collect()
}

fn band<M: Metric, F>(p: &Probe<M>, settings: &Settings, kind: BandKind, mut q: F) -> Result<LimitEstimate>
where
    F: FnMut(usize) -> Result<ExtReal>,
{
    p.require_base_zero()?;
    let d = base_distances(p);
    band_estimate(&p.values, &d, settings, kind, |i| q(i).map(Some)).map(|(e, _)| e)
}

/// `Er f(x̄) = liminf_{x→x̄, f(x)>0} f(x) / d(x, S(f))`.
pub fn er_modulus<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<LimitEstimate> {
    let ds = p.level_distances();
    band(p, settings, BandKind::Positive, |i| {
        Ok(extreal_div(p.value(i), ExtReal::from(ds[i]), ExtReal::ZERO))
    })
}

/// `liminf_{x→x̄, f(x)↓0} |∇f|(x)`.
pub fn strict_outer_slope<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<LimitEstimate> {
    band(p, settings, BandKind::Level, |i| Ok(local_slope(p, i)?.value))
}

/// `liminf_{x→x̄, f(x)↓0} |∇f|◇(x)`.
pub fn uniform_strict_slope<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<LimitEstimate> {
    band(p, settings, BandKind::Level, |i| nonlocal_slope(p, i, settings.search_radius))
}

/// `liminf_{x→x̄, f(x)↓0} f(x) / d(x, x̄)`.
pub fn ratio_liminf<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<LimitEstimate> {
    let base = p.base;
    band(p, settings, BandKind::Level, |i| Ok(base_ratio(p, i, base)))
}

pub(crate) fn base_ratio<M: Metric>(p: &Probe<M>, i: usize, base: usize) -> ExtReal {
    extreal_div(p.value(i).positive_part(), ExtReal::from(p.dist(i, base)), ExtReal::ZERO)
}

/// `liminf_{x→x̄, f(x)↓0} max{|∇f|(x), f(x)/d(x,x̄)}`.
pub fn max_local_ratio_liminf<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<LimitEstimate> {
    let base = p.base;
    band(p, settings, BandKind::Level, |i| {
        Ok(local_slope(p, i)?.value.max(base_ratio(p, i, base)))
    })
}

/// Band infimum of a subgradient-based quantity, skipping points without data.
fn subdiff_band<M: Metric, F>(p: &Probe<M>, settings: &Settings, q: F) -> Result<(LimitEstimate, Coverage)>
where
    F: Fn(usize, ExtReal) -> ExtReal,
{
    p.require_base_zero()?;
    if p.dual_norm.is_none() {
        return Err(Error::NotEvaluable("subgradients need a normed space"));
    }
    let d = base_distances(p);
    band_estimate(&p.values, &d, settings, BandKind::Level, |i| match subdiff_slope(p, i) {
        Ok(s) => Ok(Some(q(i, s))),
        Err(Error::NotEvaluable(_)) => Ok(None),
        Err(e) => Err(e),
    })
}

/// `liminf_{x→x̄, f(x)↓0} |∂f|(x)`, with the number of band points lacking data.
pub fn strict_outer_subdiff_slope<M: Metric>(p: &Probe<M>, settings: &Settings) -> Result<(LimitEstimate, Coverage)> {
    subdiff_band(p, settings, |_, s| s)
}

/// `liminf_{x→x̄, f(x)↓0} max{|∂f|(x), f(x)/‖x − x̄‖}`.
pub fn max_subdiff_ratio_liminf<M: Metric>(
    p: &Probe<M>,
    settings: &Settings,
) -> Result<(LimitEstimate, Coverage)> {
    let base = p.base;
    subdiff_band(p, settings, |i, s| s.max(base_ratio(p, i, base)))
}

/// Every single-variable quantity at one probe point and at the base point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopeReport {
    pub point: usize,
    pub local_slope: LocalSlope,
    pub nonlocal_slope: ExtReal,
    pub restricted_nonlocal_slope: Restricted,
    pub restricted_level_set_slope: Restricted,
    pub subdiff_slope: Option<ExtReal>,
    pub strict_outer: LimitEstimate,
    pub uniform_strict: LimitEstimate,
    pub ratio_liminf: LimitEstimate,
    pub subdiff_strict_outer: Option<LimitEstimate>,
    pub subdiff_coverage: Coverage,
    pub er_modulus: LimitEstimate,
    /// `S(f)` has no probe point.
    pub empty_level_set: bool,
    /// At least one level-set distance may be clipped by the sampled region.
    pub level_set_truncated: bool,
}

/// Computes a [`SlopeReport`] with pointwise quantities at `point`.
pub fn slope_report<M: Metric>(p: &Probe<M>, point: usize, settings: &Settings) -> Result<SlopeReport> {
    let empty_level_set = p.level_set().is_empty();
    let ds = p.level_distances();
    let level_set_truncated = (0..p.len()).any(|i| p.value(i) > ExtReal::ZERO && ds[i] > p.depth[i]);
    let (subdiff_strict_outer, subdiff_coverage) = match strict_outer_subdiff_slope(p, settings) {
        Ok((e, c)) => (Some(e), c),
        Err(Error::NotEvaluable(_)) => (None, Coverage::default()),
        Err(e) => return Err(e),
    };
    let subdiff = match subdiff_slope(p, point) {
        Ok(s) => Some(s),
        Err(Error::NotEvaluable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SlopeReport {
        point,
        local_slope: local_slope(p, point)?,
        nonlocal_slope: nonlocal_slope(p, point, settings.search_radius)?,
        restricted_nonlocal_slope: restricted_nonlocal_slope(p, point, Region::SublevelDist)?,
        restricted_level_set_slope: restricted_nonlocal_slope(p, point, Region::LevelSet)?,
        subdiff_slope: subdiff,
        strict_outer: strict_outer_slope(p, settings)?,
        uniform_strict: uniform_strict_slope(p, settings)?,
        ratio_liminf: ratio_liminf(p, settings)?,
        subdiff_strict_outer,
        subdiff_coverage,
        er_modulus: er_modulus(p, settings)?,
        empty_level_set,
        level_set_truncated,
    })
}

use crate::criteria::{assemble, rule, AuditClass::*, CriteriaConfig, Requires, Rule, Setting, Verdict};
use crate::function::OracleKind;

const SINGLE_RULES: [Rule; 14] = [
    rule("(c) => (e)", 'c', 'e', Exact, Requires::Nothing),
    rule("(d) => (e)", 'd', 'e', Exact, Requires::Nothing),
    rule("(e) => (b)", 'e', 'b', Exact, Requires::Nothing),
    rule("(a) => (b) when gamma < tau", 'a', 'b', Exact, Requires::Nothing),
    rule("(d) => (f)", 'd', 'f', Exact, Requires::NormedExactOracle),
    rule("(e) => (g)", 'e', 'g', Exact, Requires::NormedExactOracle),
    rule("(b) => (a) with tau = gamma", 'b', 'a', Asymptotic, Requires::CompleteLsc),
    rule("(d) <= (f)", 'f', 'd', Asymptotic, Requires::Asplund),
    rule("(e) <= (g)", 'g', 'e', Asymptotic, Requires::Asplund),
    rule("(b) => (d), convex", 'b', 'd', Asymptotic, Requires::Convex),
    rule("(d) => (f), convex", 'd', 'f', Asymptotic, Requires::Convex),
    rule("(f) => (b), convex", 'f', 'b', Asymptotic, Requires::Convex),
    rule("(d) => (f), normed", 'd', 'f', Asymptotic, Requires::Normed),
    rule("(e) => (g), normed", 'e', 'g', Asymptotic, Requires::Normed),
];

/// Structural facts of a single-variable probe.
pub fn setting_of<M: Metric>(p: &Probe<M>) -> Setting {
    let normed = p.dual_norm.is_some();
    Setting {
        normed,
        complete: p.complete,
        lsc: p.lsc,
        asplund: normed,
        convex: p.convex,
        smooth_range: false,
        nonnegative: p.values.iter().all(|v| *v >= ExtReal::ZERO),
        exact_oracle: p.oracle == Some(OracleKind::Exact),
    }
}

/// Conditions (a)–(g) of the error bound criteria at the base point, with the
/// implication audit. Conditions needing subgradients are `None` without them.
pub fn criteria_verdict<M: Metric>(p: &Probe<M>, config: CriteriaConfig, settings: &Settings) -> Result<Verdict> {
    let setting = setting_of(p);
    let optional = |r: Result<(LimitEstimate, Coverage)>| match r {
        Ok((e, _)) => Ok(Some(e.reported)),
        Err(Error::NotEvaluable(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let quantities = alloc::vec![
        ('a', "local error bound with tau = Er f > 0", Some(er_modulus(p, settings)?.reported)),
        ('b', "uniform strict slope > gamma", Some(uniform_strict_slope(p, settings)?.reported)),
        ('c', "liminf f(x)/d(x, xbar) > gamma", Some(ratio_liminf(p, settings)?.reported)),
        ('d', "strict outer slope > gamma", Some(strict_outer_slope(p, settings)?.reported)),
        ('e', "liminf max{local slope, f(x)/d(x, xbar)} > gamma", Some(max_local_ratio_liminf(p, settings)?.reported)),
        ('f', "strict outer subdifferential slope > gamma", optional(strict_outer_subdiff_slope(p, settings))?),
        ('g', "liminf max{subdifferential slope, f(x)/|x - xbar|} > gamma", optional(max_subdiff_ratio_liminf(p, settings))?),
    ];
    // (e) => (b) rests on the local slope not exceeding the nonlocal one, which
    // on a probe set is guaranteed only for nonnegative functions
    let mut rules: Vec<Rule> = SINGLE_RULES.into_iter().collect();
    if !setting.nonnegative {
        rules[2].class = Asymptotic;
        rules[2].requires = Requires::CompleteLsc;
    }
    assemble(config, setting, quantities, &rules)
}
