//! ρ-slopes of functions on `X × Y` and the two-variable error bound.
//!
//! The ρ-metric on `X × Y` is `max{d(x,u), ρ d(y,v)}` (or the sum variant).
//! Strict slopes couple the band radius and the metric parameter: at each
//! schedule radius `ρ` the band `{d(x,x̄) < ρ, 0 < f(x,y) < ρ}` is scanned with
//! the ρ-slope for that same `ρ`.
//!
//! Local ρ-slopes use the finest ball that still sees moves in both factors:
//! its radius is the larger of the distances to the nearest finite-valued
//! point differing in `x` and to the nearest one differing in `y`.

use alloc::vec::Vec;

use crate::criteria::{assemble, rule, AuditClass::*, CriteriaConfig, Requires, Rule, Setting, Verdict};
use crate::error::{Error, Result};
use crate::ext::{extreal_div, ExtReal};
use crate::limit::{estimate_limit, LimitEstimate};
use crate::product::TwoVarProbe;
use crate::slopes::{descent_ratio, local_slope_radii, Coverage, LocalSlope, Settings};
use crate::space::{Combiner, Metric};

fn require_finite<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, i: usize, rho: f64) -> Result<ExtReal> {
    if i >= g.len() {
        return Err(Error::PointOutOfRange(i));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidRho(rho));
    }
    let f = g.value(i);
    if f.is_infinite() {
        return Err(Error::InfiniteValue);
    }
    Ok(f)
}

/// `sup_{(u,v)≠(x,y)} [f(x,y) − f₊(u,v)]₊ / d_ρ((u,v),(x,y))`.
pub fn nonlocal_rho_slope<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    i: usize,
    rho: f64,
    combiner: Combiner,
) -> Result<ExtReal> {
    let f = require_finite(g, i, rho)?;
    let mut best = ExtReal::ZERO;
    for j in 0..g.len() {
        if j == i || g.values[j].is_infinite() {
            continue;
        }
        let d = g.d_rho(i, j, rho, combiner);
        if d > 0.0 {
            best = best.max(descent_ratio(f, g.values[j].positive_part(), d));
        }
    }
    Ok(best)
}

/// Radius of the finest ρ-ball around point `i` that contains finite-valued
/// moves in each factor that has any.
pub fn rho_resolution<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, i: usize, rho: f64, combiner: Combiner) -> f64 {
    let (mut rx, mut ry) = (f64::INFINITY, f64::INFINITY);
    for j in 0..g.len() {
        if j == i || g.values[j].is_infinite() {
            continue;
        }
        let d = g.d_rho(i, j, rho, combiner);
        if g.dx(i, j) > 0.0 {
            rx = rx.min(d);
        }
        if g.dy(i, j) > 0.0 {
            ry = ry.min(d);
        }
    }
    match (rx.is_finite(), ry.is_finite()) {
        (true, true) => rx.max(ry),
        (true, false) => rx,
        (false, true) => ry,
        (false, false) => 0.0,
    }
}

/// `limsup_{(u,v)→(x,y)} [f(x,y) − f(u,v)]₊ / d_ρ((u,v),(x,y))`.
pub fn local_rho_slope<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    i: usize,
    rho: f64,
    combiner: Combiner,
) -> Result<LocalSlope> {
    let f = require_finite(g, i, rho)?;
    let r = rho_resolution(g, i, rho, combiner);
    local_slope_radii(f, &[4.0 * r, 2.0 * r, r], (0..g.len()).filter(|&j| j != i).map(|j| {
        (g.d_rho(i, j, rho, combiner), g.values[j])
    }))
}

fn subgradients<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    i: usize,
    rho: f64,
) -> Result<(&crate::product::SubgradientSet, (crate::space::NormKind, crate::space::NormKind))> {
    require_finite(g, i, rho)?;
    let norms = g.norms.ok_or(Error::NotEvaluable("subgradients need normed factors"))?;
    let set = g.subgradients[i]
        .as_ref()
        .ok_or(Error::NotEvaluable("no subgradient data at this point"))?;
    Ok((set, norms))
}

/// `inf ‖x*‖` over subgradients `(x*, y*)` with `‖y*‖ < ρ`.
pub fn subdiff_rho_slope<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, i: usize, rho: f64) -> Result<ExtReal> {
    let (set, norms) = subgradients(g, i, rho)?;
    Ok(set.rho_slope(rho, norms))
}

/// `inf ‖x*‖ + ρ⁻¹‖y*‖` over subgradients.
pub fn subdiff_rho_slope_primed<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, i: usize, rho: f64) -> Result<ExtReal> {
    let (set, norms) = subgradients(g, i, rho)?;
    Ok(set.rho_slope_primed(rho, norms))
}

/// Band shapes for two-variable strict quantities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Band2 {
    /// `{d(x,x̄) < ρ, f > 0}`
    Positive,
    /// `{d(x,x̄) < ρ, d(y,ȳ) < ρ, f > 0}`
    PositiveNearY,
    /// `{d(x,x̄) < ρ, 0 < f < ρ}`
    Level,
    /// `{d(x,x̄) < ρ, d(y,ȳ) < ρ}` over points selected by a mask
    Masked,
}

fn in_band2(f: ExtReal, dx: f64, dy: f64, rho: f64, kind: Band2) -> bool {
    dx < rho
        && f > ExtReal::ZERO
        && match kind {
            Band2::Positive => true,
            Band2::PositiveNearY => dy < rho,
            Band2::Level => f.value() < rho,
            Band2::Masked => dy < rho,
        }
}

/// Band infima of `q(i, ρ)` along the schedule, with the number of band
/// points (at the widest radius) lacking data.
pub(crate) fn coupled_band<MX: Metric, MY: Metric, F>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
    kind: Band2,
    mask: Option<&[bool]>,
    mut q: F,
) -> Result<(LimitEstimate, Coverage)>
where
    F: FnMut(usize, f64) -> Result<Option<ExtReal>>,
{
    settings.schedule.validate()?;
    let radii = settings.schedule.radii();
    let dx: Vec<f64> = (0..g.len()).map(|i| g.dx(i, g.base)).collect();
    let dy: Vec<f64> = (0..g.len()).map(|i| g.dy(i, g.base)).collect();
    let mut coverage = Coverage::default();
    let mut infima = Vec::with_capacity(radii.len());
    for (k, &rho) in radii.iter().enumerate() {
        let mut inf = f64::INFINITY;
        for i in 0..g.len() {
            if mask.is_some_and(|m| !m[i]) || !in_band2(g.values[i], dx[i], dy[i], rho, kind) {
                continue;
            }
            match q(i, rho)? {
                Some(v) => {
                    inf = inf.min(v.value());
                    if k == 0 {
                        coverage.covered += 1;
                    }
                }
                None if k == 0 => coverage.skipped += 1,
                None => {}
            }
        }
        infima.push(inf);
    }
    let est = estimate_limit(
        |rho| {
            let k = radii.iter().position(|r| *r == rho).expect("schedule radius");
            infima[k]
        },
        &settings.schedule,
        settings.tol,
    )?;
    Ok((est, coverage))
}

fn band2<MX: Metric, MY: Metric, F>(g: &TwoVarProbe<MX, MY>, settings: &Settings, kind: Band2, mut q: F) -> Result<LimitEstimate>
where
    F: FnMut(usize, f64) -> Result<ExtReal>,
{
    coupled_band(g, settings, kind, None, |i, rho| q(i, rho).map(Some)).map(|(e, _)| e)
}

fn er2_band<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, settings: &Settings, kind: Band2) -> Result<LimitEstimate> {
    let (ds, _) = g.slice_distances();
    band2(g, settings, kind, |i, _| Ok(extreal_div(g.value(i), ExtReal::from(ds[i]), ExtReal::ZERO)))
}

/// `Er f(x̄,ȳ) = liminf_{x→x̄, f(x,y)>0} f(x,y) / d(x, S(f))` with
/// `S(f) = {x : f(x,ȳ) ≤ 0}`; `y` ranges over the sampled region.
pub fn er2_modulus<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, settings: &Settings) -> Result<LimitEstimate> {
    er2_band(g, settings, Band2::Positive)
}

/// The modulus over the bands `x → x̄`; `x → x̄, y → ȳ`; and `x → x̄, f ↓ 0`.
pub fn er2_equivalent_forms<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
) -> Result<[LimitEstimate; 3]> {
    Ok([
        er2_band(g, settings, Band2::Positive)?,
        er2_band(g, settings, Band2::PositiveNearY)?,
        er2_band(g, settings, Band2::Level)?,
    ])
}

/// `lim_{ρ↓0} inf { |∇f|◇_ρ(x,y) : d(x,x̄) < ρ, 0 < f(x,y) < ρ }`.
pub fn uniform_strict_slope2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
    combiner: Combiner,
) -> Result<LimitEstimate> {
    band2(g, settings, Band2::Level, |i, rho| nonlocal_rho_slope(g, i, rho, combiner))
}

/// `lim_{ρ↓0} inf { |∇f|_ρ(x,y) : d(x,x̄) < ρ, 0 < f(x,y) < ρ }`.
pub fn strict_outer_slope2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
    combiner: Combiner,
) -> Result<LimitEstimate> {
    band2(g, settings, Band2::Level, |i, rho| Ok(local_rho_slope(g, i, rho, combiner)?.value))
}

fn base_ratio2<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, i: usize) -> ExtReal {
    extreal_div(g.value(i).positive_part(), ExtReal::from(g.dx(i, g.base)), ExtReal::ZERO)
}

/// `liminf_{x→x̄, f(x,y)↓0} f(x,y) / d(x, x̄)`.
pub fn ratio_liminf2<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, settings: &Settings) -> Result<LimitEstimate> {
    band2(g, settings, Band2::Level, |i, _| Ok(base_ratio2(g, i)))
}

/// `liminf_{x→x̄, f(x,y)↓0} max{|∇f|_ρ(x,y), f(x,y)/d(x,x̄)}`.
pub fn max_local_ratio_liminf2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
    combiner: Combiner,
) -> Result<LimitEstimate> {
    band2(g, settings, Band2::Level, |i, rho| {
        Ok(local_rho_slope(g, i, rho, combiner)?.value.max(base_ratio2(g, i)))
    })
}

fn subdiff_band2<MX: Metric, MY: Metric, F>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
    q: F,
) -> Result<(LimitEstimate, Coverage)>
where
    F: Fn(usize, ExtReal) -> ExtReal,
{
    if g.norms.is_none() {
        return Err(Error::NotEvaluable("subgradients need normed factors"));
    }
    coupled_band(g, settings, Band2::Level, None, |i, rho| match subdiff_rho_slope(g, i, rho) {
        Ok(s) => Ok(Some(q(i, s))),
        Err(Error::NotEvaluable(_)) => Ok(None),
        Err(e) => Err(e),
    })
}

/// `lim_{ρ↓0} inf { |∂f|_ρ(x,y) : ‖x−x̄‖ < ρ, 0 < f(x,y) < ρ }`.
pub fn strict_outer_subdiff_slope2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
) -> Result<(LimitEstimate, Coverage)> {
    subdiff_band2(g, settings, |_, s| s)
}

/// `liminf_{x→x̄, f(x,y)↓0} max{|∂f|_ρ(x,y), f(x,y)/‖x−x̄‖}`.
pub fn max_subdiff_ratio_liminf2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    settings: &Settings,
) -> Result<(LimitEstimate, Coverage)> {
    subdiff_band2(g, settings, |i, s| s.max(base_ratio2(g, i)))
}

/// Every two-variable quantity at one point and at the base point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoVarSlopeReport {
    pub point: usize,
    pub rho: f64,
    pub metric_variant: Combiner,
    pub nonlocal_rho_slope: ExtReal,
    pub local_rho_slope: LocalSlope,
    pub subdiff_rho_slope: Option<ExtReal>,
    pub uniform_strict: LimitEstimate,
    pub strict_outer: LimitEstimate,
    pub subdiff_strict_outer: Option<LimitEstimate>,
    pub subdiff_coverage: Coverage,
    pub er2: LimitEstimate,
    /// Some distance to `S(f)` may be clipped by the sampled region.
    pub level_set_truncated: bool,
}

pub fn two_var_report<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    point: usize,
    rho: f64,
    settings: &Settings,
    combiner: Combiner,
) -> Result<TwoVarSlopeReport> {
    let (subdiff_strict_outer, subdiff_coverage) = match strict_outer_subdiff_slope2(g, settings) {
        Ok((e, c)) => (Some(e), c),
        Err(Error::NotEvaluable(_)) => (None, Coverage::default()),
        Err(e) => return Err(e),
    };
    let subdiff = match subdiff_rho_slope(g, point, rho) {
        Ok(s) => Some(s),
        Err(Error::NotEvaluable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TwoVarSlopeReport {
        point,
        rho,
        metric_variant: combiner,
        nonlocal_rho_slope: nonlocal_rho_slope(g, point, rho, combiner)?,
        local_rho_slope: local_rho_slope(g, point, rho, combiner)?,
        subdiff_rho_slope: subdiff,
        uniform_strict: uniform_strict_slope2(g, settings, combiner)?,
        strict_outer: strict_outer_slope2(g, settings, combiner)?,
        subdiff_strict_outer,
        subdiff_coverage,
        er2: er2_modulus(g, settings)?,
        level_set_truncated: g.slice_distances().1,
    })
}

const TWO_VAR_RULES: [Rule; 9] = [
    rule("(c) => (e)", 'c', 'e', Exact, Requires::Nothing),
    rule("(d) => (e)", 'd', 'e', Exact, Requires::Nothing),
    rule("(e) => (b)", 'e', 'b', Asymptotic, Requires::Nothing),
    rule("(a) => (b) when gamma < tau", 'a', 'b', Asymptotic, Requires::Nothing),
    rule("(d) => (f), normed", 'd', 'f', Asymptotic, Requires::Normed),
    rule("(e) => (g), normed", 'e', 'g', Asymptotic, Requires::Normed),
    rule("(b) => (a) with tau = gamma", 'b', 'a', Asymptotic, Requires::CompleteLsc),
    rule("(d) <= (f)", 'f', 'd', Asymptotic, Requires::Asplund),
    rule("(e) <= (g)", 'g', 'e', Asymptotic, Requires::Asplund),
];

pub fn setting_of2<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>) -> Setting {
    let normed = g.norms.is_some();
    Setting {
        normed,
        complete: g.complete,
        lsc: g.lsc,
        asplund: normed,
        convex: g.convex,
        smooth_range: g.norms.is_some_and(|n| n.1.is_smooth()),
        nonnegative: g.values.iter().all(|v| *v >= ExtReal::ZERO),
        exact_oracle: g.exact_oracle,
    }
}

/// Conditions (a)–(g) of the two-variable error bound criteria at `(x̄,ȳ)`
/// with the MAX ρ-metric, and the implication audit.
pub fn criteria_verdict2<MX: Metric, MY: Metric>(
    g: &TwoVarProbe<MX, MY>,
    config: CriteriaConfig,
    settings: &Settings,
) -> Result<Verdict> {
    let c = Combiner::Max;
    let optional = |r: Result<(LimitEstimate, Coverage)>| match r {
        Ok((e, _)) => Ok(Some(e.reported)),
        Err(Error::NotEvaluable(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let quantities = alloc::vec![
        ('a', "error bound with tau = Er f > 0", Some(er2_modulus(g, settings)?.reported)),
        ('b', "uniform strict slope > gamma", Some(uniform_strict_slope2(g, settings, c)?.reported)),
        ('c', "liminf f(x,y)/d(x, xbar) > gamma", Some(ratio_liminf2(g, settings)?.reported)),
        ('d', "strict outer slope > gamma", Some(strict_outer_slope2(g, settings, c)?.reported)),
        ('e', "liminf max{rho-slope, f(x,y)/d(x, xbar)} > gamma", Some(max_local_ratio_liminf2(g, settings, c)?.reported)),
        ('f', "strict outer subdifferential slope > gamma", optional(strict_outer_subdiff_slope2(g, settings))?),
        ('g', "liminf max{subdifferential rho-slope, f(x,y)/|x - xbar|} > gamma", optional(max_subdiff_ratio_liminf2(g, settings))?),
    ];
    assemble(config, setting_of2(g), quantities, &TWO_VAR_RULES)
}
