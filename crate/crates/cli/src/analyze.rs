//! The `analyze` pipeline for each input kind.

use serde::Serialize;
use slopekit::catalog::GroundTruth;
use slopekit::criteria::{CriteriaConfig, Verdict};
use slopekit::function::Probe;
use slopekit::limit::LimitEstimate;
use slopekit::product::{ConditionsReport, TwoVarProbe};
use slopekit::setval::{self, LimitSetParams, LimitSetReport, LineMapping, SetValuedMapping};
use slopekit::slopes::{self, LocalSlope, Settings, SlopeReport};
use slopekit::slopes2;
use slopekit::{Combiner, EuclideanSpace, ExtReal, FiniteMetricSpace, Metric, RadiusSchedule, Vector, DEFAULT_TOL};

use crate::error::CliError;
use crate::spec::{Kind, Loaded, ScheduleSpec, Source};

/// Overrides from the command line; each wins over the spec file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// Base point: coordinates, or indices for finite inputs.
    pub at: Option<Vec<f64>>,
    /// Point for the pointwise quantities (defaults to the base point).
    pub point: Option<Vec<f64>>,
    pub schedule: Option<RadiusSchedule>,
    pub tol: Option<f64>,
    pub gamma: Option<f64>,
}

/// One reported quantity. Limits carry their full band sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quantity {
    pub name: String,
    /// `"base"` for limits at the base point, `"point"` for pointwise values.
    pub at: &'static str,
    pub value: Option<ExtReal>,
    pub per_radius: Vec<(f64, ExtReal)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saturated: Option<bool>,
}

impl Quantity {
    fn limit(name: &str, e: &LimitEstimate) -> Self {
        Quantity {
            name: name.into(),
            at: "base",
            value: Some(e.reported),
            per_radius: e.per_radius.clone(),
            monotone: Some(e.monotone),
            saturated: Some(e.saturated),
        }
    }

    fn optional_limit(name: &str, e: Option<&LimitEstimate>) -> Self {
        match e {
            Some(e) => Quantity::limit(name, e),
            None => Quantity { name: name.into(), at: "base", value: None, per_radius: Vec::new(), monotone: None, saturated: None },
        }
    }

    fn point(name: &str, v: Option<ExtReal>) -> Self {
        Quantity { name: name.into(), at: "point", value: v, per_radius: Vec::new(), monotone: None, saturated: None }
    }

    fn local(name: &str, s: &LocalSlope) -> Self {
        Quantity { per_radius: s.per_radius.clone(), ..Quantity::point(name, Some(s.value)) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truth {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Headline {
    pub property: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub input: String,
    pub kind: Kind,
    pub base: String,
    pub point: String,
    pub probe_points: usize,
    pub schedule: ScheduleSpec,
    pub tol: f64,
    pub gamma: f64,
    pub quantities: Vec<Quantity>,
    pub verdict: Verdict,
    pub headline: Headline,
    pub ground_truth: Vec<Truth>,
    /// Diagnostics: non-monotone or unsaturated estimates, truncation and
    /// coverage warnings.
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_set: Option<LimitSetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionsReport>,
}

struct Resolved {
    schedule: RadiusSchedule,
    tol: f64,
    gamma: f64,
}

fn resolved(loaded: &Loaded, o: &Overrides, default_schedule: RadiusSchedule) -> Resolved {
    Resolved {
        schedule: o.schedule.or(loaded.spec.schedule.map(Into::into)).unwrap_or(default_schedule),
        tol: o.tol.or(loaded.spec.tol).unwrap_or(DEFAULT_TOL),
        gamma: o.gamma.or(loaded.spec.gamma).unwrap_or(0.5),
    }
}

fn flag_err(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Flag { flag, message: message.into() }
}

fn fmt_coords(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(", "))
}

fn index_arg(flag: &'static str, v: &[f64], n: usize) -> Result<usize, CliError> {
    match v {
        [i] if i.fract() == 0.0 && *i >= 0.0 && (*i as usize) < n => Ok(*i as usize),
        _ => Err(flag_err(flag, format!("expected a point index below {n}"))),
    }
}

fn find_point(p: &Probe<EuclideanSpace>, coords: &[f64], flag: &'static str) -> Result<usize, CliError> {
    if coords.len() != p.space.dim {
        return Err(flag_err(flag, format!("expected {} coordinates", p.space.dim)));
    }
    let target = Vector::new(coords);
    p.points
        .iter()
        .position(|q| p.space.distance(q, &target) <= 1e-9)
        .ok_or_else(|| flag_err(flag, format!("{} is not a probe point", fmt_coords(coords))))
}

/// Runs the pipeline for the loaded input.
pub fn analyze(loaded: &Loaded, o: &Overrides) -> Result<Report, CliError> {
    match &loaded.source {
        Source::FunctionFixture(fx) => {
            let mut fx_base = fx.base;
            if let Some(at) = &o.at {
                if at.len() != fx.space.dim {
                    return Err(flag_err("--at", format!("expected {} coordinates", fx.space.dim)));
                }
                fx_base = Vector::new(at);
            }
            let p = Probe::sample(fx.space, fx.grid, fx.function.as_ref(), &fx_base)?;
            let r = resolved(loaded, o, fx.schedule);
            let point = match &o.point {
                Some(c) => find_point(&p, c, "--point")?,
                None => p.base,
            };
            let pristine = fx_base == fx.base && o.schedule.is_none() && loaded.spec.schedule.is_none();
            let truth = if pristine { truths(&fx.truth) } else { Vec::new() };
            let label = |i: usize| fmt_coords(p.points[i].coords());
            function_report(loaded, &p, point, r, CriteriaConfig::GRID_ZERO_FLOOR, truth, label(p.base), label(point))
        }
        Source::Piecewise { function, grid, base } => {
            let b = match &o.at {
                Some(at) if at.len() == 1 => at[0],
                Some(_) => return Err(flag_err("--at", "expected 1 coordinate")),
                None => *base,
            };
            let p = Probe::sample(EuclideanSpace::line(), *grid, function, &Vector::scalar(b))?;
            let r = resolved(loaded, o, RadiusSchedule::default().truncated_at(4.0 * grid.h));
            let point = match &o.point {
                Some(c) => find_point(&p, c, "--point")?,
                None => p.base,
            };
            let label = |i: usize| fmt_coords(p.points[i].coords());
            function_report(loaded, &p, point, r, CriteriaConfig::GRID_ZERO_FLOOR, Vec::new(), label(p.base), label(point))
        }
        Source::Finite(p) => {
            let mut p = p.clone();
            if let Some(at) = &o.at {
                p.base = index_arg("--at", at, p.len())?;
            }
            let point = match &o.point {
                Some(c) => index_arg("--point", c, p.len())?,
                None => p.base,
            };
            let r = resolved(loaded, o, RadiusSchedule::default());
            let (b, q) = (format!("#{}", p.base), format!("#{point}"));
            function_report(loaded, &p, point, r, CriteriaConfig::FINITE_ZERO_FLOOR, Vec::new(), b, q)
        }
        Source::TwoVarFixture(fx) => {
            if o.at.is_some() || o.point.is_some() {
                return Err(flag_err("--at", "two-variable fixtures have a fixed base point"));
            }
            let g = fx.probe()?;
            let r = resolved(loaded, o, fx.schedule);
            let truth = if o.schedule.is_none() && loaded.spec.schedule.is_none() {
                vec![Truth { name: "er".into(), value: fx.er }]
            } else {
                Vec::new()
            };
            two_var_report(loaded, &g, r, truth)
        }
        Source::MappingFixture(fx) => {
            let mut base = fx.base;
            if let Some(at) = &o.at {
                match at.as_slice() {
                    [x, y] => base = (*x, *y),
                    _ => return Err(flag_err("--at", "expected x,y")),
                }
            }
            if o.point.is_some() {
                return Err(flag_err("--point", "mappings report quantities at the base point only"));
            }
            let f = LineMapping::sample(fx.oracle.as_ref(), fx.grid, fx.y_window, fx.hy, base)?;
            let r = resolved(loaded, o, fx.schedule);
            let truth = if base == fx.base && o.schedule.is_none() && loaded.spec.schedule.is_none() {
                vec![Truth { name: "sr".into(), value: fx.subregularity }]
            } else {
                Vec::new()
            };
            line_mapping_report(loaded, &f, fx.oracle.as_ref(), base, r, truth)
        }
        Source::Relation(f) => {
            if o.at.is_some() || o.point.is_some() {
                return Err(flag_err("--at", "the base pair of a relation is set in the spec file"));
            }
            let r = resolved(loaded, o, RadiusSchedule::default());
            relation_report(loaded, f, r)
        }
    }
}

fn truths(t: &GroundTruth) -> Vec<Truth> {
    let mut out = vec![
        Truth { name: "er".into(), value: t.er },
        Truth { name: "uniform_strict".into(), value: t.uniform_strict },
        Truth { name: "strict_outer".into(), value: t.strict_outer },
    ];
    if let Some(s) = t.strict_outer_subdiff {
        out.push(Truth { name: "strict_outer_subdiff".into(), value: s });
    }
    out
}

fn settings(r: &Resolved) -> Settings {
    Settings { tol: r.tol, ..Settings::with_schedule(r.schedule) }
}

fn config(r: &Resolved, zero_floor: f64) -> CriteriaConfig {
    CriteriaConfig { zero_floor, ..CriteriaConfig::new(r.gamma) }
}

fn convergence_flags(qs: &[Quantity]) -> Vec<String> {
    let mut flags = Vec::new();
    for q in qs {
        if q.monotone == Some(false) {
            flags.push(format!("{}: band values are not monotone along the schedule", q.name));
        }
        if q.saturated == Some(false) {
            flags.push(format!("{}: not saturated at the finest radius", q.name));
        }
    }
    flags
}

#[allow(clippy::too_many_arguments)]
fn function_report<M: Metric>(
    loaded: &Loaded,
    p: &Probe<M>,
    point: usize,
    r: Resolved,
    zero_floor: f64,
    ground_truth: Vec<Truth>,
    base: String,
    point_label: String,
) -> Result<Report, CliError> {
    let s = settings(&r);
    let rep: SlopeReport = slopes::slope_report(p, point, &s)?;
    let verdict = slopes::criteria_verdict(p, config(&r, zero_floor), &s)?;
    let quantities = vec![
        Quantity::local("local_slope", &rep.local_slope),
        Quantity::point("nonlocal_slope", Some(rep.nonlocal_slope)),
        Quantity::point("restricted_nonlocal_slope", Some(rep.restricted_nonlocal_slope.value)),
        Quantity::point("restricted_level_set_slope", Some(rep.restricted_level_set_slope.value)),
        Quantity::point("subdiff_slope", rep.subdiff_slope),
        Quantity::limit("er_modulus", &rep.er_modulus),
        Quantity::limit("uniform_strict", &rep.uniform_strict),
        Quantity::limit("strict_outer", &rep.strict_outer),
        Quantity::limit("ratio_liminf", &rep.ratio_liminf),
        Quantity::optional_limit("subdiff_strict_outer", rep.subdiff_strict_outer.as_ref()),
    ];
    let mut flags = convergence_flags(&quantities);
    if rep.local_slope.isolated {
        flags.push("local_slope: the point is isolated in the probe set".into());
    }
    if rep.empty_level_set {
        flags.push("the level set S(f) has no probe point".into());
    }
    if rep.level_set_truncated {
        flags.push("some distance to S(f) may be clipped by the sampled region".into());
    }
    if rep.subdiff_coverage.skipped > 0 {
        flags.push(format!("subdiff_strict_outer: {} band points without subgradient data", rep.subdiff_coverage.skipped));
    }
    Ok(Report {
        input: loaded.label.clone(),
        kind: Kind::Function,
        base,
        point: point_label,
        probe_points: p.len(),
        schedule: r.schedule.into(),
        tol: r.tol,
        gamma: r.gamma,
        headline: Headline { property: "local error bound", holds: verdict.holds('a') == Some(true) },
        quantities,
        verdict,
        ground_truth,
        flags,
        limit_set: None,
        conditions: None,
    })
}

fn two_var_report(
    loaded: &Loaded,
    g: &TwoVarProbe<EuclideanSpace, EuclideanSpace>,
    r: Resolved,
    ground_truth: Vec<Truth>,
) -> Result<Report, CliError> {
    let s = settings(&r);
    let rho = r.schedule.finest();
    let rep = slopes2::two_var_report(g, g.base, rho, &s, Combiner::Max)?;
    let [_, near_y, level] = slopes2::er2_equivalent_forms(g, &s)?;
    let sum = slopes2::uniform_strict_slope2(g, &s, Combiner::Sum)?;
    let conditions = slopekit::product::validate_p1_p2(g, &s)?;
    let verdict = slopes2::criteria_verdict2(g, config(&r, CriteriaConfig::GRID_ZERO_FLOOR), &s)?;
    let quantities = vec![
        Quantity::point("nonlocal_rho_slope", Some(rep.nonlocal_rho_slope)),
        Quantity::local("local_rho_slope", &rep.local_rho_slope),
        Quantity::point("subdiff_rho_slope", rep.subdiff_rho_slope),
        Quantity::limit("er2", &rep.er2),
        Quantity::limit("er2_near_ybar", &near_y),
        Quantity::limit("er2_level", &level),
        Quantity::limit("uniform_strict", &rep.uniform_strict),
        Quantity::limit("uniform_strict_sum_metric", &sum),
        Quantity::limit("strict_outer", &rep.strict_outer),
        Quantity::optional_limit("subdiff_strict_outer", rep.subdiff_strict_outer.as_ref()),
        Quantity::limit("p2_ratio", &conditions.p2),
    ];
    let mut flags = convergence_flags(&quantities);
    if rep.level_set_truncated {
        flags.push("some distance to S(f) may be clipped by the sampled region".into());
    }
    if !conditions.p1_ok {
        flags.push("(P1) fails: f vanishes off the slice y = ybar".into());
    }
    if rep.subdiff_coverage.skipped > 0 {
        flags.push(format!("subdiff_strict_outer: {} band points without subgradient data", rep.subdiff_coverage.skipped));
    }
    let (x, y) = g.points[g.base];
    Ok(Report {
        input: loaded.label.clone(),
        kind: Kind::TwoVarFunction,
        base: format!("({}, {})", x.get(0), y.get(0)),
        point: format!("base, rho = {rho}"),
        probe_points: g.len(),
        schedule: r.schedule.into(),
        tol: r.tol,
        gamma: r.gamma,
        headline: Headline { property: "error bound with respect to x", holds: verdict.holds('a') == Some(true) },
        quantities,
        verdict,
        ground_truth,
        flags,
        limit_set: None,
        conditions: Some(conditions),
    })
}

fn mapping_primal<MX, MY>(f: &SetValuedMapping<MX, MY>, s: &Settings) -> Result<Vec<Quantity>, CliError>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    Ok(vec![
        Quantity::limit("sr", &setval::subregularity_constant(f, s)?),
        Quantity::limit("uniform_strict", &setval::f_uniform_strict_slope(f, s, Combiner::Max)?),
        Quantity::limit("strict_slope", &setval::f_strict_slope(f, s, Combiner::Max)?),
        Quantity::limit("ratio_liminf", &setval::f_ratio_liminf(f, s)?),
        Quantity::limit("max_local_ratio", &setval::f_max_local_ratio(f, s)?),
    ])
}

fn line_mapping_report(
    loaded: &Loaded,
    f: &LineMapping,
    oracle: &dyn setval::MappingOracle,
    base: (f64, f64),
    r: Resolved,
    ground_truth: Vec<Truth>,
) -> Result<Report, CliError> {
    let s = settings(&r);
    let mut quantities = mapping_primal(f, &s)?;
    let (approx, cov) = setval::f_approx_strict_subdiff_slope(f, &s)?;
    let (ratio, _) = setval::f_max_approx_ratio(f, &s)?;
    let (exact, _) = setval::f_strict_subdiff_slope(f, &s)?;
    quantities.push(Quantity::limit("approx_strict_subdiff", &approx));
    quantities.push(Quantity::limit("max_approx_ratio", &ratio));
    quantities.push(Quantity::limit("strict_subdiff", &exact));
    let limit_set = setval::gfrerer_limit_test(oracle, base, &r.schedule, 2, LimitSetParams::default())?;
    let verdict = setval::subregularity_verdict(f, config(&r, CriteriaConfig::GRID_ZERO_FLOOR), &s)?;
    let mut flags = convergence_flags(&quantities);
    if f.inverse_distances().1 {
        flags.push("some distance to the inverse image may be clipped by the sampled region".into());
    }
    if cov.skipped > 0 {
        flags.push(format!("approx_strict_subdiff: {} band points without normal-cone data", cov.skipped));
    }
    if limit_set.exhausted {
        flags.push("limit-set test: some level produced no admissible pair".into());
    }
    Ok(Report {
        input: loaded.label.clone(),
        kind: Kind::Mapping,
        base: fmt_coords(&[base.0, base.1]),
        point: "base".into(),
        probe_points: f.len(),
        schedule: r.schedule.into(),
        tol: r.tol,
        gamma: r.gamma,
        headline: Headline { property: "metric subregularity", holds: verdict.holds('a') == Some(true) },
        quantities,
        verdict,
        ground_truth,
        flags,
        limit_set: Some(limit_set),
        conditions: None,
    })
}

fn relation_report(
    loaded: &Loaded,
    f: &SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace>,
    r: Resolved,
) -> Result<Report, CliError> {
    let s = settings(&r);
    let mut quantities = mapping_primal(f, &s)?;
    quantities.push(Quantity::point("global_subregularity_ratio", Some(setval::global_subregularity_ratio(f))));
    quantities.push(Quantity::point(
        "inverse_calmness_constant",
        Some(setval::global_calmness_constant(&f.inverse()?)),
    ));
    let verdict = setval::subregularity_verdict_primal(f, config(&r, CriteriaConfig::FINITE_ZERO_FLOOR), &s)?;
    let flags = convergence_flags(&quantities);
    let (i, j) = f.induced.points[f.base()];
    Ok(Report {
        input: loaded.label.clone(),
        kind: Kind::Mapping,
        base: format!("(#{i}, #{j})"),
        point: "base".into(),
        probe_points: f.len(),
        schedule: r.schedule.into(),
        tol: r.tol,
        gamma: r.gamma,
        headline: Headline { property: "metric subregularity", holds: verdict.holds('a') == Some(true) },
        quantities,
        verdict,
        ground_truth: Vec::new(),
        flags,
        limit_set: None,
        conditions: None,
    })
}
