//! Reference values by exhaustive enumeration on finite metric spaces, and a
//! constructive Ekeland search.
//!
//! Nothing here shares code with the band machinery in [`crate::slopes`]:
//! every supremum and infimum is written out from its definition, so the two
//! paths can be compared against each other.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::catalog::FunctionFixture;
use crate::error::{Error, Result};
use crate::ext::{extreal_div, ExtReal};
use crate::function::Probe;
use crate::limit::LimitEstimate;
use crate::slopes::{self, Settings};
use crate::space::{FiniteMetricSpace, Grid, Metric};

/// Largest space accepted by [`brute_force_all`].
pub const MAX_BRUTE_FORCE_POINTS: usize = 400;

/// A right-continuous-from-above step function of the band radius.
///
/// `values[k]` is the value for `ρ ∈ (breaks[k-1], breaks[k]]` (with
/// `breaks[-1] = 0`) and the last value holds for `ρ > breaks.last()`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<ExtReal>,
}

impl StepFunction {
    pub fn eval(&self, rho: f64) -> ExtReal {
        let k = self.breaks.partition_point(|&b| b < rho);
        self.values[k]
    }

    /// The value on the smallest positive band, which is the limit `ρ ↓ 0`.
    pub fn limit(&self) -> ExtReal {
        self.values[0]
    }

    /// Largest deviation from the per-radius values of a band estimate.
    pub fn discrepancy(&self, estimate: &LimitEstimate) -> f64 {
        estimate
            .per_radius
            .iter()
            .map(|&(rho, v)| gap(self.eval(rho), v))
            .fold(0.0, f64::max)
    }
}

fn gap(a: ExtReal, b: ExtReal) -> f64 {
    if a == b {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        f64::INFINITY
    } else {
        (a.value() - b.value()).abs()
    }
}

/// Exact pointwise quantities at a point with a finite value.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactPoint {
    /// Supremum over the nearest shell of finite-valued neighbours.
    pub local_slope: ExtReal,
    pub isolated: bool,
    pub nonlocal_slope: ExtReal,
    pub restricted_sublevel: ExtReal,
    pub restricted_level_set: ExtReal,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactReport {
    /// `None` at points where `f = +∞`.
    pub points: Vec<Option<ExactPoint>>,
    pub level_set: Vec<usize>,
    pub er: StepFunction,
    pub strict_outer: StepFunction,
    pub uniform_strict: StepFunction,
    pub ratio: StepFunction,
    pub max_local_ratio: StepFunction,
}

fn descent(fx: f64, fu: ExtReal, d: f64) -> ExtReal {
    if fu.is_infinite() {
        return ExtReal::ZERO;
    }
    ExtReal::finite((fx - fu.value()).max(0.0) / d)
}

fn exact_point(p: &Probe<FiniteMetricSpace>, i: usize, ds: &[f64]) -> ExactPoint {
    let n = p.len();
    let fx = p.value(i).value();
    let d = |j: usize| p.space.distance(&i, &j);
    let shell = (0..n)
        .filter(|&j| j != i && p.value(j).is_finite())
        .map(d)
        .fold(f64::INFINITY, f64::min);
    // without finite-valued neighbours the point counts as isolated
    let shell = if shell.is_finite() { shell } else { 0.0 };
    let mut local = ExtReal::ZERO;
    let mut isolated = true;
    let mut nonlocal = ExtReal::ZERO;
    let mut sublevel = ExtReal::ZERO;
    for j in (0..n).filter(|&j| j != i) {
        if d(j) <= shell && d(j) > 0.0 {
            isolated = false;
            local = local.max(descent(fx, p.value(j), d(j)));
        }
        let fj_plus = p.value(j).positive_part();
        nonlocal = nonlocal.max(descent(fx, fj_plus, d(j)));
        if ds[j] <= ds[i] {
            sublevel = sublevel.max(descent(fx, fj_plus, d(j)));
        }
    }
    let no_level_set = ds.iter().all(|v| v.is_infinite());
    let (restricted_sublevel, restricted_level_set) = if no_level_set {
        (ExtReal::INFINITY, ExtReal::INFINITY)
    } else {
        let plus = ExtReal::finite(fx.max(0.0));
        (sublevel, extreal_div(plus, ExtReal::finite(ds[i]), ExtReal::ZERO))
    };
    ExactPoint { local_slope: local, isolated, nonlocal_slope: nonlocal, restricted_sublevel, restricted_level_set }
}

/// Infimum of `q` over `{d(x,x̄) < ρ} ∩ member(ρ)` as an exact step function.
fn step_function(
    d_base: &[f64],
    f: &[ExtReal],
    level: bool,
    q: &[ExtReal],
) -> StepFunction {
    let mut breaks: Vec<f64> = d_base.iter().copied().filter(|&d| d > 0.0).collect();
    if level {
        breaks.extend(f.iter().filter(|v| v.is_finite() && v.value() > 0.0).map(|v| v.value()));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let band_inf = |rho: f64| {
        (0..q.len())
            .filter(|&i| d_base[i] < rho && f[i] > ExtReal::ZERO && (!level || f[i].value() < rho))
            .map(|i| q[i])
            .fold(ExtReal::INFINITY, ExtReal::min)
    };
    let mut values: Vec<ExtReal> = breaks.iter().map(|&b| band_inf(b)).collect();
    values.push(band_inf(f64::INFINITY));
    StepFunction { breaks, values }
}

/// Every single-variable slope and modulus at the base point by full
/// enumeration, with band limits as exact step functions of `ρ`.
///
/// The bands are the one-sided ones (`0 < f < ρ`) and nonlocal slopes search
/// the whole space.
pub fn brute_force_all(p: &Probe<FiniteMetricSpace>) -> Result<ExactReport> {
    let n = p.len();
    if n > MAX_BRUTE_FORCE_POINTS {
        return Err(Error::Precondition(format!(
            "{n} points exceeds the brute-force limit of {MAX_BRUTE_FORCE_POINTS}"
        )));
    }
    if p.value(p.base) != ExtReal::ZERO {
        return Err(Error::BaseNotZero(p.value(p.base).value()));
    }
    let level_set: Vec<usize> = (0..n).filter(|&j| p.value(j) <= ExtReal::ZERO).collect();
    let ds: Vec<f64> = (0..n)
        .map(|i| {
            level_set
                .iter()
                .map(|&j| p.space.distance(&i, &j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let points: Vec<Option<ExactPoint>> = (0..n)
        .map(|i| p.value(i).is_finite().then(|| exact_point(p, i, &ds)))
        .collect();
    let d_base: Vec<f64> = (0..n).map(|i| p.space.distance(&i, &p.base)).collect();
    let f = &p.values;
    let pick = |g: fn(&ExactPoint) -> ExtReal| -> Vec<ExtReal> {
        points.iter().map(|e| e.as_ref().map_or(ExtReal::INFINITY, g)).collect()
    };
    let ratio: Vec<ExtReal> = (0..n)
        .map(|i| extreal_div(f[i].positive_part(), ExtReal::finite(d_base[i]), ExtReal::ZERO))
        .collect();
    let er_q: Vec<ExtReal> = (0..n)
        .map(|i| extreal_div(f[i], ExtReal::from(ds[i]), ExtReal::ZERO))
        .collect();
    let local = pick(|e| e.local_slope);
    let max_local_ratio: Vec<ExtReal> = local.iter().zip(&ratio).map(|(a, b)| (*a).max(*b)).collect();
    Ok(ExactReport {
        er: step_function(&d_base, f, false, &er_q),
        strict_outer: step_function(&d_base, f, true, &local),
        uniform_strict: step_function(&d_base, f, true, &pick(|e| e.nonlocal_slope)),
        ratio: step_function(&d_base, f, true, &ratio),
        max_local_ratio: step_function(&d_base, f, true, &max_local_ratio),
        points,
        level_set,
    })
}

/// Largest deviation between [`brute_force_all`] and the band machinery of
/// [`crate::slopes`] on a finite probe, over every pointwise quantity and
/// every schedule radius.
pub fn sampling_discrepancy(p: &Probe<FiniteMetricSpace>, settings: &Settings) -> Result<f64> {
    let exact = brute_force_all(p)?;
    let mut worst: f64 = 0.0;
    for (i, e) in exact.points.iter().enumerate() {
        let Some(e) = e else { continue };
        let local = slopes::local_slope(p, i)?;
        worst = worst.max(gap(local.value, e.local_slope));
        if local.isolated != e.isolated {
            worst = f64::INFINITY;
        }
        worst = worst.max(gap(slopes::nonlocal_slope(p, i, f64::INFINITY)?, e.nonlocal_slope));
        let sub = slopes::restricted_nonlocal_slope(p, i, slopes::Region::SublevelDist)?;
        worst = worst.max(gap(sub.value, e.restricted_sublevel));
        let lev = slopes::restricted_nonlocal_slope(p, i, slopes::Region::LevelSet)?;
        worst = worst.max(gap(lev.value, e.restricted_level_set));
    }
    let pairs = [
        (&exact.er, slopes::er_modulus(p, settings)?),
        (&exact.strict_outer, slopes::strict_outer_slope(p, settings)?),
        (&exact.uniform_strict, slopes::uniform_strict_slope(p, settings)?),
        (&exact.ratio, slopes::ratio_liminf(p, settings)?),
        (&exact.max_local_ratio, slopes::max_local_ratio_liminf(p, settings)?),
    ];
    for (step, est) in pairs {
        worst = worst.max(step.discrepancy(&est));
    }
    Ok(worst)
}

/// A point returned by [`ekeland_point`], already verified.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EkelandPoint {
    pub point: usize,
    pub steps: usize,
    /// `d(x, v)`.
    pub distance: f64,
    pub check: EkelandCheck,
}

/// Outcome of the exhaustive check of the three conclusions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EkelandCheck {
    /// `d(x, v) ≤ λ`
    pub a: bool,
    /// `d(x, v) < λ`
    pub a_strict: bool,
    /// `f(x) ≤ f(v)`
    pub b: bool,
    /// `f(u) + (ε/λ) d(u, x) ≥ f(x)` for every `u`.
    pub c: bool,
}

impl EkelandCheck {
    pub fn holds(&self) -> bool {
        self.a && self.b && self.c
    }
}

const TIE: f64 = 1e-12;

fn tie(v: f64) -> f64 {
    TIE * (1.0 + v.abs())
}

pub fn verify_ekeland(p: &Probe<FiniteMetricSpace>, v: usize, eps: f64, lambda: f64, x: usize) -> EkelandCheck {
    let k = eps / lambda;
    let fx = p.value(x);
    let dxv = p.space.distance(&x, &v);
    let c = fx.is_finite()
        && (0..p.len()).all(|u| {
            let fu = p.value(u);
            fu.is_infinite() || fu.value() + k * p.space.distance(&u, &x) >= fx.value() - tie(fx.value())
        });
    EkelandCheck { a: dxv <= lambda, a_strict: dxv < lambda, b: fx <= p.value(v), c }
}

/// Ekeland point for `f` from `v`: iterated strict improvement of
/// `u ↦ f(u) + (ε/λ) d(u, x)` from `x = v`, moving to the minimizer (lowest
/// index on ties). The conclusions are checked by enumeration before the
/// point is returned.
pub fn ekeland_point(p: &Probe<FiniteMetricSpace>, v: usize, eps: f64, lambda: f64) -> Result<EkelandPoint> {
    if v >= p.len() {
        return Err(Error::PointOutOfRange(v));
    }
    if !(eps > 0.0 && eps.is_finite() && lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("need eps, lambda > 0, got {eps}, {lambda}")));
    }
    let inf = p.values.iter().copied().fold(ExtReal::INFINITY, ExtReal::min);
    let fv = p.value(v);
    if !(fv.is_finite() && fv.value() < inf.value() + eps) {
        return Err(Error::Precondition(format!("f(v) = {fv} is not below inf f + eps = {}", inf.value() + eps)));
    }
    let k = eps / lambda;
    let (mut x, mut steps) = (v, 0);
    loop {
        let fx = p.value(x).value();
        let mut best: Option<(usize, f64)> = None;
        for u in 0..p.len() {
            let fu = p.value(u);
            if u == x || fu.is_infinite() {
                continue;
            }
            let score = fu.value() + k * p.space.distance(&u, &x);
            if score < fx - tie(fx) && best.is_none_or(|(_, s)| score < s) {
                best = Some((u, score));
            }
        }
        match best {
            Some((u, _)) => {
                x = u;
                steps += 1;
            }
            None => break,
        }
    }
    let check = verify_ekeland(p, v, eps, lambda, x);
    if !check.holds() {
        return Err(Error::ImplicationViolated {
            name: "Ekeland conclusions".into(),
            detail: format!("{check:?} at x = {x}"),
        });
    }
    Ok(EkelandPoint { point: x, steps, distance: p.space.distance(&x, &v), check })
}

/// One compared quantity of [`cross_check`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossEntry {
    pub quantity: String,
    pub analytic: f64,
    pub grid: ExtReal,
    pub brute: ExtReal,
    /// `|grid − analytic| / max(|analytic|, 1)`.
    pub relative_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCheck {
    pub fixture: String,
    pub h: f64,
    pub points: usize,
    /// Largest deviation between the grid path and the brute force on the
    /// same discretization.
    pub brute_discrepancy: f64,
    pub entries: Vec<CrossEntry>,
    pub max_relative_error: f64,
}

impl CrossCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.brute_discrepancy <= 1e-12 && self.max_relative_error <= tol
    }
}

/// Rediscretizes a catalog fixture with spacing `h` and compares the grid
/// quantities with [`brute_force_all`] on the same points and with the stored
/// analytic values.
pub fn cross_check(fixture: &FunctionFixture, h: f64) -> Result<CrossCheck> {
    let g = fixture.grid;
    let grid = Grid::new(g.dim, g.lo, g.hi, h)?;
    let probe = Probe::sample(fixture.space, grid, fixture.function.as_ref(), &fixture.base)?;
    if probe.len() > MAX_BRUTE_FORCE_POINTS {
        return Err(Error::Precondition(format!(
            "{} grid points exceeds the brute-force limit of {MAX_BRUTE_FORCE_POINTS}",
            probe.len()
        )));
    }
    let space = FiniteMetricSpace::from_points(&probe.points, fixture.space.norm)?;
    let finite = Probe::finite(space, probe.values.clone(), probe.base)?;
    let exact = brute_force_all(&finite)?;
    let settings = Settings::with_schedule(fixture.schedule);
    let grid_values = [
        ("er", fixture.truth.er, slopes::er_modulus(&probe, &settings)?, &exact.er),
        ("uniform_strict", fixture.truth.uniform_strict, slopes::uniform_strict_slope(&probe, &settings)?, &exact.uniform_strict),
        ("strict_outer", fixture.truth.strict_outer, slopes::strict_outer_slope(&probe, &settings)?, &exact.strict_outer),
    ];
    let mut brute_discrepancy: f64 = 0.0;
    let mut entries = Vec::new();
    for (name, analytic, est, step) in grid_values {
        brute_discrepancy = brute_discrepancy.max(step.discrepancy(&est));
        let grid = est.reported;
        entries.push(CrossEntry {
            quantity: name.into(),
            analytic,
            grid,
            brute: step.eval(settings.schedule.finest()),
            relative_error: gap(grid, ExtReal::finite(analytic)) / analytic.abs().max(1.0),
        });
    }
    let max_relative_error = entries.iter().map(|e| e.relative_error).fold(0.0, f64::max);
    Ok(CrossCheck {
        fixture: fixture.name.into(),
        h,
        points: probe.len(),
        brute_discrepancy,
        entries,
        max_relative_error,
    })
}
