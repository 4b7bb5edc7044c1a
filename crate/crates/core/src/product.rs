//! Functions on a product `X × Y` satisfying the conditions
//!
//! * (P1) `f(x, y) > 0` whenever `y ≠ ȳ`,
//! * (P2) `liminf_{f(x,y)↓0} f(x, y) / d(y, ȳ) > 0`,
//!
//! together with the embedding `f̃(x, ȳ) = f(x)`, `f̃ = +∞` off the slice.

use alloc::vec;
use alloc::vec::Vec;

use crate::cone::{Cone2, Interval};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::function::Probe;
use crate::limit::{estimate_limit, LimitEstimate};
use crate::slopes::Settings;
use crate::space::{rho_dist, Combiner, EuclideanSpace, Metric, NormKind, Vector};

/// Fréchet subgradients `(x*, y*)` at one point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SubgradientSet {
    Finite(Vec<(Vector, Vector)>),
    /// `{(0, s) : s ∈ shift} + cone` in `R × R`.
    ShiftedCone { shift: Interval, cone: Cone2 },
}

/// Shrinks `‖y*‖ ≤ ρ` to the open constraint `‖y*‖ < ρ`.
const OPEN: f64 = 1e-12;

impl SubgradientSet {
    /// `inf ‖x*‖` over members with `‖y*‖ < ρ`.
    pub fn rho_slope(&self, rho: f64, norms: (NormKind, NormKind)) -> ExtReal {
        let (dx, dy) = (norms.0.dual(), norms.1.dual());
        match self {
            SubgradientSet::Finite(pairs) => pairs
                .iter()
                .filter(|(_, ys)| dy.norm(ys) < rho)
                .map(|(xs, _)| ExtReal::finite(dx.norm(xs)))
                .fold(ExtReal::INFINITY, ExtReal::min),
            SubgradientSet::ShiftedCone { shift, cone } => {
                // y* = s + b with |y*| < ρ for some s in the shift
                let eps = OPEN * (1.0 + rho);
                cone.min_abs_first_in_strip(-rho - shift.hi + eps, rho - shift.lo - eps)
            }
        }
    }

    /// `inf ‖x*‖ + ρ⁻¹‖y*‖` over all members.
    pub fn rho_slope_primed(&self, rho: f64, norms: (NormKind, NormKind)) -> ExtReal {
        let (dx, dy) = (norms.0.dual(), norms.1.dual());
        match self {
            SubgradientSet::Finite(pairs) => pairs
                .iter()
                .map(|(xs, ys)| ExtReal::finite(dx.norm(xs) + dy.norm(ys) / rho))
                .fold(ExtReal::INFINITY, ExtReal::min),
            SubgradientSet::ShiftedCone { shift, cone } => {
                // positively homogeneous in s, so extreme points and 0 suffice
                let mut candidates = vec![shift.lo, shift.hi];
                if shift.contains(0.0) {
                    candidates.push(0.0);
                }
                candidates
                    .into_iter()
                    .map(|s| cone.min_weighted(1.0 / rho, s))
                    .fold(ExtReal::INFINITY, ExtReal::min)
            }
        }
    }
}

/// A function on `X × Y` tabulated on a finite probe set.
#[derive(Clone, Debug)]
pub struct TwoVarProbe<MX: Metric, MY: Metric> {
    pub left: MX,
    pub right: MY,
    pub points: Vec<(MX::Point, MY::Point)>,
    pub values: Vec<ExtReal>,
    pub subgradients: Vec<Option<SubgradientSet>>,
    /// Primal norms of `X` and `Y` when both are normed.
    pub norms: Option<(NormKind, NormKind)>,
    /// Subgradient data is the full subdifferential.
    pub exact_oracle: bool,
    pub base: usize,
    pub complete: bool,
    pub lsc: bool,
    pub convex: bool,
    /// Distance in `X` from each point to the edge of the sampled region.
    pub depth: Vec<f64>,
}

impl<MX: Metric, MY: Metric> TwoVarProbe<MX, MY> {
    /// A probe without subgradient data; `f(x̄, ȳ)` must be `0`.
    pub fn new(
        left: MX,
        right: MY,
        points: Vec<(MX::Point, MY::Point)>,
        values: Vec<ExtReal>,
        base: usize,
    ) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Precondition(alloc::format!(
                "{} values for {} points",
                values.len(),
                points.len()
            )));
        }
        if base >= points.len() {
            return Err(Error::PointOutOfRange(base));
        }
        if values[base] != ExtReal::ZERO {
            return Err(Error::BaseNotZero(values[base].value()));
        }
        let n = points.len();
        Ok(TwoVarProbe {
            left,
            right,
            points,
            values,
            subgradients: vec![None; n],
            norms: None,
            exact_oracle: false,
            base,
            complete: true,
            lsc: true,
            convex: false,
            depth: vec![f64::INFINITY; n],
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    pub fn xbar(&self) -> &MX::Point {
        &self.points[self.base].0
    }

    pub fn ybar(&self) -> &MY::Point {
        &self.points[self.base].1
    }

    #[inline]
    pub fn dx(&self, i: usize, j: usize) -> f64 {
        self.left.distance(&self.points[i].0, &self.points[j].0)
    }

    #[inline]
    pub fn dy(&self, i: usize, j: usize) -> f64 {
        self.right.distance(&self.points[i].1, &self.points[j].1)
    }

    #[inline]
    pub fn d_rho(&self, i: usize, j: usize, rho: f64, combiner: Combiner) -> f64 {
        rho_dist(self.dx(i, j), self.dy(i, j), rho, combiner)
    }

    /// The point lies on the slice `y = ȳ`.
    pub fn on_slice(&self, i: usize) -> bool {
        self.points[i].1 == *self.ybar()
    }

    /// Indices of `S(f) × {ȳ}`, that is slice points with `f ≤ 0`.
    pub fn level_slice(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.on_slice(i) && self.values[i] <= ExtReal::ZERO)
            .collect()
    }

    /// `d(x, S(f))` for every point, and whether any finite distance from a
    /// point with `f > 0` may be clipped by the sampled region.
    pub fn slice_distances(&self) -> (Vec<f64>, bool) {
        let s = self.level_slice();
        let ds: Vec<f64> = (0..self.len())
            .map(|i| s.iter().map(|&j| self.dx(i, j)).fold(f64::INFINITY, f64::min))
            .collect();
        let truncated = (0..self.len()).any(|i| self.values[i] > ExtReal::ZERO && ds[i] > self.depth[i]);
        (ds, truncated)
    }
}

/// `f̃(x, y) = f(x)` if `y = ȳ` and `+∞` otherwise, sampled on `X-probe × ys`.
pub fn embed_tilde<M: Metric + Clone, MY: Metric>(
    p: &Probe<M>,
    right: MY,
    ys: &[MY::Point],
    ybar: &MY::Point,
) -> Result<TwoVarProbe<M, MY>> {
    p.require_base_zero()?;
    if !ys.contains(ybar) {
        return Err(Error::Precondition("ybar must be one of the sampled y points".into()));
    }
    let mut points = Vec::with_capacity(p.len() * ys.len());
    let mut values = Vec::with_capacity(p.len() * ys.len());
    let mut depth = Vec::with_capacity(p.len() * ys.len());
    let mut base = 0;
    for (i, x) in p.points.iter().enumerate() {
        for y in ys {
            if i == p.base && y == ybar {
                base = points.len();
            }
            points.push((x.clone(), y.clone()));
            values.push(if y == ybar { p.value(i) } else { ExtReal::INFINITY });
            depth.push(p.depth[i]);
        }
    }
    let mut g = TwoVarProbe::new(p.space.clone(), right, points, values, base)?;
    g.depth = depth;
    g.complete = p.complete;
    g.lsc = p.lsc;
    g.convex = p.convex;
    Ok(g)
}

/// [`embed_tilde`] on normed spaces, carrying the subgradients of `f`.
///
/// At `(x, ȳ)` the subdifferential is `∂f(x) × Y*`; it is represented by
/// `∂f(x) × {0}`, which attains every infimum taken over it here. Off the
/// slice the function is infinite and the subdifferential is empty.
pub fn embed_tilde_normed(
    p: &Probe<EuclideanSpace>,
    right: EuclideanSpace,
    ys: &[Vector],
    ybar: &Vector,
) -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>> {
    let ydim = right.dim;
    let norm_y = right.norm;
    let mut g = embed_tilde(p, right, ys, ybar)?;
    g.norms = Some((p.space.norm, norm_y));
    g.exact_oracle = p.oracle == Some(crate::function::OracleKind::Exact);
    let per_x = ys.len();
    for k in 0..g.len() {
        let i = k / per_x;
        g.subgradients[k] = if g.on_slice(k) {
            p.subgradients[i]
                .as_ref()
                .map(|gs| SubgradientSet::Finite(gs.iter().map(|x| (*x, Vector::zeros(ydim))).collect()))
        } else {
            Some(SubgradientSet::Finite(Vec::new()))
        };
    }
    Ok(g)
}

/// Outcome of the (P1)/(P2) check.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionsReport {
    pub p1_ok: bool,
    /// Off-slice points inspected for (P1); zero means the check was vacuous.
    pub off_slice_samples: usize,
    /// Band estimate of `liminf_{f↓0} f / d(y, ȳ)`.
    pub p2: LimitEstimate,
    pub p2_lower_bound: ExtReal,
}

/// Checks (P1) on every off-slice point and estimates the (P2) constant
/// over the bands `{0 < f < ρ}`.
pub fn validate_p1_p2<MX: Metric, MY: Metric>(g: &TwoVarProbe<MX, MY>, settings: &Settings) -> Result<ConditionsReport> {
    let off: Vec<usize> = (0..g.len()).filter(|&i| !g.on_slice(i)).collect();
    let p1_ok = off.iter().all(|&i| g.values[i] > ExtReal::ZERO);
    let ratios: Vec<(ExtReal, ExtReal)> = (0..g.len())
        .filter(|&i| g.values[i] > ExtReal::ZERO && g.values[i].is_finite())
        .map(|i| {
            let d = g.dy(i, g.base);
            let r = if d > 0.0 { ExtReal::finite(g.values[i].value() / d) } else { ExtReal::INFINITY };
            (g.values[i], r)
        })
        .collect();
    let p2 = estimate_limit(
        |rho| {
            ratios
                .iter()
                .filter(|(f, _)| f.value() < rho)
                .map(|(_, r)| r.value())
                .fold(f64::INFINITY, f64::min)
        },
        &settings.schedule,
        settings.tol,
    )?;
    Ok(ConditionsReport {
        p1_ok,
        off_slice_samples: off.len(),
        p2_lower_bound: p2.reported,
        p2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::RadiusSchedule;
    use crate::space::{FiniteMetricSpace, Grid};

    fn line_grid(h: f64) -> Vec<Vector> {
        Grid::new(1, -1.0, 1.0, h).unwrap().points()
    }

    fn product(f: impl Fn(f64, f64) -> f64, h: f64) -> TwoVarProbe<EuclideanSpace, EuclideanSpace> {
        let axis = line_grid(h);
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut base = 0;
        for x in &axis {
            for y in &axis {
                if x.get(0) == 0.0 && y.get(0) == 0.0 {
                    base = points.len();
                }
                points.push((*x, *y));
                values.push(ExtReal::finite(f(x.get(0), y.get(0))));
            }
        }
        TwoVarProbe::new(EuclideanSpace::line(), EuclideanSpace::line(), points, values, base).unwrap()
    }

    fn settings() -> Settings {
        Settings::with_schedule(RadiusSchedule::new(0.5, 0.5, 4).unwrap())
    }

    #[test]
    fn tilde_values_and_conditions() {
        let s = FiniteMetricSpace::from_points(&line_grid(0.25), NormKind::L2).unwrap();
        let values = s.points().iter().map(|&i| ExtReal::finite((-1.0 + 0.25 * i as f64).abs())).collect();
        let p = Probe::finite(s, values, 4).unwrap();
        let ys = [Vector::scalar(-0.5), Vector::scalar(0.0), Vector::scalar(0.5)];
        let g = embed_tilde(&p, EuclideanSpace::line(), &ys, &Vector::scalar(0.0)).unwrap();
        for k in 0..g.len() {
            let (i, y) = (&g.points[k].0, &g.points[k].1);
            if y.get(0) == 0.0 {
                assert_eq!(g.value(k), p.value(*i));
            } else {
                assert_eq!(g.value(k), ExtReal::INFINITY);
            }
        }
        let sl: Vec<usize> = g.level_slice().iter().map(|&k| g.points[k].0).collect();
        assert_eq!(sl, p.level_set().members);
        let r = validate_p1_p2(&g, &settings()).unwrap();
        assert!(r.p1_ok);
        assert_eq!(r.p2_lower_bound, ExtReal::INFINITY);
    }

    #[test]
    fn p2_examples() {
        let good = validate_p1_p2(&product(|x, y| y.abs() + x * x, 1.0 / 16.0), &settings()).unwrap();
        assert!(good.p1_ok && good.p2_lower_bound.value() >= 1.0);
        let bad = validate_p1_p2(&product(|x, y| y.abs() * x.abs(), 1.0 / 16.0), &settings()).unwrap();
        // f(x, y) = 0 at x = 0 with y ≠ 0 breaks (P1) as well
        assert!(!bad.p1_ok);
        assert!(bad.p2_lower_bound.value() <= 1.0 / 16.0 + 1e-12);
    }

    #[test]
    fn subgradient_filters() {
        let set = SubgradientSet::Finite(vec![(Vector::scalar(1.0), Vector::scalar(0.1))]);
        let norms = (NormKind::L2, NormKind::L2);
        assert_eq!(set.rho_slope(0.5, norms), ExtReal::finite(1.0));
        assert_eq!(set.rho_slope(0.05, norms), ExtReal::INFINITY);
        assert!((set.rho_slope_primed(0.5, norms).value() - 1.2).abs() < 1e-12);

        // identity graph at y − ȳ > 0: (0, 1) + t(1, −1)
        let cone = SubgradientSet::ShiftedCone {
            shift: Interval { lo: 1.0, hi: 1.0 },
            cone: Cone2::line([1.0, -1.0]).unwrap(),
        };
        assert!((cone.rho_slope(0.1, norms).value() - 0.9).abs() < 1e-9);
        assert!((cone.rho_slope_primed(0.5, norms).value() - 1.0).abs() < 1e-9);
    }
}
