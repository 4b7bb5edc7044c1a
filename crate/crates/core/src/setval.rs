//! Set-valued mappings `F : X ⇉ Y`, metric subregularity and its slope
//! criteria.
//!
//! A mapping is stored through a sampled graph. Every slope of `F` is the
//! corresponding slope of the induced function `f(x,y) = d(y,ȳ)` on `gph F`
//! (`+∞` off it), with the bands restricted to graph points where
//! `x ∉ F⁻¹(ȳ)`. Dual quantities need a normal-cone oracle and are only
//! available for mappings between lines.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::catalog::catalog_schedule;
use crate::cone::{Cone2, Interval};
use crate::criteria::{assemble, rule, AuditClass::*, CriteriaConfig, Requires, Rule, Setting, Verdict};
use crate::error::{Error, Result};
use crate::ext::{extreal_div, ExtReal};
use crate::limit::{estimate_limit, LimitEstimate, RadiusSchedule};
use crate::product::{SubgradientSet, TwoVarProbe};
use crate::slopes::{Coverage, LocalSlope, Settings};
use crate::slopes2::{coupled_band, local_rho_slope, nonlocal_rho_slope, Band2};
use crate::space::{Combiner, EuclideanSpace, FiniteMetricSpace, Grid, Metric, NormKind, Vector};

/// An analytic mapping between lines with an exact normal-cone oracle.
pub trait MappingOracle: Send + Sync {
    fn contains(&self, x: f64, y: f64) -> bool;

    /// Points of `F(x) ∩ [lo, hi]`; set-valued images are sampled on the
    /// multiples of `h`.
    fn values(&self, x: f64, lo: f64, hi: f64, h: f64) -> Vec<f64>;

    /// The Fréchet normal cone to `gph F` at a graph point.
    fn normal_cone(&self, x: f64, y: f64) -> Option<Cone2>;

    fn is_convex(&self) -> bool {
        false
    }
}

fn window(v: f64, lo: f64, hi: f64) -> Vec<f64> {
    if lo <= v && v <= hi {
        vec![v]
    } else {
        Vec::new()
    }
}

/// `F(x) = {x}`.
pub struct Identity;

impl MappingOracle for Identity {
    fn contains(&self, x: f64, y: f64) -> bool {
        x == y
    }
    fn values(&self, x: f64, lo: f64, hi: f64, _h: f64) -> Vec<f64> {
        window(x, lo, hi)
    }
    fn normal_cone(&self, _x: f64, _y: f64) -> Option<Cone2> {
        Cone2::line([1.0, -1.0]).ok()
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// `F(x) = {x²}`.
pub struct Parabola;

impl MappingOracle for Parabola {
    fn contains(&self, x: f64, y: f64) -> bool {
        (y - x * x).abs() <= 1e-12
    }
    fn values(&self, x: f64, lo: f64, hi: f64, _h: f64) -> Vec<f64> {
        window(x * x, lo, hi)
    }
    fn normal_cone(&self, x: f64, _y: f64) -> Option<Cone2> {
        Cone2::line([2.0 * x, -1.0]).ok()
    }
}

/// `F(x) = {y : y ≥ x}`.
pub struct Halfline;

impl MappingOracle for Halfline {
    fn contains(&self, x: f64, y: f64) -> bool {
        y >= x
    }
    fn values(&self, x: f64, lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let start = libm::ceil(x.max(lo) / h - 1e-9) as i64;
        let stop = libm::floor(hi / h + 1e-9) as i64;
        (start..=stop).map(|k| k as f64 * h).collect()
    }
    fn normal_cone(&self, x: f64, y: f64) -> Option<Cone2> {
        if y > x {
            Some(Cone2::zero())
        } else {
            Cone2::ray([1.0, -1.0]).ok()
        }
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// A mapping represented by a finite sample of its graph.
#[derive(Clone, Debug)]
pub struct SetValuedMapping<MX: Metric, MY: Metric> {
    /// The induced function on the graph samples; its points are `gph F`.
    pub induced: TwoVarProbe<MX, MY>,
    /// Sampled domain points.
    pub domain: Vec<MX::Point>,
    /// Sampled range points.
    pub range: Vec<MY::Point>,
    /// Domain index of each graph point.
    pub domain_of: Vec<usize>,
    /// Normal cones at graph points (mappings between lines only).
    pub normals: Option<Vec<Cone2>>,
    pub convex: bool,
    pub closed: bool,
    /// Distance from each domain point to the edge of the sampled region.
    pub depth: Vec<f64>,
}

/// The induced function `f(x,y) = d(y,ȳ)` on graph samples.
fn induced<MX: Metric, MY: Metric>(
    left: MX,
    right: MY,
    graph: Vec<(MX::Point, MY::Point)>,
    base: usize,
) -> Result<TwoVarProbe<MX, MY>> {
    if base >= graph.len() {
        return Err(Error::PointOutOfRange(base));
    }
    let ybar = graph[base].1.clone();
    let values = graph.iter().map(|(_, y)| ExtReal::finite(right.distance(y, &ybar))).collect();
    TwoVarProbe::new(left, right, graph, values, base)
}

impl<MX: Metric + Clone, MY: Metric + Clone> SetValuedMapping<MX, MY> {
    fn assemble(
        left: MX,
        right: MY,
        domain: Vec<MX::Point>,
        range: Vec<MY::Point>,
        domain_of: Vec<usize>,
        graph_y: Vec<MY::Point>,
        base: usize,
    ) -> Result<Self> {
        let graph = domain_of.iter().zip(graph_y).map(|(&i, y)| (domain[i].clone(), y)).collect();
        let n = domain.len();
        Ok(SetValuedMapping {
            induced: induced(left, right, graph, base)?,
            domain,
            range,
            domain_of,
            normals: None,
            convex: false,
            closed: true,
            depth: vec![f64::INFINITY; n],
        })
    }

    pub fn len(&self) -> usize {
        self.induced.len()
    }

    pub fn is_empty(&self) -> bool {
        self.induced.is_empty()
    }

    pub fn base(&self) -> usize {
        self.induced.base
    }

    pub fn xbar(&self) -> &MX::Point {
        self.induced.xbar()
    }

    pub fn ybar(&self) -> &MY::Point {
        self.induced.ybar()
    }

    /// Graph membership on the samples.
    pub fn contains(&self, x: &MX::Point, y: &MY::Point) -> bool {
        self.induced.points.iter().any(|(a, b)| a == x && b == y)
    }

    /// Graph indices over each domain point.
    pub fn images(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.domain.len()];
        for (k, &i) in self.domain_of.iter().enumerate() {
            out[i].push(k);
        }
        out
    }

    /// Domain points in `F⁻¹(ȳ)`.
    pub fn inverse_image_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.domain.len()];
        for k in 0..self.len() {
            if self.induced.points[k].1 == *self.ybar() {
                m[self.domain_of[k]] = true;
            }
        }
        m
    }

    /// Graph points with `x ∉ F⁻¹(ȳ)`.
    pub fn band_mask(&self) -> Vec<bool> {
        let inv = self.inverse_image_mask();
        self.domain_of.iter().map(|&i| !inv[i]).collect()
    }

    /// `d(x, F⁻¹(ȳ))` for every domain point, with a flag for distances the
    /// sampled region may clip.
    pub fn inverse_distances(&self) -> (Vec<f64>, bool) {
        let inv = self.inverse_image_mask();
        let left = &self.induced.left;
        let ds: Vec<f64> = self
            .domain
            .iter()
            .map(|x| {
                (0..self.domain.len())
                    .filter(|&j| inv[j])
                    .map(|j| left.distance(x, &self.domain[j]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let truncated = (0..ds.len()).any(|i| !inv[i] && ds[i] > self.depth[i]);
        (ds, truncated)
    }

    /// `F⁻¹ : Y ⇉ X` at `(ȳ, x̄)`; normal cones are carried over, the
    /// induced subgradients are not.
    pub fn inverse(&self) -> Result<SetValuedMapping<MY, MX>> {
        let mut domain_of = Vec::with_capacity(self.len());
        for (_, y) in &self.induced.points {
            let j = self
                .range
                .iter()
                .position(|r| r == y)
                .ok_or(Error::Precondition("graph point outside the sampled range".into()))?;
            domain_of.push(j);
        }
        let xs = self.induced.points.iter().map(|(x, _)| x.clone()).collect();
        let mut inv = SetValuedMapping::assemble(
            self.induced.right.clone(),
            self.induced.left.clone(),
            self.range.clone(),
            self.domain.clone(),
            domain_of,
            xs,
            self.base(),
        )?;
        inv.normals = self
            .normals
            .as_ref()
            .map(|ns| ns.iter().map(swap_cone).collect());
        inv.convex = self.convex;
        inv.closed = self.closed;
        Ok(inv)
    }

}

impl SetValuedMapping<EuclideanSpace, EuclideanSpace> {
    /// Installs the induced-function subgradients
    /// `(0, ∂|· − ȳ|(y)) + N_gph F(x,y)` from the normal cones.
    pub fn attach_subgradients(&mut self) {
        let Some(normals) = &self.normals else { return };
        let g = &mut self.induced;
        let ybar = g.points[g.base].1.get(0);
        g.subgradients = normals
            .iter()
            .zip(&g.points)
            .map(|(cone, (_, y))| {
                let dy = y.get(0) - ybar;
                let shift = if dy == 0.0 {
                    Interval { lo: -1.0, hi: 1.0 }
                } else {
                    let s = dy.signum();
                    Interval { lo: s, hi: s }
                };
                Some(SubgradientSet::ShiftedCone { shift, cone: cone.clone() })
            })
            .collect();
        g.norms = Some((NormKind::L2, NormKind::L2));
        g.exact_oracle = self.convex;
        g.convex = self.convex;
    }
}

fn swap_cone(c: &Cone2) -> Cone2 {
    let g: Vec<[f64; 2]> = c.generators().iter().map(|v| [v[1], v[0]]).collect();
    Cone2::generated(&g).expect("finite generators")
}

impl SetValuedMapping<FiniteMetricSpace, FiniteMetricSpace> {
    /// A finite relation `{(i, j)}` between two finite metric spaces.
    pub fn finite(
        left: FiniteMetricSpace,
        right: FiniteMetricSpace,
        pairs: &[(usize, usize)],
        base: (usize, usize),
    ) -> Result<Self> {
        for &(i, j) in pairs {
            if i >= left.len() {
                return Err(Error::PointOutOfRange(i));
            }
            if j >= right.len() {
                return Err(Error::PointOutOfRange(j));
            }
        }
        let b = pairs
            .iter()
            .position(|p| *p == base)
            .ok_or(Error::Precondition("the base pair must lie on the graph".into()))?;
        let (domain, range) = (left.points(), right.points());
        let domain_of = pairs.iter().map(|p| p.0).collect();
        let ys = pairs.iter().map(|p| p.1).collect();
        SetValuedMapping::assemble(left, right, domain, range, domain_of, ys, b)
    }
}

/// A mapping between lines sampled from an analytic oracle.
pub type LineMapping = SetValuedMapping<EuclideanSpace, EuclideanSpace>;

impl LineMapping {
    /// Samples `gph F` over the grid `xs`, with images cut to `y_window`
    /// and set-valued images sampled with spacing `hy`.
    pub fn sample(
        oracle: &dyn MappingOracle,
        xs: Grid,
        y_window: (f64, f64),
        hy: f64,
        base: (f64, f64),
    ) -> Result<Self> {
        if xs.dim != 1 {
            return Err(Error::MismatchedSpaces);
        }
        if !(hy > 0.0) {
            return Err(Error::Precondition("hy must be positive".into()));
        }
        let domain = xs.points();
        let mut domain_of = Vec::new();
        let mut ys: Vec<Vector> = Vec::new();
        let mut normals = Some(Vec::new());
        for (i, x) in domain.iter().enumerate() {
            for y in oracle.values(x.get(0), y_window.0, y_window.1, hy) {
                domain_of.push(i);
                ys.push(Vector::scalar(y));
                match (oracle.normal_cone(x.get(0), y), normals.as_mut()) {
                    (Some(c), Some(ns)) => ns.push(c),
                    _ => normals = None,
                }
            }
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
        let b = (0..ys.len())
            .find(|&k| close(domain[domain_of[k]].get(0), base.0) && close(ys[k].get(0), base.1))
            .ok_or(Error::Precondition("the base point is not a graph sample".into()))?;
        let mut range: Vec<Vector> = Vec::new();
        let k0 = libm::ceil(y_window.0 / hy - 1e-9) as i64;
        let k1 = libm::floor(y_window.1 / hy + 1e-9) as i64;
        for k in k0..=k1 {
            range.push(Vector::scalar(k as f64 * hy));
        }
        for y in &ys {
            if !range.contains(y) {
                range.push(*y);
            }
        }
        let depth = domain.iter().map(|x| xs.depth(x)).collect();
        let mut m = SetValuedMapping::assemble(
            EuclideanSpace::line(),
            EuclideanSpace::line(),
            domain,
            range,
            domain_of,
            ys,
            b,
        )?;
        m.depth = depth;
        m.normals = normals;
        m.convex = oracle.is_convex();
        m.attach_subgradients();
        Ok(m)
    }
}

/// Midpoints of sampled graph pairs stay on the graph.
pub fn midpoint_convex_graph(oracle: &dyn MappingOracle, points: &[(f64, f64)]) -> bool {
    let stride = (points.len() / 48).max(1);
    points.iter().step_by(stride).all(|a| {
        points
            .iter()
            .all(|b| oracle.contains(0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1)))
    })
}

/// `sr[F](x̄,ȳ) = liminf_{x→x̄, x∉F⁻¹(ȳ)} d(ȳ, F(x)) / d(x, F⁻¹(ȳ))`.
///
/// Domain points with no sampled image contribute `+∞`.
pub fn subregularity_constant<MX, MY>(f: &SetValuedMapping<MX, MY>, settings: &Settings) -> Result<LimitEstimate>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    let inv = f.inverse_image_mask();
    let (dinv, _) = f.inverse_distances();
    let images = f.images();
    let xbar = f.xbar().clone();
    let quotients: Vec<(f64, f64)> = (0..f.domain.len())
        .filter(|&i| !inv[i])
        .map(|i| {
            let dy = images[i]
                .iter()
                .map(|&k| f.induced.values[k])
                .fold(ExtReal::INFINITY, ExtReal::min);
            let q = extreal_div(dy, ExtReal::from(dinv[i]), ExtReal::ZERO);
            (f.induced.left.distance(&f.domain[i], &xbar), q.value())
        })
        .collect();
    estimate_limit(
        |rho| {
            quotients
                .iter()
                .filter(|(d, _)| *d < rho)
                .map(|(_, q)| *q)
                .fold(f64::INFINITY, f64::min)
        },
        &settings.schedule,
        settings.tol,
    )
}

/// `|∇F|◇_ρ(x,y)` at graph point `k`.
pub fn f_nonlocal_rho_slope<MX: Metric, MY: Metric>(f: &SetValuedMapping<MX, MY>, k: usize, rho: f64) -> Result<ExtReal> {
    nonlocal_rho_slope(&f.induced, k, rho, Combiner::Max)
}

/// `|∇F|_ρ(x,y)` at graph point `k`.
pub fn f_local_rho_slope<MX: Metric, MY: Metric>(f: &SetValuedMapping<MX, MY>, k: usize, rho: f64) -> Result<LocalSlope> {
    local_rho_slope(&f.induced, k, rho, Combiner::Max)
}

/// Band infima over `{(x,y) ∈ gph F : d(x,x̄) < ρ, d(y,ȳ) < ρ, x ∉ F⁻¹(ȳ)}`.
fn f_band<MX, MY, Q>(f: &SetValuedMapping<MX, MY>, settings: &Settings, q: Q) -> Result<(LimitEstimate, Coverage)>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
    Q: FnMut(usize, f64) -> Result<Option<ExtReal>>,
{
    let mask = f.band_mask();
    coupled_band(&f.induced, settings, Band2::Masked, Some(&mask), q)
}

fn primal<MX, MY, Q>(f: &SetValuedMapping<MX, MY>, settings: &Settings, mut q: Q) -> Result<LimitEstimate>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
    Q: FnMut(usize, f64) -> Result<ExtReal>,
{
    f_band(f, settings, |k, rho| q(k, rho).map(Some)).map(|(e, _)| e)
}

fn ratio<MX: Metric, MY: Metric>(f: &SetValuedMapping<MX, MY>, k: usize) -> ExtReal {
    let g = &f.induced;
    extreal_div(g.value(k), ExtReal::from(g.dx(k, g.base)), ExtReal::ZERO)
}

/// Uniform strict slope of `F`.
pub fn f_uniform_strict_slope<MX, MY>(f: &SetValuedMapping<MX, MY>, settings: &Settings, combiner: Combiner) -> Result<LimitEstimate>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    primal(f, settings, |k, rho| nonlocal_rho_slope(&f.induced, k, rho, combiner))
}

/// Strict slope of `F`.
pub fn f_strict_slope<MX, MY>(f: &SetValuedMapping<MX, MY>, settings: &Settings, combiner: Combiner) -> Result<LimitEstimate>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    primal(f, settings, |k, rho| Ok(local_rho_slope(&f.induced, k, rho, combiner)?.value))
}

/// `liminf d(y,ȳ)/d(x,x̄)` over the graph bands.
pub fn f_ratio_liminf<MX: Metric + Clone, MY: Metric + Clone>(f: &SetValuedMapping<MX, MY>, settings: &Settings) -> Result<LimitEstimate> {
    primal(f, settings, |k, _| Ok(ratio(f, k)))
}

/// `lim inf max{|∇F|_ρ(x,y), d(y,ȳ)/d(x,x̄)}` over the graph bands.
pub fn f_max_local_ratio<MX: Metric + Clone, MY: Metric + Clone>(f: &SetValuedMapping<MX, MY>, settings: &Settings) -> Result<LimitEstimate> {
    primal(f, settings, |k, rho| {
        Ok(local_rho_slope(&f.induced, k, rho, Combiner::Max)?.value.max(ratio(f, k)))
    })
}

impl LineMapping {
    fn cone(&self, k: usize) -> Result<&Cone2> {
        if k >= self.len() {
            return Err(Error::PointOutOfRange(k));
        }
        self.normals
            .as_ref()
            .map(|n| &n[k])
            .ok_or(Error::NotEvaluable("no normal-cone oracle"))
    }

    /// `y − ȳ` at graph point `k`.
    pub fn offset(&self, k: usize) -> f64 {
        self.induced.points[k].1.get(0) - self.ybar().get(0)
    }
}

/// `D*F(x,y)(y*) = {x* : (x*, −y*) ∈ N_gph F(x,y)}`; `None` when empty.
pub fn coderivative(f: &LineMapping, k: usize, ystar: f64) -> Result<Option<Interval>> {
    Ok(f.cone(k)?.fiber(-ystar))
}

/// `inf ‖x*‖` over `x* ∈ D*F(x,y)(J(v) + ρB*)`.
///
/// The coderivative is positively homogeneous in `y*`, so on each side of
/// `0` the least norm is linear in `y*` and the infimum over the segment
/// `J(v) + ρB*` is attained at its ends, its centre or `0`.
fn coderivative_slope(cone: &Cone2, v: f64, rho: f64) -> ExtReal {
    let j = if v > 0.0 { 1.0 } else { -1.0 };
    let mut candidates = vec![j - rho, j, j + rho];
    if rho >= 1.0 {
        candidates.push(0.0);
    }
    candidates
        .into_iter()
        .filter_map(|w| cone.fiber(-w))
        .map(|i| ExtReal::finite(i.min_abs()))
        .fold(ExtReal::INFINITY, ExtReal::min)
}

fn require_off_base(f: &LineMapping, k: usize) -> Result<f64> {
    let v = f.offset(k);
    if v == 0.0 {
        return Err(Error::Precondition("subdifferential slopes of F need y != ybar".into()));
    }
    Ok(v)
}

/// `|∂F|_ρ(x,y) = inf { ‖x*‖ : x* ∈ D*F(x,y)(J(y−ȳ) + ρB*) }`.
pub fn f_subdiff_rho_slope(f: &LineMapping, k: usize, rho: f64) -> Result<ExtReal> {
    if !(rho > 0.0) {
        return Err(Error::InvalidRho(rho));
    }
    let cone = f.cone(k)?;
    let v = require_off_base(f, k)?;
    Ok(coderivative_slope(cone, v, rho))
}

/// Sampling of `v → y − ȳ`: `points` values evenly spread over
/// `(y − ȳ)·[1 − fraction, 1 + fraction]` with `0 ≤ fraction < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VGrid {
    pub fraction: f64,
    pub points: usize,
}

impl VGrid {
    /// Grid used by the strict version at radius `ρ`.
    pub fn at(rho: f64) -> Self {
        VGrid { fraction: (0.5 * rho).min(0.5), points: 5 }
    }

    fn offsets(&self, v0: f64) -> Vec<f64> {
        let n = self.points.max(1);
        let mut out = vec![v0];
        if n > 1 {
            for i in 0..n {
                let t = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                out.push(v0 * (1.0 + self.fraction * t));
            }
        }
        out
    }
}

/// `|∂F|ᵃ_ρ(x,y) = liminf_{v→y−ȳ} inf { ‖x*‖ : x* ∈ D*F(x,y)(J(v) + ρB*) }`.
pub fn f_approx_subdiff_rho_slope(f: &LineMapping, k: usize, rho: f64, vgrid: VGrid) -> Result<ExtReal> {
    if !(rho > 0.0) {
        return Err(Error::InvalidRho(rho));
    }
    if !(0.0..1.0).contains(&vgrid.fraction) {
        return Err(Error::Precondition("the v-grid fraction must lie in [0, 1)".into()));
    }
    let cone = f.cone(k)?;
    let v0 = require_off_base(f, k)?;
    Ok(vgrid
        .offsets(v0)
        .into_iter()
        .map(|v| coderivative_slope(cone, v, rho))
        .fold(ExtReal::INFINITY, ExtReal::min))
}

fn dual_band<Q>(f: &LineMapping, settings: &Settings, q: Q) -> Result<(LimitEstimate, Coverage)>
where
    Q: Fn(usize, f64) -> Result<ExtReal>,
{
    if f.normals.is_none() {
        return Err(Error::NotEvaluable("no normal-cone oracle"));
    }
    f_band(f, settings, |k, rho| q(k, rho).map(Some))
}

/// Strict subdifferential slope of `F`.
pub fn f_strict_subdiff_slope(f: &LineMapping, settings: &Settings) -> Result<(LimitEstimate, Coverage)> {
    dual_band(f, settings, |k, rho| f_subdiff_rho_slope(f, k, rho))
}

/// Approximate strict subdifferential slope of `F`.
pub fn f_approx_strict_subdiff_slope(f: &LineMapping, settings: &Settings) -> Result<(LimitEstimate, Coverage)> {
    dual_band(f, settings, |k, rho| f_approx_subdiff_rho_slope(f, k, rho, VGrid::at(rho)))
}

/// `lim inf max{|∂F|ᵃ_ρ(x,y), ‖y−ȳ‖/‖x−x̄‖}` over the graph bands; its
/// positivity is the qualitative criterion implied by the limit-set test.
pub fn f_max_approx_ratio(f: &LineMapping, settings: &Settings) -> Result<(LimitEstimate, Coverage)> {
    dual_band(f, settings, |k, rho| {
        Ok(f_approx_subdiff_rho_slope(f, k, rho, VGrid::at(rho))?.max(ratio(f, k)))
    })
}

/// Sampling parameters of [`gfrerer_limit_test`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitSetParams {
    /// Pairs with `max{‖v‖, ‖x*‖}` at or below this count as approaching the origin.
    pub threshold: f64,
    /// `v` is sampled in the ball of this radius.
    pub v_radius: f64,
    /// Samples of `F(x̄ + t u)` per direction.
    pub v_samples: usize,
}

impl Default for LimitSetParams {
    fn default() -> Self {
        LimitSetParams { threshold: 0.1, v_radius: 1.0, v_samples: 16 }
    }
}

/// The sample closest to the origin at one level `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub level: usize,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub ystar: f64,
    pub xstar: f64,
    /// `max{|v|, |x*|}`
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitSetReport {
    /// Every level kept its samples away from the origin. This is evidence
    /// for `(0,0) ∉ Cr₀F(x̄,ȳ)`, not a proof.
    pub excludes_origin: bool,
    pub threshold: f64,
    /// Per-level witness, in level order.
    pub witnesses: Vec<Witness>,
    /// Some level produced no admissible pair.
    pub exhausted: bool,
}

/// Samples the limit set `Cr₀F(x̄,ȳ)` of pairs `(v, x*)` with
/// `x* ∈ D*F(x̄ + t u, ȳ + t v)(y*)`, `|u| = |y*| = 1`, along `t` in the
/// schedule. On a line the unit sphere is `{−1, 1}`; `unit_samples = 1`
/// keeps only `u = 1`.
pub fn gfrerer_limit_test(
    oracle: &dyn MappingOracle,
    base: (f64, f64),
    schedule: &RadiusSchedule,
    unit_samples: usize,
    params: LimitSetParams,
) -> Result<LimitSetReport> {
    schedule.validate()?;
    if unit_samples == 0 || !(params.v_radius > 0.0) || params.v_samples == 0 {
        return Err(Error::Precondition("the limit-set test needs positive sample counts".into()));
    }
    let units: &[f64] = if unit_samples >= 2 { &[-1.0, 1.0] } else { &[1.0] };
    let mut witnesses = Vec::new();
    let mut exhausted = false;
    for (level, t) in schedule.radii().into_iter().enumerate() {
        let mut best: Option<Witness> = None;
        for &u in units {
            let x = base.0 + t * u;
            let r = t * params.v_radius;
            for y in oracle.values(x, base.1 - r, base.1 + r, r / params.v_samples as f64) {
                let cone = oracle
                    .normal_cone(x, y)
                    .ok_or(Error::NotEvaluable("no normal-cone oracle"))?;
                let v = (y - base.1) / t;
                for ystar in [-1.0, 1.0] {
                    let Some(i) = cone.fiber(-ystar) else { continue };
                    let xstar = 0.0f64.clamp(i.lo, i.hi);
                    let margin = v.abs().max(xstar.abs());
                    if best.is_none_or(|b| margin < b.margin) {
                        best = Some(Witness { level, t, u, v, ystar, xstar, margin });
                    }
                }
            }
        }
        match best {
            Some(w) => witnesses.push(w),
            None => exhausted = true,
        }
    }
    let excludes_origin = !exhausted && witnesses.iter().all(|w| w.margin > params.threshold);
    Ok(LimitSetReport { excludes_origin, threshold: params.threshold, witnesses, exhausted })
}

const SUBREGULARITY_RULES: [Rule; 10] = [
    rule("(c) => (e)", 'c', 'e', Exact, Requires::Nothing),
    rule("(d) => (e)", 'd', 'e', Exact, Requires::Nothing),
    rule("(e) => (b)", 'e', 'b', Asymptotic, Requires::Nothing),
    rule("(f) => (g)", 'f', 'g', Exact, Requires::Normed),
    rule("(f) => (h)", 'f', 'h', Exact, Requires::Normed),
    rule("(a) => (b) when gamma < tau", 'a', 'b', Asymptotic, Requires::Nothing),
    rule("(b) => (a) with tau = gamma", 'b', 'a', Asymptotic, Requires::CompleteLsc),
    rule("(f) => (d)", 'f', 'd', Asymptotic, Requires::Asplund),
    rule("(g) => (e)", 'g', 'e', Asymptotic, Requires::Asplund),
    rule("(h) => (b), smooth range norm or convex", 'h', 'b', Asymptotic, Requires::SmoothOrConvex),
];

fn verdict_from<MX, MY>(
    f: &SetValuedMapping<MX, MY>,
    config: CriteriaConfig,
    settings: &Settings,
    duals: [Option<ExtReal>; 3],
) -> Result<Verdict>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    let normed = duals.iter().any(Option::is_some);
    let setting = Setting {
        normed,
        complete: true,
        lsc: f.closed,
        asplund: normed,
        convex: f.convex,
        smooth_range: normed,
        nonnegative: true,
        exact_oracle: normed,
    };
    let c = Combiner::Max;
    let quantities = vec![
        ('a', "metrically subregular with tau = sr[F] > 0", Some(subregularity_constant(f, settings)?.reported)),
        ('b', "uniform strict slope of F > gamma", Some(f_uniform_strict_slope(f, settings, c)?.reported)),
        ('c', "liminf d(y, ybar)/d(x, xbar) > gamma", Some(f_ratio_liminf(f, settings)?.reported)),
        ('d', "strict slope of F > gamma", Some(f_strict_slope(f, settings, c)?.reported)),
        ('e', "lim inf max{rho-slope of F, d(y, ybar)/d(x, xbar)} > gamma", Some(f_max_local_ratio(f, settings)?.reported)),
        ('f', "approximate strict subdifferential slope of F > gamma", duals[0]),
        ('g', "lim inf max{approximate subdifferential rho-slope, |y - ybar|/|x - xbar|} > gamma", duals[1]),
        ('h', "strict subdifferential slope of F > gamma", duals[2]),
    ];
    assemble(config, setting, quantities, &SUBREGULARITY_RULES)
}

/// Conditions (a)–(h) of the subregularity criteria with the implication
/// audit, for mappings between lines with a normal-cone oracle.
pub fn subregularity_verdict(f: &LineMapping, config: CriteriaConfig, settings: &Settings) -> Result<Verdict> {
    let optional = |r: Result<(LimitEstimate, Coverage)>| match r {
        Ok((e, _)) => Ok(Some(e.reported)),
        Err(Error::NotEvaluable(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let duals = [
        optional(f_approx_strict_subdiff_slope(f, settings))?,
        optional(f_max_approx_ratio(f, settings))?,
        optional(f_strict_subdiff_slope(f, settings))?,
    ];
    verdict_from(f, config, settings, duals)
}

/// The primal conditions (a)–(e) for a mapping between metric spaces; the
/// dual conditions are not evaluable.
pub fn subregularity_verdict_primal<MX, MY>(
    f: &SetValuedMapping<MX, MY>,
    config: CriteriaConfig,
    settings: &Settings,
) -> Result<Verdict>
where
    MX: Metric + Clone,
    MY: Metric + Clone,
{
    verdict_from(f, config, settings, [None, None, None])
}

/// `inf_{x ∉ F⁻¹(ȳ)} d(ȳ, F(x)) / d(x, F⁻¹(ȳ))` over the whole sample.
pub fn global_subregularity_ratio<MX: Metric + Clone, MY: Metric + Clone>(f: &SetValuedMapping<MX, MY>) -> ExtReal {
    let inv = f.inverse_image_mask();
    let (dinv, _) = f.inverse_distances();
    (0..f.len())
        .filter(|&k| !inv[f.domain_of[k]])
        .map(|k| extreal_div(f.induced.values[k], ExtReal::from(dinv[f.domain_of[k]]), ExtReal::ZERO))
        .fold(ExtReal::INFINITY, ExtReal::min)
}

/// Calmness constant of `G` at its base over the whole sample:
/// `sup_{(y,x) ∈ gph G} d(x, G(ȳ)) / d(y, ȳ)` with `0/0 = 0`.
pub fn global_calmness_constant<MX: Metric + Clone, MY: Metric + Clone>(g: &SetValuedMapping<MX, MY>) -> ExtReal {
    let p = &g.induced;
    let at_base: Vec<usize> = (0..g.len()).filter(|&k| p.points[k].0 == *g.xbar()).collect();
    (0..g.len())
        .map(|k| {
            let dx = at_base.iter().map(|&j| p.dy(k, j)).fold(f64::INFINITY, f64::min);
            extreal_div(ExtReal::from(dx), ExtReal::finite(p.dx(k, p.base)), ExtReal::ZERO)
        })
        .fold(ExtReal::ZERO, ExtReal::max)
}

/// A named mapping fixture with hand-derived constants.
pub struct MappingFixture {
    pub name: &'static str,
    pub description: &'static str,
    pub oracle: Box<dyn MappingOracle>,
    pub base: (f64, f64),
    pub grid: Grid,
    pub y_window: (f64, f64),
    pub hy: f64,
    pub schedule: RadiusSchedule,
    /// `sr[F](x̄,ȳ)`.
    pub subregularity: f64,
}

impl core::fmt::Debug for MappingFixture {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MappingFixture").field("name", &self.name).finish_non_exhaustive()
    }
}

impl MappingFixture {
    pub fn mapping(&self) -> Result<LineMapping> {
        LineMapping::sample(self.oracle.as_ref(), self.grid, self.y_window, self.hy, self.base)
    }

    pub fn settings(&self) -> Settings {
        Settings::with_schedule(self.schedule)
    }
}

pub fn mapping_fixtures() -> Vec<MappingFixture> {
    let h = 1.0 / 64.0;
    let grid = Grid::new(1, -1.0, 1.0, h).expect("valid grid");
    vec![
        MappingFixture {
            name: "identity-mapping",
            description: "F(x) = {x} at (0, 0)",
            oracle: Box::new(Identity),
            base: (0.0, 0.0),
            grid,
            y_window: (-1.0, 1.0),
            hy: h,
            schedule: catalog_schedule(),
            subregularity: 1.0,
        },
        MappingFixture {
            name: "halfline-mapping",
            description: "F(x) = {y : y >= x} at (0, 0)",
            oracle: Box::new(Halfline),
            base: (0.0, 0.0),
            grid: Grid::new(1, -0.5, 0.5, h).expect("valid grid"),
            y_window: (-0.5, 0.5),
            hy: h,
            schedule: catalog_schedule(),
            subregularity: 1.0,
        },
        MappingFixture {
            name: "parabola-mapping",
            description: "F(x) = {x^2} at (0, 0)",
            oracle: Box::new(Parabola),
            base: (0.0, 0.0),
            grid: Grid::new(1, -1.0, 1.0, 1.0 / 512.0).expect("valid grid"),
            y_window: (-1.0, 1.0),
            hy: h,
            schedule: catalog_schedule(),
            subregularity: 0.0,
        },
    ]
}

pub fn mapping_fixture(name: &str) -> Option<MappingFixture> {
    mapping_fixtures().into_iter().find(|m| m.name == name)
}

/// For documentation output: the fixture names.
pub fn mapping_names() -> Vec<String> {
    mapping_fixtures().iter().map(|m| m.name.into()).collect()
}
