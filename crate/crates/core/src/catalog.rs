//! Named fixtures with hand-derived ground truths.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::ext::ExtReal;
use crate::function::{OracleKind, Probe, ProbeFunction};
use crate::limit::RadiusSchedule;
use crate::product::{embed_tilde_normed, SubgradientSet, TwoVarProbe};
use crate::setval::mapping_fixture;
use crate::space::{EuclideanSpace, Grid, NormKind, Vector};

/// Analytic values at the base point.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruth {
    pub er: f64,
    pub uniform_strict: f64,
    pub strict_outer: f64,
    pub strict_outer_subdiff: Option<f64>,
}

/// A single-variable function fixture on a grid of `R^dim`.
pub struct FunctionFixture {
    pub name: &'static str,
    pub description: &'static str,
    pub space: EuclideanSpace,
    pub grid: Grid,
    pub base: Vector,
    pub schedule: RadiusSchedule,
    pub truth: GroundTruth,
    pub function: Box<dyn ProbeFunction + Send + Sync>,
}

impl FunctionFixture {
    pub fn probe(&self) -> Result<Probe<EuclideanSpace>> {
        Probe::sample(self.space, self.grid, self.function.as_ref(), &self.base)
    }
}

impl core::fmt::Debug for FunctionFixture {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FunctionFixture")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("truth", &self.truth)
            .finish()
    }
}

/// Closed interval `[lo, hi]` of slopes on the line, as a subgradient list.
///
/// The endpoints are listed, and `0` is added when it lies inside, so that the
/// minimal norm over the interval is attained by a listed element.
fn interval(lo: f64, hi: f64) -> Vec<Vector> {
    let mut out = vec![Vector::scalar(lo)];
    if hi != lo {
        out.push(Vector::scalar(hi));
    }
    if lo < 0.0 && hi > 0.0 {
        out.push(Vector::scalar(0.0));
    }
    out
}

/// `|x|` on the line.
pub struct Abs;

impl ProbeFunction for Abs {
    fn eval(&self, x: &Vector) -> ExtReal {
        ExtReal::finite(x.get(0).abs())
    }

    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        let t = x.get(0);
        Some(if t > 0.0 {
            interval(1.0, 1.0)
        } else if t < 0.0 {
            interval(-1.0, -1.0)
        } else {
            interval(-1.0, 1.0)
        })
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(OracleKind::Exact)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `x²` on the line.
pub struct Parabola;

impl ProbeFunction for Parabola {
    fn eval(&self, x: &Vector) -> ExtReal {
        let t = x.get(0);
        ExtReal::finite(t * t)
    }

    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        Some(vec![Vector::scalar(2.0 * x.get(0))])
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(OracleKind::Exact)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `max{x, 0}` on the line.
pub struct PositivePart;

impl ProbeFunction for PositivePart {
    fn eval(&self, x: &Vector) -> ExtReal {
        ExtReal::finite(x.get(0).max(0.0))
    }

    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        let t = x.get(0);
        Some(if t > 0.0 {
            interval(1.0, 1.0)
        } else if t < 0.0 {
            interval(0.0, 0.0)
        } else {
            interval(0.0, 1.0)
        })
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(OracleKind::Exact)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `ℓ¹` distance in `R²` to the halfline `{(t, 0) : t ≥ 0}`.
pub struct DistanceToHalfline;

impl DistanceToHalfline {
    /// Subdifferential interval of `|·|` at `t`.
    fn abs_range(t: f64) -> (f64, f64) {
        if t > 0.0 {
            (1.0, 1.0)
        } else if t < 0.0 {
            (-1.0, -1.0)
        } else {
            (-1.0, 1.0)
        }
    }

    fn candidates((lo, hi): (f64, f64)) -> Vec<f64> {
        let mut c = vec![lo, hi, 0.0f64.clamp(lo, hi)];
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }
}

impl ProbeFunction for DistanceToHalfline {
    fn eval(&self, x: &Vector) -> ExtReal {
        let (a, b) = (x.get(0), x.get(1));
        ExtReal::finite(if a >= 0.0 { b.abs() } else { -a + b.abs() })
    }

    /// Box `∂₁ × ∂₂`; listing the vertices and the coordinatewise clamp of 0
    /// attains the minimal `ℓ∞` norm.
    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        let (a, b) = (x.get(0), x.get(1));
        let first = if a > 0.0 {
            (0.0, 0.0)
        } else if a < 0.0 {
            (-1.0, -1.0)
        } else {
            (-1.0, 0.0)
        };
        let mut out = Vec::new();
        for u in Self::candidates(first) {
            for v in Self::candidates(Self::abs_range(b)) {
                out.push(Vector::new(&[u, v]));
            }
        }
        Some(out)
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(OracleKind::Exact)
    }

    fn is_convex(&self) -> bool {
        true
    }
}

/// `g(|x|)` with `g` a finite sawtooth above the identity.
///
/// On each `[a, 2a]` with `a = 2^{-k-1}`, `k = 0..=6`, `g` rises with slope
/// `8/3` from `g(a) = a` to `g(1.75a) = 3a` and falls with slope `-4` to
/// `g(2a) = 2a`; elsewhere `g(t) = t`. The dyadic nodes are local minima with
/// `g(t)/t = 1`, so the local slopes vanish along a sequence tending to the
/// origin while the error bound modulus stays 1.
pub struct Sawtooth;

impl Sawtooth {
    pub const CORE: f64 = 1.0 / 128.0;

    /// Left end `a` of the tooth `[a, 2a)` containing `t`, `None` in the linear parts.
    fn tooth(t: f64) -> Option<f64> {
        if !(Self::CORE..1.0).contains(&t) {
            return None;
        }
        let mut a = 0.5;
        while t < a {
            a *= 0.5;
        }
        Some(a)
    }

    fn g(t: f64) -> f64 {
        match Self::tooth(t) {
            None => t,
            Some(a) if t <= 1.75 * a => a + 8.0 / 3.0 * (t - a),
            Some(a) => 3.0 * a - 4.0 * (t - 1.75 * a),
        }
    }

    /// `(left, right)` derivatives of `g` at `t > 0`.
    fn one_sided(t: f64) -> (f64, f64) {
        let slope_right = match Self::tooth(t) {
            None => 1.0,
            Some(a) if t < 1.75 * a => 8.0 / 3.0,
            Some(_) => -4.0,
        };
        let slope_left = match Self::tooth(t) {
            _ if t == 1.0 => -4.0,
            Some(a) if t == a && a > Self::CORE => -4.0,
            Some(a) if t == a => 1.0,
            Some(a) if t == 1.75 * a => 8.0 / 3.0,
            _ => slope_right,
        };
        (slope_left, slope_right)
    }
}

impl ProbeFunction for Sawtooth {
    fn eval(&self, x: &Vector) -> ExtReal {
        ExtReal::finite(Self::g(x.get(0).abs()))
    }

    /// Fréchet subgradients: `[left, right]` at convex kinks, `∅` at the peaks.
    fn subgradients(&self, x: &Vector) -> Option<Vec<Vector>> {
        let s = x.get(0);
        if s == 0.0 {
            return Some(interval(-1.0, 1.0));
        }
        let (l, r) = Self::one_sided(s.abs());
        let (lo, hi) = if s > 0.0 { (l, r) } else { (-r, -l) };
        Some(if lo <= hi { interval(lo, hi) } else { Vec::new() })
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        Some(OracleKind::GradientOnly)
    }
}

/// The schedule used for every catalog fixture: radii `1, 1/2, …, 1/32`.
pub fn catalog_schedule() -> RadiusSchedule {
    RadiusSchedule { rho0: 1.0, gamma: 0.5, steps: 5 }
}

fn line_grid(h: f64) -> Grid {
    Grid { dim: 1, lo: -1.0, hi: 1.0, h }
}

/// All single-variable fixtures.
pub fn function_fixtures() -> Vec<FunctionFixture> {
    let line = EuclideanSpace::line();
    let origin = Vector::scalar(0.0);
    vec![
        FunctionFixture {
            name: "abs",
            description: "|x| on [-1, 1]",
            space: line,
            grid: line_grid(1.0 / 128.0),
            base: origin,
            schedule: catalog_schedule(),
            truth: GroundTruth { er: 1.0, uniform_strict: 1.0, strict_outer: 1.0, strict_outer_subdiff: Some(1.0) },
            function: Box::new(Abs),
        },
        FunctionFixture {
            name: "parabola",
            description: "x^2 on [-1, 1]",
            space: line,
            grid: line_grid(1.0 / 2048.0),
            base: origin,
            schedule: catalog_schedule(),
            truth: GroundTruth { er: 0.0, uniform_strict: 0.0, strict_outer: 0.0, strict_outer_subdiff: Some(0.0) },
            function: Box::new(Parabola),
        },
        FunctionFixture {
            name: "positive-part",
            description: "max{x, 0} on [-1, 1]",
            space: line,
            grid: line_grid(1.0 / 128.0),
            base: origin,
            schedule: catalog_schedule(),
            truth: GroundTruth { er: 1.0, uniform_strict: 1.0, strict_outer: 1.0, strict_outer_subdiff: Some(1.0) },
            function: Box::new(PositivePart),
        },
        FunctionFixture {
            name: "distance-to-halfline",
            description: "l1 distance to {(t, 0) : t >= 0} on [-1/2, 1/2]^2 with the l1 norm",
            space: EuclideanSpace { dim: 2, norm: NormKind::L1 },
            grid: Grid { dim: 2, lo: -0.5, hi: 0.5, h: 1.0 / 64.0 },
            base: Vector::new(&[0.0, 0.0]),
            schedule: catalog_schedule(),
            truth: GroundTruth { er: 1.0, uniform_strict: 1.0, strict_outer: 1.0, strict_outer_subdiff: Some(1.0) },
            function: Box::new(DistanceToHalfline),
        },
        FunctionFixture {
            name: "nonconvex-lipschitz-counterexample",
            description: "sawtooth g(|x|) >= |x| with local minima at the dyadic nodes",
            space: line,
            grid: line_grid(1.0 / 1024.0),
            base: origin,
            schedule: catalog_schedule(),
            truth: GroundTruth { er: 1.0, uniform_strict: 1.0, strict_outer: 0.0, strict_outer_subdiff: Some(0.0) },
            function: Box::new(Sawtooth),
        },
    ]
}

/// Looks up a single-variable fixture by name.
pub fn function_fixture(name: &str) -> Option<FunctionFixture> {
    function_fixtures().into_iter().find(|f| f.name == name)
}

/// A two-variable fixture on `R × R` with base `(0, 0)`.
pub struct TwoVarFixture {
    pub name: &'static str,
    pub description: &'static str,
    pub schedule: RadiusSchedule,
    /// `Er f(x̄,ȳ)`.
    pub er: f64,
    build: fn() -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>>,
}

impl TwoVarFixture {
    pub fn probe(&self) -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>> {
        (self.build)()
    }
}

impl core::fmt::Debug for TwoVarFixture {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TwoVarFixture").field("name", &self.name).field("er", &self.er).finish()
    }
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `f` on the grid of `[−w, w]²` with spacing `h`, with one listed
/// subgradient per point.
///
/// For the separable fixtures below the listed pair is the least-norm
/// element in each factor, which attains every subgradient infimum used.
fn square(
    f: fn(f64, f64) -> f64,
    sub: fn(f64, f64) -> (f64, f64),
    w: f64,
    h: f64,
) -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>> {
    let axis = Grid { dim: 1, lo: -w, hi: w, h }.points();
    let mut points = Vec::with_capacity(axis.len() * axis.len());
    let mut subs = Vec::with_capacity(axis.len() * axis.len());
    for x in &axis {
        for y in &axis {
            points.push((*x, *y));
            let (a, b) = sub(x.get(0), y.get(0));
            subs.push(Some(SubgradientSet::Finite(vec![(Vector::scalar(a), Vector::scalar(b))])));
        }
    }
    let values = points.iter().map(|(x, y)| ExtReal::finite(f(x.get(0), y.get(0)))).collect();
    let base = points
        .iter()
        .position(|(x, y)| x.get(0) == 0.0 && y.get(0) == 0.0)
        .expect("the origin is a grid point");
    let mut g = TwoVarProbe::new(EuclideanSpace::line(), EuclideanSpace::line(), points, values, base)?;
    g.subgradients = subs;
    g.norms = Some((NormKind::L2, NormKind::L2));
    g.convex = true;
    g.depth = g.points.iter().map(|(x, _)| w - x.get(0).abs()).collect();
    Ok(g)
}

fn abs_tilde() -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>> {
    let p = function_fixture("abs").expect("catalog entry").probe()?;
    let ys = Grid { dim: 1, lo: -0.5, hi: 0.5, h: 0.125 }.points();
    embed_tilde_normed(&p, EuclideanSpace::line(), &ys, &Vector::scalar(0.0))
}

fn induced(name: &str) -> Result<TwoVarProbe<EuclideanSpace, EuclideanSpace>> {
    Ok(mapping_fixture(name).expect("catalog entry").mapping()?.induced)
}

/// All two-variable fixtures.
pub fn two_var_fixtures() -> Vec<TwoVarFixture> {
    vec![
        TwoVarFixture {
            name: "abs-tilde",
            description: "|x| at y = 0 and +inf elsewhere, y sampled on [-1/2, 1/2]",
            schedule: catalog_schedule(),
            er: 1.0,
            build: abs_tilde,
        },
        TwoVarFixture {
            name: "abs-sum",
            description: "|x| + |y| on [-1/4, 1/4]^2",
            schedule: catalog_schedule(),
            er: 1.0,
            build: || square(|x, y| x.abs() + y.abs(), |x, y| (sign(x), sign(y)), 0.25, 1.0 / 64.0),
        },
        TwoVarFixture {
            name: "smooth-plus-abs",
            description: "x^2 + |y| on [-1/8, 1/8]^2",
            schedule: catalog_schedule(),
            er: 0.0,
            build: || square(|x, y| x * x + y.abs(), |x, y| (2.0 * x, sign(y)), 0.125, 1.0 / 128.0),
        },
        TwoVarFixture {
            name: "identity-induced",
            description: "d(y, 0) on the graph of F(x) = {x}",
            schedule: catalog_schedule(),
            er: 1.0,
            build: || induced("identity-mapping"),
        },
        TwoVarFixture {
            name: "halfline-induced",
            description: "d(y, 0) on the graph of F(x) = {y : y >= x}",
            schedule: catalog_schedule(),
            er: 1.0,
            build: || induced("halfline-mapping"),
        },
    ]
}

pub fn two_var_fixture(name: &str) -> Option<TwoVarFixture> {
    two_var_fixtures().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::midpoint_convex;

    #[test]
    fn sawtooth_shape() {
        assert_eq!(Sawtooth::g(0.5), 0.5);
        assert_eq!(Sawtooth::g(0.875), 1.5);
        assert_eq!(Sawtooth::g(1.0), 1.0);
        assert_eq!(Sawtooth::g(0.25), 0.25);
        assert_eq!(Sawtooth::g(0.001), 0.001);
        let x = Vector::scalar(0.875);
        assert_eq!(Sawtooth.subgradients(&x), Some(Vec::new()));
        let node = Sawtooth.subgradients(&Vector::scalar(-0.5)).unwrap();
        assert!(node.contains(&Vector::scalar(0.0)));
        for t in [0.1, 0.3, 0.6, 0.9] {
            assert!(Sawtooth::g(t) >= t);
        }
    }

    #[test]
    fn exact_oracles_are_convex() {
        for fx in function_fixtures() {
            if fx.function.oracle_kind() == Some(OracleKind::Exact) {
                let coarse = Grid { h: 0.125, ..fx.grid };
                assert!(midpoint_convex(fx.function.as_ref(), &coarse.points(), 1e-12), "{}", fx.name);
                assert!(fx.function.is_convex());
            }
        }
        let coarse = line_grid(1.0 / 64.0);
        assert!(!midpoint_convex(&Sawtooth, &coarse.points(), 1e-12));
    }

    #[test]
    fn base_points_are_zeros() {
        for fx in function_fixtures() {
            let p = fx.probe().unwrap();
            p.require_base_zero().unwrap();
        }
    }
}
