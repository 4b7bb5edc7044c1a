//! Extended-real functions sampled on a probe set.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::space::{EuclideanSpace, FiniteMetricSpace, Grid, Metric, NormKind, Vector};

/// How far a subgradient oracle can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OracleKind {
    /// The full Fréchet subdifferential; only allowed for convex functions.
    Exact,
    /// Gradients where differentiable, hand-derived sets at kinks.
    GradientOnly,
}

/// An analytic function `f : R^dim → R ∪ {+∞}` with optional subgradients.
pub trait ProbeFunction {
    fn eval(&self, x: &Vector) -> ExtReal;

    /// Fréchet subgradients at `x`; `None` when the oracle has no data there,
    /// `Some(vec![])` when the subdifferential is empty.
    fn subgradients(&self, _x: &Vector) -> Option<Vec<Vector>> {
        None
    }

    fn oracle_kind(&self) -> Option<OracleKind> {
        None
    }

    fn is_convex(&self) -> bool {
        false
    }

    fn is_lsc(&self) -> bool {
        true
    }
}

/// Midpoint convexity on all pairs of `points` (midpoints evaluated directly).
pub fn midpoint_convex(f: &dyn ProbeFunction, points: &[Vector], tol: f64) -> bool {
    let stride = (points.len() / 64).max(1);
    points.iter().step_by(stride).all(|a| {
        points.iter().all(|b| {
            let (fa, fb) = (f.eval(a), f.eval(b));
            if fa.is_infinite() || fb.is_infinite() {
                return true;
            }
            let mid = f.eval(&(0.5 * (*a + *b)));
            mid.is_finite() && mid.value() <= 0.5 * (fa.value() + fb.value()) + tol
        })
    })
}

/// A function tabulated on a finite probe set of a metric space.
///
/// Every slope is computed by enumerating `points`. On a [`FiniteMetricSpace`]
/// the probe set is the whole space and the results are exact; on a grid they
/// approximate the continuous quantities.
#[derive(Clone, Debug)]
pub struct Probe<M: Metric> {
    pub space: M,
    pub points: Vec<M::Point>,
    pub values: Vec<ExtReal>,
    /// Per-point subgradient data (`None` = no oracle at that point).
    pub subgradients: Vec<Option<Vec<Vector>>>,
    /// Dual norm used to measure subgradients.
    pub dual_norm: Option<NormKind>,
    pub oracle: Option<OracleKind>,
    pub base: usize,
    pub convex: bool,
    pub lsc: bool,
    /// The ground space is complete (finite spaces, closed grids of `R^n`).
    pub complete: bool,
    /// Distance from each point to the edge of the sampled region (`+∞` when
    /// the probe set is the whole space); used to flag truncated searches.
    pub depth: Vec<f64>,
}

/// Distance to the level set, with a flag for possibly clipped searches.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelDistance {
    pub value: ExtReal,
    pub truncated: bool,
}

impl Probe<FiniteMetricSpace> {
    /// A function on a finite metric space given by its value table.
    pub fn finite(space: FiniteMetricSpace, values: Vec<ExtReal>, base: usize) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Precondition(alloc::format!(
                "{} values for a space of {} points",
                values.len(),
                space.len()
            )));
        }
        if base >= space.len() {
            return Err(Error::PointOutOfRange(base));
        }
        let n = space.len();
        Ok(Probe {
            points: space.points(),
            space,
            values,
            subgradients: alloc::vec![None; n],
            dual_norm: None,
            oracle: None,
            base,
            convex: false,
            lsc: true,
            complete: true,
            depth: vec![f64::INFINITY; n],
        })
    }
}

impl Probe<EuclideanSpace> {
    /// Samples `f` on every point of `grid`; `base` must be a grid point.
    pub fn sample(space: EuclideanSpace, grid: Grid, f: &dyn ProbeFunction, base: &Vector) -> Result<Self> {
        if grid.dim != space.dim || base.dim() != space.dim {
            return Err(Error::MismatchedSpaces);
        }
        let points = grid.points();
        let base = nearest_index(&space, &points, base, grid.h)?;
        Ok(Probe::from_points(space, points, f, base, Some(grid)))
    }

    /// Samples `f` on an explicit point list.
    pub fn from_points(
        space: EuclideanSpace,
        points: Vec<Vector>,
        f: &dyn ProbeFunction,
        base: usize,
        domain: Option<Grid>,
    ) -> Self {
        let values = points.iter().map(|p| f.eval(p)).collect();
        let subgradients = points.iter().map(|p| f.subgradients(p)).collect();
        let depth = match domain {
            Some(g) => points.iter().map(|p| g.depth(p)).collect(),
            None => vec![f64::INFINITY; points.len()],
        };
        Probe {
            dual_norm: Some(space.norm.dual()),
            space,
            points,
            values,
            subgradients,
            oracle: f.oracle_kind(),
            base,
            convex: f.is_convex(),
            lsc: f.is_lsc(),
            complete: true,
            depth,
        }
    }
}

/// Index of the probe point within `1e-9·h` of `target`.
pub(crate) fn nearest_index(space: &EuclideanSpace, points: &[Vector], target: &Vector, h: f64) -> Result<usize> {
    points
        .iter()
        .position(|p| space.distance(p, target) <= 1e-9 * h)
        .ok_or_else(|| Error::Precondition(alloc::format!("{target:?} is not a probe point")))
}

impl<M: Metric> Probe<M> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    /// `f₊(x) = max{f(x), 0}`.
    pub fn positive_part(&self, i: usize) -> ExtReal {
        self.values[i].positive_part()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.space.distance(&self.points[i], &self.points[j])
    }

    pub fn in_level_set(&self, i: usize) -> bool {
        self.values[i] <= ExtReal::ZERO
    }

    pub fn level_set(&self) -> LevelSet {
        LevelSet {
            members: (0..self.len()).filter(|&i| self.in_level_set(i)).collect(),
        }
    }

    /// Finite probe sets only: require the base point to lie on the level `f = 0`.
    pub fn require_base_zero(&self) -> Result<()> {
        let v = self.values[self.base];
        if v != ExtReal::ZERO {
            return Err(Error::BaseNotZero(v.value()));
        }
        Ok(())
    }

    /// `d(x, S(f))` over level-set points within `search_radius` of `x`.
    pub fn dist_to_level_set(&self, i: usize, search_radius: f64) -> LevelDistance {
        let mut best = f64::INFINITY;
        let mut outside = false;
        for j in 0..self.len() {
            let d = self.dist(i, j);
            if d > search_radius {
                outside = true;
            } else if self.in_level_set(j) && d < best {
                best = d;
            }
        }
        let mut truncated = outside && best > search_radius;
        // level-set points beyond the sampled region could be closer
        truncated |= best > self.depth[i];
        LevelDistance {
            value: ExtReal::from(best),
            truncated,
        }
    }

    /// `d(x, S(f))` for every probe point with an unbounded search.
    pub fn level_distances(&self) -> Vec<f64> {
        let s = self.level_set().members;
        (0..self.len())
            .map(|i| s.iter().map(|&j| self.dist(i, j)).fold(f64::INFINITY, f64::min))
            .collect()
    }

    /// Distance to the nearest other point with a finite value (0 if none).
    pub fn finite_neighbour_distance(&self, i: usize) -> f64 {
        let d = (0..self.len())
            .filter(|&j| j != i && self.values[j].is_finite())
            .map(|j| self.dist(i, j))
            .fold(f64::INFINITY, f64::min);
        if d.is_finite() {
            d
        } else {
            0.0
        }
    }
}

/// Indices of probe points with `f ≤ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub members: Vec<usize>,
}

impl LevelSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
