//! Probe spaces: finite metric spaces, low-dimensional normed spaces, and
//! products carrying the ρ-metric family.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest finite metric space accepted (triangle inequality is checked in O(n³)).
pub const MAX_FINITE_POINTS: usize = 400;

/// A point of `R^dim` with `dim <= 3`.
#[derive(Clone, Copy, PartialEq, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vector {
    coords: [f64; 3],
    dim: u8,
}

impl Vector {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            (1..=3).contains(&coords.len()),
            "vectors have between 1 and 3 coordinates"
        );
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Vector {
            coords: c,
            dim: coords.len() as u8,
        }
    }

    pub fn scalar(v: f64) -> Self {
        Vector::new(&[v])
    }

    pub fn zeros(dim: usize) -> Self {
        Vector::new(&[0.0, 0.0, 0.0][..dim])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords()[i]
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&c| c == 0.0)
    }

    fn zip_with(self, other: Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim, other.dim, "vector dimension mismatch");
        let mut c = [0.0; 3];
        for (i, out) in c.iter_mut().enumerate().take(self.dim as usize) {
            *out = f(self.coords[i], other.coords[i]);
        }
        Vector { coords: c, dim: self.dim }
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.zip_with(self, |a, _| -a)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: Vector) -> Vector {
        rhs.zip_with(rhs, |a, _| self * a)
    }
}

/// The norm on `R^dim`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum NormKind {
    L2,
    L1,
    #[cfg_attr(feature = "serde", serde(rename = "LINF"))]
    LInf,
}

impl NormKind {
    pub fn norm(self, v: &Vector) -> f64 {
        let c = v.coords();
        match self {
            NormKind::L2 => libm::sqrt(c.iter().map(|x| x * x).sum()),
            NormKind::L1 => c.iter().map(|x| x.abs()).sum(),
            NormKind::LInf => c.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// The norm of the dual space (`L2 ↔ L2`, `L1 ↔ LINF`).
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L2 => NormKind::L2,
            NormKind::L1 => NormKind::LInf,
            NormKind::LInf => NormKind::L1,
        }
    }

    /// True when the norm is Fréchet differentiable away from the origin.
    pub fn is_smooth(self) -> bool {
        matches!(self, NormKind::L2)
    }
}

/// A metric on a point type.
pub trait Metric {
    type Point: Clone + PartialEq + core::fmt::Debug;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

impl<M: Metric + ?Sized> Metric for &M {
    type Point = M::Point;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        (**self).distance(a, b)
    }
}

/// A finite metric space given by its distance matrix; points are indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle
    /// inequality (exhaustively, with slack `1e-12` relative to the diameter).
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidMetric("empty space".into()));
        }
        if n > MAX_FINITE_POINTS {
            return Err(Error::InvalidMetric(format!(
                "{n} points exceeds the limit of {MAX_FINITE_POINTS}"
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            flat.extend_from_slice(row);
        }
        let space = FiniteMetricSpace { n, dist: flat };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let mut diam: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = self.d(i, j);
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) = {d} is not a nonnegative real")));
                }
                if d != self.d(j, i) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                if (i == j) != (d == 0.0) {
                    return Err(Error::InvalidMetric(format!(
                        "d({i},{j}) = {d}: distinct points need positive distance"
                    )));
                }
                diam = diam.max(d);
            }
        }
        let slack = 1e-12 * diam;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) + slack {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Distance matrix induced by a norm on the given points.
    pub fn from_points(points: &[Vector], norm: NormKind) -> Result<Self> {
        let rows = points
            .iter()
            .map(|p| points.iter().map(|q| norm.norm(&(*p - *q))).collect())
            .collect();
        FiniteMetricSpace::new(rows)
    }

    /// Shortest-path metric of a connected graph with positive edge weights.
    pub fn from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut d = alloc::vec![alloc::vec![f64::INFINITY; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidMetric(format!("edge ({a},{b}) leaves the {n} vertices")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMetric(format!("edge ({a},{b}) has weight {w}")));
            }
            if a != b && w < d[a][b] {
                d[a][b] = w;
                d[b][a] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        if d.iter().flatten().any(|v| v.is_infinite()) {
            return Err(Error::InvalidMetric("the graph is not connected".into()));
        }
        FiniteMetricSpace::new(d)
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    /// Smallest positive distance (0 for a singleton).
    pub fn min_positive_distance(&self) -> f64 {
        self.dist
            .iter()
            .copied()
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(if self.n == 1 { 0.0 } else { f64::INFINITY })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

impl Metric for FiniteMetricSpace {
    type Point = usize;

    #[inline]
    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.d(*a, *b)
    }
}

/// `R^dim` (`dim <= 3`) with one of the norms in [`NormKind`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EuclideanSpace {
    pub dim: usize,
    pub norm: NormKind,
}

impl EuclideanSpace {
    pub fn new(dim: usize, norm: NormKind) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidSpace("dimension must be 1, 2 or 3"));
        }
        let s = EuclideanSpace { dim, norm };
        s.check_norm_axioms()?;
        Ok(s)
    }

    pub fn line() -> Self {
        EuclideanSpace { dim: 1, norm: NormKind::L2 }
    }

    pub fn norm_of(&self, v: &Vector) -> f64 {
        self.norm.norm(v)
    }

    pub fn dual_norm_of(&self, v: &Vector) -> f64 {
        self.norm.dual().norm(v)
    }

    /// Checks the norm axioms on a fixed lattice of sample vectors.
    fn check_norm_axioms(&self) -> Result<()> {
        const LEVELS: [f64; 5] = [-1.5, -0.25, 0.0, 0.75, 2.0];
        let samples: Vec<Vector> = lattice(self.dim, &LEVELS);
        let nrm = |v: &Vector| self.norm.norm(v);
        for a in &samples {
            let na = nrm(a);
            if (na == 0.0) != a.is_zero() {
                return Err(Error::InvalidSpace("norm vanishes off the origin"));
            }
            if (nrm(&(-3.0 * *a)) - 3.0 * na).abs() > 1e-12 * (1.0 + na) {
                return Err(Error::InvalidSpace("norm is not absolutely homogeneous"));
            }
            for b in samples.iter().step_by(7) {
                if nrm(&(*a + *b)) > na + nrm(b) + 1e-12 {
                    return Err(Error::InvalidSpace("norm violates the triangle inequality"));
                }
            }
        }
        Ok(())
    }
}

fn lattice(dim: usize, levels: &[f64]) -> Vec<Vector> {
    let mut out = Vec::new();
    let m = levels.len();
    let total = m.pow(dim as u32);
    for mut code in 0..total {
        let mut c = [0.0; 3];
        for slot in c.iter_mut().take(dim) {
            *slot = levels[code % m];
            code /= m;
        }
        out.push(Vector::new(&c[..dim]));
    }
    out
}

impl Metric for EuclideanSpace {
    type Point = Vector;

    #[inline]
    fn distance(&self, a: &Vector, b: &Vector) -> f64 {
        self.norm.norm(&(*a - *b))
    }
}

/// A uniform grid `lo + i*h` in every coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub dim: usize,
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

impl Grid {
    /// Default discretizer: spacing `1e-2` on `[-1, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Grid { dim, lo: -1.0, hi: 1.0, h: 1e-2 }
    }

    pub fn new(dim: usize, lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidSpace("grid dimension must be 1, 2 or 3"));
        }
        if !(h > 0.0 && hi > lo) {
            return Err(Error::InvalidSpace("grid needs h > 0 and hi > lo"));
        }
        Ok(Grid { dim, lo, hi, h })
    }

    pub fn points_per_axis(&self) -> usize {
        libm::floor((self.hi - self.lo) / self.h + 1e-9) as usize + 1
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.points_per_axis())
            .map(|i| self.lo + i as f64 * self.h)
            .collect()
    }

    pub fn points(&self) -> Vec<Vector> {
        let axis = self.axis();
        lattice(self.dim, &axis)
    }

    /// Distance from `x` to the boundary of the grid box in the given norm
    /// (every norm here dominates the coordinate gap, so the LINF gap is used).
    pub fn depth(&self, x: &Vector) -> f64 {
        x.coords()
            .iter()
            .map(|&c| (c - self.lo).min(self.hi - c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the factor distances combine on `X × Y`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Combiner {
    /// `max{d(x,u), ρ d(y,v)}`
    Max,
    /// `d(x,u) + ρ d(y,v)`
    Sum,
}

/// Combines factor distances into a ρ-metric value.
#[inline]
pub fn rho_dist(d_left: f64, d_right: f64, rho: f64, combiner: Combiner) -> f64 {
    let scaled = rho * d_right;
    match combiner {
        Combiner::Max => d_left.max(scaled),
        Combiner::Sum => d_left + scaled,
    }
}

/// `X × Y` with the ρ-metric selected by `combiner`.
#[derive(Clone, Debug)]
pub struct ProductSpace<MX, MY> {
    pub left: MX,
    pub right: MY,
    pub rho: f64,
    pub combiner: Combiner,
}

impl<MX: Metric, MY: Metric> ProductSpace<MX, MY> {
    pub fn new(left: MX, right: MY, rho: f64, combiner: Combiner) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidRho(rho));
        }
        Ok(ProductSpace { left, right, rho, combiner })
    }
}

impl<MX: Metric, MY: Metric> Metric for ProductSpace<MX, MY> {
    type Point = (MX::Point, MY::Point);

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64 {
        rho_dist(
            self.left.distance(&p.0, &q.0),
            self.right.distance(&p.1, &q.1),
            self.rho,
            self.combiner,
        )
    }
}

impl ProductSpace<EuclideanSpace, EuclideanSpace> {
    /// ρ-distance with a dimension check on both factors.
    pub fn checked_distance(&self, p: &(Vector, Vector), q: &(Vector, Vector)) -> Result<f64> {
        let ok = p.0.dim() == self.left.dim
            && q.0.dim() == self.left.dim
            && p.1.dim() == self.right.dim
            && q.1.dim() == self.right.dim;
        if !ok {
            return Err(Error::MismatchedSpaces);
        }
        Ok(self.distance(p, q))
    }
}

/// Dual of the `max{‖u‖, ρ‖v‖}` norm: `‖x*‖ + ρ⁻¹‖y*‖` with factor dual norms.
pub fn dual_rho_norm(
    xstar: &Vector,
    ystar: &Vector,
    rho: f64,
    left: &EuclideanSpace,
    right: &EuclideanSpace,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidRho(rho));
    }
    Ok(left.dual_norm_of(xstar) + right.dual_norm_of(ystar) / rho)
}

/// Normalized duality mapping `J(y) = {y* : ‖y*‖_* = 1, ⟨y*, y⟩ = ‖y‖}`.
///
/// For `L2` the result is the singleton `y/‖y‖`; for `L1`/`LINF` it is the
/// vertex list of the face of the dual ball where `⟨·, y⟩` is maximal.
pub fn duality_map(y: &Vector, norm: NormKind) -> Result<Vec<Vector>> {
    if y.is_zero() {
        return Err(Error::ZeroVector);
    }
    let dim = y.dim();
    let c = y.coords();
    let out = match norm {
        NormKind::L2 => {
            let n = norm.norm(y);
            alloc::vec![(1.0 / n) * *y]
        }
        NormKind::L1 => {
            // dual ball is the LINF cube; free coordinates are where y vanishes
            let free: Vec<usize> = (0..dim).filter(|&i| c[i] == 0.0).collect();
            let mut verts = Vec::with_capacity(1 << free.len());
            for mask in 0..(1usize << free.len()) {
                let mut v = [0.0; 3];
                for i in 0..dim {
                    v[i] = sign(c[i]);
                }
                for (bit, &i) in free.iter().enumerate() {
                    v[i] = if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
                }
                verts.push(Vector::new(&v[..dim]));
            }
            verts
        }
        NormKind::LInf => {
            let m = norm.norm(y);
            let mut verts = Vec::new();
            for i in 0..dim {
                if (c[i].abs() - m).abs() <= 1e-12 * m {
                    let mut v = [0.0; 3];
                    v[i] = sign(c[i]);
                    verts.push(Vector::new(&v[..dim]));
                }
            }
            verts
        }
    };
    Ok(out)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_dist_examples() {
        assert_eq!(rho_dist(1.0, 2.0, 0.5, Combiner::Max), 1.0);
        assert_eq!(rho_dist(1.0, 2.0, 0.5, Combiner::Sum), 2.0);
        let p = ProductSpace::new(EuclideanSpace::line(), EuclideanSpace::line(), 0.3, Combiner::Sum).unwrap();
        let a = (Vector::scalar(0.2), Vector::scalar(-1.0));
        assert_eq!(p.distance(&a, &a), 0.0);
    }

    #[test]
    fn mismatched_product_points() {
        let p = ProductSpace::new(EuclideanSpace::line(), EuclideanSpace::line(), 0.5, Combiner::Max).unwrap();
        let a = (Vector::scalar(0.0), Vector::scalar(0.0));
        let b = (Vector::new(&[0.0, 1.0]), Vector::scalar(0.0));
        assert_eq!(p.checked_distance(&a, &b), Err(Error::MismatchedSpaces));
        assert!(ProductSpace::new(EuclideanSpace::line(), EuclideanSpace::line(), 0.0, Combiner::Max).is_err());
    }

    #[test]
    fn dual_rho_norm_examples() {
        let l = EuclideanSpace::line();
        let one = Vector::scalar(1.0);
        let zero = Vector::scalar(0.0);
        assert_eq!(dual_rho_norm(&one, &one, 0.5, &l, &l).unwrap(), 3.0);
        assert_eq!(dual_rho_norm(&zero, &zero, 0.5, &l, &l).unwrap(), 0.0);
        assert_eq!(dual_rho_norm(&Vector::scalar(2.0), &zero, 0.1, &l, &l).unwrap(), 2.0);
        assert!(dual_rho_norm(&one, &one, 0.0, &l, &l).is_err());
    }

    #[test]
    fn duality_map_examples() {
        let j = duality_map(&Vector::new(&[3.0, 4.0]), NormKind::L2).unwrap();
        assert_eq!(j.len(), 1);
        assert!((j[0].get(0) - 0.6).abs() < 1e-15 && (j[0].get(1) - 0.8).abs() < 1e-15);

        let j = duality_map(&Vector::new(&[1.0, 1.0]), NormKind::LInf).unwrap();
        assert_eq!(j, [Vector::new(&[1.0, 0.0]), Vector::new(&[0.0, 1.0])]);

        let j = duality_map(&Vector::new(&[2.0, 0.0]), NormKind::L1).unwrap();
        assert_eq!(j, [Vector::new(&[1.0, 1.0]), Vector::new(&[1.0, -1.0])]);

        assert_eq!(duality_map(&Vector::zeros(2), NormKind::L2), Err(Error::ZeroVector));
    }

    #[test]
    fn duality_map_is_odd() {
        for norm in [NormKind::L2, NormKind::L1, NormKind::LInf] {
            for y in [Vector::new(&[1.0, -2.0, 0.0]), Vector::new(&[0.5, 0.5, -0.5]), Vector::scalar(-3.0)] {
                let plus = duality_map(&y, norm).unwrap();
                let minus = duality_map(&(-y), norm).unwrap();
                let negated: Vec<Vector> = plus.iter().map(|v| -*v).collect();
                assert_eq!(minus.len(), negated.len());
                for v in &negated {
                    assert!(minus.contains(v), "{norm:?}: J(-y) != -J(y) for {y:?}");
                }
            }
        }
    }

    #[test]
    fn finite_space_validation() {
        assert!(FiniteMetricSpace::new(alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]]).is_ok());
        let asym = alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![2.0, 0.0]];
        assert!(FiniteMetricSpace::new(asym).is_err());
        let tri = alloc::vec![
            alloc::vec![0.0, 1.0, 5.0],
            alloc::vec![1.0, 0.0, 1.0],
            alloc::vec![5.0, 1.0, 0.0]
        ];
        assert!(FiniteMetricSpace::new(tri).is_err());
        let dup = alloc::vec![alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0]];
        assert!(FiniteMetricSpace::new(dup).is_err());
    }

    #[test]
    fn grid_points() {
        let g = Grid::new(1, -1.0, 1.0, 0.5).unwrap();
        let xs: Vec<f64> = g.points().iter().map(|p| p.get(0)).collect();
        assert_eq!(xs, [-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(Grid::unit(2).points().len(), 201 * 201);
        assert!(EuclideanSpace::new(4, NormKind::L2).is_err());
    }
}
