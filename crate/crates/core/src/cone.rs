//! Closed convex cones in `R × R`, given by generators.
//!
//! These describe Fréchet normal cones to graphs of mappings between lines.
//! A cone is stored both as its generators and as the inward half-planes
//! `{z : n·z ≤ 0}` whose intersection it is.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ext::ExtReal;

const EPS: f64 = 1e-12;
/// Half-width of the bounding box used when clipping unbounded regions.
const BOX: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cone2 {
    generators: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
}

/// A closed interval of reals, possibly unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        self.lo - EPS <= t && t <= self.hi + EPS
    }

    /// Smallest absolute value of a member.
    pub fn min_abs(&self) -> f64 {
        if self.lo <= 0.0 && 0.0 <= self.hi {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn scaled(&self, t: f64) -> Interval {
        if t >= 0.0 {
            Interval { lo: t * self.lo, hi: t * self.hi }
        } else {
            Interval { lo: t * self.hi, hi: t * self.lo }
        }
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = libm::hypot(v[0], v[1]);
    [v[0] / n, v[1] / n]
}

impl Cone2 {
    /// The cone `{Σ tᵢ gᵢ : tᵢ ≥ 0}`; zero generators are dropped.
    pub fn generated(generators: &[[f64; 2]]) -> Result<Self> {
        if generators.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Precondition("cone generators must be finite".into()));
        }
        let gens: Vec<[f64; 2]> = generators
            .iter()
            .filter(|g| libm::hypot(g[0], g[1]) > EPS)
            .map(|&g| unit(g))
            .collect();
        let normals = if gens.is_empty() {
            alloc::vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        } else {
            let mut candidates = Vec::with_capacity(3 * gens.len());
            for g in &gens {
                candidates.push([-g[1], g[0]]);
                candidates.push([g[1], -g[0]]);
                candidates.push([-g[0], -g[1]]);
            }
            let mut normals: Vec<[f64; 2]> = Vec::new();
            for n in candidates {
                let valid = gens.iter().all(|g| dot(n, *g) <= 1e-9);
                let duplicate = normals.iter().any(|m| (m[0] - n[0]).abs() < 1e-12 && (m[1] - n[1]).abs() < 1e-12);
                if valid && !duplicate {
                    normals.push(n);
                }
            }
            normals
        };
        Ok(Cone2 { generators: gens, normals })
    }

    pub fn zero() -> Self {
        Cone2::generated(&[]).expect("empty generator list")
    }

    pub fn ray(d: [f64; 2]) -> Result<Self> {
        Cone2::generated(&[d])
    }

    /// The line spanned by `d`.
    pub fn line(d: [f64; 2]) -> Result<Self> {
        Cone2::generated(&[d, [-d[0], -d[1]]])
    }

    pub fn generators(&self) -> &[[f64; 2]] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, z: [f64; 2]) -> bool {
        let scale = 1.0 + libm::hypot(z[0], z[1]);
        self.normals.iter().all(|n| dot(*n, z) <= 1e-9 * scale)
    }

    /// `{a : (a, b) ∈ K}`, or `None` when empty.
    pub fn fiber(&self, b: f64) -> Option<Interval> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for n in &self.normals {
            // n₀ a + n₁ b ≤ 0
            let rhs = -n[1] * b;
            if n[0] > EPS {
                hi = hi.min(rhs / n[0]);
            } else if n[0] < -EPS {
                lo = lo.max(rhs / n[0]);
            } else if rhs < -1e-9 * (1.0 + b.abs()) {
                return None;
            }
        }
        (lo <= hi + 1e-12 * (1.0 + hi.abs())).then(|| Interval { lo, hi: hi.max(lo) })
    }

    /// `inf |a|` over `(a, b) ∈ K` with `b_lo ≤ b ≤ b_hi`, by clipping the
    /// cone to the strip and enumerating the vertices of the polygon.
    pub fn min_abs_first_in_strip(&self, b_lo: f64, b_hi: f64) -> ExtReal {
        if !(b_lo <= b_hi) {
            return ExtReal::INFINITY;
        }
        let mut poly: Vec<[f64; 2]> = alloc::vec![[-BOX, -BOX], [BOX, -BOX], [BOX, BOX], [-BOX, BOX]];
        let mut planes: Vec<([f64; 2], f64)> = self.normals.iter().map(|n| (*n, 0.0)).collect();
        planes.push(([0.0, -1.0], -b_lo));
        planes.push(([0.0, 1.0], b_hi));
        for (n, c) in planes {
            poly = clip(&poly, n, c);
            if poly.is_empty() {
                return ExtReal::INFINITY;
            }
        }
        let lo = poly.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = poly.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let v = if lo <= 0.0 && 0.0 <= hi { 0.0 } else { lo.abs().min(hi.abs()) };
        ExtReal::finite(v)
    }

    /// `inf |a| + w |b + s|` over `(a, b) ∈ K`.
    ///
    /// The objective is linear on each quadrant around `(0, −s)`, so the
    /// minimum is taken over the vertices of the clipped pieces.
    pub fn min_weighted(&self, w: f64, s: f64) -> ExtReal {
        let mut cone: Vec<[f64; 2]> = alloc::vec![[-BOX, -BOX], [BOX, -BOX], [BOX, BOX], [-BOX, BOX]];
        for n in &self.normals {
            cone = clip(&cone, *n, 0.0);
        }
        let mut best = f64::INFINITY;
        for sa in [1.0, -1.0] {
            for sb in [1.0, -1.0] {
                let piece = clip(&clip(&cone, [-sa, 0.0], 0.0), [0.0, -sb], sb * s);
                for v in piece {
                    best = best.min(sa * v[0] + w * sb * (v[1] + s));
                }
            }
        }
        ExtReal::from(best.max(0.0))
    }
}

/// One Sutherland–Hodgman step: keep the part of `poly` with `n·z ≤ c`.
fn clip(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> Vec<[f64; 2]> {
    let tol = 1e-9 * (1.0 + c.abs());
    let inside = |z: [f64; 2]| dot(n, z) - c <= tol;
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let (sp, sq) = (dot(n, p) - c, dot(n, q) - c);
        if inside(p) {
            out.push(p);
        }
        if (sp > tol && sq < -tol) || (sp < -tol && sq > tol) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_line_fibers() {
        let k = Cone2::line([1.0, -1.0]).unwrap();
        assert_eq!(k.fiber(-2.0), Some(Interval { lo: 2.0, hi: 2.0 }));
        assert!(k.contains([3.0, -3.0]) && !k.contains([1.0, 1.0]));
        assert!((k.min_abs_first_in_strip(-1.5, -0.5).value() - 0.5).abs() < 1e-12);
        assert_eq!(k.min_abs_first_in_strip(-0.5, 0.5), ExtReal::ZERO);
    }

    #[test]
    fn ray_fibers_are_one_sided() {
        let k = Cone2::ray([1.0, -1.0]).unwrap();
        assert_eq!(k.fiber(-1.0), Some(Interval { lo: 1.0, hi: 1.0 }));
        assert_eq!(k.fiber(1.0), None);
        assert_eq!(k.fiber(0.0), Some(Interval { lo: 0.0, hi: 0.0 }));
        assert_eq!(k.min_abs_first_in_strip(0.5, 1.0), ExtReal::INFINITY);
    }

    #[test]
    fn zero_and_halfplane() {
        let z = Cone2::zero();
        assert_eq!(z.fiber(0.0), Some(Interval { lo: 0.0, hi: 0.0 }));
        assert_eq!(z.fiber(0.1), None);
        assert_eq!(z.min_abs_first_in_strip(-1.2, -0.8), ExtReal::INFINITY);

        let h = Cone2::generated(&[[0.0, 1.0], [0.0, -1.0], [1.0, 0.0]]).unwrap();
        let f = h.fiber(5.0).unwrap();
        assert_eq!(f.lo, 0.0);
        assert!(f.hi.is_infinite());
        assert_eq!(h.min_abs_first_in_strip(3.0, 4.0), ExtReal::ZERO);
    }

    #[test]
    fn weighted_minimum() {
        // (a, b) = t(1, −1): |t| + 2|1 − t| is minimal at t = 1
        let k = Cone2::line([1.0, -1.0]).unwrap();
        assert!((k.min_weighted(2.0, 1.0).value() - 1.0).abs() < 1e-9);
        // with weight 1/2 the origin is better: 0 + 0.5·1
        assert!((k.min_weighted(0.5, 1.0).value() - 0.5).abs() < 1e-9);
        assert!((Cone2::zero().min_weighted(3.0, -1.0).value() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn fibers_are_positively_homogeneous() {
        let k = Cone2::line([2.0, -1.0]).unwrap();
        let f1 = k.fiber(-1.0).unwrap();
        let f3 = k.fiber(-3.0).unwrap();
        assert!((f1.scaled(3.0).lo - f3.lo).abs() < 1e-12);
    }
}
