//! 2-D points, point-sets, and the six-parameter affine transform.

use crate::error::{Error, Result};

/// A 2-D point with double-precision coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// The six parameters of a 2-D affine transform.
///
/// A point (x, y) maps to
///
/// ```text
/// x' = t0*x + t1*y + t2
/// y' = t3*x + t4*y + t5
/// ```
///
/// so `theta[2]` and `theta[5]` carry the translation and the remaining
/// four entries aggregate rotation, scaling, stretching, and shearing.
/// This is also the chromosome layout used by the genetic algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineParams {
    pub theta: [f64; 6],
}

impl AffineParams {
    pub const IDENTITY: AffineParams = AffineParams {
        theta: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    };

    pub fn new(theta: [f64; 6]) -> Self {
        AffineParams { theta }
    }

    /// Build a transform from elementary parts: uniform scale, rotation
    /// (radians, counter-clockwise), and translation.
    ///
    /// Rejects `scale <= 0`; reflections and degenerate maps are not
    /// expressible through this constructor (they remain reachable as raw
    /// parameter vectors).
    pub fn from_elementary(scale: f64, rotation: f64, tx: f64, ty: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::NonPositiveScale(scale));
        }
        let (sin, cos) = rotation.sin_cos();
        Ok(AffineParams {
            theta: [scale * cos, -scale * sin, tx, scale * sin, scale * cos, ty],
        })
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|t| t.is_finite())
    }

    /// Apply the transform to a single point.
    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        let t = &self.theta;
        Point2 {
            x: t[0] * p.x + t[1] * p.y + t[2],
            y: t[3] * p.x + t[4] * p.y + t[5],
        }
    }

    /// Apply the transform to every point of a set, preserving order.
    pub fn warp(&self, d: &PointSet) -> PointSet {
        PointSet {
            points: d.points.iter().map(|&p| self.apply(p)).collect(),
        }
    }

    /// Composition: `a.compose(&b)` applies `b` first, then `a`.
    pub fn compose(&self, other: &AffineParams) -> AffineParams {
        let a = &self.theta;
        let b = &other.theta;
        AffineParams {
            theta: [
                a[0] * b[0] + a[1] * b[3],
                a[0] * b[1] + a[1] * b[4],
                a[0] * b[2] + a[1] * b[5] + a[2],
                a[3] * b[0] + a[4] * b[3],
                a[3] * b[1] + a[4] * b[4],
                a[3] * b[2] + a[4] * b[5] + a[5],
            ],
        }
    }

    /// Inverse transform, or `None` when the linear part is singular.
    pub fn inverse(&self) -> Option<AffineParams> {
        let t = &self.theta;
        let det = t[0] * t[4] - t[1] * t[3];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let i0 = t[4] / det;
        let i1 = -t[1] / det;
        let i3 = -t[3] / det;
        let i4 = t[0] / det;
        Some(AffineParams {
            theta: [
                i0,
                i1,
                -(i0 * t[2] + i1 * t[5]),
                i3,
                i4,
                -(i3 * t[2] + i4 * t[5]),
            ],
        })
    }
}

/// An ordered, non-empty sequence of finite 2-D points.
///
/// Indices are stable identities: point `i` of a warped set corresponds to
/// point `i` of the input set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point2>,
}

impl PointSet {
    /// Validates that the set is non-empty and every coordinate is finite.
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinitePoint { index });
        }
        Ok(PointSet { points })
    }

    #[allow(clippy::len_without_is_empty)] // the set is never empty
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point2> {
        self.points.iter()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point2::new(sx / n, sy / n)
    }

    /// Axis-aligned bounding box as (min corner, max corner).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut min = self.points[0];
        let mut max = self.points[0];
        for p in &self.points[1..] {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (min, max) = self.bounding_box();
        min.distance(&max)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point2;
    type IntoIter = std::slice::Iter<'a, Point2>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Root-mean-square distance between two sets under index correspondence
/// (point `i` of `a` against point `i` of `b`).
///
/// Returns `None` when the cardinalities differ.
pub fn rmse_by_index(a: &PointSet, b: &PointSet) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let sum: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(p, q)| {
            let dx = p.x - q.x;
            let dy = p.y - q.y;
            dx * dx + dy * dy
        })
        .sum();
    Some((sum / a.len() as f64).sqrt())
}
