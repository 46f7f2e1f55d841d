//! Planar convex hulls with exact orientation tests.
//!
//! Coordinates are `f64`, converted exactly to rationals for the
//! orientation predicate, so the combinatorics of the hull carries no
//! rounding error. Distances used for tolerances are computed in `f64`.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Sign of the cross product `(b - a) x (c - a)`, computed exactly.
///
/// A floating-point evaluation decides whenever it clears its rounding
/// error bound; only the remaining cases go to rational arithmetic.
pub fn orientation(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Ordering {
    let l = (a[0] - c[0]) * (b[1] - c[1]);
    let r = (a[1] - c[1]) * (b[0] - c[0]);
    let det = l - r;
    let bound = ORIENT_ERR * (l.abs() + r.abs());
    if det > bound {
        return Ordering::Greater;
    }
    if -det > bound {
        return Ordering::Less;
    }
    exact_orientation(a, b, c)
}

// Shewchuk's first-stage bound (3 + 16u)u with u = EPSILON / 2, rounded up
const ORIENT_ERR: f64 = (3.0 + 16.0 * f64::EPSILON) * f64::EPSILON / 2.0;

fn exact_orientation(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Ordering {
    let q = |v: f64| BigRational::from_float(v).expect("finite coordinate");
    let (ax, ay) = (q(a[0]), q(a[1]));
    let cross = (q(b[0]) - &ax) * (q(c[1]) - &ay) - (q(b[1]) - &ay) * (q(c[0]) - &ax);
    if cross.is_zero() {
        Ordering::Equal
    } else if cross.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Indices of the strict hull vertices in counterclockwise order, starting
/// from the lowest-leftmost point. Points on hull edges are not vertices.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i]
            .partial_cmp(&points[j])
            .expect("finite coordinates")
    });
    idx.dedup_by(|i, j| points[*i] == points[*j]);
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let order: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in order {
            while hull.len() >= start + 2
                && orientation(
                    points[hull[hull.len() - 2]],
                    points[hull[hull.len() - 1]],
                    points[i],
                ) != Ordering::Greater
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Signed distance from `p` to the hull boundary: positive inside, negative
/// outside. `hull` is counterclockwise with at least three vertices.
pub fn signed_depth(points: &[[f64; 2]], hull: &[usize], p: [f64; 2]) -> f64 {
    let n = hull.len();
    let mut inside = true;
    let mut depth = f64::INFINITY;
    let mut outside = f64::INFINITY;
    for k in 0..n {
        let a = points[hull[k]];
        let b = points[hull[(k + 1) % n]];
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len = ex.hypot(ey);
        let d = (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len;
        depth = depth.min(d);
        if orientation(a, b, p) != Ordering::Greater {
            inside = false;
        }
        outside = outside.min(segment_distance(a, b, p));
    }
    if inside {
        depth
    } else {
        -outside
    }
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let l2 = ex * ex + ey * ey;
    let t = if l2 > 0.0 {
        (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * ex).hypot(p[1] - a[1] - t * ey)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullReport {
    /// Hull vertices, counterclockwise.
    pub vertices: Vec<usize>,
    /// Distance from the origin to the hull boundary, negative when outside.
    pub origin_depth: f64,
    /// For each point, its distance outside the hull of the other points
    /// (negative when it lies inside that hull).
    pub vertex_margins: Vec<f64>,
}

impl HullReport {
    pub fn new(points: &[[f64; 2]]) -> Self {
        let vertices = convex_hull(points);
        let origin_depth = if vertices.len() >= 3 {
            signed_depth(points, &vertices, [0.0, 0.0])
        } else {
            f64::NEG_INFINITY
        };
        let vertex_margins = (0..points.len())
            .map(|i| {
                let others: Vec<[f64; 2]> = points
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, p)| *p)
                    .collect();
                let h = convex_hull(&others);
                if h.len() < 3 {
                    return f64::INFINITY;
                }
                -signed_depth(&others, &h, points[i])
            })
            .collect();
        HullReport {
            vertices,
            origin_depth,
            vertex_margins,
        }
    }

    pub fn origin_interior(&self, tol: f64) -> bool {
        self.origin_depth > tol
    }

    /// No point lies inside the hull of the others by more than `tol`;
    /// points within `tol` of that hull's boundary count as vertices.
    pub fn all_vertices(&self, tol: f64) -> bool {
        self.vertex_margins.iter().all(|&m| m >= -tol)
    }

    /// Points sticking out of the hull of the others by more than `tol`.
    pub fn resolved_vertices(&self, tol: f64) -> usize {
        self.vertex_margins.iter().filter(|&&m| m > tol).count()
    }

    pub fn min_vertex_margin(&self) -> f64 {
        self.vertex_margins
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}
