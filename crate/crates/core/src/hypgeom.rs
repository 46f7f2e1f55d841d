//! Planar hyperbolic geometry in the upper half-plane model.
//!
//! Isometries are elements of PSL(2,R) stored as a canonical SL(2,R)
//! representative: determinant one, and the first entry whose magnitude
//! exceeds [`ENTRY_EPS`] is positive.

use std::fmt;

use crate::error::{Error, Result};

/// Entries below this magnitude are treated as zero when picking the sign.
pub const ENTRY_EPS: f64 = 1e-12;
/// Tolerance on `||trace| - 2|` for parabolic detection.
pub const PARABOLIC_EPS: f64 = 1e-9;
/// Max-entry distance from the identity below which a matrix is the identity.
pub const IDENTITY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq)]
pub struct IsometryMatrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl fmt::Debug for IsometryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl IsometryMatrix {
    pub const IDENTITY: IsometryMatrix = IsometryMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds the isometry with matrix `[[a, b], [c, d]]`, rescaled to
    /// determinant one. Fails when the determinant is not positive.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMatrix { det });
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64) -> Self {
        let s = (a * d - b * c).sqrt().recip();
        Self::signed(a * s, b * s, c * s, d * s)
    }

    // Products of unimodular matrices are only sign-fixed: recomputing the
    // determinant of large entries cancels catastrophically.
    fn signed(a: f64, b: f64, c: f64, d: f64) -> Self {
        let lead = [a, b, c, d]
            .into_iter()
            .find(|v| v.abs() > ENTRY_EPS)
            .unwrap_or(1.0);
        if lead < 0.0 {
            IsometryMatrix {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            IsometryMatrix { a, b, c, d }
        }
    }

    /// Diagonal translation `diag(e^{t/2}, e^{-t/2})` along the imaginary axis.
    pub fn diagonal(t: f64) -> Self {
        let h = (0.5 * t).exp();
        Self::normalized(h, 0.0, 0.0, h.recip())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Trace of the canonical representative. Its sign carries no meaning.
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn abs_trace(&self) -> f64 {
        self.trace().abs()
    }

    pub fn compose(&self, other: &IsometryMatrix) -> IsometryMatrix {
        let (m, n) = (self, other);
        Self::signed(
            m.a * n.a + m.b * n.c,
            m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d,
        )
    }

    pub fn inverse(&self) -> IsometryMatrix {
        Self::signed(self.d, -self.b, -self.c, self.a)
    }

    /// `self * other * self^-1`.
    pub fn conjugate(&self, other: &IsometryMatrix) -> IsometryMatrix {
        self.compose(other).compose(&self.inverse())
    }

    /// Largest entrywise difference between canonical representatives.
    /// Entrywise distance in PSL(2,R), minimised over the sign of the lift.
    pub fn max_abs_diff(&self, other: &IsometryMatrix) -> f64 {
        let (u, v) = (self.entries(), other.entries());
        let plus = u
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let minus = u
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x + y).abs())
            .fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &IsometryMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Self::IDENTITY, IDENTITY_EPS)
    }

    pub fn classify(&self) -> IsometryClass {
        if self.is_identity() {
            return IsometryClass {
                kind: IsometryKind::Identity,
                translation_length: 0.0,
            };
        }
        let t = self.abs_trace();
        if (t - 2.0).abs() <= PARABOLIC_EPS {
            IsometryClass {
                kind: IsometryKind::Parabolic,
                translation_length: 0.0,
            }
        } else if t < 2.0 {
            IsometryClass {
                kind: IsometryKind::Elliptic,
                translation_length: 0.0,
            }
        } else {
            IsometryClass {
                kind: IsometryKind::Hyperbolic,
                translation_length: trace_to_length(t),
            }
        }
    }

    /// Möbius action `z -> (a z + b) / (c z + d)`.
    pub fn apply(&self, p: HPoint) -> HPoint {
        let (x, y) = (p.x, p.y);
        let den_re = self.c * x + self.d;
        let den_im = self.c * y;
        let den2 = den_re * den_re + den_im * den_im;
        let num_re = self.a * x + self.b;
        let re = (num_re * den_re + self.a * self.c * y * y) / den2;
        // imaginary part is y * det / |cz + d|^2 and det = 1
        let im = y / den2;
        HPoint { x: re, y: im }
    }

    /// The hyperbolic isometry sharing the axis of `self` with translation
    /// length `|t|`, moving in the same direction as `self` when `t > 0`.
    pub fn axis_translation(&self, t: f64) -> Result<IsometryMatrix> {
        let class = self.classify();
        if class.kind != IsometryKind::Hyperbolic {
            return Err(Error::NotHyperbolic);
        }
        if t == 0.0 {
            return Ok(Self::IDENTITY);
        }
        // On the positive-trace lift m = P diag(e^{l/2}, e^{-l/2}) P^-1 the
        // target is alpha * m + beta * I with the coefficients below.
        let len = class.translation_length;
        let sign = self.trace().signum();
        let sh = (0.5 * len).sinh();
        let alpha = (0.5 * t).sinh() / sh;
        let beta = (0.5 * (len - t)).sinh() / sh;
        let (a, b, c, d) = (sign * self.a, sign * self.b, sign * self.c, sign * self.d);
        Ok(Self::normalized(
            alpha * a + beta,
            alpha * b,
            alpha * c,
            alpha * d + beta,
        ))
    }
}

/// `2 arccosh(|trace| / 2)`, clamped to zero for `|trace| <= 2`.
pub fn trace_to_length(abs_trace: f64) -> f64 {
    if abs_trace <= 2.0 {
        0.0
    } else {
        2.0 * (0.5 * abs_trace).acosh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub translation_length: f64,
}

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidPoint { x, y });
        }
        Ok(HPoint { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn distance(&self, other: &HPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let q = (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        // arccosh(1 + q) written to keep precision for small q
        (q + (q * (q + 2.0)).sqrt()).ln_1p()
    }
}

pub fn hyp_distance(p: &HPoint, q: &HPoint) -> f64 {
    p.distance(q)
}

const TRIANGLE_EPS: f64 = 1e-12;

/// Which piece of the ideal triangle `0, 1, inf` a point lies in, relative
/// to the three pairwise tangent horocycles centred at the vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleRegion {
    Central,
    CornerZero,
    CornerOne,
    CornerInfinity,
}

pub fn in_ideal_triangle(p: &HPoint) -> bool {
    let (x, y) = (p.x, p.y);
    x >= -TRIANGLE_EPS
        && x <= 1.0 + TRIANGLE_EPS
        && (x - 0.5).powi(2) + y * y >= 0.25 - TRIANGLE_EPS
}

pub fn triangle_region(p: &HPoint) -> Result<TriangleRegion> {
    if !in_ideal_triangle(p) {
        return Err(Error::OutsideTriangle { x: p.x, y: p.y });
    }
    let (x, y) = (p.x, p.y);
    // horoballs: y >= 1 at inf, discs of radius 1/2 tangent to R at 0 and 1
    Ok(if y > 1.0 {
        TriangleRegion::CornerInfinity
    } else if x * x + (y - 0.5).powi(2) < 0.25 {
        TriangleRegion::CornerZero
    } else if (x - 1.0).powi(2) + (y - 0.5).powi(2) < 0.25 {
        TriangleRegion::CornerOne
    } else {
        TriangleRegion::Central
    })
}

/// Order-three symmetry of the triangle, `z -> 1/(1 - z)`: inf -> 0 -> 1 -> inf.
fn rotation() -> IsometryMatrix {
    IsometryMatrix {
        a: 0.0,
        b: 1.0,
        c: -1.0,
        d: 1.0,
    }
}

fn stretch_infinity_corner(p: HPoint, k: f64) -> HPoint {
    // horocycle y = e^s sits at distance s from the central region; x keeps
    // the proportional position along the horocyclic arc
    HPoint {
        x: p.x,
        y: p.y.powf(k),
    }
}

/// The K-Lipschitz self-map of the ideal triangle `0, 1, inf`.
///
/// The central region cut off by the pairwise tangent horocycles is fixed.
/// In each corner the horocycle at distance `s` from the central region is
/// sent to the horocycle at distance `K s`, linearly in horocyclic arc length.
/// Each side is mapped to itself with arc length (measured from the tangency
/// point) multiplied by `K`.
pub fn stretch_triangle_map(p: HPoint, k: f64) -> Result<HPoint> {
    let region = triangle_region(&p)?;
    if k == 1.0 {
        return Ok(p);
    }
    let sigma = rotation();
    Ok(match region {
        TriangleRegion::Central => p,
        TriangleRegion::CornerInfinity => stretch_infinity_corner(p, k),
        TriangleRegion::CornerZero => {
            let q = sigma.inverse().apply(p);
            sigma.apply(stretch_infinity_corner(q, k))
        }
        TriangleRegion::CornerOne => {
            let q = sigma.apply(p);
            sigma.inverse().apply(stretch_infinity_corner(q, k))
        }
    })
}
