//! Hyperbolic structures in shear coordinates.
//!
//! Holonomy convention (checked by tests: puncture loops are parabolic
//! exactly when the shear sums around punctures vanish, and zero shears on
//! the torus give the trace triple (3, 3, 3)):
//!
//! * crossing an edge with shear `x`: `[[0, e^{x/2}], [-e^{-x/2}, 0]]`
//! * turning to the next side counterclockwise: `R = [[1, 1], [-1, 0]]`
//! * turning the other way: `L = R^2 = [[0, 1], [-1, -1]]`
//!
//! Factors are multiplied left to right in the order the path visits them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hypgeom::{IsometryKind, IsometryMatrix};
use crate::surface::{
    puncture_loops, slope_word, torus_word_loop, CombinatorialLoop, FreeWord, IdealTriangulation,
    Letter, Slope, Turn,
};

/// Completeness tolerance on `||trace| - 2|` of each puncture loop.
pub const COMPLETENESS_EPS: f64 = 1e-9;

pub fn edge_matrix(shear: f64) -> IsometryMatrix {
    let h = (0.5 * shear).exp();
    IsometryMatrix::new(0.0, h, -h.recip(), 0.0).expect("edge matrix has det 1")
}

pub fn turn_matrix(turn: Turn) -> IsometryMatrix {
    rotation_matrix(turn.offset())
}

/// `R^k`, the change of frame from side `i` to side `i + k` of a triangle.
fn rotation_matrix(k: usize) -> IsometryMatrix {
    match k % 3 {
        0 => IsometryMatrix::IDENTITY,
        1 => IsometryMatrix::new(1.0, 1.0, -1.0, 0.0).expect("det 1"),
        _ => IsometryMatrix::new(0.0, 1.0, -1.0, -1.0).expect("det 1"),
    }
}

/// A closed curve class, in whichever combinatorial form it was given.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Curve {
    Slope(Slope),
    Word(FreeWord),
    Loop(CombinatorialLoop),
}

impl Curve {
    fn rank(&self) -> u8 {
        match self {
            Curve::Slope(_) => 0,
            Curve::Word(_) => 1,
            Curve::Loop(_) => 2,
        }
    }
}

impl Ord for Curve {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Curve::Slope(a), Curve::Slope(b)) => a.cmp(b),
            (Curve::Word(a), Curve::Word(b)) => a.cmp(b),
            (Curve::Loop(a), Curve::Loop(b)) => (a.len(), a).cmp(&(b.len(), b)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Curve {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Curve::Slope(s) => write!(f, "slope:{s}"),
            Curve::Word(w) => write!(f, "word:{w}"),
            Curve::Loop(l) => write!(f, "loop:{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearStructure {
    triangulation: Arc<IdealTriangulation>,
    shears: Vec<f64>,
}

impl ShearStructure {
    /// Validates finiteness and completeness.
    pub fn new(triangulation: Arc<IdealTriangulation>, shears: Vec<f64>) -> Result<Self> {
        if shears.len() != triangulation.edge_count() {
            return Err(Error::EdgeCountMismatch {
                expected: triangulation.edge_count(),
                got: shears.len(),
            });
        }
        if let Some(edge) = shears.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteShear { edge });
        }
        let s = ShearStructure {
            triangulation,
            shears,
        };
        for (puncture, residual) in s.completeness_residuals().into_iter().enumerate() {
            if residual.abs() > COMPLETENESS_EPS {
                return Err(Error::Incomplete { puncture, residual });
            }
        }
        Ok(s)
    }

    pub fn torus(shears: [f64; 3]) -> Result<Self> {
        Self::new(
            Arc::new(IdealTriangulation::standard_torus()),
            shears.to_vec(),
        )
    }

    /// The structure with shears `sum_i coords[i] * basis[i]`.
    pub fn from_hyperplane_coords(
        triangulation: Arc<IdealTriangulation>,
        coords: &[f64],
    ) -> Result<Self> {
        let basis = completeness_basis(&triangulation);
        let mut shears = vec![0.0; triangulation.edge_count()];
        for (c, u) in coords.iter().zip(&basis) {
            for (s, ui) in shears.iter_mut().zip(u) {
                *s += c * ui;
            }
        }
        Self::new(triangulation, shears)
    }

    pub fn triangulation(&self) -> &IdealTriangulation {
        &self.triangulation
    }

    pub fn shared_triangulation(&self) -> &Arc<IdealTriangulation> {
        &self.triangulation
    }

    pub fn shears(&self) -> &[f64] {
        &self.shears
    }

    pub fn same_triangulation(&self, other: &ShearStructure) -> bool {
        Arc::ptr_eq(&self.triangulation, &other.triangulation)
            || *self.triangulation == *other.triangulation
    }

    /// `|trace| - 2` of each puncture holonomy.
    pub fn completeness_residuals(&self) -> Vec<f64> {
        puncture_loops(&self.triangulation)
            .iter()
            .map(|lp| self.loop_product(lp).abs_trace() - 2.0)
            .collect()
    }

    /// Signed shear sum around each puncture.
    pub fn puncture_shear_sums(&self) -> Vec<f64> {
        self.triangulation
            .puncture_incidence()
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.shears)
                    .map(|(&k, x)| k as f64 * x)
                    .sum()
            })
            .collect()
    }

    fn loop_product(&self, lp: &CombinatorialLoop) -> IsometryMatrix {
        lp.steps()
            .iter()
            .fold(IsometryMatrix::IDENTITY, |acc, step| {
                acc.compose(&edge_matrix(self.shears[step.edge]))
                    .compose(&turn_matrix(step.turn))
            })
    }

    pub fn holonomy_of_loop(&self, lp: &CombinatorialLoop) -> Result<IsometryMatrix> {
        if self.triangulation.trace_loop(lp).is_none() {
            return Err(Error::IncompatibleLoop);
        }
        Ok(self.loop_product(lp))
    }

    /// Holonomy of a path that starts on side 0 of triangle 0, leaves through
    /// the given sides in turn, and is closed up on side 0 of triangle 0.
    pub fn based_holonomy(&self, exits: &[usize]) -> Result<IsometryMatrix> {
        let tri = &self.triangulation;
        let mut at = crate::surface::Side {
            triangle: 0,
            side: 0,
        };
        let mut m = IsometryMatrix::IDENTITY;
        for &side in exits {
            if side > 2 {
                return Err(Error::IncompatibleLoop);
            }
            m = m.compose(&rotation_matrix(side + 3 - at.side));
            let exit = crate::surface::Side {
                triangle: at.triangle,
                side,
            };
            m = m.compose(&edge_matrix(self.shears[tri.edge_at(exit)]));
            at = tri.partner(exit);
        }
        if at.triangle != 0 {
            return Err(Error::IncompatibleLoop);
        }
        Ok(m.compose(&rotation_matrix(3 - at.side)))
    }

    pub fn curve_length(&self, c: &Curve) -> Result<f64> {
        match c {
            Curve::Loop(lp) => holonomy_length(&self.holonomy_of_loop(lp)?),
            Curve::Slope(s) => self.curve_length(&Curve::Word(slope_word(s))),
            Curve::Word(w) => {
                let rep = shear_to_holonomy_rep(self)?;
                holonomy_length(&rep.evaluate(w))
            }
        }
    }

    /// Length of a word routed through the dual spine instead of the
    /// generator matrices.
    pub fn routed_word_length(&self, w: &FreeWord) -> Result<f64> {
        match torus_word_loop(&self.triangulation, w)? {
            None => Ok(0.0),
            Some(lp) => holonomy_length(&self.holonomy_of_loop(&lp)?),
        }
    }
}

/// Translation length, with elliptic holonomy reported as an error.
pub fn holonomy_length(m: &IsometryMatrix) -> Result<f64> {
    let class = m.classify();
    match class.kind {
        IsometryKind::Elliptic => Err(Error::EllipticHolonomy {
            trace: m.abs_trace(),
        }),
        _ => Ok(class.translation_length),
    }
}

/// Stretch: every shear multiplied by `e^t`.
pub fn stretch(s: &ShearStructure, t: f64) -> ShearStructure {
    let k = t.exp();
    ShearStructure {
        triangulation: s.triangulation.clone(),
        shears: s.shears.iter().map(|x| x * k).collect(),
    }
}

/// Orthonormal basis of the completeness hyperplane (vanishing shear sum at
/// every puncture), obtained by Gram-Schmidt on the coordinate vectors.
pub fn completeness_basis(tri: &IdealTriangulation) -> Vec<Vec<f64>> {
    let e = tri.edge_count();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for r in tri.puncture_incidence() {
        let mut v: Vec<f64> = r.iter().map(|&k| k as f64).collect();
        orthogonalize(&mut v, &rows);
        if normalize(&mut v) {
            rows.push(v);
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..e {
        let mut v = vec![0.0; e];
        v[i] = 1.0;
        orthogonalize(&mut v, &rows);
        orthogonalize(&mut v, &basis);
        if normalize(&mut v) {
            basis.push(v);
        }
    }
    basis
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        for (x, y) in v.iter_mut().zip(u) {
            *x -= d * y;
        }
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n < 1e-9 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Holonomy images of the two generators of the free fundamental group of
/// the once-punctured torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyRep {
    pub a: IsometryMatrix,
    pub b: IsometryMatrix,
}

impl HolonomyRep {
    pub fn new(a: IsometryMatrix, b: IsometryMatrix) -> Self {
        HolonomyRep { a, b }
    }

    pub fn evaluate(&self, w: &FreeWord) -> IsometryMatrix {
        let (ai, bi) = (self.a.inverse(), self.b.inverse());
        w.letters()
            .iter()
            .fold(IsometryMatrix::IDENTITY, |acc, &l| {
                let m = match l {
                    Letter::A => &self.a,
                    Letter::B => &self.b,
                    Letter::AInv => &ai,
                    Letter::BInv => &bi,
                };
                acc.compose(m)
            })
    }

    /// Translation length of the word; zero when the holonomy is not hyperbolic.
    pub fn word_length(&self, w: &FreeWord) -> f64 {
        self.evaluate(w).classify().translation_length
    }

    /// Trace of `A B A^-1 B^-1`, independent of the lifts to SL(2,R).
    pub fn commutator_trace(&self) -> f64 {
        let [a1, a2, a3, a4] = self.a.entries();
        let [b1, b2, b3, b4] = self.b.entries();
        let mul = |x: [f64; 4], y: [f64; 4]| {
            [
                x[0] * y[0] + x[1] * y[2],
                x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2],
                x[2] * y[1] + x[3] * y[3],
            ]
        };
        let a = [a1, a2, a3, a4];
        let b = [b1, b2, b3, b4];
        let ai = [a4, -a2, -a3, a1];
        let bi = [b4, -b2, -b3, b1];
        let c = mul(mul(mul(a, b), ai), bi);
        c[0] + c[3]
    }

    /// `(|tr A|, |tr B|, |tr AB|)`.
    pub fn trace_triple(&self) -> (f64, f64, f64) {
        (
            self.a.abs_trace(),
            self.b.abs_trace(),
            self.a.compose(&self.b).abs_trace(),
        )
    }

    /// `x^2 + y^2 + z^2 - x y z` on the absolute trace triple.
    pub fn markov_residual(&self) -> f64 {
        let (x, y, z) = self.trace_triple();
        x * x + y * y + z * z - x * y * z
    }
}

/// `A` and `B` are the holonomies of slopes `1/0` and `0/1`, both based on
/// side 0 of triangle 0, oriented so that `AB` is slope `1/1`.
pub fn shear_to_holonomy_rep(s: &ShearStructure) -> Result<HolonomyRep> {
    if !s.triangulation.is_standard_torus() {
        return Err(Error::NotStandardTorus);
    }
    let w = |l: Letter| {
        s.based_holonomy(&crate::surface::torus_word_exits(&FreeWord::from_letters(
            [l],
        )))
    };
    Ok(HolonomyRep {
        a: w(Letter::A)?,
        b: w(Letter::B)?,
    })
}

/// Shears of the complete torus structure with the given holonomy.
///
/// A complete punctured-torus structure is determined by its trace triple
/// `(x, y, z)` for slopes `1/0`, `0/1`, `1/1`, and the shears are
/// `(2 ln(y/z), 2 ln(z/x), 2 ln(x/y))`.
pub fn torus_shears_from_rep(h: &HolonomyRep) -> [f64; 3] {
    let (x, y, z) = h.trace_triple();
    [2.0 * (y / z).ln(), 2.0 * (z / x).ln(), 2.0 * (x / y).ln()]
}

/// The Markov equation `x^2 + y^2 + z^2 = x y z`, read as a quadratic in
/// `z`, has roots summing to `x y` with product `x^2 + y^2`; the smaller
/// root is taken from the product so that it never comes from cancellation.
fn other_root(x: f64, y: f64, z: f64) -> f64 {
    let sum = x * y;
    if 2.0 * z >= sum {
        (x * x + y * y) / z
    } else {
        sum - z
    }
}

type Vector = (i64, i64);

fn det(u: Vector, v: Vector) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

fn same_class(u: Vector, v: Vector) -> bool {
    u == v || u == (-v.0, -v.1)
}

/// Three pairwise Farey-adjacent slopes, as homology vectors with
/// `v[2] = v[0] + v[1]`, and their absolute traces.
#[derive(Debug, Clone, Copy)]
struct TraceTriangle {
    v: [Vector; 3],
    tr: [f64; 3],
}

impl TraceTriangle {
    /// The neighbouring triangle that is one step closer to `s`, or `None`
    /// when `s` is already a vertex.
    fn toward(&self, s: Vector) -> Option<TraceTriangle> {
        let [a, b, c] = self.v;
        if self.v.iter().any(|&v| same_class(v, s)) {
            return None;
        }
        let d = det(a, b);
        let (mut alpha, mut beta) = (det(s, b) / d, det(a, s) / d);
        let [x, y, z] = self.tr;
        if alpha * beta < 0 {
            // beyond the edge a b: replace c by a - b
            let nb = (-b.0, -b.1);
            return Some(TraceTriangle {
                v: [a, nb, (a.0 + nb.0, a.1 + nb.1)],
                tr: [x, y, other_root(x, y, z)],
            });
        }
        if alpha < 0 {
            (alpha, beta) = (-alpha, -beta);
        }
        Some(if alpha > beta {
            TraceTriangle {
                v: [a, c, (a.0 + c.0, a.1 + c.1)],
                tr: [x, z, other_root(x, z, y)],
            }
        } else {
            debug_assert!(beta > alpha);
            TraceTriangle {
                v: [c, b, (c.0 + b.0, c.1 + b.1)],
                tr: [z, y, other_root(z, y, x)],
            }
        })
    }

    /// Traces on `prev`, a neighbour of this triangle.
    fn back_to(&self, prev: &TraceTriangle) -> TraceTriangle {
        let trace_of = |v: Vector| {
            (0..3)
                .find(|&i| same_class(self.v[i], v))
                .map(|i| self.tr[i])
        };
        let known: Vec<Option<f64>> = prev.v.iter().map(|&v| trace_of(v)).collect();
        let missing = known.iter().position(Option::is_none).expect("adjacent");
        let shared: Vec<f64> = known.iter().flatten().copied().collect();
        let dropped = (0..3)
            .find(|&i| !prev.v.iter().any(|&v| same_class(v, self.v[i])))
            .expect("adjacent");
        let mut tr = [0.0; 3];
        for i in 0..3 {
            tr[i] = known[i].unwrap_or_else(|| other_root(shared[0], shared[1], self.tr[dropped]));
        }
        debug_assert!(known[missing].is_none());
        TraceTriangle { v: prev.v, tr }
    }

    /// Twists by `t` along vertex `i`.
    ///
    /// With `X` the holonomy of that slope and `Y` a positively oriented dual
    /// vertex, write `Y` in the eigenbasis of `X = diag(l, 1/l)` with
    /// diagonal entries `(p, w)`. The twist `Y <- T Y` scales them by
    /// `e^(t/2)` and `e^(-t/2)`, and the traces of `Y`, `X Y`, `X^-1 Y` are
    /// positive combinations of the two.
    fn twist(&self, i: usize, t: f64) -> Result<TraceTriangle> {
        let s = self.v[i];
        let sigma = self.tr[i];
        if sigma <= 2.0 {
            return Err(Error::NotHyperbolic);
        }
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let u = if det(s, self.v[j]) > 0 {
            self.v[j]
        } else {
            (-self.v[j].0, -self.v[j].1)
        };
        let (mu, third) = (self.tr[j], self.tr[k]);
        let plus_is_vertex = same_class(self.v[k], (s.0 + u.0, s.1 + u.1));
        let (nu_plus, nu_minus) = if plus_is_vertex {
            (third, other_root(sigma, mu, third))
        } else {
            (other_root(sigma, mu, third), third)
        };
        let root = (sigma * sigma - 4.0).sqrt();
        let l = 0.5 * (sigma + root);
        let scale = sigma * root;
        let p = (l * nu_plus - nu_minus / l) / scale * (0.5 * t).exp();
        let w = (l * nu_minus - nu_plus / l) / scale * (-0.5 * t).exp();
        let mut tr = self.tr;
        tr[j] = p + w;
        tr[k] = if plus_is_vertex {
            l * p + w / l
        } else {
            p / l + l * w
        };
        Ok(TraceTriangle { v: self.v, tr })
    }
}

/// Trace triple `(|tr A|, |tr B|, |tr AB|)` after the Fenchel-Nielsen twist
/// by `t` along the curve of slope `s`.
///
/// The computation walks the Farey tessellation from the triangle of slopes
/// `1/0, 0/1, 1/1` to a triangle with `s` as a vertex, twists there and
/// walks back, using only trace identities that add positive quantities.
pub fn twisted_trace_triple(h: &HolonomyRep, s: &Slope, t: f64) -> Result<(f64, f64, f64)> {
    let (x, y, z) = h.trace_triple();
    let target = (s.p(), s.q());
    let mut path = vec![TraceTriangle {
        v: [(1, 0), (0, 1), (1, 1)],
        tr: [x, y, z],
    }];
    while let Some(next) = path.last().expect("nonempty").toward(target) {
        path.push(next);
    }
    let top = path.pop().expect("nonempty");
    let i = (0..3)
        .find(|&i| same_class(top.v[i], target))
        .expect("walk ends at s");
    let mut cur = top.twist(i, t)?;
    while let Some(prev) = path.pop() {
        cur = cur.back_to(&prev);
    }
    Ok((cur.tr[0], cur.tr[1], cur.tr[2]))
}

/// Shears of the standard triangulation after twisting by `t` along `s`.
pub fn twisted_torus_shears(h: &HolonomyRep, s: &Slope, t: f64) -> Result<[f64; 3]> {
    let (x, y, z) = twisted_trace_triple(h, s, t)?;
    Ok([2.0 * (y / z).ln(), 2.0 * (z / x).ln(), 2.0 * (x / y).ln()])
}

/// Fenchel-Nielsen twist by `t` along the simple closed curve of slope `s`.
///
/// In a positively oriented basis `(X, Y)` with `X` the holonomy of `s`, the
/// twist replaces `Y` by `T Y` where `T` translates along the axis of `X`
/// by `t`. The result is the representation of the twisted structure in the
/// standard generators, determined up to conjugacy by its traces.
pub fn earthquake_twist(h: &HolonomyRep, s: &Slope, t: f64) -> Result<HolonomyRep> {
    let shears = twisted_torus_shears(h, s, t)?;
    shear_to_holonomy_rep(&ShearStructure::torus(shears)?)
}

/// Per-edge transverse measure of a foliation crossing the triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseWeights(Vec<f64>);

impl TransverseWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((edge, &weight)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::NegativeWeight { edge, weight });
        }
        Ok(TransverseWeights(weights))
    }

    /// Intersection numbers of a torus slope with `e0`, `e1`, `e2`.
    pub fn from_torus_slope(s: &Slope) -> Self {
        let (p, q) = (s.p() as f64, s.q() as f64);
        TransverseWeights(vec![q.abs(), p.abs(), (p - q).abs()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Shear of each edge as half the alternating sum of the weights on the
/// quadrilateral formed by its two triangles, read counterclockwise from
/// the side following the edge. Repeated sides count with multiplicity.
pub fn shear_from_transverse(tri: &IdealTriangulation, w: &TransverseWeights) -> Result<Vec<f64>> {
    let w = w.as_slice();
    if w.len() != tri.edge_count() {
        return Err(Error::EdgeCountMismatch {
            expected: tri.edge_count(),
            got: w.len(),
        });
    }
    let weight = |t: usize, side: usize| w[tri.triangles()[t][side % 3]];
    Ok((0..tri.edge_count())
        .map(|e| {
            let [x, y] = tri.edge_sides(e);
            let s1 = weight(x.triangle, x.side + 1);
            let s2 = weight(x.triangle, x.side + 2);
            let s3 = weight(y.triangle, y.side + 1);
            let s4 = weight(y.triangle, y.side + 2);
            0.5 * (s1 - s2 + s3 - s4)
        })
        .collect())
}
