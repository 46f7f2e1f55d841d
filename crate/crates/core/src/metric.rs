//! Finite-sweep estimates of the asymmetric metric
//! `K(g, h) = sup log(length_h / length_g)` and the tools built on it.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hull::HullReport;
use crate::shear::{
    completeness_basis, earthquake_twist, holonomy_length, shear_to_holonomy_rep, Curve,
    HolonomyRep, ShearStructure,
};
use crate::surface::{
    enumerate_conjugacy_classes, enumerate_loops, enumerate_slopes, slope_word, Slope,
};

/// Two reports agree on K when they differ by at most this much.
pub const STABILITY_EPS: f64 = 1e-10;
/// Central-difference step for gradients of log length.
pub const GRAD_STEP: f64 = 1e-5;
/// Central-difference step for twist derivatives.
pub const TWIST_STEP: f64 = 1e-4;
/// Tolerance on hull verdicts for gradient clouds.
pub const HULL_EPS: f64 = 1e-8;

/// Lengths on one structure, reusing the torus holonomy when available.
pub struct LengthEvaluator<'a> {
    structure: &'a ShearStructure,
    rep: Option<HolonomyRep>,
}

impl<'a> LengthEvaluator<'a> {
    pub fn new(structure: &'a ShearStructure) -> Self {
        let rep = shear_to_holonomy_rep(structure).ok();
        LengthEvaluator { structure, rep }
    }

    pub fn length(&self, c: &Curve) -> Result<f64> {
        match (c, &self.rep) {
            (Curve::Slope(s), Some(rep)) => holonomy_length(&rep.evaluate(&slope_word(s))),
            (Curve::Word(w), Some(rep)) => holonomy_length(&rep.evaluate(w)),
            (Curve::Loop(_), _) => self.structure.curve_length(c),
            _ => Err(Error::UnsupportedCurve(c.to_string())),
        }
    }
}

/// Slopes up to complexity `n` on the torus; dual-spine loops with at most
/// `n` steps elsewhere.
pub fn curve_family(s: &ShearStructure, n: usize) -> Vec<Curve> {
    if s.triangulation().is_standard_torus() {
        enumerate_slopes(n).into_iter().map(Curve::Slope).collect()
    } else {
        enumerate_loops(s.triangulation(), n)
            .into_iter()
            .map(Curve::Loop)
            .collect()
    }
}

pub fn conjugacy_class_curves(n: usize) -> Vec<Curve> {
    enumerate_conjugacy_classes(n)
        .into_iter()
        .map(Curve::Word)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub curve: Curve,
    pub len_g: f64,
    pub len_h: f64,
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    /// Sorted by descending log-ratio, ties in canonical curve order.
    pub rows: Vec<RatioRow>,
    pub best: Curve,
    pub k_lower: f64,
    /// Best curve and K unchanged over the last two sweep levels.
    pub stabilized: bool,
    pub levels: Vec<usize>,
}

fn check_pair(g: &ShearStructure, h: &ShearStructure) -> Result<()> {
    if g.same_triangulation(h) {
        Ok(())
    } else {
        Err(Error::TriangulationMismatch)
    }
}

fn ratio_rows(
    g: &ShearStructure,
    h: &ShearStructure,
    curves: &[Curve],
    exec: Execution,
) -> Result<Vec<RatioRow>> {
    check_pair(g, h)?;
    let (eg, eh) = (LengthEvaluator::new(g), LengthEvaluator::new(h));
    let rows = exec.map(curves, |c| -> Result<Option<RatioRow>> {
        let (len_g, len_h) = (eg.length(c)?, eh.length(c)?);
        if len_g == 0.0 || len_h == 0.0 {
            // a slope is never peripheral, so zero means the trace rounded to 2
            if matches!(c, Curve::Slope(_)) {
                return Err(Error::LengthUnderflow(c.to_string()));
            }
            // peripheral classes have no ratio
            return Ok(None);
        }
        Ok(Some(RatioRow {
            curve: c.clone(),
            len_g,
            len_h,
            log_ratio: len_h.ln() - len_g.ln(),
        }))
    });
    rows.into_iter().filter_map(|r| r.transpose()).collect()
}

fn report(mut rows: Vec<RatioRow>) -> Result<RatioReport> {
    rows.sort_by(|a, b| {
        b.log_ratio
            .total_cmp(&a.log_ratio)
            .then_with(|| a.curve.cmp(&b.curve))
    });
    let first = rows.first().ok_or(Error::EmptyCurveSet)?;
    Ok(RatioReport {
        best: first.curve.clone(),
        k_lower: first.log_ratio,
        stabilized: false,
        rows,
        levels: Vec::new(),
    })
}

/// Exact maximum of the log-ratio over a finite curve set.
pub fn k_lower_bound(
    g: &ShearStructure,
    h: &ShearStructure,
    curves: &[Curve],
    exec: Execution,
) -> Result<RatioReport> {
    if curves.is_empty() {
        return Err(Error::EmptyCurveSet);
    }
    report(ratio_rows(g, h, curves, exec)?)
}

/// Sweeps the curve families of `schedule` (strictly increasing bounds)
/// and reports the last level.
pub fn k_estimate(
    g: &ShearStructure,
    h: &ShearStructure,
    schedule: &[usize],
    exec: Execution,
) -> Result<RatioReport> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSchedule);
    }
    let top = *schedule.last().expect("nonempty");
    let all = ratio_rows(g, h, &curve_family(g, top), exec)?;
    let mut previous: Option<RatioReport> = None;
    let mut stabilized = false;
    for &n in schedule {
        let members: BTreeSet<Curve> = curve_family(g, n).into_iter().collect();
        let rows = all
            .iter()
            .filter(|r| members.contains(&r.curve))
            .cloned()
            .collect();
        let level = report(rows)?;
        stabilized = previous.as_ref().is_some_and(|p| {
            p.best == level.best && (p.k_lower - level.k_lower).abs() <= STABILITY_EPS
        });
        previous = Some(level);
    }
    let mut last = previous.expect("nonempty schedule");
    last.stabilized = stabilized;
    last.levels = schedule.to_vec();
    Ok(last)
}

/// `(K(g, h), K(h, g))` over the same curve family.
pub fn asymmetry_probe(
    g: &ShearStructure,
    h: &ShearStructure,
    n: usize,
    exec: Execution,
) -> Result<(f64, f64)> {
    let curves = curve_family(g, n);
    Ok((
        k_lower_bound(g, h, &curves, exec)?.k_lower,
        k_lower_bound(h, g, &curves, exec)?.k_lower,
    ))
}

/// A covector on the completeness hyperplane, in the orthonormal basis of
/// [`completeness_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCovector {
    pub components: Vec<f64>,
}

impl TangentCovector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The covector as a vector of per-edge shear components.
    pub fn in_shear_coordinates(&self, basis: &[Vec<f64>]) -> Vec<f64> {
        let mut v = vec![0.0; basis.first().map_or(0, Vec::len)];
        for (c, u) in self.components.iter().zip(basis) {
            for (x, ui) in v.iter_mut().zip(u) {
                *x += c * ui;
            }
        }
        v
    }
}

fn shifted(g: &ShearStructure, dir: &[f64], by: f64) -> Result<ShearStructure> {
    let shears = g
        .shears()
        .iter()
        .zip(dir)
        .map(|(x, d)| x + by * d)
        .collect();
    ShearStructure::new(g.shared_triangulation().clone(), shears)
}

/// Central differences of `log length` along each hyperplane basis vector,
/// for a batch of curves.
pub fn grad_log_lengths_with_step(
    g: &ShearStructure,
    curves: &[Curve],
    step: f64,
    exec: Execution,
) -> Result<Vec<TangentCovector>> {
    let basis = completeness_basis(g.triangulation());
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for u in &basis {
        let (plus, minus) = (shifted(g, u, step)?, shifted(g, u, -step)?);
        let (ep, em) = (LengthEvaluator::new(&plus), LengthEvaluator::new(&minus));
        let d = exec.map(curves, |c| -> Result<f64> {
            let (lp, lm) = (ep.length(c)?, em.length(c)?);
            if lp == 0.0 || lm == 0.0 {
                return Err(Error::ZeroLength);
            }
            Ok((lp.ln() - lm.ln()) / (2.0 * step))
        });
        columns.push(d.into_iter().collect::<Result<_>>()?);
    }
    Ok((0..curves.len())
        .map(|i| TangentCovector {
            components: columns.iter().map(|col| col[i]).collect(),
        })
        .collect())
}

pub fn grad_log_lengths(
    g: &ShearStructure,
    curves: &[Curve],
    exec: Execution,
) -> Result<Vec<TangentCovector>> {
    grad_log_lengths_with_step(g, curves, GRAD_STEP, exec)
}

pub fn grad_log_length(g: &ShearStructure, c: &Curve) -> Result<TangentCovector> {
    let mut v = grad_log_lengths(g, std::slice::from_ref(c), Execution::Sequential)?;
    Ok(v.pop().expect("one curve"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCloud {
    pub slopes: Vec<Slope>,
    pub points: Vec<[f64; 2]>,
    pub hull: HullReport,
}

impl GradientCloud {
    pub fn origin_interior(&self) -> bool {
        self.hull.origin_interior(HULL_EPS)
    }

    pub fn all_vertices(&self) -> bool {
        self.hull.all_vertices(HULL_EPS)
    }
}

/// Gradients of log length of every slope up to complexity `n`, as points
/// in the two-dimensional completeness hyperplane of the torus.
pub fn convex_cloud(g: &ShearStructure, n: usize, exec: Execution) -> Result<GradientCloud> {
    if !g.triangulation().is_standard_torus() {
        return Err(Error::NotStandardTorus);
    }
    let slopes = enumerate_slopes(n);
    let curves: Vec<Curve> = slopes.iter().copied().map(Curve::Slope).collect();
    let points: Vec<[f64; 2]> = grad_log_lengths(g, &curves, exec)?
        .into_iter()
        .map(|c| [c.components[0], c.components[1]])
        .collect();
    let hull = HullReport::new(&points);
    Ok(GradientCloud {
        slopes,
        points,
        hull,
    })
}

/// Central difference of the length of `c` under the twist along `s`.
///
/// The twisted lengths come from the full twisted representation and the
/// Christoffel word of `c` in the standard generators, which stays short.
/// The twist fixes the holonomy of `s`, so `c = s` gives zero.
pub fn twist_derivative(rep: &HolonomyRep, s: &Slope, c: &Slope, step: f64) -> Result<f64> {
    if s == c {
        return Ok(0.0);
    }
    let w = slope_word(c);
    let up = earthquake_twist(rep, s, step)?.word_length(&w);
    let down = earthquake_twist(rep, s, -step)?.word_length(&w);
    Ok((up - down) / (2.0 * step))
}

/// `E_s length(t) + E_t length(s)`, which vanishes by antisymmetry.
pub fn antisymmetry_residual(g: &ShearStructure, s: &Slope, t: &Slope) -> Result<f64> {
    let rep = shear_to_holonomy_rep(g)?;
    Ok(twist_derivative(&rep, s, t, TWIST_STEP)? + twist_derivative(&rep, t, s, TWIST_STEP)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarchStatus {
    Converged,
    NoProgress,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchStep {
    pub index: usize,
    pub k_lower: f64,
    pub best: Curve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchReport {
    /// Structures after each move.
    pub path: Vec<ShearStructure>,
    /// K and maximizer at each structure a move was made from.
    pub trace: Vec<MarchStep>,
    pub status: MarchStatus,
    pub final_k: f64,
    pub final_best: Curve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchOptions {
    pub step: f64,
    pub max_steps: usize,
    pub schedule: Vec<usize>,
    /// Window and minimal decrease (as a fraction of the step) for the
    /// progress check.
    pub window: usize,
    pub min_progress: f64,
}

impl MarchOptions {
    pub fn new(step: f64, max_steps: usize) -> Self {
        MarchOptions {
            step,
            max_steps,
            schedule: vec![10, 16],
            window: 5,
            min_progress: 0.1,
        }
    }
}

/// Descent toward `h`: from each `g_i`, find the maximizing curve and move a
/// Euclidean unit step along the gradient of its log length.
pub fn stretch_march(
    g: &ShearStructure,
    h: &ShearStructure,
    opts: &MarchOptions,
    exec: Execution,
) -> Result<MarchReport> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::BadStep(opts.step));
    }
    check_pair(g, h)?;
    let basis = completeness_basis(g.triangulation());
    let mut current = g.clone();
    let mut path = Vec::new();
    let mut trace: Vec<MarchStep> = Vec::new();
    loop {
        let rep = k_estimate(&current, h, &opts.schedule, exec)?;
        if rep.k_lower < opts.step {
            return Ok(MarchReport {
                path,
                trace,
                status: MarchStatus::Converged,
                final_k: rep.k_lower,
                final_best: rep.best,
            });
        }
        let n = trace.len();
        if n >= opts.window
            && trace[n - opts.window].k_lower - rep.k_lower < opts.min_progress * opts.step
        {
            return Ok(MarchReport {
                path,
                trace,
                status: MarchStatus::NoProgress,
                final_k: rep.k_lower,
                final_best: rep.best,
            });
        }
        if n >= opts.max_steps {
            return Ok(MarchReport {
                path,
                trace,
                status: MarchStatus::MaxSteps,
                final_k: rep.k_lower,
                final_best: rep.best,
            });
        }
        let grad = grad_log_length(&current, &rep.best)?;
        let norm = grad.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroLength);
        }
        let dir = grad.in_shear_coordinates(&basis);
        current = shifted(&current, &dir, opts.step / norm)?;
        trace.push(MarchStep {
            index: n,
            k_lower: rep.k_lower,
            best: rep.best,
        });
        path.push(current.clone());
    }
}
