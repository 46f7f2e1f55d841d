//! The twelve acceptance checks, one PASS/FAIL line each.
//!
//! Runs as a plain binary so the report lines are never captured.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{bfs_recurrent, integer_rank, random_torus, switch_rows, torus_at, track_corpus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stretchlab::exec::Execution;
use stretchlab::hypgeom::{stretch_triangle_map, HPoint};
use stretchlab::metric::{
    antisymmetry_residual, asymmetry_probe, conjugacy_class_curves, convex_cloud, curve_family,
    k_lower_bound, stretch_march, LengthEvaluator, MarchOptions, MarchStatus,
};
use stretchlab::shear::{shear_to_holonomy_rep, stretch, twisted_torus_shears, ShearStructure};
use stretchlab::surface::{enumerate_slopes, puncture_loops, Slope};
use stretchlab::traintrack::{carries_positive, is_recurrent, max_residual, weight_cone_basis};

const SEED: u64 = 20_240_601;
const EXEC: Execution = Execution::Parallel;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED + criterion)
}

fn completeness() -> Verdict {
    let mut rng = rng(1);
    let (mut cusp, mut comm) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let g = random_torus(&mut rng, 1.5);
        for lp in puncture_loops(g.triangulation()) {
            let m = g.holonomy_of_loop(&lp).unwrap();
            cusp = cusp.max((m.abs_trace() - 2.0).abs());
        }
        let rep = shear_to_holonomy_rep(&g).unwrap();
        comm = comm.max((rep.commutator_trace() + 2.0).abs());
    }
    verdict(
        cusp <= 1e-9 && comm <= 1e-9,
        format!("max ||tr P| - 2| = {cusp:.2e}, max |tr[A,B] + 2| = {comm:.2e}"),
    )
}

fn markov() -> Verdict {
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let rep = shear_to_holonomy_rep(&random_torus(&mut rng, 1.5)).unwrap();
        worst = worst.max(rep.markov_residual().abs());
    }
    let zero = torus_at([0.0, 0.0]);
    let (x, y, z) = shear_to_holonomy_rep(&zero).unwrap().trace_triple();
    let triple = [x, y, z]
        .iter()
        .map(|v| (v - 3.0).abs())
        .fold(0.0, f64::max);
    let e = LengthEvaluator::new(&zero);
    let systole = curve_family(&zero, 30)
        .iter()
        .map(|c| e.length(c).unwrap())
        .fold(f64::INFINITY, f64::min);
    let sys_err = (systole - 2.0 * 1.5f64.acosh()).abs();
    verdict(
        worst <= 1e-9 && triple <= 1e-9 && sys_err <= 1e-9,
        format!(
            "max Markov residual = {worst:.2e}, zero point traces off by {triple:.2e}, systole off by {sys_err:.2e}"
        ),
    )
}

fn simple_sufficiency() -> Verdict {
    let mut rng = rng(3);
    let slopes = curve_family(&torus_at([0.0, 0.0]), 30);
    let words = conjugacy_class_curves(8);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let (g, h) = (random_torus(&mut rng, 1.0), random_torus(&mut rng, 1.0));
        let a = k_lower_bound(&g, &h, &slopes, EXEC).unwrap().k_lower;
        let b = k_lower_bound(&g, &h, &words, EXEC).unwrap().k_lower;
        worst = worst.max((a - b).abs());
    }
    verdict(
        worst <= 1e-6,
        format!(
            "25 pairs, {} slopes vs {} classes, max difference {worst:.2e}",
            slopes.len(),
            words.len()
        ),
    )
}

fn triangle_inequality() -> Verdict {
    let mut rng = rng(4);
    let curves = curve_family(&torus_at([0.0, 0.0]), 30);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let f = random_torus(&mut rng, 1.5);
        let g = random_torus(&mut rng, 1.5);
        let h = random_torus(&mut rng, 1.5);
        let k = |x: &ShearStructure, y: &ShearStructure| {
            k_lower_bound(x, y, &curves, EXEC).unwrap().k_lower
        };
        worst = worst.max(k(&f, &h) - k(&f, &g) - k(&g, &h));
    }
    verdict(
        worst <= 1e-12,
        format!("100 triples, max K(f,h) - K(f,g) - K(g,h) = {worst:.2e}"),
    )
}

fn positivity() -> Verdict {
    let mut rng = rng(5);
    let curves = curve_family(&torus_at([0.0, 0.0]), 30);
    let mut min_k = f64::INFINITY;
    let mut witnessed = 0;
    for _ in 0..100 {
        let (g, h) = (random_torus(&mut rng, 1.5), random_torus(&mut rng, 1.5));
        let r = k_lower_bound(&g, &h, &curves, EXEC).unwrap();
        min_k = min_k.min(r.k_lower);
        let (lg, lh) = (
            LengthEvaluator::new(&g).length(&r.best).unwrap(),
            LengthEvaluator::new(&h).length(&r.best).unwrap(),
        );
        if r.k_lower > 0.0 && lh > lg {
            witnessed += 1;
        }
    }
    verdict(
        witnessed == 100,
        format!("{witnessed}/100 pairs with a witness curve, min K_lower = {min_k:.3e}"),
    )
}

fn stretch_bound() -> Verdict {
    let mut rng = rng(6);
    let curves = curve_family(&torus_at([0.0, 0.0]), 30);
    let mut excess = f64::NEG_INFINITY;
    let mut gaps = Vec::new();
    for t in [0.1, 0.5, 1.0] {
        let mut max_gap = 0.0f64;
        for _ in 0..20 {
            let g = random_torus(&mut rng, 1.5);
            let r = k_lower_bound(&g, &stretch(&g, t), &curves, EXEC).unwrap();
            for row in &r.rows {
                excess = excess.max(row.log_ratio - t);
            }
            max_gap = max_gap.max(t - r.k_lower);
        }
        gaps.push(format!("t={t}: max gap {max_gap:.3e}"));
    }
    verdict(
        excess <= 1e-9,
        format!("max log-ratio - t = {excess:.2e}; {}", gaps.join(", ")),
    )
}

/// Uniform `x`, and height spread from the triangle floor deep into the
/// cusp at infinity.
fn triangle_point(rng: &mut ChaCha8Rng) -> HPoint {
    let x: f64 = rng.gen_range(0.0..1.0);
    let floor = (0.25 - (x - 0.5).powi(2)).sqrt().max(1e-9);
    let t: f64 = rng.gen_range(0.0..6.0);
    HPoint::new(x, floor * t.exp()).unwrap()
}

fn triangle_stretch() -> Verdict {
    let mut rng = rng(7);
    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let k: f64 = rng.gen_range(1.0..4.0);
        let (p, q) = (triangle_point(&mut rng), triangle_point(&mut rng));
        let d = p.distance(&q);
        if d == 0.0 {
            continue;
        }
        let fd = stretch_triangle_map(p, k)
            .unwrap()
            .distance(&stretch_triangle_map(q, k).unwrap());
        worst_slack = worst_slack.max((fd - k * d) / (k * d));
    }
    // sides: x = 0 and x = 1 from their tangency points at height 1, and the
    // semicircle from its top
    let mut worst_side = 0.0f64;
    for _ in 0..1000 {
        let k: f64 = rng.gen_range(1.0..4.0);
        let y: f64 = rng.gen_range(1.0..50.0);
        let theta: f64 = rng.gen_range(0.01..std::f64::consts::PI - 0.01);
        let cases = [
            (HPoint::new(0.0, y).unwrap(), HPoint::new(0.0, 1.0).unwrap()),
            (HPoint::new(1.0, y).unwrap(), HPoint::new(1.0, 1.0).unwrap()),
            (
                HPoint::new(0.5 + 0.5 * theta.cos(), 0.5 * theta.sin()).unwrap(),
                HPoint::new(0.5, 0.5).unwrap(),
            ),
        ];
        for (p, o) in cases {
            let d = p.distance(&o);
            let fd = stretch_triangle_map(p, k).unwrap().distance(&o);
            worst_side = worst_side.max((fd - k * d).abs() / (k * d).max(1.0));
        }
    }
    verdict(
        worst_slack <= 1e-6 && worst_side <= 1e-9,
        format!("max (d' - K d)/(K d) = {worst_slack:.2e} over 10^4 pairs, side arc length error {worst_side:.2e}"),
    )
}

fn convexity() -> Verdict {
    let mut rng = rng(8);
    let (mut ok, mut min_depth, mut min_margin) = (0, f64::INFINITY, f64::INFINITY);
    let mut resolved = usize::MAX;
    for _ in 0..20 {
        let g = random_torus(&mut rng, 1.0);
        let c = convex_cloud(&g, 20, EXEC).unwrap();
        if c.origin_interior() && c.all_vertices() {
            ok += 1;
        }
        min_depth = min_depth.min(c.hull.origin_depth);
        min_margin = min_margin.min(c.hull.min_vertex_margin());
        resolved = resolved.min(c.hull.resolved_vertices(1e-8));
    }
    verdict(
        ok == 20,
        format!(
            "{ok}/20 clouds convex; min origin depth {min_depth:.3e}, min vertex margin {min_margin:.2e}, fewest vertices resolved beyond 1e-8: {resolved}"
        ),
    )
}

fn antisymmetry() -> Verdict {
    let mut rng = rng(9);
    let slopes = enumerate_slopes(5);
    let (mut worst, mut diag) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < 50 {
        let g = random_torus(&mut rng, 1.5);
        let s = slopes[rng.gen_range(0..slopes.len())];
        let t = slopes[rng.gen_range(0..slopes.len())];
        if s == t {
            continue;
        }
        worst = worst.max(antisymmetry_residual(&g, &s, &t).unwrap().abs());
        diag = diag.max(antisymmetry_residual(&g, &s, &s).unwrap().abs());
        n += 1;
    }
    verdict(
        worst <= 1e-4 && diag == 0.0,
        format!("max |E_s l_t + E_t l_s| = {worst:.2e} over 50 triples, s = t residual {diag:e}"),
    )
}

fn train_tracks() -> Verdict {
    let mut bad = Vec::new();
    let corpus = track_corpus();
    for e in &corpus {
        let tt = &e.track;
        let basis = weight_cone_basis(tt);
        let exact = basis
            .iter()
            .all(|v| num_traits::Zero::is_zero(&max_residual(tt, v)));
        let dim_ok = basis.len() == e.cone_dim
            && basis.len() == tt.branch_count() - integer_rank(switch_rows(tt));
        let rec = is_recurrent(tt);
        let rec_ok =
            rec == bfs_recurrent(tt) && rec == e.recurrent && (!rec || carries_positive(tt));
        if !(exact && dim_ok && rec_ok) {
            bad.push(e.name);
        }
    }
    let torus = corpus.iter().find(|e| e.name == "standard_torus").unwrap();
    let torus_dim = weight_cone_basis(&torus.track).len();
    verdict(
        bad.is_empty() && torus_dim == 2,
        format!(
            "{} tracks, mismatches {bad:?}, standard torus cone dimension {torus_dim}",
            corpus.len()
        ),
    )
}

fn march() -> Verdict {
    let mut rng = rng(11);
    let opts = MarchOptions::new(0.01, 500);
    let probe = curve_family(&torus_at([0.0, 0.0]), 16);
    let (mut ok, mut pairs) = (0, 0);
    let (mut max_steps, mut max_secs, mut max_rise) = (0, 0.0f64, f64::NEG_INFINITY);
    let mut distinct = 0;
    while pairs < 10 {
        let (g, h) = (random_torus(&mut rng, 1.5), random_torus(&mut rng, 1.5));
        let k0 = k_lower_bound(&g, &h, &probe, EXEC).unwrap().k_lower;
        if !(0.3..=1.0).contains(&k0) {
            continue;
        }
        pairs += 1;
        let start = Instant::now();
        let r = stretch_march(&g, &h, &opts, EXEC).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let rise = r
            .trace
            .windows(2)
            .map(|w| w[1].k_lower - w[0].k_lower)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut bests: Vec<String> = r.trace.iter().map(|s| s.best.to_string()).collect();
        bests.sort();
        bests.dedup();
        distinct = distinct.max(bests.len());
        max_rise = max_rise.max(rise);
        max_steps = max_steps.max(r.trace.len());
        max_secs = max_secs.max(secs);
        if r.status == MarchStatus::Converged && r.final_k < 0.01 && rise <= 1e-3 && secs < 60.0 {
            ok += 1;
        }
    }
    verdict(
        ok == 10,
        format!(
            "{ok}/10 pairs converged; max steps {max_steps}, max rise {max_rise:.2e}, slowest {max_secs:.2}s, at most {distinct} distinct maximizers"
        ),
    )
}

fn asymmetry() -> Verdict {
    let mut ratios = Vec::new();
    for (c, t) in [(0.5, 3.0), (0.5, 3.5), (0.25, 4.0)] {
        let g = ShearStructure::torus([0.0, c, -c]).unwrap();
        let h = stretch(&g, t);
        let (kgh, khg) = asymmetry_probe(&g, &h, 30, EXEC).unwrap();
        ratios.push((format!("stretch c={c} t={t}"), kgh, khg));
        // the same pair moved by a twist along 1/0
        let slope = Slope::new(1, 0).unwrap();
        let move_by = |s: &ShearStructure| {
            let r = shear_to_holonomy_rep(s).unwrap();
            ShearStructure::torus(twisted_torus_shears(&r, &slope, 0.7).unwrap()).unwrap()
        };
        let (tg, th) = (move_by(&g), move_by(&h));
        let (kgh, khg) = asymmetry_probe(&tg, &th, 30, EXEC).unwrap();
        ratios.push((format!("twisted c={c} t={t}"), kgh, khg));
    }
    let min_ratio = ratios
        .iter()
        .map(|(_, a, b)| a.max(*b) / a.min(*b))
        .fold(f64::INFINITY, f64::min);
    let detail: Vec<String> = ratios
        .iter()
        .map(|(n, a, b)| format!("{n}: K(g,h)={a:.3} K(h,g)={b:.3}"))
        .collect();
    verdict(
        min_ratio > 2.0,
        format!("min ratio {min_ratio:.3}; {}", detail.join("; ")),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Verdict); 12] = [
        ("completeness invariant", completeness),
        ("Fricke/Markov identity", markov),
        ("simple-curve sufficiency", simple_sufficiency),
        ("triangle inequality", triangle_inequality),
        ("positivity", positivity),
        ("stretch Lipschitz bound", stretch_bound),
        ("ideal-triangle stretch map", triangle_stretch),
        ("gradient cloud convexity", convexity),
        ("earthquake antisymmetry", antisymmetry),
        ("train-track suite", train_tracks),
        ("march surrogate", march),
        ("asymmetry", asymmetry),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!v.pass);
        println!(
            "{tag} {:>2} {name}: {} [{:.2}s]",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 12 criteria failed");
        ExitCode::FAILURE
    }
}
