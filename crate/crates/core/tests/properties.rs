mod common;

use common::torus_at;
use proptest::prelude::*;
use stretchlab::cli::SurfaceFile;
use stretchlab::exec::Execution;
use stretchlab::hypgeom::{stretch_triangle_map, HPoint, IsometryMatrix};
use stretchlab::metric::{curve_family, k_lower_bound};
use stretchlab::shear::{
    earthquake_twist, shear_to_holonomy_rep, stretch, torus_shears_from_rep, Curve, ShearStructure,
};
use stretchlab::surface::{puncture_loops, Slope};

fn coords() -> impl Strategy<Value = [f64; 2]> {
    [-1.5f64..1.5, -1.5f64..1.5]
}

fn isometry() -> impl Strategy<Value = IsometryMatrix> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(s, u, v)| {
        let a = IsometryMatrix::new(1.0, u, 0.0, 1.0).unwrap();
        let b = IsometryMatrix::new(1.0, 0.0, v, 1.0).unwrap();
        IsometryMatrix::diagonal(s).compose(&a).compose(&b)
    })
}

fn point() -> impl Strategy<Value = HPoint> {
    (-3.0f64..3.0, 0.05f64..4.0).prop_map(|(x, y)| HPoint::new(x, y).unwrap())
}

/// Points of the ideal triangle `0, 1, inf`, reaching well into all corners.
fn triangle_point() -> impl Strategy<Value = HPoint> {
    (0.0f64..1.0, 0.0f64..6.0).prop_map(|(x, t)| {
        let floor = (0.25 - (x - 0.5).powi(2)).sqrt().max(1e-9);
        HPoint::new(x, floor * (t.exp() - 1.0) + floor).unwrap()
    })
}

fn slope() -> impl Strategy<Value = Slope> {
    (-6i64..=6, 0i64..=6).prop_filter_map("not coprime", |(p, q)| Slope::new(p, q).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isometries_preserve_distance(m in isometry(), p in point(), q in point()) {
        let d = p.distance(&q);
        let e = m.apply(p).distance(&m.apply(q));
        prop_assert!((d - e).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn composition_is_associative(a in isometry(), b in isometry(), c in isometry()) {
        let l = a.compose(&b).compose(&c);
        let r = a.compose(&b.compose(&c));
        prop_assert!(l.max_abs_diff(&r) <= 1e-9 * l.entries().iter().fold(1.0f64, |m, x| m.max(x.abs())));
        prop_assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn triangle_map_is_lipschitz(p in triangle_point(), q in triangle_point(), k in 1.0f64..4.0) {
        let (fp, fq) = (stretch_triangle_map(p, k).unwrap(), stretch_triangle_map(q, k).unwrap());
        let d = p.distance(&q);
        prop_assert!(fp.distance(&fq) <= k * d * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn puncture_is_parabolic(c in coords()) {
        let g = torus_at(c);
        let tri = g.triangulation();
        for lp in puncture_loops(tri) {
            let m = g.holonomy_of_loop(&lp).unwrap();
            prop_assert!((m.abs_trace() - 2.0).abs() <= 1e-9);
        }
        let rep = shear_to_holonomy_rep(&g).unwrap();
        prop_assert!((rep.commutator_trace() + 2.0).abs() <= 1e-9);
        prop_assert!(rep.markov_residual().abs() <= 1e-9);
    }

    #[test]
    fn triangle_inequality(f in coords(), g in coords(), h in coords()) {
        let (f, g, h) = (torus_at(f), torus_at(g), torus_at(h));
        let curves = curve_family(&f, 12);
        let k = |x: &ShearStructure, y: &ShearStructure| {
            k_lower_bound(x, y, &curves, Execution::Sequential).unwrap().k_lower
        };
        prop_assert!(k(&f, &h) <= k(&f, &g) + k(&g, &h) + 1e-12);
    }

    #[test]
    fn stretch_expands_by_at_most_e_t(c in coords(), t in 0.0f64..1.5) {
        let g = torus_at(c);
        let h = stretch(&g, t);
        let r = k_lower_bound(&g, &h, &curve_family(&g, 12), Execution::Sequential).unwrap();
        prop_assert!(r.rows.iter().all(|row| row.log_ratio <= t + 1e-9));
    }

    #[test]
    fn twist_keeps_the_twisting_curve(c in coords(), s in slope(), t in -1.0f64..1.0) {
        let rep = shear_to_holonomy_rep(&torus_at(c)).unwrap();
        let twisted = earthquake_twist(&rep, &s, t).unwrap();
        let w = stretchlab::surface::slope_word(&s);
        let (before, after) = (rep.word_length(&w), twisted.word_length(&w));
        prop_assert!((before - after).abs() <= 1e-9 * before.max(1.0));
        prop_assert!((twisted.commutator_trace() + 2.0).abs() <= 1e-7);
    }

    #[test]
    fn twist_round_trip(c in coords(), s in slope(), t in -1.0f64..1.0) {
        let g = torus_at(c);
        let rep = shear_to_holonomy_rep(&g).unwrap();
        let back = earthquake_twist(&earthquake_twist(&rep, &s, t).unwrap(), &s, -t).unwrap();
        let shears = torus_shears_from_rep(&back);
        for (a, b) in shears.iter().zip(g.shears()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn surface_file_round_trip(c in coords(), k in -1e3f64..1e3) {
        let g = torus_at([c[0] * k, c[1] / k.abs().max(1e-3)]);
        let file = SurfaceFile::builtin(g);
        let text = file.emit();
        let back = SurfaceFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn sweep_is_schedule_independent(g in coords(), h in coords()) {
        let (g, h) = (torus_at(g), torus_at(h));
        let curves = curve_family(&g, 15);
        let seq = k_lower_bound(&g, &h, &curves, Execution::Sequential).unwrap();
        let par = k_lower_bound(&g, &h, &curves, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}

#[test]
fn stretch_maps_sides_linearly() {
    // the side x = 0 is sent to itself with arc length from the tangency
    // point (0, 1) multiplied by k
    let origin = HPoint::new(0.0, 1.0).unwrap();
    for k in [1.5, 2.0, 3.7] {
        for y in [1.5, 3.0, 40.0] {
            let p = HPoint::new(0.0, y).unwrap();
            let fp = stretch_triangle_map(p, k).unwrap();
            assert_eq!(fp.x(), 0.0);
            assert!((fp.distance(&origin) - k * p.distance(&origin)).abs() <= 1e-9);
        }
    }
}

#[test]
fn zero_length_curves_are_skipped() {
    let g = torus_at([0.2, -0.4]);
    let lp = puncture_loops(g.triangulation()).remove(0);
    let curves = vec![Curve::Loop(lp), Curve::Slope(Slope::new(1, 1).unwrap())];
    let r = k_lower_bound(&g, &g, &curves, Execution::Sequential).unwrap();
    assert_eq!(r.rows.len(), 1);
}
