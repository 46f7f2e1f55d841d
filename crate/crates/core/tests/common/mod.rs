#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stretchlab::shear::ShearStructure;
use stretchlab::surface::IdealTriangulation;
use stretchlab::traintrack::{Switch, TrainTrack};

pub fn torus_tri() -> Arc<IdealTriangulation> {
    Arc::new(IdealTriangulation::standard_torus())
}

/// Complete torus structure with hyperplane coordinates uniform in `(-r, r)`.
pub fn random_torus(rng: &mut ChaCha8Rng, r: f64) -> ShearStructure {
    let c = [rng.gen_range(-r..r), rng.gen_range(-r..r)];
    ShearStructure::from_hyperplane_coords(torus_tri(), &c).unwrap()
}

pub fn torus_at(coords: [f64; 2]) -> ShearStructure {
    ShearStructure::from_hyperplane_coords(torus_tri(), &coords).unwrap()
}

/// Trace triple `(tr a, tr b, tr ab)` of a complete torus structure, solved
/// in closed form from the shears and the Markov equation.
pub fn closed_form_traces(shears: &[f64]) -> (f64, f64, f64) {
    let (s0, s1) = (shears[0], shears[1]);
    let z = (1.0 + s0.exp() + (-s1).exp()) * ((s1 - s0) / 2.0).exp();
    (z * (-s1 / 2.0).exp(), z * (s0 / 2.0).exp(), z)
}

pub fn track(branches: usize, switches: &[(&[usize], &[usize])]) -> TrainTrack {
    let switches = switches
        .iter()
        .map(|(l, r)| Switch {
            left: l.to_vec(),
            right: r.to_vec(),
        })
        .collect();
    TrainTrack::new(branches, switches).unwrap()
}

/// Closed-trajectory test by breadth-first search from each exit
/// half-branch, built straight from the switch lists.
pub fn bfs_recurrent(tt: &TrainTrack) -> bool {
    let n = 2 * tt.branch_count();
    let mut succ = vec![Vec::new(); n];
    for sw in tt.switches() {
        for (near, far) in [(&sw.left, &sw.right), (&sw.right, &sw.left)] {
            for &h in near {
                // arriving through h, leave into a far half-branch and out of
                // its other end
                succ[h].extend(far.iter().map(|&g| g ^ 1));
            }
        }
    }
    (0..n).all(|h| {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = succ[h].clone();
        while let Some(u) = stack.pop() {
            if u == h {
                return true;
            }
            if !std::mem::replace(&mut seen[u], true) {
                stack.extend(&succ[u]);
            }
        }
        false
    })
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(mut m: Vec<Vec<i128>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let (a, b) = (m[rank][c], m[r][c]);
            for k in 0..cols {
                m[r][k] = a * m[r][k] - b * m[rank][k];
            }
            let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                m[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Switch rows recomputed from scratch.
pub fn switch_rows(tt: &TrainTrack) -> Vec<Vec<i128>> {
    tt.switches()
        .iter()
        .map(|sw| {
            let mut row = vec![0i128; tt.branch_count()];
            sw.left.iter().for_each(|&h| row[h / 2] += 1);
            sw.right.iter().for_each(|&h| row[h / 2] -= 1);
            row
        })
        .collect()
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub track: TrainTrack,
    pub recurrent: bool,
    pub cone_dim: usize,
}

/// Ten small tracks with hand-derived verdicts.
pub fn track_corpus() -> Vec<CorpusEntry> {
    let e = |name, track, recurrent, cone_dim| CorpusEntry {
        name,
        track,
        recurrent,
        cone_dim,
    };
    vec![
        e("single_loop", TrainTrack::single_loop(), true, 1),
        e("standard_torus", TrainTrack::standard_torus(), true, 2),
        e(
            "loop_with_stub",
            track(3, &[(&[0], &[1, 2]), (&[3], &[4, 5])]),
            false,
            1,
        ),
        e(
            "two_loops",
            track(2, &[(&[0], &[1]), (&[2], &[3])]),
            true,
            2,
        ),
        e(
            "bigon",
            track(3, &[(&[5], &[0, 2]), (&[1, 3], &[4])]),
            true,
            2,
        ),
        e(
            "bridged_loops",
            track(3, &[(&[0, 4], &[1]), (&[2], &[3, 5])]),
            false,
            2,
        ),
        e("figure_eight", track(2, &[(&[0, 2], &[1, 3])]), true, 2),
        e(
            "theta",
            track(3, &[(&[0, 2], &[4]), (&[1], &[3, 5])]),
            false,
            1,
        ),
        e(
            "doubled_torus",
            track(4, &[(&[0, 2], &[4, 6]), (&[5, 7], &[1, 3])]),
            true,
            3,
        ),
        e(
            "five_cycle",
            track(
                5,
                &[
                    (&[9], &[0]),
                    (&[1], &[2]),
                    (&[3], &[4]),
                    (&[5], &[6]),
                    (&[7], &[8]),
                ],
            ),
            true,
            1,
        ),
    ]
}
