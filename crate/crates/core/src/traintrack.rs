//! Abstract train tracks: switch relations, weight cones and recurrence.
//!
//! Branch `b` has half-branches `2b` and `2b + 1`, one at each end. A switch
//! lists the half-branches meeting it on each of its two sides.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Switch {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTrack {
    branches: usize,
    switches: Vec<Switch>,
    // (switch, is_left) per half-branch
    placement: Vec<(usize, bool)>,
}

pub type WeightVector = Vec<BigRational>;

impl TrainTrack {
    pub fn new(branches: usize, switches: Vec<Switch>) -> Result<Self> {
        if branches == 0 {
            return Err(Error::InvalidTrack("no branches".into()));
        }
        let mut placement = vec![None; 2 * branches];
        for (k, sw) in switches.iter().enumerate() {
            if sw.left.is_empty() || sw.right.is_empty() {
                return Err(Error::InvalidTrack(format!("switch {k} has an empty side")));
            }
            let sides = sw
                .left
                .iter()
                .map(|&h| (h, true))
                .chain(sw.right.iter().map(|&h| (h, false)));
            for (h, is_left) in sides {
                let slot = placement
                    .get_mut(h)
                    .ok_or_else(|| Error::InvalidTrack(format!("half-branch {h} out of range")))?;
                if slot.is_some() {
                    return Err(Error::InvalidTrack(format!("half-branch {h} placed twice")));
                }
                *slot = Some((k, is_left));
            }
        }
        let placement = placement
            .into_iter()
            .enumerate()
            .map(|(h, p)| {
                p.ok_or_else(|| Error::InvalidTrack(format!("half-branch {h} is not placed")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrainTrack {
            branches,
            switches,
            placement,
        })
    }

    /// A simple closed curve: one branch whose two ends meet at one switch.
    pub fn single_loop() -> Self {
        Self::new(
            1,
            vec![Switch {
                left: vec![0],
                right: vec![1],
            }],
        )
        .expect("valid track")
    }

    /// The maximal track on the once-punctured torus: two trivalent switches
    /// where branches 0 and 1 merge into branch 2.
    pub fn standard_torus() -> Self {
        Self::new(
            3,
            vec![
                Switch {
                    left: vec![0, 2],
                    right: vec![4],
                },
                Switch {
                    left: vec![5],
                    right: vec![1, 3],
                },
            ],
        )
        .expect("valid track")
    }

    pub fn branch_count(&self) -> usize {
        self.branches
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    /// Switch and side (`true` for left) holding half-branch `h`.
    pub fn placement(&self, h: usize) -> (usize, bool) {
        self.placement[h]
    }

    /// Successors of the directed traversal that leaves its branch through
    /// half-branch `h`: continue out of the far side of that switch.
    pub fn continuations(&self, h: usize) -> impl Iterator<Item = usize> + '_ {
        let (sw, is_left) = self.placement[h];
        let s = &self.switches[sw];
        let far = if is_left { &s.right } else { &s.left };
        far.iter().map(|&g| g ^ 1)
    }
}

/// One row per switch, `+1` per half-branch on the left and `-1` per
/// half-branch on the right, summed by branch.
pub fn switch_matrix(tt: &TrainTrack) -> Vec<Vec<BigRational>> {
    tt.switches
        .iter()
        .map(|sw| {
            let mut row = vec![0i64; tt.branches];
            for &h in &sw.left {
                row[h / 2] += 1;
            }
            for &h in &sw.right {
                row[h / 2] -= 1;
            }
            row.into_iter()
                .map(|v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect()
}

/// Basis of the kernel of the switch matrix, one vector per free column of
/// its reduced row echelon form.
pub fn weight_cone_basis(tt: &TrainTrack) -> Vec<WeightVector> {
    let mut m = switch_matrix(tt);
    let cols = tt.branches;
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let d = &f * &m[row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// `M w` for the switch matrix `M`.
pub fn switch_residual(tt: &TrainTrack, w: &[BigRational]) -> Vec<BigRational> {
    switch_matrix(tt)
        .iter()
        .map(|row| {
            row.iter()
                .zip(w)
                .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

fn traversal_graph(tt: &TrainTrack) -> DiGraph<(), ()> {
    let n = 2 * tt.branches;
    let mut g = DiGraph::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for h in 0..n {
        for next in tt.continuations(h) {
            g.add_edge(nodes[h], nodes[next], ());
        }
    }
    g
}

/// True when every branch lies on a closed legal trajectory.
///
/// Nodes of the traversal graph are exit half-branches. A node lies on a
/// closed walk iff its strongly connected component has an internal edge.
pub fn is_recurrent(tt: &TrainTrack) -> bool {
    let g = traversal_graph(tt);
    let mut cyclic = vec![false; 2 * tt.branches];
    for comp in tarjan_scc(&g) {
        let on_cycle = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
        for node in comp {
            cyclic[node.index()] = on_cycle;
        }
    }
    (0..tt.branches).all(|b| cyclic[2 * b] && cyclic[2 * b + 1])
}

/// Shortest closed walk through the traversal exiting at `h`, as the list of
/// exit half-branches visited.
fn closed_walk(tt: &TrainTrack, h: usize) -> Option<Vec<usize>> {
    let n = 2 * tt.branches;
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for next in tt.continuations(h) {
        if next == h {
            return Some(vec![h]);
        }
        if parent[next] == usize::MAX {
            parent[next] = h;
            queue.push_back(next);
        }
    }
    while let Some(u) = queue.pop_front() {
        for next in tt.continuations(u) {
            if next == h {
                let mut walk = vec![u];
                let mut cur = u;
                while parent[cur] != h {
                    cur = parent[cur];
                    walk.push(cur);
                }
                walk.push(h);
                walk.reverse();
                return Some(walk);
            }
            if parent[next] == usize::MAX {
                parent[next] = u;
                queue.push_back(next);
            }
        }
    }
    None
}

/// A strictly positive integer weight vector satisfying every switch
/// relation, built by summing branch counts of one closed walk per branch.
pub fn positive_witness(tt: &TrainTrack) -> Option<Vec<u64>> {
    let mut w = vec![0u64; tt.branches];
    for b in 0..tt.branches {
        if w[b] > 0 {
            continue;
        }
        for h in closed_walk(tt, 2 * b)? {
            w[h / 2] += 1;
        }
    }
    Some(w)
}

pub fn carries_positive(tt: &TrainTrack) -> bool {
    positive_witness(tt).is_some_and(|w| {
        let q: Vec<BigRational> = w
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        w.iter().all(|&v| v > 0) && switch_residual(tt, &q).iter().all(|r| r.is_zero())
    })
}

/// Largest absolute entry of `M w`, zero exactly when `w` is in the cone's span.
pub fn max_residual(tt: &TrainTrack, w: &[BigRational]) -> BigRational {
    switch_residual(tt, w)
        .into_iter()
        .map(|r| r.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
