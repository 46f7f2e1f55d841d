//! Ideal triangulations and combinatorial curve classes.
//!
//! Triangles list the edge on each of their three sides in counterclockwise
//! order. Side `k` runs from vertex `k` to vertex `k + 1`, so corner `k` sits
//! between sides `k - 1` and `k`. Two occurrences of an edge label are glued
//! by an orientation-reversing identification, which is the only choice on
//! an oriented surface.
//!
//! Closed curves are carried combinatorially: as slopes and words on the
//! once-punctured torus, and as cyclic edge/turn sequences in the dual spine
//! in general.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A side of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub triangle: usize,
    pub side: usize,
}

/// A corner (ideal vertex) of a triangle, at the start of side `corner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub triangle: usize,
    pub corner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealTriangulation {
    triangles: Vec<[usize; 3]>,
    partner: Vec<[Side; 3]>,
    edge_sides: Vec<[Side; 2]>,
    punctures: Vec<Vec<Corner>>,
    genus: usize,
}

impl IdealTriangulation {
    /// Builds a triangulation from per-triangle edge labels. Edge labels must
    /// be `0..E`, each used on exactly two sides.
    pub fn from_edge_labels(triangles: Vec<[usize; 3]>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidTriangulation(msg));
        let t = triangles.len();
        if t == 0 {
            return invalid("no triangles".into());
        }
        if t % 2 != 0 {
            return invalid(format!(
                "odd triangle count {t}; E = 3T/2 must be an integer"
            ));
        }
        let e = 3 * t / 2;
        let mut occurrences: Vec<Vec<Side>> = vec![Vec::new(); e];
        for (ti, tri) in triangles.iter().enumerate() {
            for (si, &edge) in tri.iter().enumerate() {
                if edge >= e {
                    return invalid(format!("edge e{edge} out of range 0..{e}"));
                }
                occurrences[edge].push(Side {
                    triangle: ti,
                    side: si,
                });
            }
        }
        let mut edge_sides = Vec::with_capacity(e);
        for (edge, occ) in occurrences.iter().enumerate() {
            if occ.len() != 2 {
                return invalid(format!(
                    "edge e{edge} appears on {} sides; every side must be glued to exactly one other",
                    occ.len()
                ));
            }
            edge_sides.push([occ[0], occ[1]]);
        }
        let mut partner = vec![
            [Side {
                triangle: 0,
                side: 0
            }; 3];
            t
        ];
        for [x, y] in &edge_sides {
            partner[x.triangle][x.side] = *y;
            partner[y.triangle][y.side] = *x;
        }

        let mut seen = vec![[false; 3]; t];
        let mut punctures = Vec::new();
        for ti in 0..t {
            for k in 0..3 {
                if seen[ti][k] {
                    continue;
                }
                let start = Corner {
                    triangle: ti,
                    corner: k,
                };
                let mut orbit = Vec::new();
                let mut c = start;
                loop {
                    seen[c.triangle][c.corner] = true;
                    orbit.push(c);
                    c = rotate_corner(&partner, c);
                    if c == start {
                        break;
                    }
                    if seen[c.triangle][c.corner] {
                        return invalid("corner orbit does not close".into());
                    }
                }
                punctures.push(orbit);
            }
        }

        // T - E = 2 - 2g - n for the punctured surface
        let n = punctures.len() as i64;
        let chi = t as i64 - e as i64;
        let two_g = 2 - n - chi;
        if two_g < 0 || two_g % 2 != 0 {
            return invalid(format!(
                "Euler characteristic {chi} with {n} punctures gives no integer genus"
            ));
        }
        Ok(IdealTriangulation {
            triangles,
            partner,
            edge_sides,
            punctures,
            genus: (two_g / 2) as usize,
        })
    }

    /// The two-triangle, three-edge triangulation of the once-punctured torus.
    ///
    /// Edges `e0`, `e1`, `e2` are the horizontal, vertical and diagonal sides
    /// of a unit square with opposite sides identified; both triangles read
    /// `e0, e1, e2` counterclockwise.
    pub fn standard_torus() -> Self {
        Self::from_edge_labels(vec![[0, 1, 2], [0, 1, 2]]).expect("standard torus is valid")
    }

    pub fn is_standard_torus(&self) -> bool {
        self.triangles == [[0, 1, 2], [0, 1, 2]]
    }

    /// Re-runs the structural checks, plus the declared topology when given.
    pub fn validate(&self, genus: Option<usize>, punctures: Option<usize>) -> Result<()> {
        let rebuilt = Self::from_edge_labels(self.triangles.clone())?;
        if rebuilt != *self {
            return Err(Error::InvalidTriangulation(
                "cached gluing data is inconsistent".into(),
            ));
        }
        for orbit in &self.punctures {
            if orbit.is_empty() {
                return Err(Error::InvalidTriangulation("empty puncture orbit".into()));
            }
            let closed = orbit
                .iter()
                .zip(orbit.iter().cycle().skip(1))
                .all(|(&c, &next)| rotate_corner(&self.partner, c) == next);
            if !closed {
                return Err(Error::InvalidTriangulation(
                    "puncture orbit not closed under rotation".into(),
                ));
            }
        }
        if let Some(g) = genus {
            if g != self.genus {
                return Err(Error::InvalidTriangulation(format!(
                    "declared genus {g}, gluing gives genus {}",
                    self.genus
                )));
            }
        }
        if let Some(n) = punctures {
            if n != self.punctures.len() {
                return Err(Error::InvalidTriangulation(format!(
                    "declared {n} punctures, gluing gives {}",
                    self.punctures.len()
                )));
            }
        }
        Ok(())
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_sides.len()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge_at(&self, s: Side) -> usize {
        self.triangles[s.triangle][s.side]
    }

    pub fn partner(&self, s: Side) -> Side {
        self.partner[s.triangle][s.side]
    }

    pub fn edge_sides(&self, edge: usize) -> [Side; 2] {
        self.edge_sides[edge]
    }

    pub fn punctures(&self) -> &[Vec<Corner>] {
        &self.punctures
    }

    /// For each puncture, how many times each edge is crossed while circling it.
    pub fn puncture_incidence(&self) -> Vec<Vec<u32>> {
        self.punctures
            .iter()
            .map(|orbit| {
                let mut row = vec![0u32; self.edge_count()];
                for c in orbit {
                    row[self.triangles[c.triangle][c.corner]] += 1;
                }
                row
            })
            .collect()
    }

    /// Walks `lp` and returns the sequence of sides it exits through, or
    /// `None` if no starting side makes the loop consistent and closed.
    pub fn trace_loop(&self, lp: &CombinatorialLoop) -> Option<Vec<Side>> {
        let steps = lp.steps();
        let first = steps[0].edge;
        if first >= self.edge_count() {
            return None;
        }
        'start: for &start in &self.edge_sides[first] {
            let mut exits = Vec::with_capacity(steps.len());
            let mut current = start;
            for (i, step) in steps.iter().enumerate() {
                if self.edge_at(current) != step.edge {
                    continue 'start;
                }
                exits.push(current);
                let arrived = self.partner(current);
                let next = Side {
                    triangle: arrived.triangle,
                    side: (arrived.side + step.turn.offset()) % 3,
                };
                if i + 1 == steps.len() {
                    if next != start {
                        continue 'start;
                    }
                } else {
                    current = next;
                }
            }
            return Some(exits);
        }
        None
    }
}

fn rotate_corner(partner: &[[Side; 3]], c: Corner) -> Corner {
    // crossing side k (which starts at vertex k) lands on side j of the
    // neighbour, where vertex k is the end of side j, i.e. vertex j + 1
    let p = partner[c.triangle][c.corner];
    Corner {
        triangle: p.triangle,
        corner: (p.side + 1) % 3,
    }
}

/// Direction taken inside a triangle after entering through a side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Turn {
    /// Leave through the next side counterclockwise (`side + 1`).
    Right,
    /// Leave through `side + 2`.
    Left,
}

impl Turn {
    pub fn offset(self) -> usize {
        match self {
            Turn::Right => 1,
            Turn::Left => 2,
        }
    }

    fn from_offset(k: usize) -> Option<Turn> {
        match k % 3 {
            1 => Some(Turn::Right),
            2 => Some(Turn::Left),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopStep {
    pub edge: usize,
    pub turn: Turn,
}

/// A closed path in the dual spine: cross `edge`, then turn.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinatorialLoop {
    steps: Vec<LoopStep>,
}

impl CombinatorialLoop {
    pub fn new(steps: Vec<LoopStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::IncompatibleLoop);
        }
        Ok(CombinatorialLoop { steps })
    }

    pub fn steps(&self) -> &[LoopStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut steps = self.steps.clone();
        let n = steps.len();
        steps.rotate_left(k % n);
        CombinatorialLoop { steps }
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        // step i crosses e_i then turns t_i into e_{i+1}; backwards we cross
        // e_{i+1} then turn into e_i with the mirrored turn
        let n = self.steps.len();
        let steps = (0..n)
            .rev()
            .map(|i| {
                let next = &self.steps[(i + 1) % n];
                let turn = match self.steps[i].turn {
                    Turn::Right => Turn::Left,
                    Turn::Left => Turn::Right,
                };
                LoopStep {
                    edge: next.edge,
                    turn,
                }
            })
            .collect();
        CombinatorialLoop { steps }
    }
}

impl fmt::Display for CombinatorialLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let t = match s.turn {
                Turn::Left => 'L',
                Turn::Right => 'R',
            };
            write!(f, "{},{}", s.edge, t)?;
        }
        Ok(())
    }
}

/// One loop per puncture, circling it through its corner orbit.
pub fn puncture_loops(tri: &IdealTriangulation) -> Vec<CombinatorialLoop> {
    tri.punctures
        .iter()
        .map(|orbit| {
            let steps = orbit
                .iter()
                .map(|c| LoopStep {
                    edge: tri.triangles[c.triangle][c.corner],
                    turn: Turn::Right,
                })
                .collect();
            CombinatorialLoop { steps }
        })
        .collect()
}

/// Closed dual-spine loops with at most `n` steps, one per class up to
/// rotation and reversal, excluding proper powers and puncture loops.
/// Ordered by length, then lexicographically.
pub fn enumerate_loops(tri: &IdealTriangulation, n: usize) -> Vec<CombinatorialLoop> {
    let mut found = std::collections::BTreeSet::new();
    for len in 1..=n {
        for mask in 0u64..(1u64 << len) {
            let turns: Vec<Turn> = (0..len)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Turn::Left
                    } else {
                        Turn::Right
                    }
                })
                .collect();
            if turns.iter().all(|&t| t == turns[0]) || is_proper_power(&turns) {
                continue;
            }
            for ti in 0..tri.triangle_count() {
                for si in 0..3 {
                    let start = Side {
                        triangle: ti,
                        side: si,
                    };
                    let mut current = start;
                    let mut steps = Vec::with_capacity(len);
                    for &turn in &turns {
                        steps.push(LoopStep {
                            edge: tri.edge_at(current),
                            turn,
                        });
                        let arrived = tri.partner(current);
                        current = Side {
                            triangle: arrived.triangle,
                            side: (arrived.side + turn.offset()) % 3,
                        };
                    }
                    if current == start {
                        found.insert(canonical_loop(&CombinatorialLoop { steps }));
                    }
                }
            }
        }
    }
    let mut out: Vec<CombinatorialLoop> = found.into_iter().collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

fn is_proper_power<T: PartialEq>(xs: &[T]) -> bool {
    let n = xs.len();
    (1..n).any(|d| n % d == 0 && (0..n).all(|i| xs[i] == xs[i % d]))
}

/// Least rotation of the loop or its reverse.
pub fn canonical_loop(lp: &CombinatorialLoop) -> CombinatorialLoop {
    let rev = lp.reversed();
    (0..lp.len())
        .flat_map(|k| [lp.rotated(k), rev.rotated(k)])
        .min()
        .expect("loops are nonempty")
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An unoriented simple closed curve on the once-punctured torus, by its
/// homology class `p [e_h] + q [e_v]` up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    /// Accepts any coprime pair and returns its canonical sign.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::InvalidSlope {
                p,
                q,
                reason: "zero class",
            });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidSlope {
                p,
                q,
                reason: "entries not coprime",
            });
        }
        let (p, q) = if q < 0 || (q == 0 && p < 0) {
            (-p, -q)
        } else {
            (p, q)
        };
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn complexity(&self) -> i64 {
        self.p.abs() + self.q.abs()
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.complexity(), self.p, self.q).cmp(&(other.complexity(), other.p, other.q))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Canonical slopes with `|p| + |q| <= n`, ordered by complexity, then `p`, then `q`.
pub fn enumerate_slopes(n: usize) -> Vec<Slope> {
    let n = n as i64;
    let mut out = Vec::new();
    for c in 1..=n {
        for p in -c..=c {
            let q = c - p.abs();
            if (q > 0 || (q == 0 && p == 1)) && gcd(p, q) == 1 {
                out.push(Slope { p, q });
            }
        }
    }
    out
}

/// `|p q' - q p'|`.
pub fn geometric_intersection(s: &Slope, t: &Slope) -> i64 {
    (s.p * t.q - s.q * t.p).abs()
}

/// Generators of the free group and their inverses.
///
/// The derived order `a < b < A < B` drives canonical representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    AInv,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::AInv, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::AInv => 'A',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'A' => Some(Letter::AInv),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }
}

/// A cyclically reduced word in `F(a, b)`; capitals are inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    /// Freely and cyclically reduces `letters`.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        let (mut lo, mut hi) = (0, stack.len());
        while hi - lo >= 2 && stack[lo] == stack[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        FreeWord {
            letters: stack[lo..hi].to_vec(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                Letter::from_char(c).ok_or_else(|| Error::InvalidWord {
                    word: s.to_string(),
                    reason: "letters must be a, b, A, B",
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn power(&self, k: usize) -> Self {
        FreeWord {
            letters: self.letters.repeat(k),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let n = self.letters.len();
        (0..n).all(|i| self.letters[(i + 1) % n] != self.letters[i].inverse() || n == 1)
    }

    /// Least rotation of the word or of its inverse.
    pub fn canonical(&self) -> Self {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let inv = self.inverse();
        let mut best: Option<Vec<Letter>> = None;
        for w in [&self.letters, &inv.letters] {
            for k in 0..n {
                let mut r = w.clone();
                r.rotate_left(k);
                if best.as_ref().map_or(true, |b| r < *b) {
                    best = Some(r);
                }
            }
        }
        FreeWord {
            letters: best.unwrap(),
        }
    }
}

impl Ord for FreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.letters.len(), &self.letters).cmp(&(other.letters.len(), &other.letters))
    }
}

impl PartialOrd for FreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Christoffel word of the slope: `p` copies of `a` and `q` of `b` for
/// `p >= 0`; negative `p` uses `A` in place of `a`.
pub fn slope_word(s: &Slope) -> FreeWord {
    let p = s.p.unsigned_abs();
    let q = s.q.unsigned_abs();
    let n = p + q;
    let x = if s.p < 0 { Letter::AInv } else { Letter::A };
    let letters = (1..=n).map(|k| {
        if (k * q) / n > ((k - 1) * q) / n {
            Letter::B
        } else {
            x
        }
    });
    FreeWord {
        letters: letters.collect(),
    }
}

/// One canonical representative per conjugacy class (up to inversion) of
/// nontrivial cyclically reduced words of length at most `n`.
pub fn enumerate_conjugacy_classes(n: usize) -> Vec<FreeWord> {
    fn extend(word: &mut Vec<Letter>, target: usize, out: &mut Vec<FreeWord>) {
        if word.len() == target {
            let closes = word.len() == 1 || word[0] != word[word.len() - 1].inverse();
            if closes {
                let w = FreeWord {
                    letters: word.clone(),
                };
                if w.canonical() == w {
                    out.push(w);
                }
            }
            return;
        }
        for l in Letter::ALL {
            if word.last().map_or(false, |&prev| prev == l.inverse()) {
                continue;
            }
            word.push(l);
            extend(word, target, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    for len in 1..=n {
        extend(&mut Vec::with_capacity(len), len, &mut out);
    }
    out
}

/// Exit sides, starting and ending in triangle 0 of the standard torus, of
/// the based path representing each generator.
fn torus_letter_exits(l: Letter) -> [usize; 2] {
    match l {
        Letter::A => [1, 2],
        Letter::AInv => [2, 1],
        Letter::B => [2, 0],
        Letter::BInv => [0, 2],
    }
}

/// Sides exited by the based path of `w` on the standard torus, from triangle 0.
pub fn torus_word_exits(w: &FreeWord) -> Vec<usize> {
    w.letters()
        .iter()
        .flat_map(|&l| torus_letter_exits(l))
        .collect()
}

/// Routes a word on the standard torus to a reduced dual-spine loop.
///
/// Returns `None` for the trivial word.
pub fn torus_word_loop(
    tri: &IdealTriangulation,
    w: &FreeWord,
) -> Result<Option<CombinatorialLoop>> {
    if !tri.is_standard_torus() {
        return Err(Error::NotStandardTorus);
    }
    // stack of exited sides; a step straight back across the edge just
    // crossed cancels
    let mut stack: Vec<Side> = Vec::new();
    let mut triangle = 0;
    for side in torus_word_exits(w) {
        let exit = Side { triangle, side };
        if let Some(&top) = stack.last() {
            if tri.partner(top) == exit {
                stack.pop();
                triangle = top.triangle;
                continue;
            }
        }
        stack.push(exit);
        triangle = tri.partner(exit).triangle;
    }
    let mut lo = 0;
    let mut hi = stack.len();
    while hi - lo >= 2 && tri.partner(stack[hi - 1]) == stack[lo] {
        lo += 1;
        hi -= 1;
    }
    let exits = &stack[lo..hi];
    if exits.is_empty() {
        return Ok(None);
    }
    let n = exits.len();
    let mut steps = Vec::with_capacity(n);
    for i in 0..n {
        let arrived = tri.partner(exits[i]);
        let next = exits[(i + 1) % n];
        let turn =
            Turn::from_offset((next.side + 3 - arrived.side) % 3).ok_or(Error::IncompatibleLoop)?;
        steps.push(LoopStep {
            edge: tri.edge_at(exits[i]),
            turn,
        });
    }
    Ok(Some(CombinatorialLoop { steps }))
}
