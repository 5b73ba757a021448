//! Connected resolutions, their marked-point orders and the data attached
//! to double successor pairs.
//!
//! Resolutions are bit masks over crossings. Bit 1 pairs slots `0-1` and
//! `2-3`, bit 0 pairs `1-2` and `3-0`; with slot 0 the incoming
//! under-strand this makes bit 1 the oriented smoothing at a positive
//! crossing and bit 0 the oriented one at a negative crossing.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{BlackGraph, Coloring, Dart, PlanarDiagram};
use crate::marking::{Marking, WeightTable};

/// Resolutions are stored as `u64` masks.
pub const MAX_RESOLUTION_CROSSINGS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("{0} crossings exceeds the supported maximum of 64")]
    TooManyCrossings(usize),
    #[error("resolution {bits:#b} does not trace a single circle through all arcs")]
    NotSingleCircle { bits: u64 },
    #[error("weights B+C or C+D vanish for crossings {j1} and {j2}; omega is not generic")]
    NonGenericWeights { j1: usize, j2: usize },
    #[error("special points of crossings {j1} and {j2} do not interleave along the circle")]
    InterleavingViolation { j1: usize, j2: usize },
}

/// Whether smoothing crossing `j` with `bit` merges its two black quadrants.
pub fn joins_black(col: &Coloring, j: usize, bit: bool) -> bool {
    // bit 0 joins q0/q2, bit 1 joins q1/q3
    (col.black_parity(j) == 1) == bit
}

/// The bit at crossing `j` that puts `e_j` in `γ_I`.
pub fn tree_bit(col: &Coloring, j: usize) -> bool {
    col.black_parity(j) == 1
}

fn join_mask(col: &Coloring, n: usize) -> u64 {
    (0..n).filter(|&j| tree_bit(col, j)).fold(0, |acc, j| acc | 1 << j)
}

/// `γ_I` as an edge mask.
pub fn tree_edges(col: &Coloring, n: usize, bits: u64) -> u64 {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    !(bits ^ join_mask(col, n)) & full
}

/// Resolution bits for the subgraph with edge mask `edges`.
pub fn bits_of_edges(col: &Coloring, n: usize, edges: u64) -> u64 {
    tree_edges(col, n, edges)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Spanning trees of the black graph as edge masks (loops are never used).
pub fn spanning_trees(bg: &BlackGraph) -> Vec<u64> {
    let v = bg.num_vertices();
    let edges: Vec<(usize, usize)> = bg.edges.iter().map(|e| (e.tail, e.head)).collect();
    let mut out = Vec::new();
    // parent arrays are copied per branch; graphs here are small
    fn rec(
        k: usize,
        edges: &[(usize, usize)],
        uf: &UnionFind,
        need: usize,
        mask: u64,
        out: &mut Vec<u64>,
    ) {
        if need == 0 {
            out.push(mask);
            return;
        }
        if edges.len() - k < need {
            return;
        }
        let (a, b) = edges[k];
        let mut with = UnionFind { parent: uf.parent.clone() };
        let (ra, rb) = (with.find(a), with.find(b));
        if ra != rb {
            with.parent[ra] = rb;
            rec(k + 1, edges, &with, need - 1, mask | 1 << k, out);
        }
        // skip edge k only if the rest can still connect the graph
        let mut probe = UnionFind { parent: uf.parent.clone() };
        let mut comps = need + 1;
        for &(x, y) in &edges[k + 1..] {
            let (rx, ry) = (probe.find(x), probe.find(y));
            if rx != ry {
                probe.parent[rx] = ry;
                comps -= 1;
            }
        }
        if comps == 1 {
            rec(k + 1, edges, uf, need, mask, out);
        }
    }
    rec(0, &edges, &UnionFind::new(v), v - 1, 0, &mut out);
    out
}

/// Connected resolutions in increasing mask order.
pub fn enumerate_trees(col: &Coloring, bg: &BlackGraph) -> Result<Vec<u64>, ResolutionError> {
    let n = bg.edges.len();
    if n > MAX_RESOLUTION_CROSSINGS {
        return Err(ResolutionError::TooManyCrossings(n));
    }
    let mut bits: Vec<u64> = spanning_trees(bg).into_iter().map(|t| bits_of_edges(col, n, t)).collect();
    bits.sort_unstable();
    Ok(bits)
}

/// Exhaustive oracle: every subset of `V - 1` non-loop edges without a cycle.
pub fn enumerate_trees_brute(col: &Coloring, bg: &BlackGraph) -> Vec<u64> {
    let n = bg.edges.len();
    assert!(n <= 20, "brute-force enumeration is limited to 20 crossings");
    let v = bg.num_vertices();
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        if mask.count_ones() as usize != v - 1 {
            continue;
        }
        let mut uf = UnionFind::new(v);
        let acyclic = (0..n).filter(|j| mask >> j & 1 == 1).all(|j| {
            let (a, b) = (uf.find(bg.edges[j].tail), uf.find(bg.edges[j].head));
            uf.parent[a] = b;
            a != b
        });
        if acyclic {
            out.push(bits_of_edges(col, n, mask));
        }
    }
    out.sort_unstable();
    out
}

/// Kirchhoff's count: a principal cofactor of the Laplacian, by Bareiss
/// elimination over the integers.
pub fn matrix_tree_count(bg: &BlackGraph) -> i128 {
    let v = bg.num_vertices();
    if v <= 1 {
        return 1;
    }
    let k = v - 1;
    let mut a = vec![vec![0i128; k]; k];
    for e in bg.edges.iter().filter(|e| !e.is_loop()) {
        for (x, y) in [(e.tail, e.head), (e.head, e.tail)] {
            if x < k {
                a[x][x] += 1;
                if y < k {
                    a[x][y] -= 1;
                }
            }
        }
    }
    let mut prev = 1i128;
    let mut sign = 1i128;
    for i in 0..k {
        if a[i][i] == 0 {
            match (i + 1..k).find(|&r| a[r][i] != 0) {
                Some(r) => {
                    a.swap(i, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev;
            }
            a[r][i] = 0;
        }
        prev = a[i][i];
    }
    sign * a[k - 1][k - 1]
}

/// A connected resolution with its circle order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeResolution {
    pub bits: u64,
    /// Number of 1-smoothings, `|I|`.
    pub ones: usize,
    /// `sigma[k]` is the point at rank `k + 1`; the outer point is last.
    pub sigma: Vec<usize>,
    pub rank_of: Vec<usize>,
    /// `W(p)`: sum of weights up to and including `p` along the circle.
    pub cumweight: Vec<i64>,
}

impl TreeResolution {
    /// Doubled grading `|I| - n_-`.
    pub fn grading2(&self, n_minus: usize) -> i64 {
        self.ones as i64 - n_minus as i64
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }
}

/// The slot paired with `slot` by the smoothing `bit`.
fn smoothing_partner(slot: usize, bit: bool) -> usize {
    if bit {
        slot ^ 1
    } else {
        match slot {
            0 => 3,
            3 => 0,
            1 => 2,
            _ => 1,
        }
    }
}

/// Traces `D_I` with black on the left, starting just after the outer point.
pub fn trace_resolution(
    d: &PlanarDiagram,
    col: &Coloring,
    mk: &Marking,
    wt: &WeightTable,
    bits: u64,
) -> Result<TreeResolution, ResolutionError> {
    let ne = d.num_edges();
    let m = mk.m();
    let mut order = Vec::with_capacity(m);
    let mut seen = vec![false; ne];
    let start = mk.outer_edge;
    let mut e = start;
    let mut steps = 0;
    loop {
        if seen[e] {
            break;
        }
        seen[e] = true;
        steps += 1;
        let tail: Dart = col.black_left_tail(d, e);
        let pts = &mk.per_edge[e];
        if tail == d.tail(e) {
            order.extend(pts.iter().copied());
        } else {
            order.extend(pts.iter().rev().copied());
        }
        let head = d.opposite(tail);
        let bit = bits >> head.crossing & 1 == 1;
        let next = Dart::new(head.crossing, smoothing_partner(head.slot, bit));
        e = d.edge_at(next);
        if col.black_left_tail(d, e) != next {
            return Err(ResolutionError::NotSingleCircle { bits });
        }
    }
    if e != start || steps != ne {
        return Err(ResolutionError::NotSingleCircle { bits });
    }
    let pos = order.iter().position(|&p| p == mk.outer()).expect("outer point on its edge");
    order.rotate_left(pos + 1);

    let mut rank_of = vec![0; m];
    let mut cumweight = vec![0; m];
    let mut acc = 0;
    for (k, &p) in order.iter().enumerate() {
        rank_of[p] = k;
        acc += wt.r[p];
        cumweight[p] = acc;
    }
    debug_assert_eq!(acc, 0);
    Ok(TreeResolution { bits, ones: bits.count_ones() as usize, sigma: order, rank_of, cumweight })
}

pub fn trace_all(
    d: &PlanarDiagram,
    col: &Coloring,
    mk: &Marking,
    wt: &WeightTable,
    trees: &[u64],
) -> Result<Vec<TreeResolution>, ResolutionError> {
    trees.par_iter().map(|&b| trace_resolution(d, col, mk, wt, b)).collect()
}

/// A double successor `I -> I''` with the segment data of its differential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuccessorPair {
    /// Indices into the tree list.
    pub source: usize,
    pub target: usize,
    /// `j1` owns the special ranks `a, c`; `j2` owns `b, d`.
    pub j1: usize,
    pub j2: usize,
    /// Ranks of the special points `a, b, c, d` along `σ_I`, counted from 1.
    /// Increasing, except that the outer rank `m` comes first when the
    /// outer point is special.
    pub ranks: [usize; 4],
    pub nu: bool,
    /// Segment weights `A, B, C, D`.
    pub segments: [i64; 4],
    /// Added to every cumulative weight `W` when the labeling starts at
    /// the outer point (its weight `r_m`), otherwise 0.
    pub w_shift: i64,
}

/// All double successor pairs, ordered by source then target.
pub fn double_successors(
    col: &Coloring,
    wt: &WeightTable,
    trees: &[TreeResolution],
) -> Result<Vec<SuccessorPair>, ResolutionError> {
    let index: HashMap<u64, usize> = trees.iter().enumerate().map(|(i, t)| (t.bits, i)).collect();
    let n = wt.special.len();
    let mut out = Vec::new();
    for (si, src) in trees.iter().enumerate() {
        let zeros: Vec<usize> = (0..n).filter(|&j| !src.bit(j)).collect();
        for (x, &ja) in zeros.iter().enumerate() {
            for &jb in &zeros[x + 1..] {
                let Some(&ti) = index.get(&(src.bits | 1 << ja | 1 << jb)) else {
                    continue;
                };
                out.push(pair_data(col, wt, src, si, ti, ja, jb)?);
            }
        }
    }
    out.sort_by_key(|p| (p.source, p.target));
    Ok(out)
}

fn pair_data(
    col: &Coloring,
    wt: &WeightTable,
    src: &TreeResolution,
    source: usize,
    target: usize,
    ja: usize,
    jb: usize,
) -> Result<SuccessorPair, ResolutionError> {
    let m = src.sigma.len();
    let ranks_of = |j: usize| wt.special[j].map(|p| src.rank_of[p] + 1);
    // When the outer point is itself special, the labeling starts at it
    // instead of ending there.
    let outer_first = ranks_of(ja).contains(&m) || ranks_of(jb).contains(&m);
    let position = |r: usize| if outer_first { r % m } else { r };
    let mut all: Vec<(usize, usize, usize)> = ranks_of(ja)
        .into_iter()
        .map(|r| (position(r), r, ja))
        .chain(ranks_of(jb).into_iter().map(|r| (position(r), r, jb)))
        .collect();
    all.sort_unstable();
    let (j1, j2) = (all[0].2, all[1].2);
    if j1 == j2 || all[2].2 != j1 || all[3].2 != j2 {
        return Err(ResolutionError::InterleavingViolation { j1: ja, j2: jb });
    }
    let ranks = [all[0].1, all[1].1, all[2].1, all[3].1];
    let w_shift = if outer_first { -src.cumweight[src.sigma[m - 2]] } else { 0 };
    let w = |rank: usize| src.cumweight[src.sigma[rank - 1]] + w_shift;
    let segments = [w(ranks[0]), w(ranks[1]) - w(ranks[0]), w(ranks[2]) - w(ranks[1]), w(ranks[3]) - w(ranks[2])];
    let [_, b, c, dd] = segments;
    if b + c == 0 || c + dd == 0 {
        return Err(ResolutionError::NonGenericWeights { j1, j2 });
    }
    // flipping j1 alone adds e_j1 exactly when the 1-smoothing joins black
    let nu = tree_bit(col, j1);
    Ok(SuccessorPair { source, target, j1, j2, ranks, nu, segments, w_shift })
}
