//! The spanning-tree complex: one exterior algebra per connected
//! resolution, joined by the maps of double successor pairs.
//!
//! Each tree contributes the basis `{y_S : S ⊆ {0..m-2}}` (the outer point
//! `m - 1` is eliminated through the tree's relation), so every chain
//! group is a direct sum of `2^{m-1}`-dimensional pieces indexed by mask.
//! Gradings are stored doubled: tree `I` sits at `|I| - n_-`.

mod differential;

pub use differential::{eliminate_ym, ext_wedge, ExtVec, PairMap, Scalars};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactfield::RationalFn;
use crate::resolutions::{SuccessorPair, TreeResolution};

/// Each tree carries `2^{m-1}` generators; larger markings are refused.
pub const MAX_POINTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("a differential denominator 1 + T^0 vanishes; omega is not generic")]
    NonGenericWeights,
    #[error("{0} marked points exceeds the supported maximum of 24")]
    TooManyPoints(usize),
}

/// `d_{I,I''}` as a sparse matrix: `cols[x]` lists `(target mask, coefficient)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub pair: usize,
    pub source: usize,
    pub target: usize,
    pub cols: Vec<Vec<(u64, RationalFn)>>,
}

impl Tile {
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub m: usize,
    pub n_minus: usize,
    pub trees: Vec<TreeResolution>,
    pub pairs: Vec<SuccessorPair>,
    pub tiles: Vec<Tile>,
}

/// `"k"` for even doubled gradings, `"k/2"` otherwise.
pub fn grading_label(g2: i64) -> String {
    if g2 % 2 == 0 {
        (g2 / 2).to_string()
    } else {
        format!("{g2}/2")
    }
}

impl ChainComplex {
    pub fn piece_dim(&self) -> usize {
        1 << (self.m - 1)
    }

    pub fn grading2(&self, tree: usize) -> i64 {
        self.trees[tree].grading2(self.n_minus)
    }

    /// Trees at each doubled grading.
    pub fn trees_by_grading(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for t in 0..self.trees.len() {
            out.entry(self.grading2(t)).or_default().push(t);
        }
        out
    }

    pub fn chain_dims(&self) -> BTreeMap<i64, usize> {
        self.trees_by_grading().into_iter().map(|(g, ts)| (g, ts.len() * self.piece_dim())).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.trees.len() * self.piece_dim()
    }

    /// Tiles leaving each tree.
    pub fn tiles_from(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.trees.len()];
        for (i, t) in self.tiles.iter().enumerate() {
            out[t.source].push(i);
        }
        out
    }

    pub fn dump(&self) -> ComplexDump {
        let gradings = self
            .chain_dims()
            .into_iter()
            .map(|(g, dim)| GradingDump { grading: grading_label(g), dim, trees: self.trees_by_grading()[&g].clone() })
            .collect();
        let blocks = self
            .tiles
            .iter()
            .map(|t| BlockDump {
                source_tree: t.source,
                target_tree: t.target,
                entries: t
                    .cols
                    .iter()
                    .enumerate()
                    .flat_map(|(x, col)| col.iter().map(move |(y, c)| (*y, x as u64, c.to_string())))
                    .collect(),
            })
            .collect();
        ComplexDump { m: self.m, piece_dim: self.piece_dim(), gradings, blocks }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradingDump {
    pub grading: String,
    pub dim: usize,
    pub trees: Vec<usize>,
}

/// Entries are `(row mask, column mask, coefficient)`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockDump {
    pub source_tree: usize,
    pub target_tree: usize,
    pub entries: Vec<(u64, u64, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexDump {
    pub m: usize,
    pub piece_dim: usize,
    pub gradings: Vec<GradingDump>,
    pub blocks: Vec<BlockDump>,
}

/// Builds the tile of one pair.
pub fn d_pair(
    pair_index: usize,
    pair: &SuccessorPair,
    trees: &[TreeResolution],
    nu_override: Option<bool>,
) -> Result<Tile, ComplexError> {
    let src = &trees[pair.source];
    let pm = PairMap::new(pair, src, &trees[pair.target], nu_override)?;
    let dim = 1u64 << (src.sigma.len() - 1);
    let cols = (0..dim).into_par_iter().map(|x| pm.column(x)).collect();
    Ok(Tile { pair: pair_index, source: pair.source, target: pair.target, cols })
}

pub fn build_complex(
    trees: Vec<TreeResolution>,
    pairs: Vec<SuccessorPair>,
    n_minus: usize,
) -> Result<ChainComplex, ComplexError> {
    let m = trees.first().map_or(1, |t| t.sigma.len());
    if m > MAX_POINTS {
        return Err(ComplexError::TooManyPoints(m));
    }
    let tiles = pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| d_pair(i, p, &trees, None))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChainComplex { m, n_minus, trees, pairs, tiles })
}

/// `∂∘∂ = 0`: for every source tree and every tree two steps up, the sum
/// over middle trees of the composed tiles vanishes.
pub fn verify_d_squared(cx: &ChainComplex) -> bool {
    d_squared_failures(cx).is_empty()
}

/// `(source tree, target tree)` pairs where `∂∘∂` is nonzero.
pub fn d_squared_failures(cx: &ChainComplex) -> Vec<(usize, usize)> {
    let from = cx.tiles_from();
    let dim = cx.piece_dim();
    let mut failures: Vec<(usize, usize)> = (0..cx.trees.len())
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut bad = Vec::new();
            let mut by_target: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
            for &t1 in &from[s] {
                for &t2 in &from[cx.tiles[t1].target] {
                    by_target.entry(cx.tiles[t2].target).or_default().push((t1, t2));
                }
            }
            for (u, chains) in by_target {
                let nonzero = (0..dim).any(|x| {
                    let mut acc = ExtVec::new();
                    for &(t1, t2) in &chains {
                        for (y, c1) in &cx.tiles[t1].cols[x] {
                            for (z, c2) in &cx.tiles[t2].cols[*y as usize] {
                                differential::ext_add(&mut acc, *z, c1.mul_ref(c2));
                            }
                        }
                    }
                    !acc.is_empty()
                });
                if nonzero {
                    bad.push((s, u));
                }
            }
            bad
        })
        .collect();
    failures.sort_unstable();
    failures
}

/// Every tile kills the relation of its source: `d(R_I ∧ x) = 0` for all `x`.
pub fn check_well_defined(cx: &ChainComplex) -> bool {
    cx.pairs.par_iter().all(|p| {
        let pm = match PairMap::new(p, &cx.trees[p.source], &cx.trees[p.target], None) {
            Ok(pm) => pm,
            Err(_) => return false,
        };
        (0..cx.piece_dim() as u64).all(|x| pm.relation_image(x).is_empty())
    })
}

/// Toggling `ν` rescales each tile by `T^{±C}`.
pub fn check_nu_law(cx: &ChainComplex) -> bool {
    cx.pairs.par_iter().enumerate().all(|(i, p)| {
        let Ok(flipped) = d_pair(i, p, &cx.trees, Some(!p.nu)) else {
            return false;
        };
        let c = p.segments[2];
        let k = if p.nu { -c } else { c };
        cx.tiles[i].cols.iter().zip(&flipped.cols).all(|(a, b)| {
            a.len() == b.len() && a.iter().zip(b).all(|((ya, ca), (yb, cb))| ya == yb && ca.mul_tpow(k) == *cb)
        })
    })
}
