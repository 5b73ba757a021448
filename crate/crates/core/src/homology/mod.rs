//! Graded homology of the spanning-tree complex and the invariants read
//! off from it.

mod rank;

pub use rank::{
    clear_column, rank_dense, rank_exact, rank_fraction_free, rank_modular, rank_residue, rank_sparse_of_dense, PolyRow,
};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{grading_label, ChainComplex};
use crate::diagram::SignData;
use crate::exactfield::{RationalFn, ResidueField, MODULI};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("homology rank {rank} at grading {grading} is not divisible by 2^{shift}")]
    NotDivisible { grading: String, rank: usize, shift: usize },
    #[error("negative homology dimension at grading {0}")]
    NegativeDimension(String),
}

/// Per-grading data, keyed by doubled grading.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GradedRanks {
    pub chain: BTreeMap<i64, usize>,
    /// Rank of the map out of each grading.
    pub boundary_out: BTreeMap<i64, usize>,
    pub homology: BTreeMap<i64, usize>,
    /// How each nonzero block rank was obtained.
    pub methods: BTreeMap<i64, RankMethod>,
}

impl GradedRanks {
    pub fn total(&self) -> usize {
        self.homology.values().sum()
    }
}

/// One connected component of a differential block, column-major.
#[derive(Debug, Clone)]
pub struct BlockComponent {
    pub cols: Vec<Vec<(usize, RationalFn)>>,
    pub nrows: usize,
}

impl BlockComponent {
    pub fn size_bound(&self) -> usize {
        self.cols.len().min(self.nrows)
    }
}

/// The map from grading `g2` to `g2 + 2`, split into connected components
/// of the tree-pair graph.
pub fn block_components(cx: &ChainComplex, g2: i64) -> Vec<BlockComponent> {
    let tiles: Vec<usize> = (0..cx.tiles.len()).filter(|&i| cx.grading2(cx.tiles[i].source) == g2).collect();
    if tiles.is_empty() {
        return Vec::new();
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            x
        } else {
            let r = find(parent, p);
            parent.insert(x, r);
            r
        }
    }
    for &i in &tiles {
        let (a, b) = (find(&mut parent, cx.tiles[i].source), find(&mut parent, cx.tiles[i].target));
        if a != b {
            parent.insert(a, b);
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &tiles {
        let root = find(&mut parent, cx.tiles[i].source);
        comps.entry(root).or_default().push(i);
    }
    let dim = cx.piece_dim();
    comps
        .into_values()
        .map(|ts| {
            let mut sources: Vec<usize> = ts.iter().map(|&i| cx.tiles[i].source).collect();
            let mut targets: Vec<usize> = ts.iter().map(|&i| cx.tiles[i].target).collect();
            sources.sort_unstable();
            sources.dedup();
            targets.sort_unstable();
            targets.dedup();
            let row_block: HashMap<usize, usize> = targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
            let mut cols = Vec::with_capacity(sources.len() * dim);
            for &s in &sources {
                let mine: Vec<usize> = ts.iter().copied().filter(|&i| cx.tiles[i].source == s).collect();
                for x in 0..dim {
                    let mut col = Vec::new();
                    for &i in &mine {
                        let base = row_block[&cx.tiles[i].target] * dim;
                        col.extend(cx.tiles[i].cols[x].iter().map(|(y, c)| (base + *y as usize, c.clone())));
                    }
                    cols.push(col);
                }
            }
            BlockComponent { cols, nrows: targets.len() * dim }
        })
        .collect()
}

/// A rank lower bound from residue fields; `None` only if every modulus
/// divides some denominator.
fn modular_rank(c: &BlockComponent) -> Option<usize> {
    (0..MODULI.len()).find_map(|k| rank_modular(&c.cols, c.nrows, &ResidueField::standard(k)))
}

/// Exact rank of the differential out of doubled grading `g2` by
/// fraction-free elimination.
pub fn block_rank(cx: &ChainComplex, g2: i64) -> usize {
    block_components(cx, g2).par_iter().map(|c| rank_exact(&c.cols, c.nrows)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Residue-field rank met an upper bound.
    Certified,
    /// Fraction-free elimination over `GF(2)[T]`.
    FractionFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankStrategy {
    /// Residue-field lower bounds, certified against upper bounds, with
    /// fraction-free elimination where certification fails. The bounds
    /// coming from `∂² = 0` are used only when `d_squared_verified` is set.
    #[default]
    Auto,
    /// Fraction-free elimination everywhere.
    FractionFree,
}

/// Ranks of all blocks. Upper bounds: matrix shape, and, when `∂² = 0` is
/// known, `rank(∂_g) <= dim(g) - rank(∂_{g-2})` and
/// `rank(∂_g) <= dim(g+2) - rank(∂_{g+2})`.
fn block_ranks(
    cx: &ChainComplex,
    chain: &BTreeMap<i64, usize>,
    strategy: RankStrategy,
    d_squared_verified: bool,
) -> BTreeMap<i64, (usize, RankMethod)> {
    let blocks: BTreeMap<i64, Vec<BlockComponent>> =
        chain.keys().map(|&g| (g, block_components(cx, g))).filter(|(_, c)| !c.is_empty()).collect();
    let mut exact: BTreeMap<i64, (usize, RankMethod)> = BTreeMap::new();
    if strategy == RankStrategy::FractionFree {
        for (&g, comps) in &blocks {
            exact.insert(g, (comps.par_iter().map(|c| rank_exact(&c.cols, c.nrows)).sum(), RankMethod::FractionFree));
        }
        return exact;
    }
    let mut lower: BTreeMap<i64, usize> = BTreeMap::new();
    let mut shape: BTreeMap<i64, usize> = BTreeMap::new();
    for (&g, comps) in &blocks {
        let lo: Vec<Option<usize>> = comps.par_iter().map(modular_rank).collect();
        lower.insert(g, lo.iter().map(|x| x.unwrap_or(0)).sum());
        shape.insert(g, comps.iter().map(BlockComponent::size_bound).sum());
    }
    let known = |g: i64, exact: &BTreeMap<i64, (usize, RankMethod)>, lower: &BTreeMap<i64, usize>| {
        exact.get(&g).map(|e| e.0).or_else(|| lower.get(&g).copied()).unwrap_or(0)
    };
    loop {
        let mut progress = true;
        while progress {
            progress = false;
            for &g in blocks.keys() {
                if exact.contains_key(&g) {
                    continue;
                }
                let dim = |h: i64| chain.get(&h).copied().unwrap_or(0);
                let mut ub = shape[&g];
                if d_squared_verified {
                    ub = ub
                        .min(dim(g).saturating_sub(known(g - 2, &exact, &lower)))
                        .min(dim(g + 2).saturating_sub(known(g + 2, &exact, &lower)));
                }
                if lower[&g] == ub {
                    exact.insert(g, (ub, RankMethod::Certified));
                    progress = true;
                }
            }
        }
        // smallest uncertified block goes through exact elimination
        let Some((&g, comps)) = blocks
            .iter()
            .filter(|(g, _)| !exact.contains_key(g))
            .min_by_key(|(_, c)| c.iter().map(|b| b.cols.len() * b.nrows).sum::<usize>())
        else {
            break;
        };
        log::debug!("rank of block at grading {} not certified; eliminating exactly", grading_label(g));
        let r = comps.par_iter().map(|c| rank_exact(&c.cols, c.nrows)).sum();
        exact.insert(g, (r, RankMethod::FractionFree));
    }
    exact
}

/// Verifies `∂² = 0` and computes homology with the default strategy.
pub fn graded_homology(cx: &ChainComplex) -> Result<GradedRanks, HomologyError> {
    let verified = crate::complex::verify_d_squared(cx);
    graded_homology_with(cx, RankStrategy::Auto, verified)
}

pub fn graded_homology_with(
    cx: &ChainComplex,
    strategy: RankStrategy,
    d_squared_verified: bool,
) -> Result<GradedRanks, HomologyError> {
    let chain = cx.chain_dims();
    let ranks = block_ranks(cx, &chain, strategy, d_squared_verified);
    let boundary_out: BTreeMap<i64, usize> =
        chain.keys().map(|&g| (g, ranks.get(&g).map_or(0, |r| r.0))).collect();
    let methods = ranks.iter().map(|(&g, r)| (g, r.1)).collect();
    let mut homology = BTreeMap::new();
    for (&g, &dim) in &chain {
        let out = boundary_out[&g];
        let inc = boundary_out.get(&(g - 2)).copied().unwrap_or(0);
        let h = dim
            .checked_sub(out + inc)
            .ok_or_else(|| HomologyError::NegativeDimension(grading_label(g)))?;
        homology.insert(g, h);
    }
    Ok(GradedRanks { chain, boundary_out, homology, methods })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    /// Normalized ranks by doubled δ-grading (nonzero entries only).
    pub ranks: BTreeMap<i64, usize>,
    pub total_rank: usize,
    pub width: Option<i64>,
    pub thin: bool,
    /// Doubled grading of the support when the homology is thin.
    pub supported_grading: Option<i64>,
    pub trees: usize,
    pub m: usize,
    pub n: usize,
    pub components: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

/// Divides by `2^{m - |L|}` and derives width and thinness.
pub fn normalize_and_report(
    gr: &GradedRanks,
    signs: &SignData,
    m: usize,
    trees: usize,
) -> Result<InvariantReport, HomologyError> {
    let shift = m - signs.components;
    let mut ranks = BTreeMap::new();
    for (&g, &h) in &gr.homology {
        if h % (1 << shift) != 0 {
            return Err(HomologyError::NotDivisible { grading: grading_label(g), rank: h, shift });
        }
        if h > 0 {
            ranks.insert(g, h >> shift);
        }
    }
    let total_rank = ranks.values().sum();
    let width = match (ranks.keys().next(), ranks.keys().next_back()) {
        (Some(lo), Some(hi)) => Some(1 + (hi - lo) / 2),
        _ => None,
    };
    let thin = width == Some(1);
    Ok(InvariantReport {
        supported_grading: if thin { ranks.keys().next().copied() } else { None },
        ranks,
        total_rank,
        width,
        thin,
        trees,
        m,
        n: signs.n_plus + signs.n_minus,
        components: signs.components,
        n_plus: signs.n_plus,
        n_minus: signs.n_minus,
    })
}
