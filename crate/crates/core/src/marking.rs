//! Marked points, the weight function Ω and the per-crossing weights.
//!
//! Points are numbered `0..m`; the outer point is always `m - 1`. On each
//! edge the points are listed in link-orientation order, so the point
//! nearest to a crossing along an edge end is the first point of the edge
//! when the end is the edge's tail and the last point otherwise.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{BlackGraph, Coloring, Dart, EdgeId, PlanarDiagram, Role};

/// Largest accepted `|Ω(j)|`; keeps every exponent in the complex small.
pub const MAX_OMEGA: i64 = 1 << 24;

/// Exhaustive genericity checks are skipped above this many crossings.
pub const MAX_EXHAUSTIVE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkingError {
    #[error("marked point {point} receives two weights (crossings {first} and {second})")]
    WeightConflict { point: usize, first: usize, second: usize },
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("omega has {got} values, diagram has {expected} crossings")]
    OmegaLength { got: usize, expected: usize },
    #[error("omega value {0} out of range (nonzero, |value| <= 2^24)")]
    OmegaOutOfRange(i64),
    #[error("omega is not generic: {witness:?} is a vanishing combination")]
    NotGeneric { witness: Vec<i8> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Marking {
    /// Point ids on each edge, in link-orientation order.
    pub per_edge: Vec<Vec<usize>>,
    pub point_edge: Vec<EdgeId>,
    pub outer_edge: EdgeId,
}

impl Marking {
    pub fn m(&self) -> usize {
        self.point_edge.len()
    }

    pub fn outer(&self) -> usize {
        self.m() - 1
    }

    /// Places `counts[e]` points on edge `e` and makes the last point of
    /// `outer_edge` (default: lowest outer edge) the outer point.
    pub fn with_counts(
        d: &PlanarDiagram,
        col: &Coloring,
        counts: &[usize],
        outer_edge: Option<EdgeId>,
    ) -> Result<Self, MarkingError> {
        if counts.len() != d.num_edges() {
            return Err(MarkingError::InvalidMarking(format!(
                "{} point counts for {} arcs",
                counts.len(),
                d.num_edges()
            )));
        }
        if let Some(e) = counts.iter().position(|&c| c == 0) {
            return Err(MarkingError::InvalidMarking(format!("arc {} carries no point", d.label(e))));
        }
        let total: usize = counts.iter().sum();
        if total > 64 {
            return Err(MarkingError::InvalidMarking(format!("{total} points exceeds the limit of 64")));
        }
        let outer_edge = match outer_edge {
            Some(e) if e >= d.num_edges() || !col.is_outer_edge(d, e) => {
                return Err(MarkingError::InvalidMarking(format!(
                    "outer arc {} does not border the unbounded face",
                    d.labels().get(e).copied().unwrap_or(0)
                )));
            }
            Some(e) => e,
            None => (0..d.num_edges())
                .find(|&e| col.is_outer_edge(d, e))
                .ok_or_else(|| MarkingError::InvalidMarking("no arc borders the unbounded face".into()))?,
        };

        let outer_slot = counts[outer_edge] - 1;
        let mut per_edge = Vec::with_capacity(counts.len());
        let mut point_edge = Vec::with_capacity(total);
        for (e, &c) in counts.iter().enumerate() {
            let mut pts = Vec::with_capacity(c);
            for k in 0..c {
                if e == outer_edge && k == outer_slot {
                    pts.push(usize::MAX);
                } else {
                    pts.push(point_edge.len());
                    point_edge.push(e);
                }
            }
            per_edge.push(pts);
        }
        let outer = point_edge.len();
        point_edge.push(outer_edge);
        per_edge[outer_edge][outer_slot] = outer;
        Ok(Self { per_edge, point_edge, outer_edge })
    }

    /// Nearest point to the crossing along the edge end `dart`.
    pub fn nearest(&self, d: &PlanarDiagram, dart: Dart) -> usize {
        let e = d.edge_at(dart);
        let pts = &self.per_edge[e];
        if d.tail(e) == dart {
            pts[0]
        } else {
            pts[pts.len() - 1]
        }
    }
}

/// Optional user marking: point counts by PD arc label, plus the outer arc.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingSpec {
    #[serde(default)]
    pub points_per_arc: BTreeMap<u64, usize>,
    #[serde(default)]
    pub outer_arc: Option<u64>,
}

impl MarkingSpec {
    pub fn from_json(text: &str) -> Result<Self, MarkingError> {
        serde_json::from_str(text).map_err(|e| MarkingError::InvalidMarking(e.to_string()))
    }

    /// Arcs not listed get the automatic count.
    pub fn apply(&self, d: &PlanarDiagram, col: &Coloring) -> Result<Marking, MarkingError> {
        let mut counts = auto_counts(d);
        for (&label, &c) in &self.points_per_arc {
            let e = d
                .edge_by_label(label)
                .ok_or_else(|| MarkingError::InvalidMarking(format!("unknown arc {label}")))?;
            counts[e] = c;
        }
        let outer = match self.outer_arc {
            Some(label) => Some(
                d.edge_by_label(label)
                    .ok_or_else(|| MarkingError::InvalidMarking(format!("unknown outer arc {label}")))?,
            ),
            None => None,
        };
        Marking::with_counts(d, col, &counts, outer)
    }
}

fn is_loop_edge(d: &PlanarDiagram, e: EdgeId) -> bool {
    d.tail(e).crossing == d.head(e).crossing
}

fn auto_counts(d: &PlanarDiagram) -> Vec<usize> {
    (0..d.num_edges()).map(|e| if is_loop_edge(d, e) { 2 } else { 1 }).collect()
}

/// One point per arc, two on arcs that start and end at the same crossing.
pub fn auto_mark(d: &PlanarDiagram, col: &Coloring) -> Marking {
    Marking::with_counts(d, col, &auto_counts(d), None).expect("automatic marking is valid")
}

/// `k` points on every arc.
pub fn uniform_mark(d: &PlanarDiagram, col: &Coloring, k: usize) -> Result<Marking, MarkingError> {
    Marking::with_counts(d, col, &vec![k; d.num_edges()], None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Genericity {
    Verified,
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaAssignment {
    pub values: Vec<i64>,
    pub mode: Genericity,
}

impl OmegaAssignment {
    /// Validates range and length, then checks genericity.
    pub fn new(values: Vec<i64>, n: usize, exhaustive: bool) -> Result<Self, MarkingError> {
        if values.len() != n {
            return Err(MarkingError::OmegaLength { got: values.len(), expected: n });
        }
        if let Some(&v) = values.iter().find(|v| **v == 0 || v.abs() > MAX_OMEGA) {
            return Err(MarkingError::OmegaOutOfRange(v));
        }
        let mode = check_generic(&values, exhaustive)?;
        Ok(Self { values, mode })
    }
}

/// `Ω(j) = 2^j` for `j = 1..n`.
pub fn default_omega(n: usize) -> OmegaAssignment {
    OmegaAssignment { values: (1..=n).map(|j| 1i64 << j.min(62)).collect(), mode: Genericity::Verified }
}

/// No nontrivial `{-1,0,1}` combination of `values` vanishes exactly when all
/// `2^n` subset sums are distinct; a collision between subsets `S < S'`
/// gives the witness `1_S - 1_S'`.
pub fn check_generic(values: &[i64], exhaustive: bool) -> Result<Genericity, MarkingError> {
    let n = values.len();
    if !exhaustive || n > MAX_EXHAUSTIVE {
        return Ok(Genericity::Assumed);
    }
    let mut sums = vec![0i128; 1 << n];
    let mut first: HashMap<i128, usize> = HashMap::with_capacity(1 << n);
    first.insert(0, 0);
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + values[low] as i128;
        if let Some(&prev) = first.get(&sums[mask]) {
            let mut witness: Vec<i8> = (0..n)
                .map(|i| ((prev >> i) & 1) as i8 - ((mask >> i) & 1) as i8)
                .collect();
            if witness.iter().find(|&&w| w != 0) == Some(&-1) {
                witness.iter_mut().for_each(|w| *w = -*w);
            }
            return Err(MarkingError::NotGeneric { witness });
        }
        first.insert(sums[mask], mask);
    }
    Ok(Genericity::Verified)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightTable {
    pub r: Vec<i64>,
    /// Nearest points on the `i1` and `i3` ends of each crossing.
    pub special: Vec<[usize; 2]>,
    /// Nearest points on the `i2` (+Ω) and `i4` (−Ω) ends of each crossing.
    pub weighted: Vec<[usize; 2]>,
}

pub fn assign_weights(
    d: &PlanarDiagram,
    mk: &Marking,
    bg: &BlackGraph,
    om: &OmegaAssignment,
) -> Result<WeightTable, MarkingError> {
    let n = d.n();
    if om.values.len() != n {
        return Err(MarkingError::OmegaLength { got: om.values.len(), expected: n });
    }
    let m = mk.m();
    let mut r = vec![0i64; m];
    // the crossing that claimed each point as weighted or special
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut special = Vec::with_capacity(n);
    let mut weighted = Vec::with_capacity(n);
    let mut claim = |p: usize, j: usize| match owner[p] {
        Some(prev) => Err(MarkingError::WeightConflict { point: p, first: prev, second: j }),
        None => {
            owner[p] = Some(j);
            Ok(())
        }
    };
    for (j, be) in bg.edges.iter().enumerate() {
        let near = |role| mk.nearest(d, be.role_dart(role));
        let (p2, p4) = (near(Role::I2), near(Role::I4));
        claim(p2, j)?;
        claim(p4, j)?;
        r[p2] = om.values[j];
        r[p4] = -om.values[j];
        weighted.push([p2, p4]);
        special.push([near(Role::I1), near(Role::I3)]);
    }
    for (j, s) in special.iter().enumerate() {
        if s[0] == s[1] || weighted[j].contains(&s[0]) || weighted[j].contains(&s[1]) {
            let p = if weighted[j].contains(&s[1]) { s[1] } else { s[0] };
            return Err(MarkingError::WeightConflict { point: p, first: j, second: j });
        }
    }
    Ok(WeightTable { r, special, weighted })
}
