//! Oriented planar link diagrams: PD ingestion, faces, checkerboard
//! coloring, the black graph and crossing signs.
//!
//! Conventions used throughout the crate:
//!
//! * A crossing lists its four incident edges counterclockwise starting at
//!   the incoming under-strand (Knot Atlas). Slot `s` of crossing `x` is the
//!   [`Dart`] `(x, s)`; slot 0 is under-in, slot 2 under-out.
//! * Quadrant `q_s` of a crossing is the corner between slot `s` and slot
//!   `s + 1` (counterclockwise). It is the face on the left when leaving the
//!   crossing along slot `s`.
//! * Edges keep the link orientation. Faces are named by `(edge, side)`
//!   pairs, which makes face ids independent of slot numbering (and hence
//!   invariant under [`PlanarDiagram::mirror`]).

mod blackgraph;
mod faces;
mod pd;

pub use blackgraph::{black_graph, black_graph_oriented, BlackEdge, BlackGraph, EdgeOrientation, Role};
pub use faces::{faces_and_coloring, Color, Coloring, Face, FaceId, Side};
pub use pd::MAX_CROSSINGS;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("malformed PD input: {0}")]
    MalformedInput(String),
    #[error("diagram has no crossings")]
    EmptyDiagram,
    #[error("arc label {label} appears {count} times (expected exactly 2)")]
    ArcMultiplicity { label: u64, count: usize },
    #[error("diagram projection is not connected")]
    Disconnected,
    #[error("arc label {label}: strand orientation is inconsistent")]
    InconsistentOrientation { label: u64 },
    #[error("rotation system is not planar: {faces} faces, expected {expected}")]
    NonPlanar { faces: usize, expected: usize },
    #[error("face id {0} out of range")]
    InvalidFace(FaceId),
    #[error("internal geometry error: {0}")]
    InternalGeometry(String),
}

/// One end of an edge at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub crossing: usize,
    pub slot: usize,
}

impl Dart {
    pub fn new(crossing: usize, slot: usize) -> Self {
        Self { crossing, slot: slot % 4 }
    }

    /// The slot `k` positions counterclockwise from this one.
    pub fn rotate(self, k: usize) -> Self {
        Self::new(self.crossing, self.slot + k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    /// Canonical edge ids, counterclockwise from the incoming under-strand.
    pub slots: [EdgeId; 4],
    /// Slot at which the over-strand enters (1 or 3).
    pub over_in: usize,
}

impl Crossing {
    /// Positive (right-handed) crossings have the over-strand entering at slot 3.
    pub fn is_positive(&self) -> bool {
        self.over_in == 3
    }
}

/// A validated, oriented, connected planar diagram with at least one crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarDiagram {
    crossings: Vec<Crossing>,
    labels: Vec<u64>,
    tails: Vec<Dart>,
    heads: Vec<Dart>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SignData {
    pub n_plus: usize,
    pub n_minus: usize,
    pub components: usize,
}

/// Parses PD text (Knot Atlas or JSON form) into a validated diagram.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram, DiagramError> {
    PlanarDiagram::from_records(&pd::parse_records(text)?)
}

pub fn sign_data(d: &PlanarDiagram) -> SignData {
    let n_plus = d.crossings.iter().filter(|c| c.is_positive()).count();
    SignData { n_plus, n_minus: d.n() - n_plus, components: d.components() }
}

pub fn mirror(d: &PlanarDiagram) -> PlanarDiagram {
    d.mirror()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum EndKind {
    Unknown,
    In,
    Out,
}

impl PlanarDiagram {
    pub fn from_records(records: &[[u64; 4]]) -> Result<Self, DiagramError> {
        if records.is_empty() {
            return Err(DiagramError::EmptyDiagram);
        }
        if records.len() > MAX_CROSSINGS {
            return Err(DiagramError::MalformedInput("too many crossings".into()));
        }
        let n = records.len();

        let mut occurrences: BTreeMap<u64, Vec<Dart>> = BTreeMap::new();
        for (x, rec) in records.iter().enumerate() {
            for (s, &label) in rec.iter().enumerate() {
                occurrences.entry(label).or_default().push(Dart::new(x, s));
            }
        }
        for (&label, occ) in &occurrences {
            if occ.len() != 2 {
                return Err(DiagramError::ArcMultiplicity { label, count: occ.len() });
            }
        }
        let labels: Vec<u64> = occurrences.keys().copied().collect();
        let index: BTreeMap<u64, EdgeId> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let ends: Vec<[Dart; 2]> = occurrences.values().map(|o| [o[0], o[1]]).collect();

        // connectivity of the 4-valent projection graph
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &label in &records[x] {
                for dart in &ends[index[&label]] {
                    if !seen[dart.crossing] {
                        seen[dart.crossing] = true;
                        queue.push_back(dart.crossing);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(DiagramError::Disconnected);
        }

        let slots: Vec<[EdgeId; 4]> = records.iter().map(|r| r.map(|l| index[&l])).collect();
        let kinds = orient(&slots, &ends, records, &labels)?;

        let mut tails = Vec::with_capacity(ends.len());
        let mut heads = Vec::with_capacity(ends.len());
        for (e, pair) in ends.iter().enumerate() {
            let k0 = kinds[pair[0].crossing][pair[0].slot];
            let (t, h) = if k0 == EndKind::Out { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
            debug_assert!(kinds[t.crossing][t.slot] == EndKind::Out, "edge {e}");
            tails.push(t);
            heads.push(h);
        }
        let crossings = slots
            .iter()
            .zip(&kinds)
            .map(|(s, k)| Crossing { slots: *s, over_in: if k[1] == EndKind::In { 1 } else { 3 } })
            .collect();

        let d = PlanarDiagram { crossings, labels, tails, heads };
        let faces = d.trace_faces().len();
        if faces != n + 2 {
            return Err(DiagramError::NonPlanar { faces, expected: n + 2 });
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    pub fn num_edges(&self) -> usize {
        self.labels.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing(&self, j: usize) -> &Crossing {
        &self.crossings[j]
    }

    /// Original PD label of a canonical edge.
    pub fn label(&self, e: EdgeId) -> u64 {
        self.labels[e]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn edge_by_label(&self, label: u64) -> Option<EdgeId> {
        self.labels.binary_search(&label).ok()
    }

    pub fn edge_at(&self, dart: Dart) -> EdgeId {
        self.crossings[dart.crossing].slots[dart.slot]
    }

    /// End of `e` where the link orientation leaves a crossing.
    pub fn tail(&self, e: EdgeId) -> Dart {
        self.tails[e]
    }

    pub fn head(&self, e: EdgeId) -> Dart {
        self.heads[e]
    }

    pub fn is_tail(&self, dart: Dart) -> bool {
        self.tails[self.edge_at(dart)] == dart
    }

    /// The dart at the far end of the edge leaving through `dart`.
    pub fn opposite(&self, dart: Dart) -> Dart {
        let e = self.edge_at(dart);
        if self.tails[e] == dart {
            self.heads[e]
        } else {
            self.tails[e]
        }
    }

    pub fn sign(&self, j: usize) -> i8 {
        if self.crossings[j].is_positive() {
            1
        } else {
            -1
        }
    }

    /// Number of link components.
    pub fn components(&self) -> usize {
        let m = self.num_edges();
        let mut seen = vec![false; m];
        let mut count = 0;
        for start in 0..m {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                // strands pass straight through a crossing
                e = self.edge_at(self.heads[e].rotate(2));
            }
        }
        count
    }

    /// Every crossing with over and under exchanged; faces, coloring and the
    /// black graph are unchanged.
    pub fn mirror(&self) -> PlanarDiagram {
        let mut crossings = Vec::with_capacity(self.n());
        let mut remap = Vec::with_capacity(self.n());
        for c in &self.crossings {
            // new slot 0 is the old incoming over-strand
            let rot = c.over_in;
            let slots = [0, 1, 2, 3].map(|k| c.slots[(k + rot) % 4]);
            crossings.push(Crossing { slots, over_in: if rot == 1 { 3 } else { 1 } });
            remap.push(4 - rot);
        }
        let fix = |d: Dart| Dart::new(d.crossing, d.slot + remap[d.crossing]);
        PlanarDiagram {
            crossings,
            labels: self.labels.clone(),
            tails: self.tails.iter().map(|&d| fix(d)).collect(),
            heads: self.heads.iter().map(|&d| fix(d)).collect(),
        }
    }

    /// PD records with the original labels.
    pub fn records(&self) -> Vec<[u64; 4]> {
        self.crossings.iter().map(|c| c.slots.map(|e| self.labels[e])).collect()
    }

    /// Faces as cycles of darts; each dart is listed in the face on its left
    /// when leaving the crossing through it.
    pub(crate) fn trace_faces(&self) -> Vec<Vec<Dart>> {
        let n = self.n();
        let mut visited = vec![[false; 4]; n];
        let mut faces = Vec::new();
        for x in 0..n {
            for s in 0..4 {
                if visited[x][s] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = Dart::new(x, s);
                while !visited[d.crossing][d.slot] {
                    visited[d.crossing][d.slot] = true;
                    face.push(d);
                    // arrive at the far end, turn to keep the face on the left
                    d = self.opposite(d).rotate(3);
                }
                faces.push(face);
            }
        }
        faces
    }
}

/// Assigns in/out to every slot. Under-strand slots are fixed by the PD
/// convention; the rest propagates along edges (one in, one out) and across
/// over-strands. Components lying entirely over everything else fall back to
/// the label-succession rule.
fn orient(
    slots: &[[EdgeId; 4]],
    ends: &[[Dart; 2]],
    records: &[[u64; 4]],
    labels: &[u64],
) -> Result<Vec<[EndKind; 4]>, DiagramError> {
    let n = slots.len();
    let mut kinds = vec![[EndKind::Unknown; 4]; n];
    let mut queue = VecDeque::new();

    let set = |kinds: &mut Vec<[EndKind; 4]>, queue: &mut VecDeque<Dart>, d: Dart, k: EndKind| {
        let cur = kinds[d.crossing][d.slot];
        if cur == EndKind::Unknown {
            kinds[d.crossing][d.slot] = k;
            queue.push_back(d);
            Ok(())
        } else if cur == k {
            Ok(())
        } else {
            Err(DiagramError::InconsistentOrientation { label: labels[slots[d.crossing][d.slot]] })
        }
    };

    for x in 0..n {
        set(&mut kinds, &mut queue, Dart::new(x, 0), EndKind::In)?;
        set(&mut kinds, &mut queue, Dart::new(x, 2), EndKind::Out)?;
    }
    let flip = |k: EndKind| if k == EndKind::In { EndKind::Out } else { EndKind::In };
    let mut next_fallback = 0;
    loop {
        while let Some(d) = queue.pop_front() {
            let k = kinds[d.crossing][d.slot];
            let e = slots[d.crossing][d.slot];
            let other = if ends[e][0] == d { ends[e][1] } else { ends[e][0] };
            set(&mut kinds, &mut queue, other, flip(k))?;
            if d.slot % 2 == 1 {
                set(&mut kinds, &mut queue, d.rotate(2), flip(k))?;
            }
        }
        while next_fallback < n && kinds[next_fallback][1] != EndKind::Unknown {
            next_fallback += 1;
        }
        if next_fallback == n {
            break;
        }
        // Knot Atlas: over-strand runs l -> j when j succeeds l (with wrap-around).
        let [_, j, _, l] = records[next_fallback];
        let l_to_j = j == l + 1 || l > j + 1;
        let k1 = if l_to_j { EndKind::Out } else { EndKind::In };
        set(&mut kinds, &mut queue, Dart::new(next_fallback, 1), k1)?;
    }
    Ok(kinds)
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.records().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "X[{},{},{},{}]", r[0], r[1], r[2], r[3])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

    #[test]
    fn trefoil_parses() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.num_edges(), 6);
        let s = sign_data(&d);
        // Knot Atlas 3_1 is the left-handed trefoil
        assert_eq!((s.n_plus, s.n_minus, s.components), (0, 3, 1));
        let ms = sign_data(&d.mirror());
        assert_eq!((ms.n_plus, ms.n_minus, ms.components), (3, 0, 1));
    }

    #[test]
    fn orientation_follows_labels() {
        let d = parse_pd(TREFOIL).unwrap();
        for e in 0..d.num_edges() {
            // edge k flows into the crossing where k is under-in or over-in
            let next = d.edge_at(d.head(e).rotate(2));
            assert_eq!(next, (e + 1) % 6);
        }
    }

    #[test]
    fn one_crossing_kinks() {
        for pd in ["X[2,1,1,2]", "X[1,1,2,2]"] {
            let d = parse_pd(pd).unwrap();
            assert_eq!(sign_data(&d).components, 1);
            assert_eq!(d.trace_faces().len(), 3);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(parse_pd(""), Err(DiagramError::EmptyDiagram));
        assert!(matches!(parse_pd("X[1,2,3,4]"), Err(DiagramError::ArcMultiplicity { .. })));
        assert!(matches!(parse_pd("X[1,1,1,2]"), Err(DiagramError::ArcMultiplicity { label: 1, count: 3 })));
        // two kinks sharing no arcs
        assert_eq!(parse_pd("X[2,1,1,2] X[4,3,3,4]"), Err(DiagramError::Disconnected));
    }

    #[test]
    fn two_component_unlink() {
        let d = parse_pd("X[2,4,1,3] X[1,4,2,3]").unwrap();
        let s = sign_data(&d);
        assert_eq!((s.n_plus, s.n_minus, s.components), (1, 1, 2));
    }

    #[test]
    fn mirror_involution() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.mirror().mirror(), d);
        assert_ne!(d.mirror(), d);
        let k = parse_pd("X[2,1,1,2]").unwrap();
        assert_eq!(k.mirror().n(), 1);
        assert_eq!(sign_data(&k.mirror()).n_plus, 1 - sign_data(&k).n_plus);
        // mirrored PD text reparses to the same diagram
        assert_eq!(parse_pd(&d.mirror().to_string()).unwrap(), d.mirror());
    }
}
