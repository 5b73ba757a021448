//! The black graph and the per-crossing role geometry.
//!
//! With the oriented edge `e_j` drawn from left to right, the tail black
//! quadrant sits west of the crossing and the head black quadrant east; the
//! white quadrants are north and south. If `t` is the slot-frame index of
//! the tail quadrant, then counterclockwise from the upper right:
//!
//! ```text
//!        i2 (slot t)      N (white)     i1 (slot t+3)
//!                   \                  /
//!     W = q_t (tail) ---- crossing ---- E = q_{t+2} (head)
//!                   /                  \
//!      i3 (slot t+1)      S (white)     i4 (slot t+2)
//! ```
//!
//! Leaving the crossing along `i2` or `i4` keeps a black quadrant on the
//! left; along `i1` or `i3` it keeps a white one. So under black-on-left
//! traversal `i2`/`i4` are outgoing ends and `i1`/`i3` incoming ends,
//! independently of how `e_j` is oriented.

use serde::Serialize;

use super::{Coloring, Dart, DiagramError, FaceId, PlanarDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    I1,
    I2,
    I3,
    I4,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::I1, Role::I2, Role::I3, Role::I4];
}

/// How each black-graph edge is oriented.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EdgeOrientation {
    /// Tail at the smaller black-face id; loops take the quadrant with the smaller slot index.
    #[default]
    SmallerTail,
    /// Every edge reversed relative to `SmallerTail`.
    LargerTail,
    /// Per-crossing reversal flags relative to `SmallerTail`.
    Flips(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlackEdge {
    pub crossing: usize,
    pub tail: usize,
    pub head: usize,
    /// Slot-frame index of the tail black quadrant.
    pub tail_quadrant: usize,
}

impl BlackEdge {
    pub fn role_slot(&self, role: Role) -> usize {
        let t = self.tail_quadrant;
        match role {
            Role::I1 => (t + 3) % 4,
            Role::I2 => t,
            Role::I3 => (t + 1) % 4,
            Role::I4 => (t + 2) % 4,
        }
    }

    pub fn role_dart(&self, role: Role) -> Dart {
        Dart::new(self.crossing, self.role_slot(role))
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackGraph {
    /// Face id of each vertex.
    pub vertices: Vec<FaceId>,
    /// One edge per crossing, indexed by crossing.
    pub edges: Vec<BlackEdge>,
}

impl BlackGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
}

pub fn black_graph(d: &PlanarDiagram, col: &Coloring) -> Result<BlackGraph, DiagramError> {
    black_graph_oriented(d, col, &EdgeOrientation::SmallerTail)
}

pub fn black_graph_oriented(
    d: &PlanarDiagram,
    col: &Coloring,
    orientation: &EdgeOrientation,
) -> Result<BlackGraph, DiagramError> {
    let mut vertex_of = vec![usize::MAX; col.faces.len()];
    let mut vertices = Vec::new();
    for f in 0..col.faces.len() {
        if col.is_black(f) {
            vertex_of[f] = vertices.len();
            vertices.push(f);
        }
    }
    if let EdgeOrientation::Flips(f) = orientation {
        if f.len() != d.n() {
            return Err(DiagramError::InternalGeometry(format!(
                "orientation flags for {} crossings, diagram has {}",
                f.len(),
                d.n()
            )));
        }
    }

    let mut edges = Vec::with_capacity(d.n());
    for x in 0..d.n() {
        let p = col.black_parity(x);
        let (qa, qb) = (p, p + 2);
        let (fa, fb) = (col.quadrant[x][qa], col.quadrant[x][qb]);
        if !col.is_black(fa) || !col.is_black(fb) || col.is_black(col.quadrant[x][p + 1]) {
            return Err(DiagramError::InternalGeometry(format!("crossing {x}: quadrants do not alternate")));
        }
        let (va, vb) = (vertex_of[fa], vertex_of[fb]);
        let mut tail_q = if vb < va { qb } else { qa };
        let flip = match orientation {
            EdgeOrientation::SmallerTail => false,
            EdgeOrientation::LargerTail => true,
            EdgeOrientation::Flips(f) => f[x],
        };
        if flip {
            tail_q = (tail_q + 2) % 4;
        }
        let head_q = (tail_q + 2) % 4;
        edges.push(BlackEdge {
            crossing: x,
            tail: vertex_of[col.quadrant[x][tail_q]],
            head: vertex_of[col.quadrant[x][head_q]],
            tail_quadrant: tail_q,
        });
    }
    let bg = BlackGraph { vertices, edges };
    check_roles(col, &bg)?;
    Ok(bg)
}

fn check_roles(col: &Coloring, bg: &BlackGraph) -> Result<(), DiagramError> {
    for e in &bg.edges {
        let slots = Role::ALL.map(|r| e.role_slot(r));
        let mut sorted = slots;
        sorted.sort();
        if sorted != [0, 1, 2, 3] {
            return Err(DiagramError::InternalGeometry(format!("crossing {}: roles not distinct", e.crossing)));
        }
        // i2/i4 leave with black on the left, i1/i3 with white
        for (role, black) in [(Role::I1, false), (Role::I2, true), (Role::I3, false), (Role::I4, true)] {
            let dart = e.role_dart(role);
            if col.is_black(col.face_of(dart)) != black {
                return Err(DiagramError::InternalGeometry(format!(
                    "crossing {}: role {role:?} on the wrong side",
                    e.crossing
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{faces_and_coloring, parse_pd};

    #[test]
    fn trefoil_triangle() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let col = faces_and_coloring(&d, None).unwrap();
        let bg = black_graph(&d, &col).unwrap();
        assert_eq!(bg.num_vertices(), 3);
        assert_eq!(bg.edges.len(), 3);
        let mut deg = [0; 3];
        for e in &bg.edges {
            assert!(!e.is_loop());
            assert!(e.tail < e.head);
            deg[e.tail] += 1;
            deg[e.head] += 1;
        }
        assert_eq!(deg, [2, 2, 2]);
    }

    #[test]
    fn kink_black_graphs() {
        let d = parse_pd("X[2,1,1,2]").unwrap();
        let mut shapes = Vec::new();
        for f in 0..3 {
            let col = faces_and_coloring(&d, Some(f)).unwrap();
            let bg = black_graph(&d, &col).unwrap();
            shapes.push((bg.num_vertices(), bg.edges[0].is_loop()));
        }
        shapes.sort();
        // lobe unbounded: one vertex with a loop; big face unbounded: two lobes joined
        assert_eq!(shapes, vec![(1, true), (1, true), (2, false)]);
    }

    #[test]
    fn reversal_swaps_roles() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let col = faces_and_coloring(&d, None).unwrap();
        let a = black_graph(&d, &col).unwrap();
        let b = black_graph_oriented(&d, &col, &EdgeOrientation::LargerTail).unwrap();
        for (ea, eb) in a.edges.iter().zip(&b.edges) {
            assert_eq!(ea.tail, eb.head);
            assert_eq!(ea.role_slot(Role::I1), eb.role_slot(Role::I3));
            assert_eq!(ea.role_slot(Role::I2), eb.role_slot(Role::I4));
        }
    }

    #[test]
    fn mirror_preserves_black_graph() {
        let d = parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        let m = d.mirror();
        let (ca, cb) = (faces_and_coloring(&d, None).unwrap(), faces_and_coloring(&m, None).unwrap());
        assert_eq!(ca.color, cb.color);
        let (a, b) = (black_graph(&d, &ca).unwrap(), black_graph(&m, &cb).unwrap());
        for (ea, eb) in a.edges.iter().zip(&b.edges) {
            assert_eq!((ea.tail, ea.head), (eb.tail, eb.head));
            for r in Role::ALL {
                assert_eq!(d.edge_at(ea.role_dart(r)), m.edge_at(eb.role_dart(r)));
            }
        }
    }
}
