//! Faces of the projection and the checkerboard coloring.

use std::collections::VecDeque;

use serde::Serialize;

use super::{Dart, DiagramError, EdgeId, PlanarDiagram};

pub type FaceId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Boundary darts in traversal order (face on the left of each).
    pub darts: Vec<Dart>,
    /// The same boundary named by edge sides, sorted.
    pub sides: Vec<(EdgeId, Side)>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub faces: Vec<Face>,
    pub color: Vec<Color>,
    pub unbounded: FaceId,
    /// `quadrant[x][s]`: face id of quadrant `q_s` at crossing `x`.
    pub quadrant: Vec<[FaceId; 4]>,
}

impl Coloring {
    pub fn face_of(&self, dart: Dart) -> FaceId {
        self.quadrant[dart.crossing][dart.slot]
    }

    pub fn is_black(&self, f: FaceId) -> bool {
        self.color[f] == Color::Black
    }

    /// Parity of the black quadrants at crossing `x`: 0 when `q_0, q_2` are black.
    pub fn black_parity(&self, x: usize) -> usize {
        if self.is_black(self.quadrant[x][0]) {
            0
        } else {
            1
        }
    }

    /// Whether edge `e` borders the unbounded face.
    pub fn is_outer_edge(&self, d: &PlanarDiagram, e: EdgeId) -> bool {
        self.face_of(d.tail(e)) == self.unbounded || self.face_of(d.head(e)) == self.unbounded
    }

    /// Dart from which `e` is traversed with the black face on its left.
    pub fn black_left_tail(&self, d: &PlanarDiagram, e: EdgeId) -> Dart {
        let t = d.tail(e);
        if self.is_black(self.face_of(t)) {
            t
        } else {
            d.head(e)
        }
    }

    /// The dart where `e`'s black-on-left traversal ends.
    pub fn black_left_head(&self, d: &PlanarDiagram, e: EdgeId) -> Dart {
        d.opposite(self.black_left_tail(d, e))
    }

    /// The default unbounded face: longest boundary, lowest id on ties.
    pub fn default_unbounded(faces: &[Face]) -> FaceId {
        let mut best = 0;
        for (i, f) in faces.iter().enumerate() {
            if f.len() > faces[best].len() {
                best = i;
            }
        }
        best
    }
}

/// Computes faces and the unique checkerboard coloring with the chosen
/// unbounded face white. Without a hint the longest face is unbounded.
pub fn faces_and_coloring(d: &PlanarDiagram, unbounded_hint: Option<FaceId>) -> Result<Coloring, DiagramError> {
    let side_of = |dart: Dart| -> (EdgeId, Side) {
        let e = d.edge_at(dart);
        (e, if d.tail(e) == dart { Side::Left } else { Side::Right })
    };
    let mut faces: Vec<Face> = d
        .trace_faces()
        .into_iter()
        .map(|darts| {
            let mut sides: Vec<_> = darts.iter().map(|&x| side_of(x)).collect();
            sides.sort();
            Face { darts, sides }
        })
        .collect();
    faces.sort_by(|a, b| a.sides[0].cmp(&b.sides[0]));

    let nf = faces.len();
    let unbounded = match unbounded_hint {
        Some(f) if f >= nf => return Err(DiagramError::InvalidFace(f)),
        Some(f) => f,
        None => Coloring::default_unbounded(&faces),
    };

    let mut quadrant = vec![[usize::MAX; 4]; d.n()];
    for (fid, face) in faces.iter().enumerate() {
        for dart in &face.darts {
            quadrant[dart.crossing][dart.slot] = fid;
        }
    }

    // faces on the two sides of an edge get opposite colors
    let mut adj = vec![Vec::new(); nf];
    for e in 0..d.num_edges() {
        let a = quadrant[d.tail(e).crossing][d.tail(e).slot];
        let b = quadrant[d.head(e).crossing][d.head(e).slot];
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color: Vec<Option<Color>> = vec![None; nf];
    color[unbounded] = Some(Color::White);
    let mut queue = VecDeque::from([unbounded]);
    while let Some(f) = queue.pop_front() {
        let c = color[f].expect("colored");
        let other = if c == Color::White { Color::Black } else { Color::White };
        for &g in &adj[f] {
            match color[g] {
                None => {
                    color[g] = Some(other);
                    queue.push_back(g);
                }
                Some(cg) if cg != other => {
                    return Err(DiagramError::InternalGeometry(format!("faces {f} and {g} share an edge and a color")));
                }
                _ => {}
            }
        }
    }
    let color = color
        .into_iter()
        .map(|c| c.ok_or_else(|| DiagramError::InternalGeometry("uncolored face".into())))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(Coloring { faces, color, unbounded, quadrant })
}
