use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::PolyhedralGraph;
use crate::{Error, Result};

/// Correspondence between a polyhedral graph `G` and a contraction-only
/// minor `G~`: a partition of `V(G)` into connected classes, with the
/// induced edge and face correspondences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionMap {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    edge_image: Vec<Option<usize>>,
    edge_classes: Vec<Vec<usize>>,
    face_origin: Vec<usize>,
    face_image: Vec<Option<usize>>,
}

impl ContractionMap {
    /// Validates the partition `class_of` (vertex of `g` -> vertex of
    /// `contracted`) and derives the edge and face correspondences.
    pub fn new(g: &PolyhedralGraph, contracted: &PolyhedralGraph, class_of: Vec<usize>) -> Result<Self> {
        let bad = |m: alloc::string::String| Err(Error::Precondition(m));
        if class_of.len() != g.num_vertices() {
            return bad("class map has the wrong length".into());
        }
        let m = contracted.num_vertices();
        let mut classes = vec![Vec::new(); m];
        for (v, &c) in class_of.iter().enumerate() {
            if c >= m {
                return bad(format!("vertex {v} mapped to missing class {c}"));
            }
            classes[c].push(v);
        }
        for (c, members) in classes.iter().enumerate() {
            if members.is_empty() {
                return bad(format!("class {c} is empty"));
            }
            let mut reached = vec![members[0]];
            let mut head = 0;
            while head < reached.len() {
                let v = reached[head];
                head += 1;
                for &w in g.neighbors(v) {
                    if class_of[w] == c && !reached.contains(&w) {
                        reached.push(w);
                    }
                }
            }
            if reached.len() != members.len() {
                return bad(format!("class {c} is not connected"));
            }
        }
        let mut edge_image = Vec::with_capacity(g.num_edges());
        let mut edge_classes = vec![Vec::new(); contracted.num_edges()];
        for (e, &[a, b]) in g.edges().iter().enumerate() {
            let (ca, cb) = (class_of[a], class_of[b]);
            if ca == cb {
                edge_image.push(None);
                continue;
            }
            let Some(t) = contracted.edge_index(ca, cb) else {
                return bad(format!("edge ({a}, {b}) has no image"));
            };
            edge_image.push(Some(t));
            edge_classes[t].push(e);
        }
        if let Some(t) = edge_classes.iter().position(Vec::is_empty) {
            return bad(format!("minor edge {t} has no preimage"));
        }
        let images: Vec<Option<Vec<usize>>> = g
            .faces()
            .iter()
            .map(|f| {
                let mut s: Vec<usize> = f.iter().map(|&v| class_of[v]).collect();
                s.sort_unstable();
                s.dedup();
                (s.len() >= 3).then_some(s)
            })
            .collect();
        let mut face_origin = Vec::with_capacity(contracted.num_faces());
        let mut face_image = vec![None; g.num_faces()];
        for (t, f) in contracted.faces().iter().enumerate() {
            let mut s = f.to_vec();
            s.sort_unstable();
            let Some(o) = images.iter().position(|i| i.as_ref() == Some(&s)) else {
                return bad(format!("minor face {t} has no preimage"));
            };
            face_origin.push(o);
            face_image[o] = Some(t);
        }
        Ok(Self {
            class_of,
            classes,
            edge_image,
            edge_classes,
            face_origin,
            face_image,
        })
    }

    /// The trivial partition into singletons.
    pub fn identity(g: &PolyhedralGraph) -> Self {
        Self::new(g, g, (0..g.num_vertices()).collect()).expect("identity map")
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn class_map(&self) -> &[usize] {
        &self.class_of
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Minor edge of a `G` edge, `None` for edges inside a class.
    pub fn edge_image(&self, e: usize) -> Option<usize> {
        self.edge_image[e]
    }

    /// The `G` edges between the two classes joined by minor edge `t`.
    pub fn edge_class(&self, t: usize) -> &[usize] {
        &self.edge_classes[t]
    }

    /// Face of `G` that a minor face comes from.
    pub fn face_origin(&self, t: usize) -> usize {
        self.face_origin[t]
    }

    /// Minor face of a persistent face of `G`.
    pub fn face_image(&self, f: usize) -> Option<usize> {
        self.face_image[f]
    }

    pub fn num_edges(&self) -> usize {
        self.edge_image.len()
    }

    pub fn num_minor_edges(&self) -> usize {
        self.edge_classes.len()
    }
}

/// Contracts edge `(a, b)`. Vertex `b` is merged into `a`; vertices above
/// `b` shift down by one. Faces that keep at least three vertices persist.
pub fn contract_edge(g: &PolyhedralGraph, edge: [usize; 2]) -> Result<(PolyhedralGraph, ContractionMap)> {
    let (a, b) = (edge[0].min(edge[1]), edge[0].max(edge[1]));
    if a == b || g.edge_index(a, b).is_none() {
        return Err(Error::NoSuchEdge(edge[0], edge[1]));
    }
    let class_of: Vec<usize> = (0..g.num_vertices())
        .map(|v| match v.cmp(&b) {
            core::cmp::Ordering::Less => v,
            core::cmp::Ordering::Equal => a,
            core::cmp::Ordering::Greater => v - 1,
        })
        .collect();
    let mut faces = Vec::new();
    for f in g.faces() {
        let mut mapped: Vec<usize> = Vec::with_capacity(f.len());
        for &v in f {
            let c = class_of[v];
            if mapped.last() != Some(&c) {
                mapped.push(c);
            }
        }
        while mapped.len() > 1 && mapped.first() == mapped.last() {
            mapped.pop();
        }
        if mapped.len() >= 3 {
            faces.push(mapped);
        }
    }
    let contracted =
        PolyhedralGraph::from_faces(g.num_vertices() - 1, faces).map_err(|_| Error::ResultNotPolyhedral)?;
    let map = ContractionMap::new(g, &contracted, class_of)?;
    Ok((contracted, map))
}

pub fn is_contractible(g: &PolyhedralGraph, edge: [usize; 2]) -> bool {
    contract_edge(g, edge).is_ok()
}

/// Contractible, and either on a non-triangular face or between two
/// vertices of degree at least four.
pub fn is_well_contractible(g: &PolyhedralGraph, edge: [usize; 2]) -> bool {
    let Some(e) = g.edge_index(edge[0], edge[1]) else {
        return false;
    };
    let (f1, f2) = g.edge_faces(e);
    let shape_ok = !g.is_triangle(f1)
        || !g.is_triangle(f2)
        || (g.degree(edge[0]) >= 4 && g.degree(edge[1]) >= 4);
    shape_ok && is_contractible(g, edge)
}

/// Which reduction a polyhedral graph admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionChoice {
    IsK4,
    WellContractible([usize; 2]),
    /// A degree-3 vertex whose three faces are triangles.
    StackedK4(usize),
}

/// Lexicographically smallest well-contractible edge; otherwise the
/// smallest stacked-K4 vertex; `IsK4` for the tetrahedron graph.
pub fn select_contraction(g: &PolyhedralGraph) -> ContractionChoice {
    if g.num_vertices() == 4 {
        return ContractionChoice::IsK4;
    }
    if let Some(&e) = g.edges().iter().find(|&&e| is_well_contractible(g, e)) {
        return ContractionChoice::WellContractible(e);
    }
    match (0..g.num_vertices()).find(|&v| is_stacked_k4(g, v)) {
        Some(v) => ContractionChoice::StackedK4(v),
        None => ContractionChoice::IsK4,
    }
}

fn is_stacked_k4(g: &PolyhedralGraph, v: usize) -> bool {
    g.degree(v) == 3 && g.faces_at(v).iter().all(|&f| g.is_triangle(f))
}

/// A face or vertex that survives the contraction of a given edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PersistentAnchor {
    /// A triangular face not containing the edge.
    FacialTriangle(usize),
    /// A degree-3 vertex that is not an endpoint of the edge.
    ThreeVertex(usize),
}

/// Prefers the smallest facial triangle not containing `edge`, then the
/// smallest 3-vertex off `edge`.
pub fn triangle_or_three_vertex(g: &PolyhedralGraph, edge: [usize; 2]) -> Result<PersistentAnchor> {
    if g.edge_index(edge[0], edge[1]).is_none() {
        return Err(Error::NoSuchEdge(edge[0], edge[1]));
    }
    if let Some(f) = (0..g.num_faces())
        .find(|&f| g.is_triangle(f) && !(g.face(f).contains(&edge[0]) && g.face(f).contains(&edge[1])))
    {
        return Ok(PersistentAnchor::FacialTriangle(f));
    }
    (0..g.num_vertices())
        .find(|&v| g.degree(v) == 3 && !edge.contains(&v))
        .map(PersistentAnchor::ThreeVertex)
        .ok_or(Error::CaseUnavailable)
}

/// Cuts off a 3-vertex `v`: its edges to `u0, u1, u2` (rotation order) are
/// subdivided by `v`, `n`, `n + 1` respectively, which then form a new
/// triangle appended as the last face. Other faces keep their indices.
pub fn truncate_three_vertex(g: &PolyhedralGraph, v: usize) -> Result<PolyhedralGraph> {
    if g.degree(v) != 3 {
        return Err(Error::DegreeMismatch {
            vertex: v,
            degree: g.degree(v),
        });
    }
    let n = g.num_vertices();
    let rot = g.rotation(v);
    let j = |u: usize| -> usize {
        match rot.iter().position(|&w| w == u).expect("neighbor") {
            0 => v,
            1 => n,
            _ => n + 1,
        }
    };
    let mut faces = Vec::with_capacity(g.num_faces() + 1);
    for f in g.faces() {
        let mut out = Vec::with_capacity(f.len() + 1);
        for (x, &w) in f.iter().enumerate() {
            if w == v {
                let prev = f[(x + f.len() - 1) % f.len()];
                let next = f[(x + 1) % f.len()];
                out.push(j(prev));
                out.push(j(next));
            } else {
                out.push(w);
            }
        }
        faces.push(out);
    }
    faces.push(vec![j(rot[0]), j(rot[2]), j(rot[1])]);
    PolyhedralGraph::from_faces(n + 2, faces)
}

/// Dual graph: vertex `k` of the dual is face `k` of `g`, face `v` of the
/// dual is the cycle of faces around vertex `v`. The returned vector maps
/// each edge of `g` to the dual edge crossing it.
pub fn dual_graph(g: &PolyhedralGraph) -> Result<(PolyhedralGraph, Vec<usize>)> {
    let faces: Vec<Vec<usize>> = (0..g.num_vertices())
        .map(|v| {
            g.rotation(v)
                .iter()
                .map(|&u| g.face_of_dart(v, u).expect("dart"))
                .collect()
        })
        .collect();
    let dual = PolyhedralGraph::from_faces(g.num_faces(), faces)?;
    let map = (0..g.num_edges())
        .map(|e| {
            let (f1, f2) = g.edge_faces(e);
            dual.edge_index(f1, f2).expect("dual edge")
        })
        .collect();
    Ok((dual, map))
}
