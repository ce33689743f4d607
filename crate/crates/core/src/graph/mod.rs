//! Combinatorial layer: vertex-facet incidences, polyhedral graphs, planar
//! embeddings, contractions and the edge-selection rules used by the
//! contraction sequences.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

mod canon;
mod connectivity;
mod corpus;
mod embedding;
mod ops;

pub use canon::canonical_code;
pub use connectivity::{find_separator, is_three_connected};
pub use corpus::{polyhedral_corpus, vertex_splits};
pub use embedding::{is_polyhedral, PolyhedralVerdict};
pub use ops::{
    contract_edge, dual_graph, is_contractible, is_well_contractible, select_contraction,
    triangle_or_three_vertex, truncate_three_vertex, ContractionChoice, ContractionMap,
    PersistentAnchor,
};

/// Abstract vertex and facet sets with their incidence relation.
///
/// Facets are stored as vertex lists; for 3-polytopes produced by this crate
/// the lists are boundary cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialType {
    dim: usize,
    num_vertices: usize,
    facets: Vec<Vec<usize>>,
    sorted: Vec<Vec<usize>>,
}

impl CombinatorialType {
    /// Checks ids and rejects repeated vertices inside a facet.
    pub fn new(dim: usize, num_vertices: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidType("dimension must be positive".into()));
        }
        let mut sorted = Vec::with_capacity(facets.len());
        for (k, f) in facets.iter().enumerate() {
            if let Some(&v) = f.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::InvalidType(format!("facet {k} references vertex {v}")));
            }
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() {
                return Err(Error::InvalidType(format!("facet {k} repeats a vertex")));
            }
            sorted.push(s);
        }
        Ok(Self {
            dim,
            num_vertices,
            facets,
            sorted,
        })
    }

    /// Checks that every facet has at least `d` vertices and every vertex
    /// lies in at least `d` facets.
    pub fn check_incidence_degrees(&self) -> Result<()> {
        if let Some((facet, f)) = self.facets.iter().enumerate().find(|(_, f)| f.len() < self.dim) {
            return Err(Error::IncidenceDegenerate {
                facet,
                count: f.len(),
            });
        }
        let vf = self.vertex_facets();
        if let Some((v, _)) = vf.iter().enumerate().find(|(_, l)| l.len() < self.dim) {
            return Err(Error::InvalidType(format!(
                "vertex {v} lies in fewer than {} facets",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn facet(&self, sigma: usize) -> &[usize] {
        &self.facets[sigma]
    }

    /// Facet vertex set in increasing order.
    pub fn facet_set(&self, sigma: usize) -> &[usize] {
        &self.sorted[sigma]
    }

    pub fn is_incident(&self, v: usize, sigma: usize) -> bool {
        self.sorted[sigma].binary_search(&v).is_ok()
    }

    /// Number of incidence pairs.
    pub fn num_incidences(&self) -> usize {
        self.facets.iter().map(Vec::len).sum()
    }

    /// Facets through each vertex, in increasing order.
    pub fn vertex_facets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_vertices];
        for (s, f) in self.facets.iter().enumerate() {
            for &v in f {
                out[v].push(s);
            }
        }
        out
    }

    /// Same type with the facet list permuted: facet `k` of the result is
    /// facet `order[k]` of `self`.
    pub fn permute_facets(&self, order: &[usize]) -> Result<Self> {
        Self::new(
            self.dim,
            self.num_vertices,
            order.iter().map(|&k| self.facets[k].clone()).collect(),
        )
    }

    /// Facet lists as sorted sets, sorted; equal for types that agree up to
    /// facet order and cyclic order.
    pub fn facet_signature(&self) -> Vec<Vec<usize>> {
        let mut s = self.sorted.clone();
        s.sort();
        s
    }
}

/// A simple undirected graph with edges stored as sorted pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a simple graph; duplicate pairs are merged, loops rejected.
    pub fn new(num_vertices: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::InvalidType(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidType(format!("loop at vertex {a}")));
            }
            edges.push([a.min(b), a.max(b)]);
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &[a, b] in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for l in &mut adjacency {
            l.sort_unstable();
        }
        Ok(Self {
            num_vertices,
            edges,
            adjacency,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&[a.min(b), a.max(b)]).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }
}

/// Edge graph of a combinatorial type: `i ~ j` iff the facets containing
/// both `i` and `j` have exactly `{i, j}` in common.
pub fn build_edge_graph(ct: &CombinatorialType) -> Result<Graph> {
    if let Some((facet, f)) = ct.facets().iter().enumerate().find(|(_, f)| f.len() < ct.dim()) {
        return Err(Error::IncidenceDegenerate {
            facet,
            count: f.len(),
        });
    }
    let vf = ct.vertex_facets();
    let mut candidates = Vec::new();
    for f in ct.facets() {
        for (x, &a) in f.iter().enumerate() {
            for &b in &f[x + 1..] {
                candidates.push([a.min(b), a.max(b)]);
            }
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut count = vec![0usize; ct.num_vertices()];
    let mut edges = Vec::new();
    for [a, b] in candidates {
        let common: Vec<usize> = vf[a]
            .iter()
            .filter(|s| vf[b].binary_search(s).is_ok())
            .copied()
            .collect();
        for &s in &common {
            for &v in ct.facet(s) {
                count[v] += 1;
            }
        }
        let exclusive = (0..ct.num_vertices())
            .filter(|&v| count[v] == common.len())
            .count()
            == 2;
        for &s in &common {
            for &v in ct.facet(s) {
                count[v] = 0;
            }
        }
        if exclusive {
            edges.push((a, b));
        }
    }
    Graph::new(ct.num_vertices(), edges)
}

/// A 3-connected planar graph together with the face cycles of its planar
/// embedding, consistently oriented (each directed edge lies on exactly one
/// face).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralGraph {
    graph: Graph,
    faces: Vec<Vec<usize>>,
    dart_face: BTreeMap<(usize, usize), usize>,
}

impl PolyhedralGraph {
    /// Builds a polyhedral graph from face cycles. Faces may come with
    /// arbitrary orientations; they are flipped to a consistent orientation
    /// with face 0 kept as given.
    pub fn from_faces(num_vertices: usize, faces: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |msg: alloc::string::String| Err(Error::NotPolyhedral(msg));
        let mut pairs = Vec::new();
        for (k, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return bad(format!("face {k} has fewer than 3 vertices"));
            }
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() || s.last().is_some_and(|&v| v >= num_vertices) {
                return bad(format!("face {k} repeats or misnames a vertex"));
            }
            for x in 0..f.len() {
                pairs.push((f[x], f[(x + 1) % f.len()]));
            }
        }
        let graph = Graph::new(num_vertices, pairs)?;
        let mut edge_faces = vec![Vec::new(); graph.num_edges()];
        for (k, f) in faces.iter().enumerate() {
            for x in 0..f.len() {
                let e = graph.edge_index(f[x], f[(x + 1) % f.len()]).expect("edge");
                edge_faces[e].push(k);
            }
        }
        if let Some(e) = edge_faces.iter().position(|l| l.len() != 2) {
            let [a, b] = graph.edges()[e];
            return bad(format!("edge ({a}, {b}) does not lie on exactly two faces"));
        }
        let faces = orient_faces(&graph, faces, &edge_faces)?;
        let euler = num_vertices as i64 - graph.num_edges() as i64 + faces.len() as i64;
        if euler != 2 {
            return bad(format!("Euler characteristic is {euler}"));
        }
        let pg = Self::assemble(graph, faces);
        for v in 0..num_vertices {
            if pg.rotation(v).len() != pg.graph.degree(v) {
                return bad(format!("faces around vertex {v} do not form a single cycle"));
            }
        }
        if let Some(cut) = find_separator(&pg.graph) {
            return bad(format!("vertex cut {cut:?}"));
        }
        if num_vertices < 4 {
            return bad("fewer than 4 vertices".into());
        }
        Ok(pg)
    }

    /// Builds the graph from a 3-dimensional combinatorial type. Facet
    /// vertex lists are reordered into boundary cycles where needed; face
    /// `k` corresponds to facet `k`.
    pub fn from_combinatorial_type(ct: &CombinatorialType) -> Result<Self> {
        if ct.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: ct.dim(),
            });
        }
        let g = build_edge_graph(ct)?;
        let mut faces = Vec::with_capacity(ct.num_facets());
        for (k, f) in ct.facets().iter().enumerate() {
            faces.push(boundary_cycle(&g, f).ok_or_else(|| {
                Error::NotPolyhedral(format!("facet {k} is not bounded by a single cycle"))
            })?);
        }
        let pg = Self::from_faces(ct.num_vertices(), faces)?;
        if pg.graph != g {
            return Err(Error::NotPolyhedral("facet boundaries disagree with the edge graph".into()));
        }
        Ok(pg)
    }

    pub(crate) fn assemble(graph: Graph, faces: Vec<Vec<usize>>) -> Self {
        let mut dart_face = BTreeMap::new();
        for (k, f) in faces.iter().enumerate() {
            for x in 0..f.len() {
                dart_face.insert((f[x], f[(x + 1) % f.len()]), k);
            }
        }
        Self {
            graph,
            faces,
            dart_face,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        self.graph.edges()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, k: usize) -> &[usize] {
        &self.faces[k]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        self.graph.neighbors(v)
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.graph.edge_index(a, b)
    }

    /// Face containing the directed edge `a -> b`.
    pub fn face_of_dart(&self, a: usize, b: usize) -> Option<usize> {
        self.dart_face.get(&(a, b)).copied()
    }

    /// The two faces of edge `e = [a, b]` (`a < b`): the one containing
    /// `a -> b` and the one containing `b -> a`.
    pub fn edge_faces(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.graph.edges()[e];
        (self.dart_face[&(a, b)], self.dart_face[&(b, a)])
    }

    /// Neighbor following `u` in the cyclic order around `v`.
    pub fn next_around(&self, v: usize, u: usize) -> usize {
        let f = &self.faces[self.dart_face[&(u, v)]];
        let x = f.iter().position(|&w| w == v).expect("vertex on face");
        f[(x + 1) % f.len()]
    }

    /// Cyclic order of the neighbors of `v`, starting at the smallest.
    pub fn rotation(&self, v: usize) -> Vec<usize> {
        let Some(&start) = self.graph.neighbors(v).first() else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut u = self.next_around(v, start);
        while u != start && out.len() <= self.graph.degree(v) {
            out.push(u);
            u = self.next_around(v, u);
        }
        out
    }

    pub fn is_triangle(&self, k: usize) -> bool {
        self.faces[k].len() == 3
    }

    /// The same graph as a 3-dimensional combinatorial type.
    pub fn to_combinatorial_type(&self) -> CombinatorialType {
        CombinatorialType::new(3, self.num_vertices(), self.faces.clone()).expect("valid faces")
    }

    /// Faces through `v`, in increasing order.
    pub fn faces_at(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.contains(&v))
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }
}

fn orient_faces(graph: &Graph, mut faces: Vec<Vec<usize>>, edge_faces: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let n = faces.len();
    let mut fixed = vec![false; n];
    let mut queue = alloc::collections::VecDeque::new();
    for root in 0..n {
        if fixed[root] {
            continue;
        }
        fixed[root] = true;
        queue.push_back(root);
        while let Some(f) = queue.pop_front() {
            let len = faces[f].len();
            for x in 0..len {
                let (a, b) = (faces[f][x], faces[f][(x + 1) % len]);
                let e = graph.edge_index(a, b).expect("edge");
                let other = if edge_faces[e][0] == f { edge_faces[e][1] } else { edge_faces[e][0] };
                let same_dir = contains_dart(&faces[other], a, b);
                if fixed[other] {
                    if same_dir {
                        return Err(Error::NotPolyhedral("faces cannot be oriented consistently".into()));
                    }
                } else {
                    if same_dir {
                        faces[other].reverse();
                    }
                    fixed[other] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    Ok(faces)
}

fn contains_dart(f: &[usize], a: usize, b: usize) -> bool {
    (0..f.len()).any(|x| f[x] == a && f[(x + 1) % f.len()] == b)
}

/// Orders a facet's vertices along the cycle formed by graph edges among
/// them; `None` if they do not form a single cycle.
fn boundary_cycle(g: &Graph, facet: &[usize]) -> Option<Vec<usize>> {
    let n = facet.len();
    if n < 3 {
        return None;
    }
    let in_facet = |v: &usize| facet.contains(v);
    let nbrs = |v: usize| -> Vec<usize> { g.neighbors(v).iter().filter(|w| in_facet(w)).copied().collect() };
    if (0..n).all(|x| g.has_edge(facet[x], facet[(x + 1) % n])) {
        return Some(facet.to_vec());
    }
    let start = facet[0];
    let first = nbrs(start);
    if first.len() != 2 {
        return None;
    }
    let mut cycle = vec![start];
    let (mut prev, mut cur) = (start, first[0]);
    while cur != start {
        let nb = nbrs(cur);
        if nb.len() != 2 || cycle.len() > n {
            return None;
        }
        cycle.push(cur);
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
    }
    (cycle.len() == n).then_some(cycle)
}
