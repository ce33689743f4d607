//! Planar embedding of 2-connected graphs by fragment-wise path insertion
//! (Demoucron, Malgrange and Pertuiset).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{find_separator, Graph, PolyhedralGraph};

/// Outcome of the polyhedrality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyhedralVerdict {
    /// The graph with the face cycles of its planar embedding.
    Polyhedral(PolyhedralGraph),
    NotPlanar,
    /// A separating vertex set of size at most two (empty if the graph is
    /// disconnected or too small).
    NotThreeConnected(Vec<usize>),
}

impl PolyhedralVerdict {
    pub fn into_polyhedral(self) -> Option<PolyhedralGraph> {
        match self {
            Self::Polyhedral(g) => Some(g),
            _ => None,
        }
    }
}

/// Decides whether a simple graph is polyhedral (3-connected and planar)
/// and returns its face cycles on success.
pub fn is_polyhedral(g: &Graph) -> PolyhedralVerdict {
    let n = g.num_vertices();
    if n < 4 {
        return PolyhedralVerdict::NotThreeConnected(Vec::new());
    }
    if let Some(cut) = find_separator(g) {
        return PolyhedralVerdict::NotThreeConnected(cut);
    }
    if g.num_edges() > 3 * n - 6 {
        return PolyhedralVerdict::NotPlanar;
    }
    match embed(g) {
        Some(faces) => PolyhedralVerdict::Polyhedral(PolyhedralGraph::assemble(g.clone(), faces)),
        None => PolyhedralVerdict::NotPlanar,
    }
}

struct Fragment {
    attachments: Vec<usize>,
    /// Interior vertices; empty for a chord.
    interior: Vec<usize>,
}

/// Face cycles of a planar embedding of a 2-connected graph, or `None` if
/// the graph is not planar.
fn embed(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.num_vertices();
    let cycle = find_cycle(g)?;
    let mut v_in = vec![false; n];
    let mut e_in = vec![false; g.num_edges()];
    for x in 0..cycle.len() {
        v_in[cycle[x]] = true;
        e_in[g.edge_index(cycle[x], cycle[(x + 1) % cycle.len()])?] = true;
    }
    let mut embedded = cycle.len();
    let mut reversed = cycle.clone();
    reversed.reverse();
    let mut faces = vec![cycle, reversed];
    while embedded < g.num_edges() {
        let fragments = fragments(g, &v_in, &e_in);
        let masks: Vec<Vec<bool>> = faces
            .iter()
            .map(|f| {
                let mut m = vec![false; n];
                for &v in f {
                    m[v] = true;
                }
                m
            })
            .collect();
        let mut choice = None;
        for (k, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|&v| masks[f][v]))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    choice = Some((k, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((k, admissible[0]));
                    }
                }
            }
        }
        let (k, f) = choice?;
        let path = fragment_path(g, &fragments[k], &v_in)?;
        for x in 0..path.len() - 1 {
            v_in[path[x]] = true;
            e_in[g.edge_index(path[x], path[x + 1])?] = true;
        }
        embedded += path.len() - 1;
        let (f1, f2) = split_face(&faces[f], &path);
        faces[f] = f1;
        faces.push(f2);
    }
    Some(faces)
}

/// A cycle found by walking without immediate backtracking; needs minimum
/// degree two.
fn find_cycle(g: &Graph) -> Option<Vec<usize>> {
    let mut pos = vec![usize::MAX; g.num_vertices()];
    let mut walk = vec![0usize];
    pos[0] = 0;
    let mut prev = usize::MAX;
    loop {
        let v = *walk.last()?;
        let next = *g.neighbors(v).iter().find(|&&w| w != prev)?;
        if pos[next] != usize::MAX {
            return Some(walk[pos[next]..].to_vec());
        }
        pos[next] = walk.len();
        walk.push(next);
        prev = v;
    }
}

fn fragments(g: &Graph, v_in: &[bool], e_in: &[bool]) -> Vec<Fragment> {
    let n = g.num_vertices();
    let mut out = Vec::new();
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        if !e_in[e] && v_in[a] && v_in[b] {
            out.push(Fragment {
                attachments: vec![a, b],
                interior: Vec::new(),
            });
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if v_in[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut interior = vec![s];
        let mut attach = Vec::new();
        let mut head = 0;
        while head < interior.len() {
            let v = interior[head];
            head += 1;
            for &w in g.neighbors(v) {
                if v_in[w] {
                    attach.push(w);
                } else if !seen[w] {
                    seen[w] = true;
                    interior.push(w);
                }
            }
        }
        attach.sort_unstable();
        attach.dedup();
        out.push(Fragment {
            attachments: attach,
            interior,
        });
    }
    out
}

/// A path through the fragment joining two distinct attachments.
fn fragment_path(g: &Graph, frag: &Fragment, v_in: &[bool]) -> Option<Vec<usize>> {
    if frag.interior.is_empty() {
        return Some(frag.attachments.clone());
    }
    let a = frag.attachments[0];
    let b = *frag.attachments.get(1)?;
    let n = g.num_vertices();
    let mut inside = vec![false; n];
    for &v in &frag.interior {
        inside[v] = true;
    }
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &w in g.neighbors(a) {
        if inside[w] && !v_in[w] {
            parent[w] = a;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if g.has_edge(v, b) {
            let mut path = vec![b, v];
            let mut x = v;
            while parent[x] != a {
                x = parent[x];
                path.push(x);
            }
            path.push(a);
            path.reverse();
            return Some(path);
        }
        for &w in g.neighbors(v) {
            if inside[w] && parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Splits face `f` along `path` (whose endpoints lie on `f`), keeping every
/// directed edge on exactly one face.
fn split_face(f: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let a = path[0];
    let b = path[path.len() - 1];
    let ia = f.iter().position(|&v| v == a).expect("attachment on face");
    let rotated: Vec<usize> = f[ia..].iter().chain(&f[..ia]).copied().collect();
    let ib = rotated.iter().position(|&v| v == b).expect("attachment on face");
    let inner = &path[1..path.len() - 1];
    let mut f1 = rotated[..=ib].to_vec();
    f1.extend(inner.iter().rev());
    let mut f2 = rotated[ib..].to_vec();
    f2.push(a);
    f2.extend(inner.iter());
    (f1, f2)
}
