//! Exhaustive generation of polyhedral graphs by vertex splitting.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::{canonical_code, is_polyhedral, Graph, PolyhedralGraph};

/// All graphs obtained from `g` by splitting vertex `v` into two adjacent
/// vertices, each of degree at least three, such that the result is
/// polyhedral. The new vertex gets id `n`.
pub fn vertex_splits(g: &PolyhedralGraph, v: usize) -> Vec<PolyhedralGraph> {
    let n = g.num_vertices();
    let rot = g.rotation(v);
    let d = rot.len();
    let mut out = Vec::new();
    // Slot 2k is neighbor rot[k]; slot 2k + 1 is the corner after it.
    for s1 in 0..2 * d {
        for s2 in s1 + 1..2 * d {
            let mut side_a = Vec::new();
            let mut side_b = Vec::new();
            for k in 0..d {
                let slot = 2 * k;
                if slot == s1 || slot == s2 {
                    side_a.push(rot[k]);
                    side_b.push(rot[k]);
                } else if slot > s1 && slot < s2 {
                    side_a.push(rot[k]);
                } else {
                    side_b.push(rot[k]);
                }
            }
            if side_a.len() < 2 || side_b.len() < 2 {
                continue;
            }
            let mut edges: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .filter(|&&[a, b]| a != v && b != v)
                .map(|&[a, b]| (a, b))
                .collect();
            edges.extend(side_a.iter().map(|&u| (v, u)));
            edges.extend(side_b.iter().map(|&u| (n, u)));
            edges.push((v, n));
            let Ok(h) = Graph::new(n + 1, edges) else {
                continue;
            };
            if let Some(pg) = is_polyhedral(&h).into_polyhedral() {
                out.push(pg);
            }
        }
    }
    out
}

/// All polyhedral graphs with at most `max_vertices` vertices, up to
/// isomorphism, grouped by vertex count (`result[k]` has `k + 4` vertices).
///
/// Every polyhedral graph other than K4 arises from a smaller one by a
/// vertex split, so closing K4 under splits is exhaustive.
pub fn polyhedral_corpus(max_vertices: usize) -> Vec<Vec<PolyhedralGraph>> {
    if max_vertices < 4 {
        return Vec::new();
    }
    let k4 = Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).expect("K4");
    let mut levels = vec![vec![is_polyhedral(&k4).into_polyhedral().expect("K4 is polyhedral")]];
    for _ in 5..=max_vertices {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in levels.last().expect("nonempty") {
            for v in 0..g.num_vertices() {
                for h in vertex_splits(g, v) {
                    if seen.insert(canonical_code(&h)) {
                        next.push(h);
                    }
                }
            }
        }
        levels.push(next);
    }
    levels
}
