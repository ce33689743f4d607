use alloc::vec;
use alloc::vec::Vec;

use super::Graph;

/// A vertex set of size at most two whose removal disconnects the graph
/// (empty if the graph is already disconnected), or `None` if there is none.
pub fn find_separator(g: &Graph) -> Option<Vec<usize>> {
    if let Some(cut) = cut_without(g, None) {
        return Some(cut);
    }
    (0..g.num_vertices()).find_map(|u| cut_without(g, Some(u)))
}

/// 3-connectivity: at least 4 vertices and no separator of size ≤ 2.
pub fn is_three_connected(g: &Graph) -> bool {
    g.num_vertices() >= 4 && find_separator(g).is_none()
}

/// With `skip` removed: the disconnecting set if the rest is disconnected
/// or has an articulation point.
fn cut_without(g: &Graph, skip: Option<usize>) -> Option<Vec<usize>> {
    let n = g.num_vertices();
    let alive = |v: usize| Some(v) != skip;
    let total = n - usize::from(skip.is_some());
    let Some(root) = (0..n).find(|&v| alive(v)) else {
        return None;
    };
    const NONE: usize = usize::MAX;
    let mut disc = vec![NONE; n];
    let mut low = vec![0; n];
    let mut parent = vec![NONE; n];
    let mut root_children = 0;
    let mut articulation = None;
    let mut time = 0;
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    disc[root] = time;
    low[root] = time;
    time += 1;
    while let Some(&(v, next)) = stack.last() {
        let nbrs = g.neighbors(v);
        if next < nbrs.len() {
            let w = nbrs[next];
            stack.last_mut().expect("nonempty").1 += 1;
            if !alive(w) {
                continue;
            }
            if disc[w] == NONE {
                parent[w] = v;
                disc[w] = time;
                low[w] = time;
                time += 1;
                if v == root {
                    root_children += 1;
                }
                stack.push((w, 0));
            } else if w != parent[v] {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            let p = parent[v];
            if p != NONE {
                low[p] = low[p].min(low[v]);
                if p != root && low[v] >= disc[p] && articulation.is_none() {
                    articulation = Some(p);
                }
            }
        }
    }
    let visited = disc.iter().filter(|&&d| d != NONE).count();
    let mut cut: Vec<usize> = skip.into_iter().collect();
    if visited < total {
        return Some(cut);
    }
    if root_children > 1 {
        articulation = articulation.or(Some(root));
    }
    articulation.map(|a| {
        cut.push(a);
        cut.sort_unstable();
        cut
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_has_two_cut() {
        let g = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let cut = find_separator(&g).unwrap();
        assert_eq!(cut.len(), 2);
    }

    #[test]
    fn complete_graph_is_three_connected() {
        let g = Graph::new(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j)))).unwrap();
        assert!(is_three_connected(&g));
    }

    #[test]
    fn path_has_articulation() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(find_separator(&g), Some(vec![1]));
    }
}
