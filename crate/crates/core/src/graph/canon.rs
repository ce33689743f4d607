use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::PolyhedralGraph;

/// Canonical code of the embedded graph, invariant under relabeling and
/// mirroring. For polyhedral graphs the embedding is unique up to mirror
/// image, so two graphs are isomorphic iff their codes agree.
pub fn canonical_code(g: &PolyhedralGraph) -> Vec<usize> {
    let n = g.num_vertices();
    let rotations: Vec<Vec<usize>> = (0..n).map(|v| g.rotation(v)).collect();
    let mut best: Option<Vec<usize>> = None;
    for &[a, b] in g.edges() {
        for (s, t) in [(a, b), (b, a)] {
            for mirror in [false, true] {
                let code = code_from(&rotations, s, t, mirror, best.as_deref());
                if let Some(c) = code {
                    best = Some(c);
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Breadth-first relabeling from dart `s -> t`; returns the code if it is
/// smaller than `bound`.
fn code_from(rot: &[Vec<usize>], s: usize, t: usize, mirror: bool, bound: Option<&[usize]>) -> Option<Vec<usize>> {
    const SEP: usize = usize::MAX;
    let n = rot.len();
    let mut label = vec![usize::MAX; n];
    let mut reference = vec![usize::MAX; n];
    label[s] = 0;
    reference[s] = t;
    let mut next_label = 1;
    let mut queue = VecDeque::from([s]);
    let mut code = Vec::new();
    let mut smaller = false;
    let mut push = |code: &mut Vec<usize>, x: usize| -> bool {
        if let (false, Some(b)) = (smaller, bound) {
            let k = code.len();
            match b.get(k) {
                Some(&y) if x > y => return false,
                Some(&y) if x < y => smaller = true,
                _ => {}
            }
        }
        code.push(x);
        true
    };
    while let Some(v) = queue.pop_front() {
        let r = &rot[v];
        let d = r.len();
        let start = r.iter().position(|&w| w == reference[v]).expect("reference neighbor");
        for k in 0..d {
            let idx = if mirror { (start + d - k) % d } else { (start + k) % d };
            let w = r[idx];
            if label[w] == usize::MAX {
                label[w] = next_label;
                next_label += 1;
                reference[w] = v;
                queue.push_back(w);
            }
            if !push(&mut code, label[w]) {
                return None;
            }
        }
        if !push(&mut code, SEP) {
            return None;
        }
    }
    match bound {
        Some(b) if !smaller && code.as_slice() >= b => None,
        _ => Some(code),
    }
}
