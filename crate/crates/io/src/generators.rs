//! Seeded random inputs. Every generator takes the RNG explicitly, so a
//! seed fixes the whole experiment.

use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use polyflex::geometry::{hull_realization, transform_apply, ProjectiveTransform, HULL_EPS};
use polyflex::graph::{polyhedral_corpus, vertex_splits};
use polyflex::tutte_mc::tutte_realization;
use polyflex::{CombinatorialType, PolyhedralGraph, Realization, Result, ToleranceConfig};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex hull of `k` points drawn uniformly from `[-1, 1]^3`; redraws
/// until the hull is full-dimensional.
pub fn random_hull(rng: &mut impl Rng, k: usize) -> (CombinatorialType, Realization) {
    loop {
        let pts: Vec<Vector3<f64>> =
            (0..k.max(4)).map(|_| Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect();
        if let Ok(h) = hull_realization(&pts, HULL_EPS) {
            return h.into_parts();
        }
    }
}

/// Upper bound on the condition number of [`generic_affine`].
pub const AFFINE_MAX_CONDITION: f64 = 10.0;

/// `x -> A x + t` with `A = I + E`, `E` uniform in `[-0.4, 0.4]`, and
/// `t` uniform in `[-1, 1]^3`; redrawn until `cond(A) <` [`AFFINE_MAX_CONDITION`].
pub fn generic_affine(rng: &mut impl Rng) -> (Matrix3<f64>, Vector3<f64>) {
    loop {
        let a = Matrix3::identity() + Matrix3::from_fn(|_, _| rng.random_range(-0.4..0.4));
        let t = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let sv = a.singular_values();
        if sv.min() > 0.0 && sv.max() / sv.min() < AFFINE_MAX_CONDITION {
            return (a, t);
        }
    }
}

pub fn affine_transform(a: &Matrix3<f64>, t: &Vector3<f64>) -> ProjectiveTransform {
    let a = DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
    ProjectiveTransform::affine(&a, &DVector::from_column_slice(t.as_slice())).expect("invertible by construction")
}

/// A polyhedral graph on `n >= 4` vertices with a triangular face, grown
/// from `K4` by random vertex splits.
pub fn random_polyhedral_graph(rng: &mut impl Rng, n: usize) -> PolyhedralGraph {
    let k4 = polyhedral_corpus(4).swap_remove(0).swap_remove(0);
    loop {
        let mut g = k4.clone();
        while g.num_vertices() < n {
            let options: Vec<PolyhedralGraph> = (0..g.num_vertices()).flat_map(|v| vertex_splits(&g, v)).collect();
            g = options.choose(rng).expect("K4 and its splits can be split").clone();
        }
        if (0..g.num_faces()).any(|k| g.is_triangle(k)) {
            return g;
        }
    }
}

/// A strictly convex realization of `g` with facet `k` on face `k`: the
/// Tutte lift over the first triangle with stresses uniform in `[0.5, 2]`,
/// moved by [`generic_affine`]. `None` if `g` has no triangle.
pub fn generic_realization(g: &PolyhedralGraph, rng: &mut impl Rng, tol: &ToleranceConfig) -> Option<Result<Realization>> {
    let delta = (0..g.num_faces()).find(|&k| g.is_triangle(k))?;
    let at = |deg: f64| Vector2::new(deg.to_radians().cos(), deg.to_radians().sin());
    let partial: Vec<f64> = (0..g.num_edges()).map(|_| rng.random_range(0.5..2.0)).collect();
    let (a, t) = generic_affine(rng);
    Some(tutte_realization(g, delta, [at(90.0), at(210.0), at(330.0)], &partial, tol).and_then(|(ct, r)| {
        transform_apply(&ct, &r, &affine_transform(&a, &t))
    }))
}

/// Regular tetrahedron `(±1, ±1, ±1)` (even sign patterns) with every
/// coordinate moved by up to 0.3.
pub fn random_tetrahedron(rng: &mut impl Rng) -> (CombinatorialType, Realization) {
    let pts: Vec<Vector3<f64>> = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|c| Vector3::new(c[0], c[1], c[2]) + Vector3::from_fn(|_, _| rng.random_range(-0.3..0.3)))
        .collect();
    hull_realization(&pts, HULL_EPS).expect("a perturbed tetrahedron spans").into_parts()
}

/// `k` unit vectors, redrawn until every three are independent with
/// `|det| > 0.05`.
pub fn random_generators(rng: &mut impl Rng, k: usize) -> Vec<Vector3<f64>> {
    'draw: loop {
        let g: Vec<Vector3<f64>> = (0..k).map(|_| random_axis(rng)).collect();
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    if g[a].cross(&g[b]).dot(&g[c]).abs() <= 0.05 {
                        continue 'draw;
                    }
                }
            }
        }
        return g;
    }
}

/// A unit vector uniform on the sphere.
pub fn random_axis(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}
