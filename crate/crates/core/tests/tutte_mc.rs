use nalgebra::Vector2;
use polyflex::geometry::{catalog, validate_realization};
use polyflex::graph::{truncate_three_vertex, vertex_splits, Graph};
use polyflex::tutte_mc::*;
use polyflex::{Error, PolyhedralGraph, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k4() -> PolyhedralGraph {
    PolyhedralGraph::from_faces(4, vec![vec![0, 1, 2], vec![0, 3, 1], vec![1, 3, 2], vec![2, 3, 0]]).unwrap()
}

fn unit_triangle() -> [Vector2<f64>; 3] {
    let at = |deg: f64| Vector2::new(deg.to_radians().cos(), deg.to_radians().sin());
    [at(90.0), at(210.0), at(330.0)]
}

fn random_polyhedral(rng: &mut ChaCha8Rng, n: usize) -> PolyhedralGraph {
    let mut g = k4();
    while g.num_vertices() < n {
        let v = rng.random_range(0..g.num_vertices());
        let splits = vertex_splits(&g, v);
        if !splits.is_empty() {
            g = splits[rng.random_range(0..splits.len())].clone();
        }
    }
    g
}

fn random_partial(rng: &mut ChaCha8Rng, g: &PolyhedralGraph) -> Vec<f64> {
    (0..g.num_edges()).map(|_| rng.random_range(0.2..5.0)).collect()
}

fn shoelace(pts: &[Vector2<f64>]) -> f64 {
    let m = pts.len();
    (0..m)
        .map(|k| pts[k].x * pts[(k + 1) % m].y - pts[k].y * pts[(k + 1) % m].x)
        .sum::<f64>()
        / 2.0
}

fn face_points(f: &PlanarStressedFramework, k: usize) -> Vec<Vector2<f64>> {
    f.graph().face(k).iter().map(|&i| f.position(i)).collect()
}

/// Interior positions by Gauss-Seidel relaxation: every free vertex moves
/// to the weighted mean of its neighbors.
fn relaxation_oracle(g: &PolyhedralGraph, delta: usize, outer: [Vector2<f64>; 3], w: &[f64]) -> Vec<Vector2<f64>> {
    let tri = g.face(delta).to_vec();
    let mut p = vec![Vector2::zeros(); g.num_vertices()];
    for (k, &v) in tri.iter().enumerate() {
        p[v] = outer[k];
    }
    for _ in 0..20000 {
        let mut moved: f64 = 0.0;
        for v in (0..g.num_vertices()).filter(|v| !tri.contains(v)) {
            let mut num = Vector2::zeros();
            let mut den = 0.0;
            for &u in g.neighbors(v) {
                let e = g.edge_index(u, v).unwrap();
                num += p[u] * w[e];
                den += w[e];
            }
            let next = num / den;
            moved = moved.max((next - p[v]).norm());
            p[v] = next;
        }
        if moved < 1e-15 {
            break;
        }
    }
    p
}

fn triangular_face(g: &PolyhedralGraph) -> usize {
    (0..g.num_faces()).find(|&k| g.is_triangle(k)).unwrap()
}

fn truncated_tetrahedron() -> PolyhedralGraph {
    let mut g = k4();
    for v in 0..4 {
        g = truncate_three_vertex(&g, v).unwrap();
    }
    g
}

#[test]
fn k4_self_stress() {
    let g = k4();
    let v = unit_triangle();
    let mut pos = vec![Vector2::zeros(); 4];
    for (k, &i) in g.face(0).iter().enumerate() {
        pos[i] = v[k];
    }
    // equilibrium at an outer vertex: v_a = x (v_b + v_c - 2 v_a) = -3 x v_a
    let stress: Vec<f64> = g
        .edges()
        .iter()
        .map(|&[a, b]| if a == 3 || b == 3 { 1.0 } else { -1.0 / 3.0 })
        .collect();
    let f = PlanarStressedFramework::new(g.clone(), 0, pos.clone(), stress).unwrap();
    assert!(check_self_stress(&f) < 1e-12);
    let zero = f.with_stress(vec![0.0; 6]).unwrap();
    assert_eq!(check_self_stress(&zero), 0.0);

    let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let line = [Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), Vector2::new(2.0, 0.0)];
    assert!(equilibrium_residual(&path, &line, &[1.0, 1.0]).unwrap() > 0.1);
}

#[test]
fn k4_tutte_embedding() {
    let g = k4();
    let f = tutte_embed(&g, 0, unit_triangle(), &[1.0; 6]).unwrap();
    assert!(f.position(3).norm() < 1e-14);
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let expected = if a == 3 || b == 3 { 1.0 } else { -1.0 / 3.0 };
        assert!((f.stress()[e] - expected).abs() < 1e-14);
    }
    assert!(check_self_stress(&f) < 1e-14);
}

#[test]
fn tutte_needs_a_triangle() {
    let (ct, _) = catalog("cube").unwrap();
    let g = PolyhedralGraph::from_combinatorial_type(&ct).unwrap();
    let err = tutte_embed(&g, 0, unit_triangle(), &vec![1.0; g.num_edges()]).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    let collinear = [Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), Vector2::new(2.0, 0.0)];
    assert!(matches!(tutte_embed(&k4(), 0, collinear, &[1.0; 6]), Err(Error::Precondition(_))));
    let mut bad = vec![1.0; 6];
    bad[k4().edge_index(0, 3).unwrap()] = 0.0;
    assert!(matches!(tutte_embed(&k4(), 0, unit_triangle(), &bad), Err(Error::Precondition(_))));
}

#[test]
fn truncated_tetrahedron_drawing() {
    let g = truncated_tetrahedron();
    assert_eq!((g.num_vertices(), g.num_edges(), g.num_faces()), (12, 18, 8));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let delta = triangular_face(&g);
    let f = tutte_embed(&g, delta, unit_triangle(), &random_partial(&mut rng, &g)).unwrap();
    assert!(f.faces_strictly_convex(1e-9));
    let s = f.orientation();
    for k in (0..g.num_faces()).filter(|&k| k != delta) {
        let pts = face_points(&f, k);
        let m = pts.len();
        for x in 0..m {
            let (a, b, c) = (pts[x], pts[(x + 1) % m], pts[(x + 2) % m]);
            let turn = (b - a).x * (c - b).y - (b - a).y * (c - b).x;
            assert!(s * turn > 0.0);
        }
    }
}

#[test]
fn tutte_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 30 {
        let n = rng.random_range(4..=14);
        let g = random_polyhedral(&mut rng, n);
        let Some(delta) = (0..g.num_faces()).find(|&k| g.is_triangle(k)) else {
            continue;
        };
        let w = random_partial(&mut rng, &g);
        let f = tutte_embed(&g, delta, unit_triangle(), &w).unwrap();
        assert!(check_self_stress(&f) < 1e-10, "equilibrium {}", check_self_stress(&f));
        assert!(f.faces_strictly_convex(1e-12));
        let oracle = relaxation_oracle(&g, delta, unit_triangle(), &w);
        for i in 0..g.num_vertices() {
            assert!((oracle[i] - f.position(i)).norm() < 1e-10);
        }
        let outer = shoelace(&face_points(&f, delta)).abs();
        let inner: f64 = (0..g.num_faces())
            .filter(|&k| k != delta)
            .map(|k| shoelace(&face_points(&f, k)))
            .sum::<f64>()
            .abs();
        let each_positive = (0..g.num_faces())
            .filter(|&k| k != delta)
            .all(|k| f.face_area(k) > 0.0);
        assert!(each_positive);
        assert!((inner - outer).abs() < 1e-12 * outer);
        for (e, &[a, b]) in g.edges().iter().enumerate() {
            let on_outer = g.face(delta).contains(&a) && g.face(delta).contains(&b);
            assert_eq!(on_outer, f.stress()[e] < 0.0);
        }
        checked += 1;
    }
}

#[test]
fn k4_reciprocal_and_lift() {
    let f = tutte_embed(&k4(), 0, unit_triangle(), &[1.0; 6]).unwrap();
    let w = reciprocal_build(&f, (0, Vector2::zeros()), 1e-12).unwrap();
    assert_eq!(w.positions().len(), 4);
    assert!(reciprocity_residual(&f, &w) < 1e-12);
    let base = f.graph().face(0)[0];
    let lift = mc_lift(&f, &w, (base, 0.0), 1e-12).unwrap();
    for &i in f.graph().face(0) {
        assert!(lift.height(i).abs() < 1e-14);
    }
    // face (center, a, b) rises from 0 on the edge ab at distance 1/2 to
    // t at the center, so its slope has norm 2t; the jump of 2t across ab
    // equals |ω_ab| |v_b - v_a| = sqrt(3)/3, hence t = 1/(2 sqrt(3))
    let t = 1.0 / (2.0 * 3f64.sqrt());
    assert!((lift.height(3) - t).abs() < 1e-14, "{}", lift.height(3));

    let zero = f.with_stress(vec![0.0; 6]).unwrap();
    let base_w = Vector2::new(0.3, -0.2);
    let wz = reciprocal_build(&zero, (2, base_w), 1e-12).unwrap();
    assert!(wz.positions().iter().all(|p| *p == base_w));
    let flat = mc_lift(&zero, &wz, (0, 1.5), 1e-12).unwrap();
    let plane = |i: usize| 1.5 + base_w.dot(&(f.position(i) - f.position(0)));
    assert!((0..4).all(|i| (flat.height(i) - plane(i)).abs() < 1e-14));
    let zw = reciprocal_build(&zero, (2, Vector2::zeros()), 1e-12).unwrap();
    let level = mc_lift(&zero, &zw, (1, 2.0), 1e-12).unwrap();
    assert!(level.heights().iter().all(|&h| h == 2.0));
}

#[test]
fn perturbed_stress_is_inconsistent() {
    let f = tutte_embed(&k4(), 0, unit_triangle(), &[1.0, 2.0, 1.5, 1.0, 0.7, 1.1]).unwrap();
    let mut s = f.stress().to_vec();
    s[4] *= 1.01;
    let bad = f.with_stress(s).unwrap();
    assert!(matches!(reciprocal_build(&bad, (0, Vector2::zeros()), 1e-10), Err(Error::InconsistentStress(_))));
    let w = reciprocal_build(&f, (0, Vector2::zeros()), 1e-10).unwrap();
    // the same reciprocal against a drawing with the center moved
    let mut v = f.positions().to_vec();
    v[3] += Vector2::new(0.05, 0.02);
    let moved = PlanarStressedFramework::new(f.graph().clone(), 0, v, f.stress().to_vec()).unwrap();
    assert!(matches!(mc_lift(&moved, &w, (0, 0.0), 1e-10), Err(Error::FaceChoiceMismatch(_))));
}

#[test]
fn lifts_of_random_tutte_drawings() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = ToleranceConfig::default();
    for _ in 0..20 {
        let n = rng.random_range(5..=14);
        let g = random_polyhedral(&mut rng, n);
        let Some(delta) = (0..g.num_faces()).find(|&k| g.is_triangle(k)) else {
            continue;
        };
        let f = tutte_embed(&g, delta, unit_triangle(), &random_partial(&mut rng, &g)).unwrap();
        let w = reciprocal_build(&f, (delta, Vector2::zeros()), 1e-10).unwrap();
        assert!(reciprocity_residual(&f, &w) < 1e-10);
        let lift = mc_lift(&f, &w, (g.face(delta)[0], 0.0), 1e-10).unwrap();
        let res = lift_coplanarity_residual(&g, f.positions(), lift.heights()).unwrap();
        assert!(res < 1e-10, "coplanarity {res}");
        let interior_above = (0..g.num_vertices())
            .filter(|i| !g.face(delta).contains(i))
            .all(|i| lift.height(i) > 0.0);
        assert!(interior_above);
        let (ct, r) = lift_to_polytope(&f, &lift, &tol).unwrap();
        assert!(validate_realization(&ct, &r, &tol).unwrap().is_strictly_convex);
        let back = stress_from_lift(&g, delta, f.positions(), lift.heights(), 1e-9).unwrap();
        let scale = f.stress().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in back.stress().iter().zip(f.stress()) {
            assert!((a - b).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn lift_to_polytope_examples() {
    let tol = ToleranceConfig::default();
    let f = tutte_embed(&k4(), 0, unit_triangle(), &[1.0; 6]).unwrap();
    let w = reciprocal_build(&f, (0, Vector2::zeros()), 1e-12).unwrap();
    let lift = mc_lift(&f, &w, (0, 0.0), 1e-12).unwrap();
    let (ct, r) = lift_to_polytope(&f, &lift, &tol).unwrap();
    assert_eq!((ct.num_vertices(), ct.num_facets()), (4, 4));
    assert!(validate_realization(&ct, &r, &tol).unwrap().is_strictly_convex);

    let mut s = f.stress().to_vec();
    let spoke = f.graph().edge_index(0, 3).unwrap();
    s[spoke] = -0.5;
    let mixed = f.with_stress(s).unwrap();
    assert_eq!(lift_to_polytope(&mixed, &lift, &tol).unwrap_err(), Error::SignConditionViolated(spoke));

    let g = truncated_tetrahedron();
    let delta = triangular_face(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = tutte_embed(&g, delta, unit_triangle(), &random_partial(&mut rng, &g)).unwrap();
    let w = reciprocal_build(&f, (delta, Vector2::zeros()), 1e-10).unwrap();
    let lift = mc_lift(&f, &w, (0, 0.0), 1e-10).unwrap();
    let (ct, r) = lift_to_polytope(&f, &lift, &tol).unwrap();
    assert!(validate_realization(&ct, &r, &tol).unwrap().is_strictly_convex);
    let sizes: Vec<usize> = ct.facets().iter().map(|f| f.len()).collect();
    assert_eq!(sizes.iter().filter(|&&m| m == 3).count(), 4);
    assert_eq!(sizes.iter().filter(|&&m| m == 6).count(), 4);
}

#[test]
fn stress_from_lift_examples() {
    let f = tutte_embed(&k4(), 0, unit_triangle(), &[1.0; 6]).unwrap();
    let flat = stress_from_lift(f.graph(), 0, f.positions(), &[0.3; 4], 1e-12).unwrap();
    assert!(flat.stress().iter().all(|&x| x.abs() < 1e-14));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = truncated_tetrahedron();
    let delta = triangular_face(&g);
    let f = tutte_embed(&g, delta, unit_triangle(), &random_partial(&mut rng, &g)).unwrap();
    let noise: Vec<f64> = (0..g.num_vertices()).map(|_| rng.random_range(-1.0..1.0)).collect();
    assert!(matches!(stress_from_lift(&g, delta, f.positions(), &noise, 1e-9), Err(Error::NotALift(_))));
}

#[test]
fn mc_position_transform_examples() {
    let tol = ToleranceConfig::default();
    for name in ["tetrahedron", "icosahedron"] {
        let (ct, r) = catalog(name).unwrap();
        for delta in 0..ct.num_facets() {
            let (t, f) = mc_position_transform(&ct, &r, delta, &tol).unwrap();
            assert!(t.dim() == 3);
            assert!(check_self_stress(&f) < 1e-10);
            assert!(f.faces_strictly_convex(1e-9));
            let outer = f.graph().face(delta);
            for (e, &[a, b]) in f.graph().edges().iter().enumerate() {
                let on_outer = outer.contains(&a) && outer.contains(&b);
                assert_eq!(on_outer, f.stress()[e] < 0.0);
            }
            if name == "tetrahedron" {
                // the drawing is the Tutte embedding of its own stress
                let mut pinned = [Vector2::zeros(); 3];
                for (k, &i) in outer.iter().enumerate() {
                    pinned[k] = f.position(i);
                }
                let again = tutte_embed(f.graph(), delta, pinned, f.stress()).unwrap();
                for i in 0..4 {
                    assert!((again.position(i) - f.position(i)).norm() < 1e-12);
                }
            } else {
                assert_eq!(f.stress().len(), 30);
            }
        }
    }
    let (ct, r) = catalog("cube").unwrap();
    assert!(matches!(mc_position_transform(&ct, &r, 0, &tol), Err(Error::Precondition(_))));
}

#[test]
fn pipeline_round_trip() {
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    while done < 15 {
        let n = rng.random_range(5..=12);
        let g = random_polyhedral(&mut rng, n);
        let Some(delta) = (0..g.num_faces()).find(|&k| g.is_triangle(k)) else {
            continue;
        };
        let f = tutte_embed(&g, delta, unit_triangle(), &random_partial(&mut rng, &g)).unwrap();
        let w = reciprocal_build(&f, (delta, Vector2::zeros()), 1e-10).unwrap();
        let lift = mc_lift(&f, &w, (g.face(delta)[0], 0.0), 1e-10).unwrap();
        let (ct, r) = lift_to_polytope(&f, &lift, &tol).unwrap();
        let (_, back) = mc_position_transform(&ct, &r, delta, &tol).unwrap();
        let scale = f.stress().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in back.stress().iter().zip(f.stress()) {
            assert!((a - b).abs() < 1e-8 * scale, "{a} vs {b}");
        }
        done += 1;
    }
}
