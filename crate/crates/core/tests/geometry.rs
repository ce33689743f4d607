use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use polyflex::geometry::{
    catalog, congruence_class_check, hull_realization, is_well_shaped, transform_apply, validate_realization,
    well_shaping_transform, CatalogEntry, ProjectiveTransform, HULL_EPS,
};
use polyflex::graph::build_edge_graph;
use polyflex::{CombinatorialType, Error, Realization, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn counts(ct: &CombinatorialType) -> (usize, usize, usize) {
    (ct.num_vertices(), build_edge_graph(ct).unwrap().num_edges(), ct.num_facets())
}

#[test]
fn catalog_sizes() {
    let expected = [
        ("tetrahedron", (4, 6, 4)),
        ("cube", (8, 12, 6)),
        ("octahedron", (6, 12, 8)),
        ("dodecahedron", (20, 30, 12)),
        ("icosahedron", (12, 30, 20)),
        ("cuboctahedron", (12, 24, 14)),
        ("n_prism(5)", (10, 15, 7)),
        ("n_antiprism(8)", (16, 32, 18)),
        ("permutahedron", (24, 36, 14)),
        ("cube_with_roof", (9, 16, 9)),
        ("stacked_cuboctahedron", (14, 32, 20)),
        ("antiprism_stacked_k4(8)", (32, 80, 50)),
    ];
    for (name, c) in expected {
        let (ct, _) = catalog(name).unwrap();
        assert_eq!(counts(&ct), c, "{name}");
    }
    let (dodeca, _) = catalog("dodecahedron").unwrap();
    assert!(dodeca.facets().iter().all(|f| f.len() == 5));
    assert!(matches!(catalog("rhombicuboctahedron"), Err(Error::UnknownName(_))));
}

#[test]
fn catalog_entries_validate_tightly() {
    for entry in CatalogEntry::all() {
        let (ct, r) = catalog(&entry.to_string()).unwrap();
        let rep = validate_realization(&ct, &r, &tol()).unwrap();
        assert!(rep.is_strictly_convex, "{entry}");
        assert!(rep.max_coplanarity_residual < 1e-12, "{entry}: {}", rep.max_coplanarity_residual);
        assert!(rep.max_norm_residual < 1e-12, "{entry}");
    }
}

#[test]
fn five_directions_has_five_edge_directions() {
    let (ct, r) = catalog("five_directions").unwrap();
    let g = build_edge_graph(&ct).unwrap();
    let mut dirs: Vec<Vector3<f64>> = Vec::new();
    for &[i, j] in g.edges() {
        let u = (r.point3(i) - r.point3(j)).normalize();
        if !dirs.iter().any(|d| d.cross(&u).norm() < 1e-9) {
            dirs.push(u);
        }
    }
    assert_eq!(dirs.len(), 5);
}

#[test]
fn validation_examples() {
    let (ct, r) = catalog("cube").unwrap();
    let rep = validate_realization(&ct, &r, &tol()).unwrap();
    assert_eq!(rep.max_coplanarity_residual, 0.0);
    assert!(rep.is_strictly_convex);

    let mut normals = r.normals().clone();
    let flipped = -normals.column(0);
    normals.set_column(0, &flipped);
    let bad = Realization::new(r.points().clone(), normals).unwrap();
    let rep = validate_realization(&ct, &bad, &tol()).unwrap();
    assert_eq!(rep.max_norm_residual, 0.0);
    assert!(!rep.is_convex);

    // Push vertex 0 by 1e-3 along the diagonal away from the center: it
    // leaves each of its three facet planes by 1e-3.
    let mut pts = r.points().clone();
    let p0 = r.point3(0);
    let shift = Vector3::new(p0.x.signum(), p0.y.signum(), p0.z.signum()) * 1e-3;
    for k in 0..3 {
        pts[(k, 0)] += shift[k];
    }
    let moved = Realization::new(pts, r.normals().clone()).unwrap();
    let rep = validate_realization(&ct, &moved, &tol()).unwrap();
    assert!((rep.max_coplanarity_residual - 1e-3).abs() < 1e-12);
}

/// Facets of the hull by exhaustive search over point triples.
fn brute_force_facets(points: &[Vector3<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = (points[j] - points[i]).cross(&(points[k] - points[i]));
                if nrm.norm() < 1e-12 {
                    continue;
                }
                let h: Vec<f64> = points.iter().map(|p| (p - points[i]).dot(&nrm)).collect();
                let above = h.iter().any(|&x| x > 1e-10);
                let below = h.iter().any(|&x| x < -1e-10);
                if above && below {
                    continue;
                }
                let mut f: Vec<usize> = (0..n).filter(|&m| h[m].abs() <= 1e-10).collect();
                f.sort_unstable();
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    out.sort();
    out
}

#[test]
fn hull_matches_brute_force_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.random_range(4..=20);
        let pts: Vec<Vector3<f64>> = (0..n)
            .map(|_| Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let hull = hull_realization(&pts, HULL_EPS).unwrap();
        let mut ours: Vec<Vec<usize>> = hull
            .combinatorial_type
            .facets()
            .iter()
            .map(|f| {
                let mut s: Vec<usize> = f.iter().map(|&v| hull.source[v]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        ours.sort();
        assert_eq!(ours, brute_force_facets(&pts));
    }
}

#[test]
fn hull_merges_coplanar_points_and_drops_interior() {
    let mut pts: Vec<Vector3<f64>> = catalog("cube").unwrap().1.points3();
    pts.push(Vector3::new(0.0, 0.0, 0.0));
    pts.push(Vector3::new(0.3, 0.2, 1.0));
    pts.push(Vector3::new(1.0, 1.0, 0.0));
    let hull = hull_realization(&pts, HULL_EPS).unwrap();
    assert_eq!(counts(&hull.combinatorial_type), (8, 12, 6));
    assert!(hull.source.iter().all(|&i| i < 8));
}

#[test]
fn hull_rejects_flat_input() {
    let pts: Vec<Vector3<f64>> = (0..6).map(|k| Vector3::new(k as f64, (k * k) as f64, 0.0)).collect();
    assert_eq!(hull_realization(&pts, HULL_EPS).unwrap_err(), Error::DegenerateInput);
}

#[test]
fn hull_is_idempotent() {
    for entry in CatalogEntry::all() {
        let (ct, r) = catalog(&entry.to_string()).unwrap();
        let (ct2, _) = hull_realization(&r.points3(), HULL_EPS).unwrap().into_parts();
        assert_eq!(ct.facet_signature(), ct2.facet_signature(), "{entry}");
    }
}

#[test]
fn transforms() {
    let (ct, r) = catalog("cube").unwrap();
    let scale = ProjectiveTransform::affine(&(DMatrix::identity(3, 3) * 2.0), &DVector::zeros(3)).unwrap();
    let big = transform_apply(&ct, &r, &scale).unwrap();
    assert!((big.points() - r.points() * 2.0).amax() < 1e-15);
    assert!((big.normals() - r.normals()).amax() < 1e-15);

    let rot = Rotation3::from_euler_angles(0.3, -0.2, 0.9).into_inner();
    let t = ProjectiveTransform::rigid3(&rot, &Vector3::new(1.0, 2.0, 3.0));
    let moved = transform_apply(&ct, &r, &t).unwrap();
    for s in 0..6 {
        assert!((moved.normal3(s) - rot * r.normal3(s)).norm() < 1e-14);
    }
    let c = congruence_class_check(&ct, &r, &moved, &tol()).unwrap();
    assert!(c.congruent && c.equivalent);

    // A projective map sending the plane z = 0 to infinity is inadmissible.
    let mut m = DMatrix::identity(4, 4);
    m[(3, 2)] = 1.0;
    m[(3, 3)] = 0.0;
    m[(2, 3)] = 1.0;
    let p = ProjectiveTransform::new(m).unwrap();
    assert!(matches!(transform_apply(&ct, &r, &p), Err(Error::Inadmissible(_))));
}

#[test]
fn random_affine_dodecahedron_stays_convex() {
    let (ct, r) = catalog("dodecahedron").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 } + rng.random_range(-0.4..0.4));
        let svd = a.clone().svd(false, false);
        let cond = svd.singular_values.max() / svd.singular_values.min();
        assert!(cond < 10.0);
        let t = ProjectiveTransform::affine(&a, &DVector::from_vec(vec![0.1, 0.2, -0.3])).unwrap();
        let img = transform_apply(&ct, &r, &t).unwrap();
        let rep = validate_realization(&ct, &img, &tol()).unwrap();
        assert!(rep.is_strictly_convex);
    }
}

#[test]
fn congruence_examples() {
    let (ct, r) = catalog("cube").unwrap();
    // Rhombic prism: edge vectors (2,0,0), 2(cos t, sin t, 0), (0,0,2).
    let t: f64 = 1.2;
    let a = Matrix3::new(1.0, t.cos(), 0.0, 0.0, t.sin(), 0.0, 0.0, 0.0, 1.0);
    let sheared = transform_apply(
        &ct,
        &r,
        &ProjectiveTransform::affine(&DMatrix::from_column_slice(3, 3, a.as_slice()), &DVector::zeros(3)).unwrap(),
    )
    .unwrap();
    let c = congruence_class_check(&ct, &r, &sheared, &tol()).unwrap();
    assert!(c.equivalent && !c.congruent);
    let double = Realization::new(r.points() * 2.0, r.normals().clone()).unwrap();
    let c = congruence_class_check(&ct, &r, &double, &tol()).unwrap();
    assert!(!c.equivalent && !c.congruent);
}

fn pyramid(apex: Vector3<f64>) -> (CombinatorialType, Realization, usize) {
    let mut pts = vec![
        Vector3::new(-2.0, -2.0, 0.0),
        Vector3::new(2.0, -2.0, 0.0),
        Vector3::new(2.0, 2.0, 0.0),
        Vector3::new(-2.0, 2.0, 0.0),
    ];
    pts.push(apex);
    let (ct, r) = hull_realization(&pts, HULL_EPS).unwrap().into_parts();
    let base = (0..ct.num_facets()).find(|&s| ct.facet(s).len() == 4).unwrap();
    (ct, r, base)
}

#[test]
fn well_shapedness() {
    let (ct, r, base) = pyramid(Vector3::new(0.0, 0.0, 1.0));
    assert!(is_well_shaped(&ct, &r, base, &tol()).unwrap());
    let (ct, r, base) = pyramid(Vector3::new(5.0, 0.5, 1.0));
    assert!(!is_well_shaped(&ct, &r, base, &tol()).unwrap());
    let t = well_shaping_transform(&ct, &r, base, &tol()).unwrap();
    let img = transform_apply(&ct, &r, &t).unwrap();
    assert!(is_well_shaped(&ct, &img, base, &tol()).unwrap());
    assert!(validate_realization(&ct, &img, &tol()).unwrap().is_strictly_convex);

    // A tall prism over its small top: the bottom vertices project onto the
    // boundary of the top.
    let (ct, r) = catalog("n_prism(4)").unwrap();
    let tall = Realization::new(
        DMatrix::from_fn(3, 8, |i, j| if i == 2 { r.points()[(i, j)] * 10.0 } else { r.points()[(i, j)] }),
        r.normals().clone(),
    )
    .unwrap();
    let top = (0..ct.num_facets()).find(|&s| tall.normal3(s).z > 0.9).unwrap();
    assert!(!is_well_shaped(&ct, &tall, top, &tol()).unwrap());

    let (ct, r) = catalog("cube").unwrap();
    let t = well_shaping_transform(&ct, &r, 0, &tol()).unwrap();
    let img = transform_apply(&ct, &r, &t).unwrap();
    assert!(is_well_shaped(&ct, &img, 0, &tol()).unwrap());

    let (ct, r, base) = pyramid(Vector3::new(0.0, 0.0, 1.0));
    assert!(well_shaping_transform(&ct, &r, base, &tol()).unwrap().is_identity(0.0));
}

#[test]
fn well_shaping_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let names = ["cube", "dodecahedron", "icosahedron", "cuboctahedron", "n_prism(5)", "permutahedron"];
    for k in 0..100 {
        let (_, r) = catalog(names[k % names.len()]).unwrap();
        let pts: Vec<Vector3<f64>> = r
            .points3()
            .iter()
            .map(|p| p + Vector3::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
            .collect();
        let (ct, r) = hull_realization(&pts, HULL_EPS).unwrap().into_parts();
        let sigma = rng.random_range(0..ct.num_facets());
        let t = well_shaping_transform(&ct, &r, sigma, &tol()).unwrap();
        let img = transform_apply(&ct, &r, &t).unwrap();
        assert!(is_well_shaped(&ct, &img, sigma, &tol()).unwrap());
        assert!(validate_realization(&ct, &img, &tol()).unwrap().is_strictly_convex);
    }
}
