use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};
use polyflex::constructions::*;
use polyflex::geometry::{catalog, hull_realization, rigid_alignment, HULL_EPS};
use polyflex::graph::build_edge_graph;
use polyflex::rigidity::{affine_flex_detect, build_rigidity_matrix, flex_analysis, trivial_motion_basis, Motion};
use polyflex::{CombinatorialType, Error, Realization, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn face_sizes(ct: &CombinatorialType) -> Vec<usize> {
    let mut s: Vec<usize> = ct.facets().iter().map(Vec::len).collect();
    s.sort_unstable();
    s
}

fn tetra_pair() -> (Realization, Realization) {
    let (_, t) = catalog("tetrahedron").unwrap();
    let neg = Realization::new(-t.points().clone(), -t.normals().clone()).unwrap();
    (t, neg)
}

fn rotation(axis: Vector3<f64>, angle: f64) -> Matrix3<f64> {
    *Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).matrix()
}

fn generic_axis() -> Vector3<f64> {
    Vector3::new(0.3, -0.7, 0.55)
}

#[test]
fn two_simplices_make_a_cuboctahedron() {
    let (t, neg) = tetra_pair();
    let (ct, r, labels) = minkowski_sum(&t, &neg).unwrap();
    assert_eq!(ct.num_vertices(), 12);
    let mut expected = vec![3; 8];
    expected.extend([4; 6]);
    assert_eq!(face_sizes(&ct), expected);
    for (i, &(a, b)) in labels.iter().enumerate() {
        assert!((r.point3(i) - (t.point3(a) + neg.point3(b))).norm() < 1e-15);
    }
}

#[test]
fn sum_with_a_point_translates() {
    let (ct, cube) = catalog("cube").unwrap();
    let shift = Vector3::new(0.5, -2.0, 3.0);
    let point = Realization::new(DMatrix::from_column_slice(3, 1, shift.as_slice()), DMatrix::zeros(3, 0)).unwrap();
    let (ct2, r2, labels) = minkowski_sum(&cube, &point).unwrap();
    assert_eq!(ct2.facet_signature(), ct.facet_signature());
    for (i, &(a, _)) in labels.iter().enumerate() {
        assert_eq!(a, i);
        assert!((r2.point3(i) - cube.point3(a) - shift).norm() < 1e-15);
    }
}

#[test]
fn three_orthogonal_segments_make_a_cube() {
    let z = Zonotope::new(&[Vector3::x() * 2.0, Vector3::y() * 2.0, Vector3::z() * 2.0]).unwrap();
    let (ct, r) = z.realize().unwrap();
    let (cube_ct, _) = catalog("cube").unwrap();
    assert_eq!(face_sizes(&ct), face_sizes(&cube_ct));
    assert!(r.points().amax() == 1.0);
}

#[test]
fn parallel_generators_merge() {
    let z = Zonotope::new(&[Vector3::x(), -Vector3::x() * 2.0, Vector3::y(), Vector3::z(), Vector3::zeros()]).unwrap();
    assert_eq!(z.generators().len(), 3);
    assert!((z.generators()[0] - Vector3::x() * 3.0).norm() < 1e-15);
}

fn random_polytope(rng: &mut ChaCha8Rng, n: usize) -> (CombinatorialType, Realization) {
    let pts: Vec<Vector3<f64>> = (0..n)
        .map(|_| Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    hull_realization(&pts, HULL_EPS).unwrap().into_parts()
}

fn edge_directions(ct: &CombinatorialType, r: &Realization) -> Vec<Vector3<f64>> {
    build_edge_graph(ct)
        .unwrap()
        .edges()
        .iter()
        .map(|&[i, j]| (r.point3(i) - r.point3(j)).normalize())
        .collect()
}

#[test]
fn minkowski_edges_come_from_summands() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let (cp, p) = random_polytope(&mut rng, 8);
        let (cq, q) = random_polytope(&mut rng, 8);
        let (cs, s, _) = minkowski_sum(&p, &q).unwrap();
        let mut dirs = edge_directions(&cp, &p);
        dirs.extend(edge_directions(&cq, &q));
        for u in edge_directions(&cs, &s) {
            assert!(dirs.iter().any(|v| (u - v).norm() < 1e-9 || (u + v).norm() < 1e-9));
        }
    }
}

#[test]
fn cuboctahedron_minkowski_flex() {
    let (t, neg) = tetra_pair();
    let axis = generic_axis();
    let path = minkowski_flex(&t, &neg, |s| rotation(axis, s * 5f64.to_radians()), 20).unwrap();
    assert_eq!(path.len(), 20);
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.certifies_flex(), "{rep:?}");
    assert!(rep.max_length_deviation < 1e-12);
}

#[test]
fn identity_rotation_gives_a_constant_path() {
    let (t, neg) = tetra_pair();
    let path = minkowski_flex(&t, &neg, |_| Matrix3::identity(), 5).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.lengths_constant && rep.endpoints_congruent && !rep.certifies_flex());
}

#[test]
fn large_rotation_breaks_the_type() {
    let (t, neg) = tetra_pair();
    let axis = generic_axis();
    match minkowski_flex(&t, &neg, |s| rotation(axis, s * 90f64.to_radians()), 40) {
        Err(Error::TypeBreak { parameter, sample }) => {
            assert!(parameter < 1.0 && sample > 0);
        }
        other => panic!("{:?}", other.map(|p| p.len())),
    }
}

#[test]
fn parallel_summand_edges_are_rejected() {
    // two cubes: every edge of the sum is the sum of two parallel edges
    let (_, cube) = catalog("cube").unwrap();
    assert!(matches!(
        minkowski_flex(&cube, &cube, |_| Matrix3::identity(), 3),
        Err(Error::SharedEdgeDirection)
    ));
}

#[test]
fn zonotope_flexes() {
    // orthogonal generators stay orthogonal under an axis scaling
    let cube = Zonotope::new(&[Vector3::x(), Vector3::y(), Vector3::z()]).unwrap();
    let path = zonotope_flex(&cube, |t| Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0 + t)), 10).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.lengths_constant && rep.type_constant && rep.endpoints_congruent);

    let rhombic = Zonotope::new(&[
        Vector3::new(1.0, 1.0, 1.0),
        Vector3::new(1.0, 1.0, -1.0),
        Vector3::new(1.0, -1.0, 1.0),
        Vector3::new(-1.0, 1.0, 1.0),
    ])
    .unwrap();
    let shear = |t: f64| {
        let mut m = Matrix3::identity();
        m[(0, 1)] = 0.4 * t;
        m[(2, 0)] = -0.25 * t;
        m
    };
    let path = zonotope_flex(&rhombic, shear, 20).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.certifies_flex(), "{rep:?}");
    assert!(rep.max_length_deviation < 1e-12);

    let z = Zonotope::new(&[
        Vector3::new(1.0, 0.0, 0.2),
        Vector3::new(0.1, 1.0, 0.3),
        Vector3::new(0.6, -0.5, 1.0),
        Vector3::new(-0.4, 0.7, 0.9),
        Vector3::new(0.8, 0.8, -0.5),
    ])
    .unwrap();
    let path = zonotope_flex(&z, |t| Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0 + 0.5 * t)), 20).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.certifies_flex(), "{rep:?}");
}

#[test]
fn stacking() {
    let (ct, r) = catalog("cuboctahedron").unwrap();
    let squares: Vec<usize> = (0..ct.num_facets()).filter(|&s| ct.facet(s).len() == 4).collect();
    let first = squares[0];
    let opposite = *squares
        .iter()
        .find(|&&s| (r.normal3(s) + r.normal3(first)).norm() < 1e-12)
        .unwrap();
    let (ct1, r1) = stack_pyramid(&ct, &r, opposite, 0.3, &tol()).unwrap();
    let (ct2, r2) = stack_pyramid(&ct1, &r1, first, 0.3, &tol()).unwrap();
    assert_eq!((ct2.num_vertices(), ct2.num_facets()), (14, 20));
    let (fig, _) = catalog("stacked_cuboctahedron").unwrap();
    assert_eq!(face_sizes(&ct2), face_sizes(&fig));
    assert!(flex_analysis(&ct2, &r2, &tol()).unwrap().nontrivial_dim >= 1);

    let (ct, r) = catalog("cube").unwrap();
    let top = (0..6).find(|&s| r.normal3(s).z > 0.5).unwrap();
    let (roof, _) = stack_pyramid(&ct, &r, top, 0.5, &tol()).unwrap();
    let (fig, _) = catalog("cube_with_roof").unwrap();
    assert_eq!(face_sizes(&roof), face_sizes(&fig));

    let (ct, r) = catalog("tetrahedron").unwrap();
    let (k4, _) = stack_pyramid(&ct, &r, 0, 0.1, &tol()).unwrap();
    assert_eq!(face_sizes(&k4), vec![3; 6]);

    // neighbouring planes of an octahedron face meet above it
    let (ct, r) = catalog("octahedron").unwrap();
    assert!(matches!(stack_pyramid(&ct, &r, 0, 5.0, &tol()), Err(Error::TooTall)));
}

fn cube_affine_flex() -> (CombinatorialType, Realization, Motion) {
    let (ct, r) = catalog("cube").unwrap();
    let af = affine_flex_detect(&ct, &r, &tol()).unwrap().unwrap();
    (ct, r, af.motions[0].clone())
}

#[test]
fn follow_cube_flex() {
    let (ct, r, flex) = cube_affine_flex();
    let path = flex_path_follow(&ct, &r, &flex, 0.02, 20, &tol()).unwrap();
    assert_eq!(path.len(), 20);
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.certifies_flex(), "{rep:?}");
    assert!(rep.max_length_deviation < 1e-8);
}

#[test]
fn trivial_motion_is_rejected() {
    let (ct, r) = catalog("tetrahedron").unwrap();
    let rot = trivial_motion_basis(&ct, &r).unwrap().pop().unwrap();
    assert!(matches!(
        flex_path_follow(&ct, &r, &rot, 0.05, 5, &tol()),
        Err(Error::InvalidFlex(_))
    ));
}

#[test]
fn secants_are_first_order_flexes() {
    // (x_{k+1} - x_k) / h leaves the kernel of R(x_k) by O(h)
    let (ct, r, flex) = cube_affine_flex();
    let worst = |h: f64| {
        let path = flex_path_follow(&ct, &r, &flex, h, 6, &tol()).unwrap();
        let mut worst: f64 = 0.0;
        for w in path.samples().windows(2) {
            let m = build_rigidity_matrix(&ct, &w[0]).unwrap();
            let secant = Motion {
                pdot: (w[1].points() - w[0].points()) / h,
                adot: (w[1].normals() - w[0].normals()) / h,
            };
            worst = worst.max(m.relative_residual(&secant));
        }
        worst
    };
    let (a, b) = (worst(0.02), worst(0.01));
    assert!(a < 0.05 && b < 0.6 * a, "{a} {b}");
}

fn nontrivial_speed(ct: &CombinatorialType, r: &Realization, m: &Motion) -> f64 {
    let cols: Vec<nalgebra::DVector<f64>> = trivial_motion_basis(ct, r).unwrap().iter().map(Motion::to_vector).collect();
    let q = polyflex::linalg::orthonormal_columns(&DMatrix::from_columns(&cols), 1e-12);
    polyflex::linalg::project_out(&m.to_vector(), &q).norm()
}

#[test]
fn follower_tracks_the_minkowski_flex() {
    // the Minkowski path and the followed path share the initial tangent, so
    // they separate only at second order in the parameter
    let (t, neg) = tetra_pair();
    let axis = generic_axis();
    let angle = |s: f64| rotation(axis, s);
    let base = minkowski_flex(&t, &neg, |_| Matrix3::identity(), 2).unwrap();
    let ct = base.combinatorial_type().clone();
    let r0 = base.first().clone();
    let eps = 1e-5;
    // every path starts at angle 0, so all share the numbering of `base`
    let fwd = minkowski_flex(&t, &neg, |s| angle(s * eps), 2).unwrap();
    let bwd = minkowski_flex(&t, &neg, |s| angle(-s * eps), 2).unwrap();
    let tangent = Motion {
        pdot: (fwd.last().points() - bwd.last().points()) / (2.0 * eps),
        adot: (fwd.last().normals() - bwd.last().normals()) / (2.0 * eps),
    };
    assert!(build_rigidity_matrix(&ct, &r0).unwrap().relative_residual(&tangent) < 1e-9);
    let gap = |h: f64| {
        let followed = flex_path_follow(&ct, &r0, &tangent, h, 2, &tol()).unwrap();
        let target = followed.last();
        // the follower moves by arc length h along the nontrivial part
        let speed = nontrivial_speed(&ct, &r0, &tangent);
        let mink = minkowski_flex(&t, &neg, |s| angle(s * h / speed), 2).unwrap();
        let (rot, tr) = rigid_alignment(&mink.last().points3(), &target.points3());
        mink.last()
            .points3()
            .iter()
            .zip(target.points3())
            .map(|(p, q)| (rot * p + tr - q).norm())
            .fold(0.0, f64::max)
    };
    let (a, b) = (gap(0.02), gap(0.01));
    assert!(a < 1e-6, "{a}");
    assert!(b < 0.3 * a, "{a} {b}");
}

#[test]
fn path_validation_controls() {
    let (ct, r) = catalog("cube").unwrap();
    let rotated: Vec<Realization> = (0..5)
        .map(|k| {
            let m = rotation(generic_axis(), 0.2 * k as f64);
            let pts: Vec<Vector3<f64>> = r.points3().iter().map(|p| m * p).collect();
            let nrm: Vec<Vector3<f64>> = r.normals3().iter().map(|p| m * p).collect();
            Realization::from_points3(&pts, &nrm)
        })
        .collect();
    let params = (0..5).map(|k| k as f64).collect();
    let path = FlexPath::new(ct.clone(), params, rotated.clone()).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(rep.lengths_constant && rep.type_constant && rep.endpoints_congruent);
    assert!(!rep.certifies_flex());

    let mut broken = rotated;
    let mut pts = broken[4].points3();
    pts[0] *= 1.01;
    let mut bad = broken[4].clone();
    bad = Realization::new(
        DMatrix::from_columns(&pts.iter().map(|p| nalgebra::DVector::from_column_slice(p.as_slice())).collect::<Vec<_>>()),
        bad.normals().clone(),
    )
    .unwrap();
    broken[4] = bad;
    let path = FlexPath::new(ct, (0..5).map(|k| k as f64).collect(), broken).unwrap();
    let rep = validate_flex_path(&path, &tol()).unwrap();
    assert!(!rep.lengths_constant);
    assert!(rep.max_length_deviation > 1e-3);
    assert!(!rep.certifies_flex());
}
