use std::path::Path;

use nalgebra::Vector2;
use polyflex::geometry::catalog;
use polyflex::tutte_mc::tutte_embed;
use polyflex::{CombinatorialType, PolyhedralGraph, Realization, ToleranceConfig};
use polyflex_io::error::IoError;
use polyflex_io::format::{
    framework_json, graph_json, load_polytope, parse_framework_json, parse_graph_json, parse_off, parse_polytope_json,
    polytope_from_off, polytope_json, polytope_off, write_text, Format,
};
use polyflex_io::generators::{random_hull, rng};
use proptest::prelude::*;

fn here() -> &'static Path {
    Path::new("test")
}

fn bits(m: &nalgebra::DMatrix<f64>) -> Vec<u64> {
    m.iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn json_round_trip_is_bit_exact(seed in any::<u64>(), n in 4usize..16, scale in -30i32..30) {
        let (ct, r) = random_hull(&mut rng(seed), n);
        let s = 2f64.powi(scale) * 1.000_000_1;
        let pts = r.points() * s;
        let r = Realization::new(pts, r.normals().clone()).unwrap();
        let (ct2, r2) = parse_polytope_json(&polytope_json(&ct, &r), here()).unwrap();
        prop_assert_eq!(ct2.facets(), ct.facets());
        prop_assert_eq!(bits(r2.points()), bits(r.points()));
        prop_assert_eq!(bits(r2.normals()), bits(r.normals()));
    }
}

#[test]
fn off_round_trip_keeps_the_facets() {
    for name in ["cube", "dodecahedron", "icosahedron"] {
        let (ct, r) = catalog(name).unwrap();
        let mesh = parse_off(&polytope_off(&ct, &r), here()).unwrap();
        assert_eq!(mesh.faces, ct.facets());
        let (ct2, r2) = polytope_from_off(&mesh, here()).unwrap();
        assert_eq!(ct2.num_facets(), ct.num_facets());
        assert_eq!(bits(r2.points()), bits(r.points()), "{name}");
    }
}

#[test]
fn triangulated_dodecahedron_merges_into_pentagons() {
    let (ct, r) = catalog("dodecahedron").unwrap();
    let triangles: Vec<Vec<usize>> = ct.facets().iter().flat_map(|f| (1..f.len() - 1).map(|k| vec![f[0], f[k], f[k + 1]])).collect();
    assert_eq!(triangles.len(), 36);
    let tri = CombinatorialType::new(3, r.num_vertices(), triangles).unwrap();
    let mesh = parse_off(&polytope_off(&tri, &r), here()).unwrap();
    let (ct2, _) = polytope_from_off(&mesh, here()).unwrap();
    assert_eq!(ct2.num_facets(), 12);
    assert!(ct2.facets().iter().all(|f| f.len() == 5));
}

#[test]
fn truncated_json_reports_a_line() {
    let (ct, r) = catalog("cube").unwrap();
    let text = polytope_json(&ct, &r);
    let cut = &text[..text.len() / 2];
    match parse_polytope_json(cut, here()) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, cut.lines().count()),
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn truncated_off_reports_a_line() {
    let (ct, r) = catalog("cube").unwrap();
    let text = polytope_off(&ct, &r);
    let cut: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
    match parse_off(&cut, here()) {
        Err(e @ IoError::Parse { .. }) => {
            let IoError::Parse { line, ref message, .. } = e else { unreachable!() };
            assert_eq!(line, 7);
            assert!(message.contains("end of file"));
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{:?}", other.map(|_| ())),
    }
    let bad = text.replacen("1.0000000000000000e0", "one", 1);
    assert!(matches!(parse_off(&bad, here()), Err(IoError::Parse { line, .. }) if line >= 3));
}

#[test]
fn off_rejects_points_that_are_not_extreme() {
    let (ct, r) = catalog("cube").unwrap();
    let text = polytope_off(&ct, &r);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let n = r.num_vertices();
    lines[1] = format!("{} {} 0", n + 1, ct.num_facets());
    let c = r.points3().iter().sum::<nalgebra::Vector3<f64>>() / n as f64;
    lines.insert(2 + n, format!("{} {} {}", c.x, c.y, c.z));
    let mesh = parse_off(&(lines.join("\n") + "\n"), here()).unwrap();
    let err = polytope_from_off(&mesh, here()).unwrap_err();
    assert!(err.to_string().contains("not extreme"), "{err}");
}

#[test]
fn non_convex_input_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let (ct, r) = catalog("cube").unwrap();
    let mut normals = r.normals().clone();
    let flipped = -normals.column(0);
    normals.set_column(0, &flipped);
    let bad = Realization::new(r.points().clone(), normals).unwrap();
    let path = dir.path().join("bad.json");
    write_text(&path, &polytope_json(&ct, &bad)).unwrap();
    let err = load_polytope(&path, None, &ToleranceConfig::default()).err().expect("accepted a non-convex polytope");
    assert!(matches!(err, IoError::Validation { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn slightly_noisy_input_loads_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let (ct, r) = catalog("cube").unwrap();
    let mut pts = r.points().clone();
    pts[(0, 0)] += 1e-7;
    let noisy = Realization::new(pts, r.normals().clone()).unwrap();
    let path = dir.path().join("noisy.off");
    write_text(&path, &polytope_json(&ct, &noisy)).unwrap();
    let loaded = load_polytope(&path, Some(Format::Json), &ToleranceConfig::default()).unwrap();
    assert!(loaded.warnings.iter().any(|w| w.contains("coplanarity")), "{:?}", loaded.warnings);
}

#[test]
fn graph_round_trip() {
    let (ct, _) = catalog("dodecahedron").unwrap();
    let g = PolyhedralGraph::from_combinatorial_type(&ct).unwrap();
    let g2 = parse_graph_json(&graph_json(&g), here()).unwrap();
    assert_eq!(g2.faces(), g.faces());
    assert_eq!(g2.edges(), g.edges());
}

#[test]
fn graph_ids_are_renumbered() {
    let text = r#"{"vertices": [10, 20, 30, 40], "faces": [[10, 20, 30], [10, 40, 20], [20, 40, 30], [30, 40, 10]]}"#;
    let g = parse_graph_json(text, here()).unwrap();
    assert_eq!(g.num_vertices(), 4);
    assert_eq!(g.face(1), &[0, 3, 1]);
    let bad = text.replace("[30, 40, 10]", "[30, 40, 11]");
    assert!(matches!(parse_graph_json(&bad, here()), Err(IoError::Parse { .. })));
}

#[test]
fn framework_round_trip_is_bit_exact() {
    let (ct, _) = catalog("icosahedron").unwrap();
    let g = PolyhedralGraph::from_combinatorial_type(&ct).unwrap();
    let at = |deg: f64| Vector2::new(deg.to_radians().cos(), deg.to_radians().sin());
    let partial: Vec<f64> = (0..g.num_edges()).map(|e| 1.0 + (e % 5) as f64 / 7.0).collect();
    let f = tutte_embed(&g, 0, [at(90.0), at(210.0), at(330.0)], &partial).unwrap();
    let f2 = parse_framework_json(&framework_json(&f), here()).unwrap();
    assert_eq!(f2.outer_face(), f.outer_face());
    let flat = |f: &polyflex::tutte_mc::PlanarStressedFramework| -> Vec<u64> {
        f.positions().iter().flat_map(|p| [p.x.to_bits(), p.y.to_bits()]).chain(f.stress().iter().map(|w| w.to_bits())).collect()
    };
    assert_eq!(flat(&f2), flat(&f));
}
