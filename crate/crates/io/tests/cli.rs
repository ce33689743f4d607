use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polyflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyflex")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit status")
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_dodecahedron_flexes() {
    let r = json(&polyflex(&["analyze", "catalog:dodecahedron"]));
    assert_eq!(r["verdict"], "flexible");
    assert_eq!(r["nontrivial_dim"], 5);
    assert_eq!(r["trivial_dim"], 6);
    assert_eq!(r["corank"], 11);
    assert_eq!(r["trivial_verified"], true);
    assert!(r.get("timing_ms").is_none());
}

#[test]
fn analyze_reports_rigid_and_affine() {
    let t = json(&polyflex(&["analyze", "--catalog", "tetrahedron"]));
    assert_eq!(t["verdict"], "rigid");
    assert_eq!(t["corank"], 6);
    let c = json(&polyflex(&["analyze", "catalog:cube", "--affine"]));
    assert_eq!(c["affine_flex"]["present"], true);
    assert_eq!(c["affine_flex"]["quadric_dim"], 3);
    assert_eq!(c["affine_flex"]["matrices"].as_array().unwrap().len(), 3);
}

#[test]
fn analyze_is_deterministic() {
    let a = polyflex(&["analyze", "catalog:icosahedron"]);
    let b = polyflex(&["analyze", "catalog:icosahedron"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let t = json(&polyflex(&["analyze", "catalog:cube", "--timing"]));
    assert!(t["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn catalog_files_analyze_like_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["json", "off"] {
        let o = polyflex(&["--format", fmt, "--out", arg(dir.path()), "catalog", "cube"]);
        assert_eq!(code(&o), 0);
        let file = dir.path().join(format!("cube.{fmt}"));
        let r = json(&polyflex(&["analyze", arg(&file)]));
        assert_eq!(r["nontrivial_dim"], 3, "{fmt}");
        assert_eq!(r["affine_flex"]["quadric_dim"], 3);
    }
    let names = String::from_utf8(polyflex(&["catalog"]).stdout).unwrap();
    assert!(names.lines().any(|l| l == "dodecahedron"));
}

#[test]
fn invalid_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = polyflex(&["--out", arg(dir.path()), "catalog", "cube"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("cube.json")).unwrap();
    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    let o = polyflex(&["analyze", arg(&truncated)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated.json:"));

    let skewed = dir.path().join("skewed.off");
    fs::write(&skewed, "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 0\n3 0 1 2\n3 0 1 3\n3 1 2 3\n3 0 2 3\n").unwrap();
    assert_eq!(code(&polyflex(&["analyze", arg(&skewed)])), 2);
}

#[test]
fn ambiguous_rank_exits_with_3() {
    let o = polyflex(&["--rank-gap", "0.5", "analyze", "catalog:cube"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ambiguous"));
}

#[test]
fn unresolved_flex_limit_exits_with_4() {
    let o = polyflex(&["flex-limit", "catalog:icosahedron", "--t", "0.2,0.1"]);
    assert_eq!(code(&o), 4);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["limit"]["verdict"], "no_convergence");
    assert_eq!(r["limit_rigid"], true);
    assert!(r["members"].as_array().unwrap().iter().all(|m| m["verdict"] == "flexible"));
}

#[test]
fn other_errors_exit_with_1() {
    assert_eq!(code(&polyflex(&["contract", "--graph", "catalog:cube", "--edge", "0,1"])), 1);
    assert_eq!(code(&polyflex(&["analyze", "/nonexistent/p.json"])), 1);
    assert_eq!(code(&polyflex(&["analyze", "catalog:cube", "--bogus"])), 1);
    assert_eq!(code(&polyflex(&["flex-path", "catalog:tetrahedron"])), 1);
    assert_eq!(code(&polyflex(&["--help"])), 0);
}

#[test]
fn contract_writes_a_sequence_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq");
    let o = polyflex(&["--out", arg(&out), "contract", "--graph", "catalog:cube", "--edge", "0,1", "--n", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["manifest.json", "metrics.csv", "target.json", "sample_000.json", "sample_003.json", "sample_003.obj"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["kind"], "contraction");
    assert_eq!(m["count"], 4);
    assert_eq!(m["parameters"]["case"]["three_vertex"].is_number(), true);
    let csv = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,edge_length,vertex_dist,normal_dev,corank"));
    assert_eq!(csv.lines().count(), 5);

    let again = dir.path().join("again");
    polyflex(&["--out", arg(&again), "contract", "--graph", "catalog:cube", "--edge", "0,1", "--n", "4"]);
    assert_eq!(fs::read(out.join("metrics.csv")).unwrap(), fs::read(again.join("metrics.csv")).unwrap());
    assert_eq!(fs::read(out.join("sample_002.json")).unwrap(), fs::read(again.join("sample_002.json")).unwrap());
}

#[test]
fn flex_commands_certify() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = json(&polyflex(&["catalog", "tetrahedron"]));
    for key in ["vertices", "normals"] {
        for row in t[key].as_array_mut().unwrap() {
            for x in row.as_array_mut().unwrap() {
                *x = (-x.as_f64().unwrap()).into();
            }
        }
    }
    let neg = dir.path().join("neg.json");
    fs::write(&neg, t.to_string()).unwrap();
    for args in [
        vec!["flex-path", "catalog:cube"],
        vec!["zonotope-flex"],
        vec!["minkowski", "catalog:tetrahedron", arg(&neg), "--angle", "5"],
    ] {
        let r = json(&polyflex(&args));
        assert_eq!(r["certifies_flex"], true, "{args:?}");
        assert_eq!(r["samples"], 20);
    }
    let o = polyflex(&["--out", arg(dir.path()), "zonotope-flex", "--samples", "5"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("path_report.json").is_file());
    assert!(dir.path().join("sample_004.json").is_file());
}

#[test]
fn minkowski_sum_and_stack() {
    let s = json(&polyflex(&["minkowski", "catalog:tetrahedron", "catalog:cube"]));
    assert_eq!(s["dimension"], 3);
    let st = json(&polyflex(&["stack", "catalog:cube", "--facet", "0", "--height", "0.3"]));
    assert_eq!(st["facets"].as_array().unwrap().len(), 9);
}

#[test]
fn tutte_then_lift() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("prism.json");
    fs::write(
        &input,
        r#"{
  "vertices": [0, 1, 2, 3, 4, 5],
  "faces": [[0, 1, 2], [3, 5, 4], [0, 3, 4, 1], [1, 4, 5, 2], [2, 5, 3, 0]],
  "outer_face": 0,
  "stresses": [[3, 4, 2.0]]
}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = polyflex(&["--out", arg(&out), "tutte", arg(&input)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let framework = out.join("framework.json");
    let f: Value = serde_json::from_str(&fs::read_to_string(&framework).unwrap()).unwrap();
    assert_eq!(f["positions"].as_array().unwrap().len(), 6);
    let lift = json(&polyflex(&["lift", arg(&framework)]));
    assert_eq!(lift["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(lift["facets"].as_array().unwrap().len(), 5);
}
