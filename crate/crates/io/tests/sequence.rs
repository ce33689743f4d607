use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use polyflex::constructions::{flex_path_follow, FlexPath};
use polyflex::contraction::{contraction_sequence, convergence_report, ContractionSequence};
use polyflex::geometry::catalog;
use polyflex::graph::contract_edge;
use polyflex::rigidity::flex_analysis;
use polyflex::{PolyhedralGraph, ToleranceConfig};
use polyflex_io::format::{parse_polytope_json, read_text, Format};
use polyflex_io::generators::{generic_realization, rng};
use polyflex_io::sequence::{read_manifest, read_metrics, save_contraction, save_flex_path, save_samples, SaveOptions, MANIFEST};

fn cube_path() -> FlexPath {
    let tol = ToleranceConfig::default();
    let (ct, r) = catalog("cube").unwrap();
    let fa = flex_analysis(&ct, &r, &tol).unwrap();
    flex_path_follow(&ct, &r, &fa.basis.nontrivial[0], 0.02, 20, &tol).unwrap()
}

fn cube_contraction() -> ContractionSequence {
    let tol = ToleranceConfig::default();
    let (ct, _) = catalog("cube").unwrap();
    let g = PolyhedralGraph::from_combinatorial_type(&ct).unwrap();
    let (minor, _) = contract_edge(&g, [0, 1]).unwrap();
    let target = generic_realization(&minor, &mut rng(3), &tol).unwrap().unwrap();
    contraction_sequence(&g, [0, 1], &target, 6, 10.0, &tol).unwrap()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.path().is_file())
        .map(|e| {
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn flex_path_directory_has_one_file_per_sample() {
    let path = cube_path();
    let dir = tempfile::tempdir().unwrap();
    let m = save_flex_path(dir.path(), &path, BTreeMap::new(), SaveOptions::default()).unwrap();
    assert_eq!(m.count, 20);
    let files = listing(dir.path());
    assert_eq!(files.iter().filter(|(n, _)| n.ends_with(".json") && n != MANIFEST).count(), 20);
    assert_eq!(files.iter().filter(|(n, _)| n.ends_with(".obj")).count(), 20);
    assert_eq!(read_manifest(dir.path()).unwrap(), m);
    for (e, (r, &t)) in m.entries.iter().zip(path.samples().iter().zip(path.params())) {
        assert_eq!(e.parameter.to_bits(), t.to_bits());
        let file = dir.path().join(&e.polytope);
        let (ct, back) = parse_polytope_json(&read_text(&file).unwrap(), &file).unwrap();
        assert_eq!(ct.facets(), path.combinatorial_type().facets());
        assert_eq!(back, *r);
    }
}

#[test]
fn off_samples_without_meshes() {
    let path = cube_path();
    let dir = tempfile::tempdir().unwrap();
    let opts = SaveOptions {
        format: Format::Off,
        obj: false,
    };
    let m = save_flex_path(dir.path(), &path, BTreeMap::new(), opts).unwrap();
    assert!(m.entries.iter().all(|e| e.polytope.ends_with(".off") && e.mesh.is_none()));
    assert_eq!(listing(dir.path()).len(), 21);
}

#[test]
fn empty_sequence_gives_an_empty_manifest_and_a_warning() {
    let (ct, _) = catalog("cube").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = save_samples(dir.path(), "flex_path", &ct, &[], &[], BTreeMap::new(), SaveOptions::default()).unwrap();
    assert_eq!(m.count, 0);
    assert!(m.entries.is_empty());
    assert_eq!(m.warnings, vec!["empty sequence".to_string()]);
    assert_eq!(listing(dir.path()).len(), 1);
}

#[test]
fn metrics_match_the_convergence_report() {
    let seq = cube_contraction();
    let dir = tempfile::tempdir().unwrap();
    let m = save_contraction(dir.path(), &seq, BTreeMap::new(), &ToleranceConfig::default(), SaveOptions::default()).unwrap();
    assert_eq!(m.count, 6);
    let rows = read_metrics(&dir.path().join(m.metrics.as_deref().unwrap())).unwrap();
    let rep = convergence_report(seq.sequence());
    assert_eq!(rows.len(), 6);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row.n, k + 1);
        assert_eq!(row.edge_length.to_bits(), rep.edge_length[k].to_bits());
        assert_eq!(row.vertex_dist.to_bits(), rep.vertex_distance[k].to_bits());
        assert_eq!(row.normal_dev.to_bits(), rep.normal_deviation[k].to_bits());
        assert!(row.corank.is_none_or(|c| c >= 6));
    }
}

#[test]
fn output_is_byte_stable() {
    let write = || {
        let dir = tempfile::tempdir().unwrap();
        save_contraction(dir.path(), &cube_contraction(), BTreeMap::new(), &ToleranceConfig::default(), SaveOptions::default())
            .unwrap();
        save_flex_path(&dir.path().join("path"), &cube_path(), BTreeMap::new(), SaveOptions::default()).unwrap();
        let mut files = listing(dir.path());
        files.extend(listing(&dir.path().join("path")));
        files
    };
    let a = write();
    assert!(a.len() > 40);
    assert_eq!(a, write());
}
