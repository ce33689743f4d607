//! Sequence directories: one polytope file per sample, optional OBJ
//! meshes, a `manifest.json`, and for contraction sequences a
//! `metrics.csv`. Output depends only on the inputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use polyflex::constructions::FlexPath;
use polyflex::contraction::{convergence_report, ContractionSequence};
use polyflex::rigidity::{flex_analysis_with, ExactMode};
use polyflex::{CombinatorialType, Realization, ToleranceConfig};
use serde::{Deserialize, Serialize};

use crate::error::{IoError, Result};
use crate::format::{polytope_obj, polytope_text, write_text, Format};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub parameter: f64,
    pub polytope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub count: usize,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub entries: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct SaveOptions {
    pub format: Format,
    pub obj: bool,
}

impl Default for SaveOptions {
    fn default() -> Self {
        Self {
            format: Format::Json,
            obj: true,
        }
    }
}

pub const MANIFEST: &str = "manifest.json";
pub const METRICS: &str = "metrics.csv";

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))
}

/// Writes the samples and the manifest. An empty sample list gives a
/// manifest with no entries and a warning.
pub fn save_samples(
    dir: &Path,
    kind: &str,
    ct: &CombinatorialType,
    params: &[f64],
    samples: &[Realization],
    parameters: BTreeMap<String, serde_json::Value>,
    opts: SaveOptions,
) -> Result<Manifest> {
    if params.len() != samples.len() {
        return Err(IoError::Usage(format!("{} parameters for {} samples", params.len(), samples.len())));
    }
    create_dir(dir)?;
    let width = samples.len().max(1).to_string().len().max(3);
    let mut entries = Vec::with_capacity(samples.len());
    for (k, (r, &t)) in samples.iter().zip(params).enumerate() {
        let stem = format!("sample_{k:0width$}");
        let polytope = format!("{stem}.{}", opts.format.extension());
        write_text(&dir.join(&polytope), &polytope_text(ct, r, opts.format))?;
        let mesh = if opts.obj && r.dim() == 3 {
            let name = format!("{stem}.obj");
            write_text(&dir.join(&name), &polytope_obj(ct, r))?;
            Some(name)
        } else {
            None
        };
        entries.push(ManifestEntry {
            index: k,
            parameter: t,
            polytope,
            mesh,
        });
    }
    let mut warnings = Vec::new();
    if samples.is_empty() {
        warnings.push("empty sequence".to_string());
    }
    let manifest = Manifest {
        kind: kind.to_string(),
        count: entries.len(),
        parameters,
        entries,
        metrics: None,
        warnings,
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(m).expect("manifest");
    text.push('\n');
    write_text(&dir.join(MANIFEST), &text)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let text = crate::format::read_text(&path)?;
    serde_json::from_str(&text).map_err(|e| IoError::Parse {
        line: e.line(),
        path,
        message: e.to_string(),
    })
}

pub fn save_flex_path(
    dir: &Path,
    path: &FlexPath,
    parameters: BTreeMap<String, serde_json::Value>,
    opts: SaveOptions,
) -> Result<Manifest> {
    save_samples(dir, "flex_path", path.combinatorial_type(), path.params(), path.samples(), parameters, opts)
}

/// One row of `metrics.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub n: usize,
    pub edge_length: f64,
    pub vertex_dist: f64,
    pub normal_dev: f64,
    /// Empty when the numerical rank is ambiguous.
    pub corank: Option<usize>,
}

/// Metrics of each member (from `convergence_report`) and its corank.
pub fn contraction_metrics(seq: &ContractionSequence, tol: &ToleranceConfig) -> Vec<MetricsRow> {
    let rep = convergence_report(seq.sequence());
    let ct = seq.sequence().graph().to_combinatorial_type();
    seq.realizations()
        .iter()
        .enumerate()
        .map(|(k, r)| MetricsRow {
            n: k + 1,
            edge_length: rep.edge_length[k],
            vertex_dist: rep.vertex_distance[k],
            normal_dev: rep.normal_deviation[k],
            corank: flex_analysis_with(&ct, r, tol, ExactMode::Off).ok().map(|a| a.corank),
        })
        .collect()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    r.deserialize()
        .map(|row| {
            row.map_err(|e| IoError::Parse {
                path: path.to_path_buf(),
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Members `P^1..P^N` (parameter `n`), the manifest, and `metrics.csv`.
pub fn save_contraction(
    dir: &Path,
    seq: &ContractionSequence,
    parameters: BTreeMap<String, serde_json::Value>,
    tol: &ToleranceConfig,
    opts: SaveOptions,
) -> Result<Manifest> {
    let ct = seq.sequence().graph().to_combinatorial_type();
    let params: Vec<f64> = (1..=seq.realizations().len()).map(|n| n as f64).collect();
    let mut manifest = save_samples(dir, "contraction", &ct, &params, seq.realizations(), parameters, opts)?;
    write_text(&dir.join(METRICS), &metrics_csv(&contraction_metrics(seq, tol)))?;
    manifest.metrics = Some(METRICS.to_string());
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}
