use std::time::Instant;

use polyflex::graph::build_edge_graph;
use polyflex::rigidity::{affine_flex_detect, flex_analysis_with, tangent_dimension, ExactMode, Verdict};
use polyflex::ToleranceConfig;
use serde::Serialize;

use crate::error::Result;
use crate::format::Loaded;

/// Singular values reported on each side of the rank cut.
pub const TAIL: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineBlock {
    pub present: bool,
    pub quadric_dim: usize,
    /// Basis of the symmetric matrices `S`, row-major; only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationBlock {
    pub coplanarity_residual: f64,
    pub norm_residual: f64,
    pub convexity_margin: f64,
    pub strictly_convex: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub vertices: usize,
    pub edges: usize,
    pub facets: usize,
    pub corank: usize,
    pub trivial_dim: usize,
    pub nontrivial_dim: usize,
    pub verdict: &'static str,
    pub trivial_verified: bool,
    pub singular_value_tail: Vec<f64>,
    /// `σ_rank / σ_(rank+1)`; absent when the kernel is empty or full.
    pub gap_ratio: Option<f64>,
    pub exact_corank: Option<usize>,
    pub affine_flex: AffineBlock,
    pub tangent_dim: usize,
    pub validation: ValidationBlock,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyzeOptions {
    pub tol: ToleranceConfig,
    pub exact: ExactMode,
    /// Include the matrices of the affine flexes.
    pub affine_matrices: bool,
    /// Include wall-clock time; the report is then no longer reproducible.
    pub timing: bool,
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::FirstOrderRigid => "rigid",
        Verdict::Flexible => "flexible",
    }
}

/// Rigidity, affine flexes and tangent dimension of a loaded polytope.
pub fn run_analyze(input: &str, loaded: &Loaded, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let start = Instant::now();
    let ct = &loaded.combinatorial_type;
    let r = &loaded.realization;
    let fa = flex_analysis_with(ct, r, &opts.tol, opts.exact)?;
    let affine = affine_flex_detect(ct, r, &opts.tol)?;
    let tangent_dim = tangent_dimension(ct, r, &opts.tol)?;
    let edges = build_edge_graph(ct)?.num_edges();
    let mut warnings = loaded.warnings.clone();
    if !fa.trivial_verified {
        warnings.push("trivial motions do not span the expected dimension".into());
    }
    if fa.oracle_agrees() == Some(false) {
        warnings.push(format!("exact corank {:?} differs from the numerical corank", fa.exact_corank));
    }
    let gap = fa.spectrum.gap_ratio;
    let rep = &loaded.report;
    Ok(AnalysisReport {
        input: input.to_string(),
        vertices: ct.num_vertices(),
        edges,
        facets: ct.num_facets(),
        corank: fa.corank,
        trivial_dim: fa.trivial_dim,
        nontrivial_dim: fa.nontrivial_dim,
        verdict: verdict_name(fa.verdict),
        trivial_verified: fa.trivial_verified,
        singular_value_tail: fa.singular_value_tail(TAIL),
        gap_ratio: gap.is_finite().then_some(gap),
        exact_corank: fa.exact_corank,
        affine_flex: AffineBlock {
            present: affine.is_some(),
            quadric_dim: affine.as_ref().map_or(0, |a| a.quadric_dim),
            matrices: opts.affine_matrices.then(|| {
                affine.iter().flat_map(|a| &a.matrices).map(|s| s.row_iter().map(|row| row.iter().copied().collect()).collect()).collect()
            }),
        },
        tangent_dim,
        validation: ValidationBlock {
            coplanarity_residual: rep.max_coplanarity_residual,
            norm_residual: rep.max_norm_residual,
            convexity_margin: rep.min_convexity_margin,
            strictly_convex: rep.is_strictly_convex,
        },
        warnings,
        timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn report_json(r: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report");
    s.push('\n');
    s
}
