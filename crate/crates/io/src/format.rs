//! Polytope, graph and framework documents: JSON and OFF in, JSON, OFF and
//! OBJ out. Floats are written with 17 significant digits, which reads back
//! bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, Vector2, Vector3};
use polyflex::geometry::{catalog, hull_realization, validate_realization, ValidationReport, HULL_EPS};
use polyflex::tutte_mc::PlanarStressedFramework;
use polyflex::{CombinatorialType, PolyhedralGraph, Realization, ToleranceConfig};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{IoError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Off,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Off => "off",
        }
    }

    /// From the file extension; JSON unless it is `.off`.
    pub fn of_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("off") => Format::Off,
            _ => Format::Json,
        }
    }
}

/// `x` in scientific notation with 17 significant digits.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float that serializes through [`f17`].
#[derive(Clone, Copy, Debug)]
struct F17(f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite float"));
        }
        RawValue::from_string(f17(self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

fn column_rows(m: &DMatrix<f64>) -> Vec<Vec<F17>> {
    m.column_iter().map(|c| c.iter().map(|&x| F17(x)).collect()).collect()
}

#[derive(Serialize)]
struct PolytopeOut<'a> {
    dimension: usize,
    vertices: Vec<Vec<F17>>,
    facets: &'a [Vec<usize>],
    normals: Vec<Vec<F17>>,
}

#[derive(Deserialize)]
struct PolytopeIn {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<usize>>,
    #[serde(default)]
    normals: Option<Vec<Vec<f64>>>,
}

pub fn polytope_json(ct: &CombinatorialType, r: &Realization) -> String {
    let doc = PolytopeOut {
        dimension: r.dim(),
        vertices: column_rows(r.points()),
        facets: ct.facets(),
        normals: column_rows(r.normals()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("finite coordinates");
    s.push('\n');
    s
}

/// OFF with the facet cycles of `ct`; normals are not part of the format.
pub fn polytope_off(ct: &CombinatorialType, r: &Realization) -> String {
    let mut s = format!("OFF\n{} {} 0\n", r.num_vertices(), ct.num_facets());
    for p in r.points().column_iter() {
        let row: Vec<String> = p.iter().map(|&x| f17(x)).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    for f in ct.facets() {
        let ids: Vec<String> = f.iter().map(usize::to_string).collect();
        writeln!(s, "{} {}", f.len(), ids.join(" ")).unwrap();
    }
    s
}

pub fn polytope_obj(ct: &CombinatorialType, r: &Realization) -> String {
    let mut s = String::new();
    for p in r.points3() {
        writeln!(s, "v {} {} {}", f17(p.x), f17(p.y), f17(p.z)).unwrap();
    }
    for f in ct.facets() {
        let ids: Vec<String> = f.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(s, "f {}", ids.join(" ")).unwrap();
    }
    s
}

pub fn polytope_text(ct: &CombinatorialType, r: &Realization, format: Format) -> String {
    match format {
        Format::Json => polytope_json(ct, r),
        Format::Off => polytope_off(ct, r),
    }
}

fn json_error(path: &Path, e: serde_json::Error) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: message.into(),
    }
}

/// Points as columns; every row must have length `dim`.
fn columns(path: &Path, rows: &[Vec<f64>], dim: usize, what: &str) -> Result<DMatrix<f64>> {
    if let Some(k) = rows.iter().position(|r| r.len() != dim) {
        return Err(invalid(path, format!("{what} {k} has {} coordinates, expected {dim}", rows[k].len())));
    }
    Ok(DMatrix::from_fn(dim, rows.len(), |k, i| rows[i][k]))
}

/// Parses a polytope JSON document. Normals are fitted to the facets when
/// absent.
pub fn parse_polytope_json(text: &str, path: &Path) -> Result<(CombinatorialType, Realization)> {
    let doc: PolytopeIn = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let points = columns(path, &doc.vertices, doc.dimension, "vertex")?;
    let ct = CombinatorialType::new(doc.dimension, doc.vertices.len(), doc.facets)?;
    let r = match doc.normals {
        Some(rows) => {
            if rows.len() != ct.num_facets() {
                return Err(invalid(path, format!("{} normals for {} facets", rows.len(), ct.num_facets())));
            }
            Realization::new(points, columns(path, &rows, doc.dimension, "normal")?)?
        }
        None => Realization::with_fitted_normals(&ct, points)?,
    };
    Ok((ct, r))
}

/// Raw OFF contents: vertex coordinates and face index lists.
pub struct OffMesh {
    pub points: Vec<Vector3<f64>>,
    pub faces: Vec<Vec<usize>>,
}

/// Reads an OFF file. Comments start with `#`; errors carry the line
/// number.
pub fn parse_off(text: &str, path: &Path) -> Result<OffMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let last = text.lines().count();
    let err = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut next = |what: &str| lines.next().ok_or_else(|| err(last + 1, format!("unexpected end of file, expected {what}")));
    let (line, header) = next("the OFF header")?;
    let mut counts_line = (line, header);
    if header.starts_with("OFF") {
        let rest = header[3..].trim();
        if !rest.is_empty() {
            counts_line = (line, rest);
        } else {
            counts_line = next("the element counts")?;
        }
    }
    let nums = |(line, l): (usize, &str)| -> Result<Vec<f64>> {
        l.split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(line, format!("not a number: `{t}`"))))
            .collect()
    };
    let counts = nums(counts_line)?;
    if counts.len() < 2 || counts.iter().take(2).any(|&c| c < 0.0 || c.fract() != 0.0) {
        return Err(err(counts_line.0, "expected vertex and face counts".into()));
    }
    let (nv, nf) = (counts[0] as usize, counts[1] as usize);
    let mut points = Vec::with_capacity(nv);
    for _ in 0..nv {
        let l = next("a vertex")?;
        let x = nums(l)?;
        if x.len() < 3 {
            return Err(err(l.0, "a vertex needs three coordinates".into()));
        }
        points.push(Vector3::new(x[0], x[1], x[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let l = next("a face")?;
        let mut tokens = l.1.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| err(l.0, format!("not an index: `{t}`"))));
        let k = tokens.next().ok_or_else(|| err(l.0, "empty face".into()))??;
        let ids: Vec<usize> = tokens.take(k).collect::<Result<_>>()?;
        if ids.len() != k || k < 3 {
            return Err(err(l.0, format!("face needs {k} >= 3 indices")));
        }
        if let Some(&i) = ids.iter().find(|&&i| i >= nv) {
            return Err(err(l.0, format!("vertex index {i} out of range")));
        }
        faces.push(ids);
    }
    Ok(OffMesh { points, faces })
}

/// The convex polytope of an OFF mesh. Facets come from the hull, so
/// coplanar faces (e.g. triangulated pentagons) merge; every vertex must be
/// a hull vertex and every face must lie in one facet.
pub fn polytope_from_off(mesh: &OffMesh, path: &Path) -> Result<(CombinatorialType, Realization)> {
    let hull = hull_realization(&mesh.points, HULL_EPS)?;
    if hull.source.len() != mesh.points.len() {
        let missing: Vec<usize> = (0..mesh.points.len()).filter(|i| !hull.source.contains(i)).collect();
        return Err(invalid(path, format!("vertices {missing:?} are not extreme points")));
    }
    let (ct, r) = hull.into_parts();
    for (k, f) in mesh.faces.iter().enumerate() {
        if !(0..ct.num_facets()).any(|s| f.iter().all(|&i| ct.is_incident(i, s))) {
            return Err(invalid(path, format!("face {k} does not lie in a facet of the hull")));
        }
    }
    Ok((ct, r))
}

/// A loaded polytope together with its validation.
pub struct Loaded {
    pub combinatorial_type: CombinatorialType,
    pub realization: Realization,
    pub report: ValidationReport,
    pub warnings: Vec<String>,
}

/// Relative residual above which a file is rejected rather than warned
/// about.
pub const REJECT_RESIDUAL: f64 = 1e-4;

/// Runs `validate_realization`. Residuals above `tol` give warnings; above
/// [`REJECT_RESIDUAL`], or a non-convex polytope, give a validation error.
pub fn checked(ct: CombinatorialType, r: Realization, tol: &ToleranceConfig) -> Result<Loaded> {
    let report = validate_realization(&ct, &r, tol)?;
    let scale = r.diameter();
    let fail = |message: &str| IoError::Validation {
        message: message.into(),
        coplanarity: report.max_coplanarity_residual,
        norm: report.max_norm_residual,
        margin: report.min_convexity_margin,
    };
    if report.max_coplanarity_residual > REJECT_RESIDUAL * scale || report.max_norm_residual > REJECT_RESIDUAL {
        return Err(fail("not a realization"));
    }
    // `is_convex` also demands coplanarity within `tol`; residuals between
    // `tol` and the rejection bound only warn, so convexity is read off the
    // margin.
    let abs_tol = tol.residual_tol * scale;
    if report.min_convexity_margin < -abs_tol {
        return Err(fail("not convex"));
    }
    let mut warnings = Vec::new();
    if report.max_coplanarity_residual > abs_tol {
        warnings.push(format!("coplanarity residual {:.3e} exceeds tolerance", report.max_coplanarity_residual));
    }
    if report.max_norm_residual > tol.residual_tol {
        warnings.push(format!("normal length residual {:.3e} exceeds tolerance", report.max_norm_residual));
    }
    if report.min_convexity_margin <= abs_tol {
        warnings.push(format!("not strictly convex (margin {:.3e})", report.min_convexity_margin));
    }
    Ok(Loaded {
        combinatorial_type: ct,
        realization: r,
        report,
        warnings,
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

/// Loads a polytope file; `format` defaults to the file extension.
pub fn load_polytope(path: &Path, format: Option<Format>, tol: &ToleranceConfig) -> Result<Loaded> {
    let text = read_text(path)?;
    let (ct, r) = match format.unwrap_or_else(|| Format::of_path(path)) {
        Format::Json => parse_polytope_json(&text, path)?,
        Format::Off => polytope_from_off(&parse_off(&text, path)?, path)?,
    };
    checked(ct, r, tol)
}

/// Where a polytope comes from: `catalog:NAME` or a file path.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Catalog(String),
    File(PathBuf),
}

impl std::str::FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.strip_prefix("catalog:") {
            Some(name) => Ok(Source::Catalog(name.to_string())),
            None if s.is_empty() => Err("empty source".into()),
            None => Ok(Source::File(PathBuf::from(s))),
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Catalog(n) => write!(f, "catalog:{n}"),
            Source::File(p) => write!(f, "{}", p.display()),
        }
    }
}

pub fn load_source(src: &Source, format: Option<Format>, tol: &ToleranceConfig) -> Result<Loaded> {
    match src {
        Source::Catalog(name) => {
            let (ct, r) = catalog(name)?;
            checked(ct, r, tol)
        }
        Source::File(p) => load_polytope(p, format, tol),
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<i64>,
    faces: Vec<Vec<i64>>,
}

pub fn graph_json(g: &PolyhedralGraph) -> String {
    let doc = GraphDoc {
        vertices: (0..g.num_vertices() as i64).collect(),
        faces: g.faces().iter().map(|f| f.iter().map(|&i| i as i64).collect()).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph");
    s.push('\n');
    s
}

/// Vertex ids are renumbered by their position in `vertices`.
fn graph_from_doc(doc: &GraphDoc, path: &Path) -> Result<PolyhedralGraph> {
    let index = |id: i64| {
        doc.vertices
            .iter()
            .position(|&v| v == id)
            .ok_or_else(|| invalid(path, format!("face uses unknown vertex {id}")))
    };
    let faces = doc
        .faces
        .iter()
        .map(|f| f.iter().map(|&id| index(id)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyhedralGraph::from_faces(doc.vertices.len(), faces)?)
}

pub fn parse_graph_json(text: &str, path: &Path) -> Result<PolyhedralGraph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    graph_from_doc(&doc, path)
}

/// A graph file, or `catalog:NAME` for the edge graph of a catalog entry.
pub fn load_graph(src: &Source) -> Result<PolyhedralGraph> {
    match src {
        Source::Catalog(name) => Ok(PolyhedralGraph::from_combinatorial_type(&catalog(name)?.0)?),
        Source::File(p) => parse_graph_json(&read_text(p)?, p),
    }
}

/// Input of the `tutte` command: a graph, its outer triangle, optionally
/// the pinned positions and edge stresses `[a, b, ω]` (default 1).
#[derive(Deserialize)]
pub struct TutteInput {
    vertices: Vec<i64>,
    faces: Vec<Vec<i64>>,
    pub outer_face: usize,
    #[serde(default)]
    pub pinned_positions: Option<[[f64; 2]; 3]>,
    #[serde(default)]
    pub stresses: Vec<(i64, i64, f64)>,
}

impl TutteInput {
    pub fn parse(text: &str, path: &Path) -> Result<(PolyhedralGraph, Self)> {
        let doc: Self = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
        let g = graph_from_doc(
            &GraphDoc {
                vertices: doc.vertices.clone(),
                faces: doc.faces.clone(),
            },
            path,
        )?;
        Ok((g, doc))
    }

    /// One stress per edge of `g`.
    pub fn edge_stresses(&self, g: &PolyhedralGraph, path: &Path) -> Result<Vec<f64>> {
        let mut out = vec![1.0; g.num_edges()];
        let index = |id: i64| self.vertices.iter().position(|&v| v == id);
        for &(a, b, w) in &self.stresses {
            let e = index(a)
                .zip(index(b))
                .and_then(|(a, b)| g.edge_index(a, b))
                .ok_or_else(|| invalid(path, format!("({a}, {b}) is not an edge")))?;
            out[e] = w;
        }
        Ok(out)
    }
}

#[derive(Serialize)]
struct FrameworkOut {
    vertices: Vec<usize>,
    faces: Vec<Vec<usize>>,
    outer_face: usize,
    positions: Vec<[F17; 2]>,
    stresses: Vec<(usize, usize, F17)>,
}

#[derive(Deserialize)]
struct FrameworkIn {
    vertices: Vec<i64>,
    faces: Vec<Vec<i64>>,
    outer_face: usize,
    positions: Vec<[f64; 2]>,
    stresses: Vec<(i64, i64, f64)>,
}

/// Framework document: the graph, outer face, positions and the full
/// stress as `[a, b, ω]` triples.
pub fn framework_json(f: &PlanarStressedFramework) -> String {
    let g = f.graph();
    let doc = FrameworkOut {
        vertices: (0..g.num_vertices()).collect(),
        faces: g.faces().to_vec(),
        outer_face: f.outer_face(),
        positions: f.positions().iter().map(|p| [F17(p.x), F17(p.y)]).collect(),
        stresses: g.edges().iter().zip(f.stress()).map(|(&[a, b], &w)| (a, b, F17(w))).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("finite framework");
    s.push('\n');
    s
}

pub fn parse_framework_json(text: &str, path: &Path) -> Result<PlanarStressedFramework> {
    let doc: FrameworkIn = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let g = graph_from_doc(
        &GraphDoc {
            vertices: doc.vertices.clone(),
            faces: doc.faces.clone(),
        },
        path,
    )?;
    if doc.positions.len() != g.num_vertices() {
        return Err(invalid(path, format!("{} positions for {} vertices", doc.positions.len(), g.num_vertices())));
    }
    let index = |id: i64| doc.vertices.iter().position(|&v| v == id);
    let mut stress = vec![None; g.num_edges()];
    for &(a, b, w) in &doc.stresses {
        let e = index(a)
            .zip(index(b))
            .and_then(|(a, b)| g.edge_index(a, b))
            .ok_or_else(|| invalid(path, format!("({a}, {b}) is not an edge")))?;
        stress[e] = Some(w);
    }
    let stress = stress
        .into_iter()
        .enumerate()
        .map(|(e, w)| w.ok_or_else(|| invalid(path, format!("no stress on edge {:?}", g.edges()[e]))))
        .collect::<Result<Vec<_>>>()?;
    let positions = doc.positions.iter().map(|p| Vector2::new(p[0], p[1])).collect();
    Ok(PlanarStressedFramework::new(g, doc.outer_face, positions, stress)?)
}
