//! Realizations `(p, a)`, residual and convexity checks, convex hulls,
//! projective transforms and a catalog of standard polytopes.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::graph::{build_edge_graph, CombinatorialType};
use crate::{Error, Result};

mod catalog;
mod hull;
mod transform;

pub use catalog::{catalog, CatalogEntry, GOLDEN_RATIO_DIGITS};
pub use hull::{hull_realization, Hull, HULL_EPS};
pub use transform::{
    is_well_shaped, rigid_alignment, transform_apply, well_shaped_margin, well_shaping_transform,
    ProjectiveTransform,
};

/// Numerical tolerances shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Residual tolerance, relative to the diameter of the realization.
    pub residual_tol: f64,
    /// Singular values below `rank_gap_tol * σ_max` count as zero.
    pub rank_gap_tol: f64,
    /// Minimal ratio of consecutive singular values at the rank cut.
    pub min_gap_ratio: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            rank_gap_tol: 1e-8,
            min_gap_ratio: crate::linalg::DEFAULT_MIN_GAP_RATIO,
        }
    }
}

impl ToleranceConfig {
    pub fn new(residual_tol: f64, rank_gap_tol: f64) -> Result<Self> {
        if !(residual_tol > 0.0 && rank_gap_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        Ok(Self {
            residual_tol,
            rank_gap_tol,
            ..Self::default()
        })
    }
}

/// Vertex coordinates and unit facet normals, stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    points: DMatrix<f64>,
    normals: DMatrix<f64>,
}

impl Realization {
    /// `points` is `d x |V|`, `normals` is `d x |F|`.
    pub fn new(points: DMatrix<f64>, normals: DMatrix<f64>) -> Result<Self> {
        if points.nrows() != normals.nrows() && normals.ncols() > 0 {
            return Err(Error::DimensionMismatch {
                expected: points.nrows(),
                found: normals.nrows(),
            });
        }
        let normals = if normals.ncols() == 0 {
            DMatrix::zeros(points.nrows(), 0)
        } else {
            normals
        };
        Ok(Self { points, normals })
    }

    pub fn from_points3(points: &[Vector3<f64>], normals: &[Vector3<f64>]) -> Self {
        Self {
            points: columns3(points),
            normals: columns3(normals),
        }
    }

    /// Realization with normals fitted to each facet and oriented away from
    /// the vertex centroid.
    pub fn with_fitted_normals(ct: &CombinatorialType, points: DMatrix<f64>) -> Result<Self> {
        let d = points.nrows();
        if d != ct.dim() {
            return Err(Error::DimensionMismatch {
                expected: ct.dim(),
                found: d,
            });
        }
        if points.ncols() != ct.num_vertices() {
            return Err(Error::TypeMismatch);
        }
        let centroid = points.column_mean();
        let mut normals = DMatrix::zeros(d, ct.num_facets());
        for (s, f) in ct.facets().iter().enumerate() {
            let n = fit_normal(&points, f, &centroid)?;
            normals.set_column(s, &n);
        }
        Ok(Self { points, normals })
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn num_vertices(&self) -> usize {
        self.points.ncols()
    }

    pub fn num_facets(&self) -> usize {
        self.normals.ncols()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn normals(&self) -> &DMatrix<f64> {
        &self.normals
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.column(i).into_owned()
    }

    pub fn normal(&self, sigma: usize) -> DVector<f64> {
        self.normals.column(sigma).into_owned()
    }

    pub fn point3(&self, i: usize) -> Vector3<f64> {
        let c = self.points.column(i);
        Vector3::new(c[0], c[1], c[2])
    }

    pub fn normal3(&self, sigma: usize) -> Vector3<f64> {
        let c = self.normals.column(sigma);
        Vector3::new(c[0], c[1], c[2])
    }

    pub fn points3(&self) -> Vec<Vector3<f64>> {
        (0..self.num_vertices()).map(|i| self.point3(i)).collect()
    }

    pub fn normals3(&self) -> Vec<Vector3<f64>> {
        (0..self.num_facets()).map(|s| self.normal3(s)).collect()
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let n = self.num_vertices();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max((self.points.column(i) - self.points.column(j)).norm());
            }
        }
        best
    }

    pub fn centroid(&self) -> DVector<f64> {
        self.points.column_mean()
    }

    /// Applies `x -> scale * (x - center)` to the vertices; normals unchanged.
    pub fn rescaled(&self, center: &DVector<f64>, scale: f64) -> Self {
        let mut points = self.points.clone();
        for mut c in points.column_iter_mut() {
            let v = (&c - center) * scale;
            c.copy_from(&v);
        }
        Self {
            points,
            normals: self.normals.clone(),
        }
    }

    /// Facet `k` of the result is facet `order[k]` of `self`.
    pub fn permute_facets(&self, order: &[usize]) -> Self {
        let mut normals = DMatrix::zeros(self.dim(), order.len());
        for (k, &s) in order.iter().enumerate() {
            normals.set_column(k, &self.normals.column(s));
        }
        Self {
            points: self.points.clone(),
            normals,
        }
    }

    /// Facet plane offsets `b_σ = mean over i in σ of <a_σ, p_i>`.
    pub fn facet_offsets(&self, ct: &CombinatorialType) -> Vec<f64> {
        ct.facets()
            .iter()
            .enumerate()
            .map(|(s, f)| {
                let a = self.normals.column(s);
                f.iter().map(|&i| a.dot(&self.points.column(i))).sum::<f64>() / f.len() as f64
            })
            .collect()
    }
}

pub(crate) fn columns3(v: &[Vector3<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(3, v.len());
    for (k, p) in v.iter().enumerate() {
        m.set_column(k, p);
    }
    m
}

/// Unit normal of the best-fit hyperplane through the facet vertices,
/// pointing away from `inside`.
fn fit_normal(points: &DMatrix<f64>, facet: &[usize], inside: &DVector<f64>) -> Result<DVector<f64>> {
    let n = best_fit_normal(points, facet)?;
    let mean = facet.iter().fold(DVector::zeros(points.nrows()), |acc, &i| acc + points.column(i)) / facet.len() as f64;
    Ok(if n.dot(&(&mean - inside)) < 0.0 { -n } else { n })
}

/// Unit normal of the least-squares plane through the given vertices, with
/// arbitrary sign.
pub(crate) fn best_fit_normal(points: &DMatrix<f64>, facet: &[usize]) -> Result<DVector<f64>> {
    let d = points.nrows();
    let mut centered = DMatrix::zeros(facet.len().max(d), d);
    let mut mean = DVector::zeros(d);
    for &i in facet {
        mean += points.column(i);
    }
    mean /= facet.len() as f64;
    for (r, &i) in facet.iter().enumerate() {
        centered.set_row(r, &(points.column(i) - &mean).transpose());
    }
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::DegenerateInput)?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or(Error::DegenerateInput)?;
    Ok(v_t.row(k).transpose())
}

/// Residuals and convexity of a realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    /// Largest `|<p_j - p_i, a_σ>|` over vertex pairs of a facet.
    pub max_coplanarity_residual: f64,
    /// Largest `| ‖a_σ‖ - 1 |`.
    pub max_norm_residual: f64,
    /// Smallest `<p_i - p_j, a_σ>` with `i` on and `j` off the facet.
    pub min_convexity_margin: f64,
    pub is_convex: bool,
    pub is_strictly_convex: bool,
}

impl ValidationReport {
    pub fn is_realization(&self, abs_tol: f64, norm_tol: f64) -> bool {
        self.max_coplanarity_residual <= abs_tol && self.max_norm_residual <= norm_tol
    }
}

/// Checks coplanarity, unit norms and (strict) convexity. Tolerances are
/// `tol.residual_tol` times the diameter for lengths, and `tol.residual_tol`
/// for the norms.
pub fn validate_realization(
    ct: &CombinatorialType,
    r: &Realization,
    tol: &ToleranceConfig,
) -> Result<ValidationReport> {
    if ct.num_vertices() != r.num_vertices() || ct.num_facets() != r.num_facets() {
        return Err(Error::TypeMismatch);
    }
    if ct.dim() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: ct.dim(),
            found: r.dim(),
        });
    }
    let abs_tol = tol.residual_tol * r.diameter();
    let mut cop: f64 = 0.0;
    let mut norm: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for (s, f) in ct.facets().iter().enumerate() {
        let a = r.normals.column(s);
        norm = norm.max((a.norm() - 1.0).abs());
        let heights: Vec<f64> = (0..r.num_vertices()).map(|i| a.dot(&r.points.column(i))).collect();
        let on = f.iter().map(|&i| heights[i]);
        let lo = on.clone().fold(f64::INFINITY, f64::min);
        let hi = on.fold(f64::NEG_INFINITY, f64::max);
        cop = cop.max(hi - lo);
        let off = (0..r.num_vertices())
            .filter(|&j| !ct.is_incident(j, s))
            .map(|j| heights[j])
            .fold(f64::NEG_INFINITY, f64::max);
        margin = margin.min(lo - off);
    }
    let ok = cop <= abs_tol && norm <= tol.residual_tol;
    Ok(ValidationReport {
        max_coplanarity_residual: cop,
        max_norm_residual: norm,
        min_convexity_margin: margin,
        is_convex: ok && margin >= -abs_tol,
        is_strictly_convex: ok && margin > abs_tol,
    })
}

/// `Ok(())` if the realization is strictly convex, otherwise a
/// `ValidationFailed` error carrying the residuals.
pub fn require_strictly_convex(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<()> {
    let rep = validate_realization(ct, r, tol)?;
    if rep.is_strictly_convex {
        Ok(())
    } else {
        Err(Error::ValidationFailed(alloc::format!(
            "coplanarity {:.3e}, norm {:.3e}, margin {:.3e}",
            rep.max_coplanarity_residual,
            rep.max_norm_residual,
            rep.min_convexity_margin
        )))
    }
}

/// Strict convexity for realizations with short edges or nearly flat
/// vertices: coplanarity within `tol.residual_tol` times the diameter, and
/// every vertex off a facet strictly below the facet's lowest vertex by
/// more than that facet's own coplanarity residual (and rounding level).
pub fn require_separated(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<()> {
    let rep = validate_realization(ct, r, tol)?;
    let floor = SEPARATION_FLOOR * r.diameter();
    if rep.is_realization(tol.residual_tol * r.diameter(), tol.residual_tol)
        && rep.min_convexity_margin > rep.max_coplanarity_residual.max(floor)
    {
        Ok(())
    } else {
        Err(Error::ValidationFailed(alloc::format!(
            "coplanarity {:.3e}, norm {:.3e}, margin {:.3e}",
            rep.max_coplanarity_residual,
            rep.max_norm_residual,
            rep.min_convexity_margin
        )))
    }
}

/// Relative margin below which [`require_separated`] treats a vertex as
/// lying on a facet plane.
pub const SEPARATION_FLOOR: f64 = 1e-13;

/// Equivalence (equal edge lengths) and congruence (equal pairwise
/// distances) of two realizations of the same type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub equivalent: bool,
    pub congruent: bool,
}

pub fn congruence_class_check(
    ct: &CombinatorialType,
    r1: &Realization,
    r2: &Realization,
    tol: &ToleranceConfig,
) -> Result<Congruence> {
    if r1.num_vertices() != r2.num_vertices()
        || r1.num_facets() != r2.num_facets()
        || r1.num_vertices() != ct.num_vertices()
        || r1.dim() != r2.dim()
    {
        return Err(Error::TypeMismatch);
    }
    let abs_tol = tol.residual_tol * r1.diameter().max(r2.diameter());
    let dist = |r: &Realization, i: usize, j: usize| (r.points.column(i) - r.points.column(j)).norm();
    let g = build_edge_graph(ct)?;
    let equivalent = g
        .edges()
        .iter()
        .all(|&[i, j]| (dist(r1, i, j) - dist(r2, i, j)).abs() <= abs_tol);
    let n = r1.num_vertices();
    let congruent = (0..n).all(|i| (i + 1..n).all(|j| (dist(r1, i, j) - dist(r2, i, j)).abs() <= abs_tol));
    Ok(Congruence {
        equivalent,
        congruent,
    })
}

/// Edge lengths in the order of the edge graph's edge list.
pub fn edge_lengths(ct: &CombinatorialType, r: &Realization) -> Result<Vec<f64>> {
    let g = build_edge_graph(ct)?;
    Ok(g.edges()
        .iter()
        .map(|&[i, j]| (r.points.column(i) - r.points.column(j)).norm())
        .collect())
}

/// Rotation taking the unit vector `from` to the unit vector `to`.
pub fn rotation_between(from: &Vector3<f64>, to: &Vector3<f64>) -> Matrix3<f64> {
    let c = from.dot(to);
    if c < -1.0 + 1e-12 {
        let axis = if from.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = from.cross(&axis).normalize();
        return 2.0 * u * u.transpose() - Matrix3::identity();
    }
    let v = from.cross(to);
    let k = v.cross_matrix();
    Matrix3::identity() + k + k * k / (1.0 + c)
}
