use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3};
use num_traits::Float;

use super::{require_strictly_convex, rotation_between, Realization, ToleranceConfig};
use crate::graph::CombinatorialType;
use crate::{Error, Result};

/// A projective transformation of R^d in homogeneous coordinates, acting on
/// column vectors `(x, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveTransform {
    matrix: DMatrix<f64>,
}

impl ProjectiveTransform {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::Precondition("transform matrix must be square".into()));
        }
        if matrix.clone().try_inverse().is_none() {
            return Err(Error::SingularSystem);
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim + 1, dim + 1),
        }
    }

    /// `x -> A x + t`.
    pub fn affine(a: &DMatrix<f64>, t: &DVector<f64>) -> Result<Self> {
        let d = a.nrows();
        let mut m = DMatrix::identity(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(a);
        m.view_mut((0, d), (d, 1)).copy_from(t);
        Self::new(m)
    }

    pub fn from_matrix4(m: &Matrix4<f64>) -> Result<Self> {
        Self::new(DMatrix::from_column_slice(4, 4, m.as_slice()))
    }

    /// `x -> R x + t` in R^3.
    pub fn rigid3(r: &Matrix3<f64>, t: &Vector3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(t);
        Self {
            matrix: DMatrix::from_column_slice(4, 4, m.as_slice()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.clone().try_inverse().expect("nonsingular by construction"),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let d = self.matrix.nrows();
        let scale = self.matrix[(d - 1, d - 1)];
        scale != 0.0 && (&self.matrix / scale - DMatrix::identity(d, d)).amax() <= tol
    }

    /// Homogeneous weight of the image of `p`.
    pub fn weight(&self, p: &DVector<f64>) -> f64 {
        let d = self.dim();
        let row = self.matrix.row(d);
        row.columns(0, d).transpose().dot(p) + row[d]
    }

    /// Image of a point; `None` if it is sent to infinity.
    pub fn apply_point(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        let d = self.dim();
        let mut h = DVector::from_element(d + 1, 1.0);
        h.rows_mut(0, d).copy_from(p);
        let img = &self.matrix * h;
        let w = img[d];
        if w == 0.0 || !w.is_finite() {
            return None;
        }
        Some(img.rows(0, d) / w)
    }

    pub fn apply_point3(&self, p: &Vector3<f64>) -> Option<Vector3<f64>> {
        let v = self.apply_point(&DVector::from_column_slice(p.as_slice()))?;
        Some(Vector3::new(v[0], v[1], v[2]))
    }
}

/// Maps vertices through `t` and recomputes facet normals from the mapped
/// planes, re-normalized and oriented outward.
pub fn transform_apply(ct: &CombinatorialType, r: &Realization, t: &ProjectiveTransform) -> Result<Realization> {
    let d = r.dim();
    if t.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: t.dim(),
        });
    }
    let weights: Vec<f64> = (0..r.num_vertices()).map(|i| t.weight(&r.point(i))).collect();
    let scale = t.matrix.amax() * (1.0 + r.points.amax());
    let positive = weights.iter().all(|&w| w > 1e-12 * scale);
    let negative = weights.iter().all(|&w| w < -1e-12 * scale);
    if !(positive || negative) {
        return Err(Error::Inadmissible(
            "a hyperplane through the vertices is sent to infinity".into(),
        ));
    }
    let mut points = DMatrix::zeros(d, r.num_vertices());
    for i in 0..r.num_vertices() {
        let p = t
            .apply_point(&r.point(i))
            .ok_or_else(|| Error::Inadmissible(format!("vertex {i} sent to infinity")))?;
        points.set_column(i, &p);
    }
    let inv_t = t.matrix.clone().try_inverse().ok_or(Error::SingularSystem)?.transpose();
    let offsets = r.facet_offsets(ct);
    let mut normals = DMatrix::zeros(d, r.num_facets());
    for (s, f) in ct.facets().iter().enumerate() {
        let mut plane = DVector::zeros(d + 1);
        plane.rows_mut(0, d).copy_from(&r.normals.column(s));
        plane[d] = -offsets[s];
        let img = &inv_t * plane;
        let mut a: DVector<f64> = img.rows(0, d).into_owned();
        let len = a.norm();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::Inadmissible(format!("facet {s} plane sent to infinity")));
        }
        a /= len;
        // The mapped plane loses digits when `t` is badly conditioned; the
        // mapped vertices do not, so polish the direction against them.
        if let Ok(fit) = super::best_fit_normal(&points, f) {
            a = if fit.dot(&a) < 0.0 { -fit } else { fit };
        }
        let base = points.column(f[0]).into_owned();
        let worst = (0..r.num_vertices())
            .filter(|&j| !ct.is_incident(j, s))
            .map(|j| (points.column(j) - &base).dot(&a))
            .max_by(|x, y| x.abs().total_cmp(&y.abs()));
        if worst.is_some_and(|w| w > 0.0) {
            a = -a;
        }
        normals.set_column(s, &a);
    }
    Realization::new(points, normals)
}

/// Smallest distance, inside the facet plane, from the orthogonal projection
/// of a vertex off `σ` to the boundary of `σ`; negative if some projection
/// falls outside.
pub fn well_shaped_margin(ct: &CombinatorialType, r: &Realization, sigma: usize) -> Result<f64> {
    if r.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: r.dim(),
        });
    }
    let n = r.normal3(sigma).normalize();
    let f = ct.facet(sigma);
    let center = f.iter().map(|&i| r.point3(i)).sum::<Vector3<f64>>() / f.len() as f64;
    let e1 = {
        let t = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        (t - n * t.dot(&n)).normalize()
    };
    let e2 = n.cross(&e1);
    let flat = |p: Vector3<f64>| {
        let d = p - center;
        (d.dot(&e1), d.dot(&e2))
    };
    let poly = sort_by_angle(f.iter().map(|&i| flat(r.point3(i))).collect());
    let m = poly.len();
    let mut margin = f64::INFINITY;
    for j in (0..r.num_vertices()).filter(|&j| !ct.is_incident(j, sigma)) {
        let (x, y) = flat(r.point3(j));
        for k in 0..m {
            let (ax, ay) = poly[k];
            let (bx, by) = poly[(k + 1) % m];
            let len = Float::hypot(bx - ax, by - ay);
            let inside = ((bx - ax) * (y - ay) - (by - ay) * (x - ax)) / len;
            margin = margin.min(inside);
        }
    }
    Ok(margin)
}

/// Whether every vertex off `σ` projects orthogonally into the relative
/// interior of `σ`, with margin above `tol.residual_tol * diameter`.
pub fn is_well_shaped(ct: &CombinatorialType, r: &Realization, sigma: usize, tol: &ToleranceConfig) -> Result<bool> {
    Ok(well_shaped_margin(ct, r, sigma)? > tol.residual_tol * r.diameter())
}

/// A projective transformation making the realization well-shaped over `σ`.
///
/// The realization is moved rigidly so that `σ` lies in `z = 0` with the
/// polytope below, then the projective center `(0, 0, s)` above the facet
/// centroid is sent to infinity; `s` shrinks until the image is well-shaped.
pub fn well_shaping_transform(
    ct: &CombinatorialType,
    r: &Realization,
    sigma: usize,
    tol: &ToleranceConfig,
) -> Result<ProjectiveTransform> {
    require_strictly_convex(ct, r, tol)?;
    if is_well_shaped(ct, r, sigma, tol)? {
        return Ok(ProjectiveTransform::identity(3));
    }
    let f = ct.facet(sigma);
    let center = f.iter().map(|&i| r.point3(i)).sum::<Vector3<f64>>() / f.len() as f64;
    let rot = rotation_between(&r.normal3(sigma).normalize(), &Vector3::z());
    let place = ProjectiveTransform::rigid3(&rot, &(-(rot * center)));
    let unplace = place.inverse();
    // In the placed frame a vertex (x, y, z), z < 0, lands at horizontal
    // position (x, y) * s / (s + |z|). It stays inside σ as long as this
    // factor is below the fraction of the ray from the centroid to (x, y)
    // that lies inside σ.
    let poly: Vec<(f64, f64)> = f
        .iter()
        .map(|&i| {
            let q = rot * (r.point3(i) - center);
            (q.x, q.y)
        })
        .collect();
    let poly = sort_by_angle(poly);
    let diameter = r.diameter();
    let mut s = diameter;
    for j in (0..r.num_vertices()).filter(|&j| !ct.is_incident(j, sigma)) {
        let q = rot * (r.point3(j) - center);
        let depth = -q.z;
        let lambda = ray_fraction(&poly, q.x, q.y);
        if depth > 0.0 && lambda < 1.0 {
            s = s.min(lambda * depth / (1.0 - lambda));
        }
    }
    s *= 0.5;
    let mut last = f64::NEG_INFINITY;
    for _ in 0..60 {
        let mut m = Matrix4::identity();
        m[(3, 2)] = -1.0 / s;
        // the image has height below s; stretching along the normal keeps
        // the projection onto σ and restores the aspect ratio
        m[(2, 2)] = diameter / s;
        let proj = ProjectiveTransform::from_matrix4(&m)?;
        let t = unplace.compose(&proj).compose(&place);
        if let Ok(img) = transform_apply(ct, r, &t) {
            if require_strictly_convex(ct, &img, tol).is_ok() {
                last = well_shaped_margin(ct, &img, sigma)?;
                if last > tol.residual_tol * img.diameter() {
                    return Ok(t);
                }
            }
        }
        s *= 0.5;
    }
    Err(Error::NotAchieved(format!("best margin {last:.3e} after shrinking the center height")))
}

fn sort_by_angle(mut poly: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    poly.sort_by(|a, b| Float::atan2(a.1, a.0).total_cmp(&Float::atan2(b.1, b.0)));
    poly
}

/// Largest `λ` with `λ (x, y)` inside the convex polygon (counterclockwise,
/// containing the origin); infinite if the ray never leaves it.
fn ray_fraction(poly: &[(f64, f64)], x: f64, y: f64) -> f64 {
    let m = poly.len();
    let mut best = f64::INFINITY;
    for k in 0..m {
        let (ax, ay) = poly[k];
        let (bx, by) = poly[(k + 1) % m];
        // outward normal of edge a -> b for a counterclockwise polygon
        let (nx, ny) = (by - ay, ax - bx);
        let along = nx * x + ny * y;
        if along > 0.0 {
            best = best.min((nx * ax + ny * ay) / along);
        }
    }
    best
}

/// Least-squares rigid motion `(R, t)` with `R from_i + t ≈ to_i` (Kabsch).
pub fn rigid_alignment(from: &[Vector3<f64>], to: &[Vector3<f64>]) -> (Matrix3<f64>, Vector3<f64>) {
    let n = from.len().max(1) as f64;
    let cf = from.iter().sum::<Vector3<f64>>() / n;
    let ct = to.iter().sum::<Vector3<f64>>() / n;
    let mut h = Matrix3::zeros();
    for (p, q) in from.iter().zip(to) {
        h += (p - cf) * (q - ct).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let mut d = Matrix3::identity();
    if (v_t.transpose() * u.transpose()).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let rot = v_t.transpose() * d * u.transpose();
    (rot, ct - rot * cf)
}
