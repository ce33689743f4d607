//! First-order motions of a realization `(p, a)`: the rigidity matrix, the
//! trivial motions, the flex space, affine flexes and the tangent space of
//! the realization space.
//!
//! Column layout: `(vertex i, axis k) -> i * d + k`, then
//! `(facet σ, axis k) -> d * |V| + σ * d + k`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{rational_rank, to_rational};
use crate::geometry::{Realization, ToleranceConfig};
use crate::graph::{build_edge_graph, CombinatorialType, Graph};
use crate::linalg::{self, Spectrum};
use crate::{Error, Result};

/// Which constraint a row of the rigidity matrix encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    /// `<p_i - p_j, ṗ_i - ṗ_j> = 0`.
    Edge([usize; 2]),
    /// `<p_i - p_j, ȧ_σ> + <ṗ_i - ṗ_j, a_σ> = 0` for the base pair `(i, j)`.
    Coplanarity { facet: usize, pair: [usize; 2] },
    /// `<a_σ, ȧ_σ> = 0`.
    Norm(usize),
}

#[derive(Clone, Debug)]
pub struct RigidityMatrix {
    matrix: DMatrix<f64>,
    rows: Vec<RowKind>,
    dim: usize,
    num_vertices: usize,
    num_facets: usize,
}

impl RigidityMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> &[RowKind] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_facets(&self) -> usize {
        self.num_facets
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn vertex_col(&self, i: usize, k: usize) -> usize {
        i * self.dim + k
    }

    pub fn facet_col(&self, sigma: usize, k: usize) -> usize {
        self.dim * self.num_vertices + sigma * self.dim + k
    }

    /// `R v` for a motion.
    pub fn apply(&self, m: &Motion) -> DVector<f64> {
        &self.matrix * m.to_vector()
    }

    /// `‖R v‖ / (‖R‖ ‖v‖)`, zero for the zero motion.
    pub fn relative_residual(&self, m: &Motion) -> f64 {
        let v = m.to_vector();
        let denom = linalg::spectral_norm(&self.matrix) * v.norm();
        if denom == 0.0 {
            0.0
        } else {
            (&self.matrix * v).norm() / denom
        }
    }

    /// The rows without the edge-length equations: the Jacobian of the
    /// realization constraints.
    pub fn realization_jacobian(&self) -> DMatrix<f64> {
        let keep: Vec<usize> = (0..self.rows.len())
            .filter(|&r| !matches!(self.rows[r], RowKind::Edge(_)))
            .collect();
        self.matrix.select_rows(keep.iter())
    }
}

/// Velocities `ṗ` (`d x |V|`) and `ȧ` (`d x |F|`).
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    pub pdot: DMatrix<f64>,
    pub adot: DMatrix<f64>,
}

impl Motion {
    pub fn zeros(dim: usize, num_vertices: usize, num_facets: usize) -> Self {
        Self {
            pdot: DMatrix::zeros(dim, num_vertices),
            adot: DMatrix::zeros(dim, num_facets),
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        let mut v = Vec::with_capacity(self.pdot.len() + self.adot.len());
        v.extend(self.pdot.iter());
        v.extend(self.adot.iter());
        DVector::from_vec(v)
    }

    pub fn from_vector(v: &DVector<f64>, dim: usize, num_vertices: usize, num_facets: usize) -> Result<Self> {
        if v.len() != dim * (num_vertices + num_facets) {
            return Err(Error::DimensionMismatch {
                expected: dim * (num_vertices + num_facets),
                found: v.len(),
            });
        }
        let split = dim * num_vertices;
        Ok(Self {
            pdot: DMatrix::from_column_slice(dim, num_vertices, &v.as_slice()[..split]),
            adot: DMatrix::from_column_slice(dim, num_facets, &v.as_slice()[split..]),
        })
    }

    pub fn norm(&self) -> f64 {
        num_traits::Float::sqrt(self.pdot.norm_squared() + self.adot.norm_squared())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            pdot: &self.pdot * s,
            adot: &self.adot * s,
        }
    }
}

pub fn build_rigidity_matrix(ct: &CombinatorialType, r: &Realization) -> Result<RigidityMatrix> {
    let g = build_edge_graph(ct)?;
    Ok(assemble(ct, &g, r))
}

fn check_shape(ct: &CombinatorialType, r: &Realization) -> Result<()> {
    if r.dim() != ct.dim() {
        return Err(Error::DimensionMismatch {
            expected: ct.dim(),
            found: r.dim(),
        });
    }
    if r.num_vertices() != ct.num_vertices() || r.num_facets() != ct.num_facets() {
        return Err(Error::TypeMismatch);
    }
    Ok(())
}

fn row_kinds(ct: &CombinatorialType, g: &Graph) -> Vec<RowKind> {
    let mut rows: Vec<RowKind> = g.edges().iter().map(|&e| RowKind::Edge(e)).collect();
    for (s, f) in ct.facets().iter().enumerate() {
        for &j in &f[1..] {
            rows.push(RowKind::Coplanarity {
                facet: s,
                pair: [f[0], j],
            });
        }
    }
    rows.extend((0..ct.num_facets()).map(RowKind::Norm));
    rows
}

fn assemble(ct: &CombinatorialType, g: &Graph, r: &Realization) -> RigidityMatrix {
    let d = r.dim();
    let n = r.num_vertices();
    let rows = row_kinds(ct, g);
    let mut m = DMatrix::zeros(rows.len(), d * (n + r.num_facets()));
    let pc = |i: usize, k: usize| i * d + k;
    let fc = |s: usize, k: usize| d * n + s * d + k;
    for (row, kind) in rows.iter().enumerate() {
        match *kind {
            RowKind::Edge([i, j]) => {
                for k in 0..d {
                    let diff = r.points()[(k, i)] - r.points()[(k, j)];
                    m[(row, pc(i, k))] = diff;
                    m[(row, pc(j, k))] = -diff;
                }
            }
            RowKind::Coplanarity { facet, pair: [i, j] } => {
                for k in 0..d {
                    let a = r.normals()[(k, facet)];
                    m[(row, fc(facet, k))] = r.points()[(k, i)] - r.points()[(k, j)];
                    m[(row, pc(i, k))] += a;
                    m[(row, pc(j, k))] -= a;
                }
            }
            RowKind::Norm(s) => {
                for k in 0..d {
                    m[(row, fc(s, k))] = r.normals()[(k, s)];
                }
            }
        }
    }
    RigidityMatrix {
        matrix: m,
        rows,
        dim: d,
        num_vertices: n,
        num_facets: r.num_facets(),
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks that the vertices affinely span the ambient space.
fn require_spanning(r: &Realization) -> Result<()> {
    let d = r.dim();
    let c = r.centroid();
    let mut centered = r.points().clone();
    for mut col in centered.column_iter_mut() {
        col -= &c;
    }
    let scale = r.diameter();
    if scale == 0.0 || r.num_vertices() <= d {
        return Err(Error::NotSpanning);
    }
    let values = centered.svd(false, false).singular_values;
    let mut sorted: Vec<f64> = values.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.len() < d || sorted[d - 1] <= 1e-10 * sorted[0] {
        return Err(Error::NotSpanning);
    }
    Ok(())
}

/// The skew part `S` (indexed by `k < l`) and translations `t` of the
/// infinitesimal rigid motions: `ṗ_i = S p_i + t`, `ȧ_σ = S a_σ`.
pub fn trivial_motion_basis(ct: &CombinatorialType, r: &Realization) -> Result<Vec<Motion>> {
    check_shape(ct, r)?;
    require_spanning(r)?;
    let d = r.dim();
    let mut out = Vec::with_capacity(binomial(d + 1, 2));
    for k in 0..d {
        let mut m = Motion::zeros(d, r.num_vertices(), r.num_facets());
        for i in 0..r.num_vertices() {
            m.pdot[(k, i)] = 1.0;
        }
        out.push(m);
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut s = DMatrix::zeros(d, d);
            s[(k, l)] = -1.0;
            s[(l, k)] = 1.0;
            out.push(Motion {
                pdot: &s * r.points(),
                adot: &s * r.normals(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    FirstOrderRigid,
    Flexible,
}

/// Kernel of the rigidity matrix split into trivial and nontrivial parts.
#[derive(Clone, Debug)]
pub struct FlexBasis {
    pub trivial: Vec<Motion>,
    /// Kernel vectors orthogonal to the trivial motions.
    pub nontrivial: Vec<Motion>,
    pub corank: usize,
}

/// When to run the exact rational rank computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExactMode {
    /// Only for exactly coplanar inputs with `|V| + |F| <= 40`.
    #[default]
    Auto,
    /// Whenever the input is exactly coplanar.
    Force,
    Off,
}

pub const EXACT_AUTO_LIMIT: usize = 40;

#[derive(Clone, Debug)]
pub struct FlexAnalysis {
    pub corank: usize,
    pub trivial_dim: usize,
    pub nontrivial_dim: usize,
    /// Whether the trivial motions span the expected `binom(d + 1, 2)`
    /// dimensions; `nontrivial_dim` is only meaningful if they do.
    pub trivial_verified: bool,
    pub verdict: Verdict,
    pub basis: FlexBasis,
    /// Singular values of the rigidity matrix of the normalized copy.
    pub spectrum: Spectrum,
    pub exact_corank: Option<usize>,
}

impl FlexAnalysis {
    /// `None` if the oracle did not run.
    pub fn oracle_agrees(&self) -> Option<bool> {
        self.exact_corank.map(|c| c == self.corank)
    }

    pub fn singular_value_tail(&self, k: usize) -> Vec<f64> {
        self.spectrum.tail(k)
    }
}

/// Translated to the vertex centroid and scaled to unit diameter; motions of
/// the copy map back as `ṗ = s ṗ'`, `ȧ = ȧ'`.
fn normalized(r: &Realization) -> (Realization, f64) {
    let s = r.diameter();
    let s = if s > 0.0 { s } else { 1.0 };
    (r.rescaled(&r.centroid(), 1.0 / s), s)
}

pub fn flex_analysis(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<FlexAnalysis> {
    flex_analysis_with(ct, r, tol, ExactMode::Auto)
}

pub fn flex_analysis_with(
    ct: &CombinatorialType,
    r: &Realization,
    tol: &ToleranceConfig,
    exact: ExactMode,
) -> Result<FlexAnalysis> {
    check_shape(ct, r)?;
    require_spanning(r)?;
    let d = r.dim();
    let g = build_edge_graph(ct)?;
    let (rn, scale) = normalized(r);
    let rm = assemble(ct, &g, &rn);
    let spectrum = linalg::numeric_rank(&rm.matrix, tol.rank_gap_tol, tol.min_gap_ratio)?;
    let corank = spectrum.corank();

    let trivial_n = trivial_motion_basis(ct, &rn)?;
    let mut tmat = DMatrix::zeros(rm.num_cols(), trivial_n.len());
    for (k, m) in trivial_n.iter().enumerate() {
        tmat.set_column(k, &m.to_vector());
    }
    let tq = linalg::orthonormal_columns(&tmat, 1e-10);
    let trivial_dim = tq.ncols();
    let expected = binomial(d + 1, 2);

    let mut projected = spectrum.kernel.clone();
    for mut c in projected.column_iter_mut() {
        let v = linalg::project_out(&c.clone_owned(), &tq);
        c.copy_from(&v);
    }
    let nq = linalg::orthonormal_columns(&projected, 1e-6);
    let nontrivial_dim = corank.saturating_sub(trivial_dim);
    let unscale = |v: &DVector<f64>| -> Result<Motion> {
        let m = Motion::from_vector(v, d, r.num_vertices(), r.num_facets())?;
        Ok(Motion {
            pdot: m.pdot * scale,
            adot: m.adot,
        })
    };
    let nontrivial = nq
        .column_iter()
        .take(nontrivial_dim)
        .map(|c| unscale(&c.clone_owned()))
        .collect::<Result<Vec<_>>>()?;

    let run_exact = match exact {
        ExactMode::Off => false,
        ExactMode::Force => true,
        ExactMode::Auto => r.num_vertices() + r.num_facets() <= EXACT_AUTO_LIMIT,
    };
    let exact_corank = if run_exact { exact_corank_with(ct, &g, r) } else { None };

    Ok(FlexAnalysis {
        corank,
        trivial_dim,
        nontrivial_dim,
        trivial_verified: trivial_dim == expected,
        verdict: if nontrivial_dim == 0 {
            Verdict::FirstOrderRigid
        } else {
            Verdict::Flexible
        },
        basis: FlexBasis {
            trivial: trivial_motion_basis(ct, r)?,
            nontrivial,
            corank,
        },
        spectrum,
        exact_corank,
    })
}

/// Corank of the rigidity matrix in exact rational arithmetic, with the
/// vertex coordinates read as the rationals their floats represent and
/// each unit normal replaced by a rational normal of the same direction
/// (which rescales `ȧ_σ` and leaves the corank unchanged). `None` unless
/// `d` is 2 or 3 and every facet is exactly flat.
pub fn exact_corank(ct: &CombinatorialType, r: &Realization) -> Result<Option<usize>> {
    check_shape(ct, r)?;
    let g = build_edge_graph(ct)?;
    Ok(exact_corank_with(ct, &g, r))
}

type Q = BigRational;

fn exact_corank_with(ct: &CombinatorialType, g: &Graph, r: &Realization) -> Option<usize> {
    let d = r.dim();
    if d != 2 && d != 3 {
        return None;
    }
    let n = r.num_vertices();
    let pts: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..d).map(|k| to_rational(r.points()[(k, i)])).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let mut normals = Vec::with_capacity(ct.num_facets());
    for (s, f) in ct.facets().iter().enumerate() {
        let mut nrm = rational_normal(&pts, f)?;
        let approx: f64 = (0..d)
            .map(|k| num_traits::ToPrimitive::to_f64(&nrm[k]).unwrap_or(0.0) * r.normals()[(k, s)])
            .sum();
        if approx < 0.0 {
            nrm = nrm.into_iter().map(|x| -x).collect();
        }
        normals.push(nrm);
    }
    let cols = d * (n + ct.num_facets());
    let pc = |i: usize, k: usize| i * d + k;
    let fc = |s: usize, k: usize| d * n + s * d + k;
    let mut rows = Vec::new();
    for kind in row_kinds(ct, g) {
        let mut row = alloc::vec![Q::zero(); cols];
        match kind {
            RowKind::Edge([i, j]) => {
                for k in 0..d {
                    let diff = &pts[i][k] - &pts[j][k];
                    row[pc(j, k)] = -diff.clone();
                    row[pc(i, k)] = diff;
                }
            }
            RowKind::Coplanarity { facet, pair: [i, j] } => {
                for k in 0..d {
                    let a = &normals[facet][k];
                    row[fc(facet, k)] = &pts[i][k] - &pts[j][k];
                    row[pc(i, k)] = a.clone();
                    row[pc(j, k)] = -a.clone();
                }
            }
            RowKind::Norm(s) => {
                for k in 0..d {
                    row[fc(s, k)] = normals[s][k].clone();
                }
            }
        }
        rows.push(row);
    }
    Some(cols - rational_rank(&rows))
}

/// A normal of the affine hull of the facet vertices if they are exactly
/// flat and span a hyperplane.
fn rational_normal(pts: &[Vec<Q>], f: &[usize]) -> Option<Vec<Q>> {
    let d = pts[0].len();
    let base = &pts[f[0]];
    let diffs: Vec<Vec<Q>> = f[1..]
        .iter()
        .map(|&i| (0..d).map(|k| &pts[i][k] - &base[k]).collect())
        .collect();
    let nrm = if d == 2 {
        let u = diffs.first()?;
        alloc::vec![u[1].clone(), -u[0].clone()]
    } else {
        let u = diffs.first()?;
        diffs[1..].iter().find_map(|v| {
            let c = alloc::vec![
                &u[1] * &v[2] - &u[2] * &v[1],
                &u[2] * &v[0] - &u[0] * &v[2],
                &u[0] * &v[1] - &u[1] * &v[0],
            ];
            (!c.iter().all(Zero::is_zero)).then_some(c)
        })?
    };
    if nrm.iter().all(Zero::is_zero) {
        return None;
    }
    let flat = diffs
        .iter()
        .all(|v| v.iter().zip(&nrm).fold(Q::zero(), |acc, (a, b)| acc + a * b).is_zero());
    flat.then(|| normalize_integer(nrm))
}

/// Scales a rational vector to a primitive integer vector.
fn normalize_integer(v: Vec<Q>) -> Vec<Q> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Q::from_integer(x / &gcd)).collect()
}

/// An affine flex `ṗ_i = S p_i` with `S` symmetric and `uᵀ S u = 0` for
/// every edge direction `u`.
#[derive(Clone, Debug)]
pub struct AffineFlex {
    /// Dimension of the space of admissible `S`.
    pub quadric_dim: usize,
    /// Basis of that space.
    pub matrices: Vec<DMatrix<f64>>,
    /// The first-order flex induced by each basis matrix.
    pub motions: Vec<Motion>,
}

/// Index pairs `(k, l)`, `k <= l`, of the symmetric-matrix coordinates.
fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(binomial(d + 1, 2));
    for k in 0..d {
        out.push((k, k));
    }
    for k in 0..d {
        for l in k + 1..d {
            out.push((k, l));
        }
    }
    out
}

/// Rows `uᵀ S u` over the normalized edge directions, in the coordinates
/// of [`sym_pairs`].
pub fn moment_matrix(ct: &CombinatorialType, r: &Realization) -> Result<DMatrix<f64>> {
    check_shape(ct, r)?;
    let g = build_edge_graph(ct)?;
    let d = r.dim();
    let pairs = sym_pairs(d);
    let mut m = DMatrix::zeros(g.edges().len(), pairs.len());
    for (row, &[i, j]) in g.edges().iter().enumerate() {
        let u = (r.point(i) - r.point(j)).normalize();
        for (c, &(k, l)) in pairs.iter().enumerate() {
            m[(row, c)] = if k == l { u[k] * u[k] } else { 2.0 * u[k] * u[l] };
        }
    }
    Ok(m)
}

/// The motion `ṗ_i = S p_i`, `ȧ_σ` the part of `-S a_σ` tangent to the
/// unit sphere at `a_σ`.
pub fn affine_motion(r: &Realization, s: &DMatrix<f64>) -> Motion {
    let pdot = s * r.points();
    let mut adot = -(s * r.normals());
    for (k, mut c) in adot.column_iter_mut().enumerate() {
        let a = r.normals().column(k);
        let along = c.dot(&a);
        c -= a * along;
    }
    Motion { pdot, adot }
}

pub fn affine_flex_detect(
    ct: &CombinatorialType,
    r: &Realization,
    tol: &ToleranceConfig,
) -> Result<Option<AffineFlex>> {
    let m = moment_matrix(ct, r)?;
    let d = r.dim();
    let spec = linalg::numeric_rank(&m, tol.rank_gap_tol, tol.min_gap_ratio)?;
    if spec.corank() == 0 {
        return Ok(None);
    }
    let pairs = sym_pairs(d);
    let mut matrices = Vec::with_capacity(spec.corank());
    let mut motions = Vec::with_capacity(spec.corank());
    for c in spec.kernel.column_iter() {
        let mut s = DMatrix::zeros(d, d);
        for (idx, &(k, l)) in pairs.iter().enumerate() {
            s[(k, l)] = c[idx];
            s[(l, k)] = c[idx];
        }
        motions.push(affine_motion(r, &s));
        matrices.push(s);
    }
    Ok(Some(AffineFlex {
        quadric_dim: spec.corank(),
        matrices,
        motions,
    }))
}

/// Dimension of the kernel of the coplanarity and unit-norm rows.
pub fn tangent_dimension(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<usize> {
    check_shape(ct, r)?;
    if r.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: r.dim(),
        });
    }
    let g = build_edge_graph(ct)?;
    let (rn, _) = normalized(r);
    let j = assemble(ct, &g, &rn).realization_jacobian();
    Ok(linalg::numeric_rank(&j, tol.rank_gap_tol, tol.min_gap_ratio)?.corank())
}

/// True iff the realization space is smooth of dimension `|E| + 6` at `r`
/// and `r` is first-order rigid.
pub fn edge_length_perturbation_check(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<bool> {
    let edges = build_edge_graph(ct)?.edges().len();
    let tangent = tangent_dimension(ct, r, tol)?;
    if tangent != edges + 6 {
        return Ok(false);
    }
    Ok(flex_analysis_with(ct, r, tol, ExactMode::Off)?.verdict == Verdict::FirstOrderRigid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn motion_vector_round_trip() {
        let m = Motion {
            pdot: DMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64),
            adot: DMatrix::from_fn(3, 2, |i, j| -((i * 2 + j) as f64)),
        };
        let v = m.to_vector();
        assert_eq!(v[5], m.pdot[(2, 1)]);
        assert_eq!(Motion::from_vector(&v, 3, 4, 2).unwrap(), m);
    }

    #[test]
    fn sym_pairs_cover_upper_triangle() {
        assert_eq!(sym_pairs(3), alloc::vec![(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]);
    }
}
