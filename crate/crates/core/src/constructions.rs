//! Flexible polytopes: Minkowski sums and their flexes, zonotopes, stacked
//! pyramids, and a predictor-corrector follower for finite flexes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::geometry::{
    congruence_class_check, edge_lengths, hull_realization, validate_realization, Realization, ToleranceConfig,
    HULL_EPS,
};
use crate::graph::{build_edge_graph, CombinatorialType, PolyhedralGraph};
use crate::linalg;
use crate::rigidity::{build_rigidity_matrix, flex_analysis_with, trivial_motion_basis, ExactMode, Motion, RowKind};
use crate::{Error, Result};

/// Realizations of one combinatorial type sampled along a motion.
#[derive(Clone, Debug)]
pub struct FlexPath {
    ct: CombinatorialType,
    params: Vec<f64>,
    samples: Vec<Realization>,
    reference_lengths: Vec<f64>,
}

impl FlexPath {
    /// Reference lengths are taken from the first sample.
    pub fn new(ct: CombinatorialType, params: Vec<f64>, samples: Vec<Realization>) -> Result<Self> {
        if samples.is_empty() || params.len() != samples.len() {
            return Err(Error::Precondition("a path needs one parameter per sample".into()));
        }
        if params.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("parameters must increase".into()));
        }
        if samples
            .iter()
            .any(|r| r.num_vertices() != ct.num_vertices() || r.num_facets() != ct.num_facets())
        {
            return Err(Error::TypeMismatch);
        }
        let reference_lengths = edge_lengths(&ct, &samples[0])?;
        Ok(Self {
            ct,
            params,
            samples,
            reference_lengths,
        })
    }

    pub fn combinatorial_type(&self) -> &CombinatorialType {
        &self.ct
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn samples(&self) -> &[Realization] {
        &self.samples
    }

    pub fn reference_lengths(&self) -> &[f64] {
        &self.reference_lengths
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &Realization {
        &self.samples[0]
    }

    pub fn last(&self) -> &Realization {
        &self.samples[self.samples.len() - 1]
    }
}

/// A hull whose vertices carry labels that identify them across a family.
struct Labelled<L> {
    ct: CombinatorialType,
    realization: Realization,
    labels: Vec<L>,
}

fn labelled_hull<L: Clone>(points: &[Vector3<f64>], labels: &[L]) -> Result<Labelled<L>> {
    let h = hull_realization(points, HULL_EPS)?;
    let labels = h.source.iter().map(|&i| labels[i].clone()).collect();
    Ok(Labelled {
        ct: h.combinatorial_type,
        realization: h.realization,
        labels,
    })
}

/// Re-expresses `sample` in the vertex and facet numbering of `reference`;
/// `None` if the two are not the same labelled face lattice.
fn relabel<L: Ord + Clone>(reference: &Labelled<L>, sample: &Labelled<L>) -> Option<Realization> {
    if sample.labels.len() != reference.labels.len() || sample.ct.num_facets() != reference.ct.num_facets() {
        return None;
    }
    let index: BTreeMap<&L, usize> = reference.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let to_ref: Vec<usize> = sample
        .labels
        .iter()
        .map(|l| index.get(l).copied())
        .collect::<Option<_>>()?;
    let facet_index: BTreeMap<Vec<usize>, usize> = reference
        .ct
        .facets()
        .iter()
        .enumerate()
        .map(|(s, f)| {
            let mut key = f.clone();
            key.sort_unstable();
            (key, s)
        })
        .collect();
    let d = reference.realization.dim();
    let mut points = DMatrix::zeros(d, to_ref.len());
    for (i, &j) in to_ref.iter().enumerate() {
        points.set_column(j, &sample.realization.points().column(i));
    }
    let mut normals = DMatrix::zeros(d, sample.ct.num_facets());
    let mut seen = alloc::vec![false; sample.ct.num_facets()];
    for (s, f) in sample.ct.facets().iter().enumerate() {
        let mut key: Vec<usize> = f.iter().map(|&i| to_ref[i]).collect();
        key.sort_unstable();
        let t = *facet_index.get(&key)?;
        if seen[t] {
            return None;
        }
        seen[t] = true;
        normals.set_column(t, &sample.realization.normals().column(s));
    }
    Realization::new(points, normals).ok()
}

fn minkowski_labelled(p: &Realization, q: &Realization) -> Result<Labelled<(usize, usize)>> {
    if p.dim() != 3 || q.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: if p.dim() != 3 { p.dim() } else { q.dim() },
        });
    }
    let mut points = Vec::with_capacity(p.num_vertices() * q.num_vertices());
    let mut labels = Vec::with_capacity(points.capacity());
    for i in 0..p.num_vertices() {
        for j in 0..q.num_vertices() {
            points.push(p.point3(i) + q.point3(j));
            labels.push((i, j));
        }
    }
    labelled_hull(&points, &labels)
}

/// Minkowski sum of two realizations. Returns the hull together with the
/// pair `(i, j)` of summand vertices behind each output vertex.
pub fn minkowski_sum(p: &Realization, q: &Realization) -> Result<(CombinatorialType, Realization, Vec<(usize, usize)>)> {
    let l = minkowski_labelled(p, q)?;
    Ok((l.ct, l.realization, l.labels))
}

/// Every edge of `P + Q` must be a translate of a single edge of one
/// summand: one of the two labels stays fixed along it.
fn check_edges_split(l: &Labelled<(usize, usize)>) -> Result<()> {
    let g = build_edge_graph(&l.ct)?;
    for &[u, v] in g.edges() {
        let (a, b) = (l.labels[u], l.labels[v]);
        if a.0 != b.0 && a.1 != b.1 {
            return Err(Error::SharedEdgeDirection);
        }
    }
    Ok(())
}

fn sample_params(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::Precondition("at least two samples are needed".into()));
    }
    Ok((0..m).map(|k| k as f64 / (m - 1) as f64).collect())
}

fn follow_family<L: Ord + Clone>(
    params: &[f64],
    build: impl Fn(f64) -> Result<Labelled<L>>,
) -> Result<(Labelled<L>, Vec<Realization>)> {
    let reference = build(params[0])?;
    let mut samples = alloc::vec![reference.realization.clone()];
    for (k, &t) in params.iter().enumerate().skip(1) {
        let l = build(t)?;
        match relabel(&reference, &l) {
            Some(r) => samples.push(r),
            None => return Err(Error::TypeBreak { parameter: t, sample: k }),
        }
    }
    Ok((reference, samples))
}

/// Samples `P + R(t) Q` at `m` equally spaced `t` in `[0, 1]`.
pub fn minkowski_flex(
    p: &Realization,
    q: &Realization,
    rotation_path: impl Fn(f64) -> Matrix3<f64>,
    m: usize,
) -> Result<FlexPath> {
    let params = sample_params(m)?;
    let rotated = |t: f64| -> Result<Realization> {
        let r = rotation_path(t);
        let pts: Vec<Vector3<f64>> = q.points3().iter().map(|x| r * x).collect();
        let nrm: Vec<Vector3<f64>> = q.normals3().iter().map(|x| r * x).collect();
        Ok(Realization::from_points3(&pts, &nrm))
    };
    let first = minkowski_labelled(p, &rotated(params[0])?)?;
    check_edges_split(&first)?;
    let (reference, samples) = follow_family(&params, |t| minkowski_labelled(p, &rotated(t)?))?;
    FlexPath::new(reference.ct, params, samples)
}

/// Sum of centered segments `[-g/2, g/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Zonotope {
    generators: Vec<Vector3<f64>>,
}

/// Generators beyond this count make the `2^r` vertex candidates too many.
pub const MAX_GENERATORS: usize = 16;

impl Zonotope {
    /// Parallel generators are merged by adding their lengths (with signs
    /// aligned); zero generators are dropped.
    pub fn new(generators: &[Vector3<f64>]) -> Result<Self> {
        let mut merged: Vec<Vector3<f64>> = Vec::new();
        for g in generators {
            let len = g.norm();
            if len == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|h| g.cross(h).norm() <= 1e-9 * len * h.norm()) {
                Some(h) => {
                    let sign = if g.dot(h) >= 0.0 { 1.0 } else { -1.0 };
                    *h += g * sign;
                }
                None => merged.push(*g),
            }
        }
        if merged.len() > MAX_GENERATORS {
            return Err(Error::Precondition(format!(
                "{} generators exceed the limit of {MAX_GENERATORS}",
                merged.len()
            )));
        }
        Ok(Self { generators: merged })
    }

    pub fn generators(&self) -> &[Vector3<f64>] {
        &self.generators
    }

    /// Vertices are labelled by the sign vector (bit `i` set for `+g_i`).
    fn labelled(&self) -> Result<Labelled<u32>> {
        let r = self.generators.len();
        let mut points = Vec::with_capacity(1 << r);
        let labels: Vec<u32> = (0..1u32 << r).collect();
        for &mask in &labels {
            let p = self
                .generators
                .iter()
                .enumerate()
                .fold(Vector3::zeros(), |acc, (i, g)| {
                    if mask >> i & 1 == 1 {
                        acc + g / 2.0
                    } else {
                        acc - g / 2.0
                    }
                });
            points.push(p);
        }
        labelled_hull(&points, &labels)
    }

    pub fn realize(&self) -> Result<(CombinatorialType, Realization)> {
        let l = self.labelled()?;
        Ok((l.ct, l.realization))
    }

    /// `g_i^A = ‖g_i‖ A g_i / ‖A g_i‖`.
    pub fn redirected(&self, a: &Matrix3<f64>) -> Result<Self> {
        let generators = self
            .generators
            .iter()
            .map(|g| {
                let ag = a * g;
                let n = ag.norm();
                if n == 0.0 {
                    Err(Error::Precondition("linear map is singular on a generator".into()))
                } else {
                    Ok(ag * (g.norm() / n))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { generators })
    }
}

/// Samples the zonotopes with generators redirected by `A(t)`, `A(0) = I`.
pub fn zonotope_flex(z: &Zonotope, a_path: impl Fn(f64) -> Matrix3<f64>, m: usize) -> Result<FlexPath> {
    let params = sample_params(m)?;
    if (a_path(0.0) - Matrix3::identity()).amax() > 1e-12 {
        return Err(Error::Precondition("A(0) must be the identity".into()));
    }
    let (reference, samples) = follow_family(&params, |t| z.redirected(&a_path(t))?.labelled())?;
    FlexPath::new(reference.ct, params, samples)
}

/// Replaces facet `σ` by a pyramid with apex `centroid(σ) + h a_σ`. The new
/// vertex is the last one; the fan triangles replace `σ` at the end of the
/// facet list.
pub fn stack_pyramid(
    ct: &CombinatorialType,
    r: &Realization,
    sigma: usize,
    h: f64,
    tol: &ToleranceConfig,
) -> Result<(CombinatorialType, Realization)> {
    if ct.dim() != 3 || r.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: r.dim(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::Precondition("flatness must be positive".into()));
    }
    let g = PolyhedralGraph::from_combinatorial_type(ct)?;
    let cycle = g.face(sigma).to_vec();
    let apex_id = ct.num_vertices();
    let center = cycle.iter().map(|&i| r.point3(i)).sum::<Vector3<f64>>() / cycle.len() as f64;
    let apex = center + r.normal3(sigma) * h;

    let mut facets: Vec<Vec<usize>> = Vec::with_capacity(ct.num_facets() + cycle.len() - 1);
    let mut normals: Vec<Vector3<f64>> = Vec::with_capacity(facets.capacity());
    for s in (0..ct.num_facets()).filter(|&s| s != sigma) {
        facets.push(g.face(s).to_vec());
        normals.push(r.normal3(s));
    }
    let mut points = r.points3();
    let inside = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    points.push(apex);
    let k = cycle.len();
    for i in 0..k {
        let (u, v) = (cycle[i], cycle[(i + 1) % k]);
        let mut n = (points[v] - points[u]).cross(&(apex - points[u])).normalize();
        if n.dot(&(points[u] - inside)) < 0.0 {
            n = -n;
        }
        facets.push(alloc::vec![u, v, apex_id]);
        normals.push(n);
    }
    let new_ct = CombinatorialType::new(3, apex_id + 1, facets)?;
    let new_r = Realization::from_points3(&points, &normals);
    let rep = validate_realization(&new_ct, &new_r, tol)?;
    if !rep.is_strictly_convex {
        return Err(Error::TooTall);
    }
    Ok((new_ct, new_r))
}

/// Result of [`validate_flex_path`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlexPathReport {
    pub max_length_deviation: f64,
    pub max_realization_residual: f64,
    /// Every sample is strictly convex and its hull has the path's faces.
    pub type_constant: bool,
    pub endpoints_congruent: bool,
    pub lengths_constant: bool,
}

impl FlexPathReport {
    /// Lengths and type constant while the shape changes.
    pub fn certifies_flex(&self) -> bool {
        self.lengths_constant && self.type_constant && !self.endpoints_congruent
    }
}

/// Length deviations are absolute, compared against `residual_tol` times
/// the diameter of the first sample.
pub fn validate_flex_path(path: &FlexPath, tol: &ToleranceConfig) -> Result<FlexPathReport> {
    let ct = &path.ct;
    let scale = path.first().diameter();
    let signature = ct.facet_signature();
    let mut max_dev: f64 = 0.0;
    let mut max_res: f64 = 0.0;
    let mut type_constant = true;
    for r in &path.samples {
        for (l, l0) in edge_lengths(ct, r)?.iter().zip(&path.reference_lengths) {
            max_dev = max_dev.max((l - l0).abs());
        }
        let rep = validate_realization(ct, r, tol)?;
        max_res = max_res.max(rep.max_coplanarity_residual.max(rep.max_norm_residual));
        if !rep.is_strictly_convex {
            type_constant = false;
            continue;
        }
        if ct.dim() == 3 {
            match hull_realization(&r.points3(), HULL_EPS) {
                Ok(h) if h.source.len() == ct.num_vertices() => {
                    if h.combinatorial_type.facet_signature() != signature {
                        type_constant = false;
                    }
                }
                _ => type_constant = false,
            }
        }
    }
    let endpoints_congruent = congruence_class_check(ct, path.first(), path.last(), tol)?.congruent;
    Ok(FlexPathReport {
        max_length_deviation: max_dev,
        max_realization_residual: max_res,
        type_constant,
        endpoints_congruent,
        lengths_constant: max_dev <= tol.residual_tol * scale,
    })
}

/// Largest number of Gauss-Newton iterations per sample.
pub const CORRECTOR_MAX_ITER: usize = 50;

fn to_state(r: &Realization) -> DVector<f64> {
    let mut v = Vec::with_capacity(r.points().len() + r.normals().len());
    v.extend(r.points().iter());
    v.extend(r.normals().iter());
    DVector::from_vec(v)
}

fn from_state(x: &DVector<f64>, d: usize, n: usize, f: usize) -> Realization {
    let split = d * n;
    Realization::new(
        DMatrix::from_column_slice(d, n, &x.as_slice()[..split]),
        DMatrix::from_column_slice(d, f, &x.as_slice()[split..]),
    )
    .expect("shapes agree")
}

/// Constraint values whose Jacobian is the rigidity matrix: half squared
/// length defects, base-pair coplanarity and half squared norm defects.
fn constraints(rows: &[RowKind], r: &Realization, lengths: &[f64]) -> DVector<f64> {
    let p = r.points();
    let a = r.normals();
    let mut edge = 0;
    DVector::from_iterator(
        rows.len(),
        rows.iter().map(|kind| match *kind {
            RowKind::Edge([i, j]) => {
                let l = lengths[edge];
                edge += 1;
                0.5 * ((p.column(i) - p.column(j)).norm_squared() - l * l)
            }
            RowKind::Coplanarity { facet, pair: [i, j] } => (p.column(i) - p.column(j)).dot(&a.column(facet)),
            RowKind::Norm(s) => 0.5 * (a.column(s).norm_squared() - 1.0),
        }),
    )
}

/// Nontrivial kernel directions of the rigidity matrix at `r`, as state
/// vectors (one per column).
fn nontrivial_directions(ct: &CombinatorialType, r: &Realization, tol: &ToleranceConfig) -> Result<DMatrix<f64>> {
    let a = flex_analysis_with(ct, r, tol, ExactMode::Off)?;
    let cols: Vec<DVector<f64>> = a.basis.nontrivial.iter().map(Motion::to_vector).collect();
    if cols.is_empty() {
        return Ok(DMatrix::zeros(ct.dim() * (ct.num_vertices() + ct.num_facets()), 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

fn trivial_span(ct: &CombinatorialType, r: &Realization) -> Result<DMatrix<f64>> {
    let cols: Vec<DVector<f64>> = trivial_motion_basis(ct, r)?.iter().map(Motion::to_vector).collect();
    Ok(linalg::orthonormal_columns(&DMatrix::from_columns(&cols), 1e-12))
}

/// Gauss-Newton with step halving on `x`, minimum-norm updates.
fn correct(
    rows: &[RowKind],
    ct: &CombinatorialType,
    mut x: DVector<f64>,
    lengths: &[f64],
    target: f64,
) -> Result<(DVector<f64>, f64)> {
    let (d, n, f) = (ct.dim(), ct.num_vertices(), ct.num_facets());
    let mut r = from_state(&x, d, n, f);
    let mut res = constraints(rows, &r, lengths).amax();
    for _ in 0..CORRECTOR_MAX_ITER {
        if res <= target {
            return Ok((x, res));
        }
        let jac = build_rigidity_matrix(ct, &r)?;
        let fval = constraints(rows, &r, lengths);
        let dx = linalg::min_norm_solve(jac.matrix(), &fval)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial = &x - &dx * lambda;
            let tr = from_state(&trial, d, n, f);
            let tres = constraints(rows, &tr, lengths).amax();
            if tres < res {
                x = trial;
                r = tr;
                res = tres;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res <= target {
        Ok((x, res))
    } else {
        Err(Error::CorrectorDiverged(res))
    }
}

/// A followed path, possibly cut short.
#[derive(Clone, Debug)]
pub struct FollowOutcome {
    pub path: FlexPath,
    /// Parameter and reason of the first rejected step, if any.
    pub stopped: Option<(f64, Error)>,
}

/// Follows a finite flex from `r0` by predictor steps of length `step` along
/// the nontrivial kernel (starting with `flex0`, then the kernel direction
/// closest to the previous one) and Gauss-Newton correction back onto the
/// constraint set with the edge lengths of `r0`. Returns up to `m` samples
/// including `r0`; the parameter of sample `k` is `k * step`.
pub fn flex_path_follow_partial(
    ct: &CombinatorialType,
    r0: &Realization,
    flex0: &Motion,
    step: f64,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<FollowOutcome> {
    if !(step > 0.0) || m < 1 {
        return Err(Error::Precondition("step must be positive and m at least 1".into()));
    }
    let rm = build_rigidity_matrix(ct, r0)?;
    let v0 = flex0.to_vector();
    if v0.len() != rm.num_cols() {
        return Err(Error::DimensionMismatch {
            expected: rm.num_cols(),
            found: v0.len(),
        });
    }
    if rm.relative_residual(flex0) > 1e-8 {
        return Err(Error::InvalidFlex("not a first-order motion".into()));
    }
    let tq = trivial_span(ct, r0)?;
    let mut tangent = linalg::project_out(&v0, &tq);
    if tangent.norm() <= 1e-8 * v0.norm() || v0.norm() == 0.0 {
        return Err(Error::InvalidFlex("the motion is trivial".into()));
    }
    tangent /= tangent.norm();

    let rows = rm.rows().to_vec();
    let lengths = edge_lengths(ct, r0)?;
    let scale = r0.diameter().max(1.0);
    let target = 1e-3 * tol.residual_tol * scale * scale;
    let (d, n, f) = (ct.dim(), ct.num_vertices(), ct.num_facets());
    let mut x = to_state(r0);
    let mut samples = alloc::vec![r0.clone()];
    let mut params = alloc::vec![0.0];
    let mut stopped = None;
    for k in 1..m {
        let t = k as f64 * step;
        let guess = &x + &tangent * step;
        let next = match correct(&rows, ct, guess, &lengths, target) {
            Ok((xn, _)) => xn,
            Err(e) => {
                stopped = Some((t, e));
                break;
            }
        };
        let r = from_state(&next, d, n, f);
        let rep = validate_realization(ct, &r, tol)?;
        if !rep.is_strictly_convex {
            stopped = Some((t, Error::TypeBreak { parameter: t, sample: k }));
            break;
        }
        let dirs = match nontrivial_directions(ct, &r, tol) {
            Ok(d) => d,
            Err(e) => {
                stopped = Some((t, e));
                break;
            }
        };
        samples.push(r);
        params.push(t);
        // next predictor: secant projected onto the nontrivial kernel
        let secant = (&next - &x) / step;
        x = next;
        if dirs.ncols() == 0 {
            stopped = Some((t, Error::InvalidFlex("no nontrivial flex left".into())));
            break;
        }
        let c = linalg::min_norm_solve(&dirs, &secant)?;
        let mut tn = &dirs * c;
        if tn.norm() == 0.0 {
            stopped = Some((t, Error::InvalidFlex("secant leaves the flex space".into())));
            break;
        }
        tn /= tn.norm();
        if tn.dot(&tangent) < 0.0 {
            tn = -tn;
        }
        tangent = tn;
    }
    Ok(FollowOutcome {
        path: FlexPath::new(ct.clone(), params, samples)?,
        stopped,
    })
}

/// Like [`flex_path_follow_partial`], but any rejected step is an error.
pub fn flex_path_follow(
    ct: &CombinatorialType,
    r0: &Realization,
    flex0: &Motion,
    step: f64,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<FlexPath> {
    let out = flex_path_follow_partial(ct, r0, flex0, step, m, tol)?;
    match out.stopped {
        None => Ok(out.path),
        Some((_, e @ Error::TypeBreak { .. })) => Err(e),
        Some((t, _)) => Err(Error::CorrectorDiverged(t)),
    }
}
