//! Tutte embeddings, self-stresses, reciprocal frameworks and
//! Maxwell-Cremona lifts.
//!
//! Orientation convention. Faces of a [`PolyhedralGraph`] are consistently
//! oriented, but a drawing may show them clockwise or counterclockwise. A
//! framework records its outer face; the drawing is *positively oriented*
//! when the outer face cycle runs clockwise, so that every bounded face runs
//! counterclockwise and the face of the dart `a -> b` lies to its left. With
//! `s = ±1` the orientation, `R` the counterclockwise quarter turn, and
//! `σ`, `τ` the faces of the darts `a -> b` and `b -> a`,
//!
//! ```text
//! w_τ - w_σ = s ω_ab R (v_b - v_a)
//! h_b - h_a = <w_σ, v_b - v_a>
//! ```
//!
//! With this choice positive stresses on the bounded edges lift to a dome
//! above the outer face, which then becomes the bottom facet of a convex
//! polytope.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use alloc::collections::VecDeque;
use nalgebra::{Cholesky, DMatrix, DVector, Matrix2, Vector2, Vector3};

use crate::geometry::{
    require_separated, rotation_between, transform_apply, well_shaping_transform, ProjectiveTransform,
};
use crate::graph::{Graph, PolyhedralGraph};
use crate::{CombinatorialType, Error, Realization, Result, ToleranceConfig};

/// A plane framework of a polyhedral graph with one stress value per edge
/// (indexed like `graph.edges()`).
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarStressedFramework {
    graph: PolyhedralGraph,
    outer_face: usize,
    positions: Vec<Vector2<f64>>,
    stress: Vec<f64>,
}

impl PlanarStressedFramework {
    pub fn new(
        graph: PolyhedralGraph,
        outer_face: usize,
        positions: Vec<Vector2<f64>>,
        stress: Vec<f64>,
    ) -> Result<Self> {
        if positions.len() != graph.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_vertices(),
                found: positions.len(),
            });
        }
        if stress.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_edges(),
                found: stress.len(),
            });
        }
        if outer_face >= graph.num_faces() {
            return Err(Error::Precondition(format!("no face {outer_face}")));
        }
        Ok(Self {
            graph,
            outer_face,
            positions,
            stress,
        })
    }

    pub fn graph(&self) -> &PolyhedralGraph {
        &self.graph
    }

    pub fn outer_face(&self) -> usize {
        self.outer_face
    }

    pub fn positions(&self) -> &[Vector2<f64>] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Vector2<f64> {
        self.positions[i]
    }

    pub fn stress(&self) -> &[f64] {
        &self.stress
    }

    /// Same drawing, different stress.
    pub fn with_stress(&self, stress: Vec<f64>) -> Result<Self> {
        Self::new(self.graph.clone(), self.outer_face, self.positions.clone(), stress)
    }

    pub fn diameter(&self) -> f64 {
        diameter2(&self.positions)
    }

    /// `+1` if the outer face cycle runs clockwise in the drawing, else `-1`.
    pub fn orientation(&self) -> f64 {
        orientation_of(&self.graph, self.outer_face, &self.positions)
    }

    /// Signed area of face `k`, positive for bounded faces of a plane
    /// drawing and negative for the outer face.
    pub fn face_area(&self, k: usize) -> f64 {
        self.orientation() * signed_area(self.graph.face(k).iter().map(|&i| self.positions[i]))
    }

    /// Whether every bounded face is a strictly convex polygon with the
    /// orientation of the drawing; turns below `tol * diameter^2` count as
    /// flat.
    pub fn faces_strictly_convex(&self, tol: f64) -> bool {
        let s = self.orientation();
        let eps = tol * self.diameter() * self.diameter();
        (0..self.graph.num_faces()).filter(|&k| k != self.outer_face).all(|k| {
            let f = self.graph.face(k);
            let m = f.len();
            (0..m).all(|x| {
                let a = self.positions[f[x]];
                let b = self.positions[f[(x + 1) % m]];
                let c = self.positions[f[(x + 2) % m]];
                s * cross2(b - a, c - b) > eps
            })
        })
    }
}

/// Heights over the vertices of a plane framework.
#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    heights: Vec<f64>,
}

impl Lift {
    pub fn new(heights: Vec<f64>) -> Self {
        Self { heights }
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn height(&self, i: usize) -> f64 {
        self.heights[i]
    }
}

/// Positions of the dual graph: one point per face of the primal graph.
#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocalFramework {
    positions: Vec<Vector2<f64>>,
}

impl ReciprocalFramework {
    pub fn positions(&self) -> &[Vector2<f64>] {
        &self.positions
    }

    pub fn position(&self, face: usize) -> Vector2<f64> {
        self.positions[face]
    }
}

fn cross2(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn quarter_turn(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

fn signed_area(poly: impl Iterator<Item = Vector2<f64>>) -> f64 {
    let pts: Vec<Vector2<f64>> = poly.collect();
    let m = pts.len();
    (0..m).map(|x| cross2(pts[x], pts[(x + 1) % m])).sum::<f64>() / 2.0
}

fn diameter2(p: &[Vector2<f64>]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            best = best.max((p[i] - p[j]).norm());
        }
    }
    best
}

fn orientation_of(g: &PolyhedralGraph, outer: usize, v: &[Vector2<f64>]) -> f64 {
    if signed_area(g.face(outer).iter().map(|&i| v[i])) <= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ |ω| · diameter`, the natural size of an equilibrium residual.
fn stress_scale(stress: &[f64], positions: &[Vector2<f64>]) -> f64 {
    stress.iter().map(|w| w.abs()).sum::<f64>() * diameter2(positions)
}

/// Largest `‖Σ_j ω_ij (v_j - v_i)‖` over the vertices, divided by
/// `Σ |ω| · diameter` (unscaled when that is zero). Works for any graph.
pub fn equilibrium_residual(g: &Graph, positions: &[Vector2<f64>], stress: &[f64]) -> Result<f64> {
    if positions.len() != g.num_vertices() || stress.len() != g.num_edges() {
        return Err(Error::TypeMismatch);
    }
    let mut force = vec![Vector2::zeros(); g.num_vertices()];
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let pull = (positions[b] - positions[a]) * stress[e];
        force[a] += pull;
        force[b] -= pull;
    }
    let worst = force.iter().map(|f| f.norm()).fold(0.0, f64::max);
    let scale = stress_scale(stress, positions);
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Relative equilibrium residual of the framework's stress.
pub fn check_self_stress(f: &PlanarStressedFramework) -> f64 {
    equilibrium_residual(f.graph.graph(), &f.positions, &f.stress).expect("shapes checked on construction")
}

/// Tutte embedding: the outer triangle `delta` is pinned at `outer` (in
/// the order of `g.face(delta)`), every other vertex is in equilibrium
/// under the positive weights `partial`. `partial` has one entry per edge;
/// entries on the edges of `delta` are ignored. The stresses of the outer
/// edges are recovered from equilibrium at the three pinned vertices.
pub fn tutte_embed(
    g: &PolyhedralGraph,
    delta: usize,
    outer: [Vector2<f64>; 3],
    partial: &[f64],
) -> Result<PlanarStressedFramework> {
    if delta >= g.num_faces() || !g.is_triangle(delta) {
        return Err(Error::Precondition("the outer face must be a triangle".into()));
    }
    if partial.len() != g.num_edges() {
        return Err(Error::DimensionMismatch {
            expected: g.num_edges(),
            found: partial.len(),
        });
    }
    let tri = g.face(delta).to_vec();
    let area = cross2(outer[1] - outer[0], outer[2] - outer[0]);
    let d = diameter2(&outer);
    if !(area.abs() > 1e-12 * d * d) {
        return Err(Error::Precondition("pinned positions are affinely dependent".into()));
    }
    let is_outer_edge = |e: usize| {
        let [a, b] = g.edges()[e];
        tri.contains(&a) && tri.contains(&b)
    };
    for e in (0..g.num_edges()).filter(|&e| !is_outer_edge(e)) {
        if !(partial[e] > 0.0 && partial[e].is_finite()) {
            return Err(Error::Precondition(format!("stress on edge {e} is not positive")));
        }
    }
    let n = g.num_vertices();
    let mut slot = vec![usize::MAX; n];
    let interior: Vec<usize> = (0..n).filter(|v| !tri.contains(v)).collect();
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = k;
    }
    let mut positions = vec![Vector2::zeros(); n];
    for (k, &v) in tri.iter().enumerate() {
        positions[v] = outer[k];
    }
    let m = interior.len();
    let mut lap = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DMatrix::<f64>::zeros(m, 2);
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        if is_outer_edge(e) {
            continue;
        }
        let w = partial[e];
        for (x, y) in [(a, b), (b, a)] {
            if slot[x] == usize::MAX {
                continue;
            }
            lap[(slot[x], slot[x])] += w;
            if slot[y] == usize::MAX {
                rhs[(slot[x], 0)] += w * positions[y].x;
                rhs[(slot[x], 1)] += w * positions[y].y;
            } else {
                lap[(slot[x], slot[y])] -= w;
            }
        }
    }
    if m > 0 {
        let chol = Cholesky::new(lap).ok_or(Error::SingularSystem)?;
        let sol = chol.solve(&rhs);
        for (k, &v) in interior.iter().enumerate() {
            positions[v] = Vector2::new(sol[(k, 0)], sol[(k, 1)]);
        }
        // Refinement on forces summed from edge differences: with a heavy
        // edge near the origin its force is then exact to rounding.
        for _ in 0..2 {
            let mut force = DMatrix::<f64>::zeros(m, 2);
            for (e, &[a, b]) in g.edges().iter().enumerate() {
                if is_outer_edge(e) {
                    continue;
                }
                let d = (positions[b] - positions[a]) * partial[e];
                for (x, sign) in [(a, 1.0), (b, -1.0)] {
                    if slot[x] != usize::MAX {
                        force[(slot[x], 0)] += sign * d.x;
                        force[(slot[x], 1)] += sign * d.y;
                    }
                }
            }
            let step = chol.solve(&force);
            for (k, &v) in interior.iter().enumerate() {
                positions[v] += Vector2::new(step[(k, 0)], step[(k, 1)]);
            }
        }
    }
    let mut stress = partial.to_vec();
    let mut estimates = vec![Vec::new(); g.num_edges()];
    for (k, &a) in tri.iter().enumerate() {
        let (b, c) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let mut force = Vector2::zeros();
        for &j in g.neighbors(a) {
            let e = g.edge_index(a, j).expect("edge");
            if !is_outer_edge(e) {
                force += (positions[j] - positions[a]) * partial[e];
            }
        }
        let frame = Matrix2::from_columns(&[positions[b] - positions[a], positions[c] - positions[a]]);
        let x = frame.try_inverse().ok_or(Error::SingularSystem)? * (-force);
        estimates[g.edge_index(a, b).expect("edge")].push(x.x);
        estimates[g.edge_index(a, c).expect("edge")].push(x.y);
    }
    for (e, est) in estimates.iter().enumerate() {
        if !est.is_empty() {
            stress[e] = est.iter().sum::<f64>() / est.len() as f64;
        }
    }
    PlanarStressedFramework::new(g.clone(), delta, positions, stress)
}

/// Reciprocal framework: face positions integrated from `base` over a
/// spanning tree of the dual graph. Every other dual edge is checked; a
/// mismatch above `tol · Σ|ω| · diameter` means the stress is not a
/// self-stress.
pub fn reciprocal_build(
    f: &PlanarStressedFramework,
    base: (usize, Vector2<f64>),
    tol: f64,
) -> Result<ReciprocalFramework> {
    let g = &f.graph;
    let (root, origin) = base;
    if root >= g.num_faces() {
        return Err(Error::Precondition(format!("no face {root}")));
    }
    let s = f.orientation();
    let jump = |a: usize, b: usize| {
        let e = g.edge_index(a, b).expect("edge");
        quarter_turn(f.positions[b] - f.positions[a]) * (s * f.stress[e])
    };
    let mut w: Vec<Option<Vector2<f64>>> = vec![None; g.num_faces()];
    w[root] = Some(origin);
    let mut queue = VecDeque::from([root]);
    while let Some(sigma) = queue.pop_front() {
        let ws = w[sigma].expect("visited");
        let face = g.face(sigma);
        for x in 0..face.len() {
            let (a, b) = (face[x], face[(x + 1) % face.len()]);
            let tau = g.face_of_dart(b, a).expect("dart");
            if w[tau].is_none() {
                w[tau] = Some(ws + jump(a, b));
                queue.push_back(tau);
            }
        }
    }
    let w: Vec<Vector2<f64>> = w.into_iter().map(|x| x.expect("dual graph is connected")).collect();
    let scale = stress_scale(&f.stress, &f.positions);
    let mut worst: f64 = 0.0;
    for &[a, b] in g.edges() {
        let sigma = g.face_of_dart(a, b).expect("dart");
        let tau = g.face_of_dart(b, a).expect("dart");
        worst = worst.max((w[tau] - w[sigma] - jump(a, b)).norm());
    }
    let rel = if scale > 0.0 { worst / scale } else { worst };
    if rel > tol {
        return Err(Error::InconsistentStress(rel));
    }
    Ok(ReciprocalFramework { positions: w })
}

/// Largest `|<v_b - v_a, w_τ - w_σ>|` over the edges, divided by
/// `Σ|ω| · diameter²` (unscaled when that is zero).
pub fn reciprocity_residual(f: &PlanarStressedFramework, w: &ReciprocalFramework) -> f64 {
    let g = &f.graph;
    let worst = g
        .edges()
        .iter()
        .map(|&[a, b]| {
            let sigma = g.face_of_dart(a, b).expect("dart");
            let tau = g.face_of_dart(b, a).expect("dart");
            (f.positions[b] - f.positions[a]).dot(&(w.positions[tau] - w.positions[sigma])).abs()
        })
        .fold(0.0, f64::max);
    let scale = stress_scale(&f.stress, &f.positions) * f.diameter();
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Maxwell-Cremona lift: heights integrated from `base` over a spanning
/// tree of the graph, using the plane slope `w_σ` of either face of each
/// edge. Both faces must agree on every edge to within
/// `tol · max |w_σ - w̄| · diameter`.
pub fn mc_lift(
    f: &PlanarStressedFramework,
    w: &ReciprocalFramework,
    base: (usize, f64),
    tol: f64,
) -> Result<Lift> {
    let g = &f.graph;
    let (root, h0) = base;
    if root >= g.num_vertices() {
        return Err(Error::Precondition(format!("no vertex {root}")));
    }
    if w.positions.len() != g.num_faces() {
        return Err(Error::TypeMismatch);
    }
    let v = &f.positions;
    let rise = |a: usize, b: usize, face: usize| w.positions[face].dot(&(v[b] - v[a]));
    let mut h: Vec<Option<f64>> = vec![None; g.num_vertices()];
    h[root] = Some(h0);
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        let ha = h[a].expect("visited");
        for &b in g.neighbors(a) {
            if h[b].is_none() {
                h[b] = Some(ha + rise(a, b, g.face_of_dart(a, b).expect("dart")));
                queue.push_back(b);
            }
        }
    }
    let h: Vec<f64> = h.into_iter().map(|x| x.expect("graph is connected")).collect();
    let mean = w.positions.iter().sum::<Vector2<f64>>() / w.positions.len() as f64;
    let scale = w.positions.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max) * f.diameter();
    let mut worst: f64 = 0.0;
    for &[a, b] in g.edges() {
        for face in [g.face_of_dart(a, b), g.face_of_dart(b, a)] {
            worst = worst.max((h[b] - h[a] - rise(a, b, face.expect("dart"))).abs());
        }
    }
    let rel = if scale > 0.0 { worst / scale } else { worst };
    if rel > tol {
        return Err(Error::FaceChoiceMismatch(rel));
    }
    Ok(Lift { heights: h })
}

/// Per-face least-squares planes `h = <g_σ, x> + c_σ` and the largest
/// deviation from them, relative to the diameter of the lifted points.
fn face_planes(g: &PolyhedralGraph, v: &[Vector2<f64>], h: &[f64]) -> Result<(Vec<Vector2<f64>>, f64)> {
    if v.len() != g.num_vertices() || h.len() != g.num_vertices() {
        return Err(Error::TypeMismatch);
    }
    let mut slopes = Vec::with_capacity(g.num_faces());
    let mut worst: f64 = 0.0;
    for face in g.faces() {
        let c = face.iter().map(|&i| v[i]).sum::<Vector2<f64>>() / face.len() as f64;
        let hc = face.iter().map(|&i| h[i]).sum::<f64>() / face.len() as f64;
        let a = DMatrix::from_fn(face.len(), 2, |r, k| (v[face[r]] - c)[k]);
        let b = DVector::from_fn(face.len(), |r, _| h[face[r]] - hc);
        let qr = a.qr();
        let sol = qr
            .r()
            .solve_upper_triangular(&(qr.q().transpose() * b))
            .ok_or(Error::SingularSystem)?;
        let slope = Vector2::new(sol[0], sol[1]);
        for &i in face {
            worst = worst.max((h[i] - hc - slope.dot(&(v[i] - c))).abs());
        }
        slopes.push(slope);
    }
    let lifted: Vec<Vector3<f64>> = (0..v.len()).map(|i| Vector3::new(v[i].x, v[i].y, h[i])).collect();
    let mut diam: f64 = 0.0;
    for i in 0..lifted.len() {
        for j in i + 1..lifted.len() {
            diam = diam.max((lifted[i] - lifted[j]).norm());
        }
    }
    Ok((slopes, if diam > 0.0 { worst / diam } else { worst }))
}

/// Largest deviation of a lifted face from its best-fit plane, relative to
/// the diameter of the lifted vertex set.
pub fn lift_coplanarity_residual(g: &PolyhedralGraph, v: &[Vector2<f64>], h: &[f64]) -> Result<f64> {
    Ok(face_planes(g, v, h)?.1)
}

/// The self-stress whose Maxwell-Cremona lift is `h`: face slopes are
/// fitted by least squares, and each edge stress is the least-squares
/// solution of its reciprocal equation.
pub fn stress_from_lift(
    g: &PolyhedralGraph,
    outer_face: usize,
    v: &[Vector2<f64>],
    h: &[f64],
    tol: f64,
) -> Result<PlanarStressedFramework> {
    let (slopes, residual) = face_planes(g, v, h)?;
    if residual > tol {
        return Err(Error::NotALift(residual));
    }
    if outer_face >= g.num_faces() {
        return Err(Error::Precondition(format!("no face {outer_face}")));
    }
    let s = orientation_of(g, outer_face, v);
    let stress = g
        .edges()
        .iter()
        .map(|&[a, b]| {
            let sigma = g.face_of_dart(a, b).expect("dart");
            let tau = g.face_of_dart(b, a).expect("dart");
            let r = quarter_turn(v[b] - v[a]);
            s * (slopes[tau] - slopes[sigma]).dot(&r) / r.norm_squared()
        })
        .collect();
    PlanarStressedFramework::new(g.clone(), outer_face, v.to_vec(), stress)
}

/// The polytope `p_i = (v_i, h_i)`. Requires negative stress on the outer
/// face edges and positive stress elsewhere; the result is checked to be a
/// strictly convex realization.
pub fn lift_to_polytope(
    f: &PlanarStressedFramework,
    lift: &Lift,
    tol: &ToleranceConfig,
) -> Result<(CombinatorialType, Realization)> {
    let g = &f.graph;
    if lift.heights.len() != g.num_vertices() {
        return Err(Error::TypeMismatch);
    }
    let outer = g.face(f.outer_face);
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let on_outer = outer.contains(&a) && outer.contains(&b);
        let ok = if on_outer { f.stress[e] < 0.0 } else { f.stress[e] > 0.0 };
        if !ok {
            return Err(Error::SignConditionViolated(e));
        }
    }
    let ct = g.to_combinatorial_type();
    let points = DMatrix::from_fn(3, g.num_vertices(), |k, i| {
        if k < 2 {
            f.positions[i][k]
        } else {
            lift.heights[i]
        }
    });
    let r = Realization::with_fitted_normals(&ct, points)?;
    require_separated(&ct, &r, tol)?;
    Ok((ct, r))
}

/// A projective transformation `T` such that `T(r)`, seen from above,
/// is a plane drawing with the triangle `delta` as outer face, and the
/// Maxwell-Cremona stress of that drawing (heights = last coordinate).
///
/// `T` is the well-shaping map over `delta` followed by a rigid motion
/// putting `delta` horizontal at the bottom with its centroid at the
/// origin.
pub fn mc_position_transform(
    ct: &CombinatorialType,
    r: &Realization,
    delta: usize,
    tol: &ToleranceConfig,
) -> Result<(ProjectiveTransform, PlanarStressedFramework)> {
    if ct.dim() != 3 || r.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: r.dim(),
        });
    }
    if delta >= ct.num_facets() || ct.facet(delta).len() != 3 {
        return Err(Error::Precondition("the chosen facet must be a triangle".into()));
    }
    let shape = well_shaping_transform(ct, r, delta, tol)?;
    let shaped = transform_apply(ct, r, &shape)?;
    let rot = rotation_between(&shaped.normal3(delta).normalize(), &(-Vector3::z()));
    let tri = ct.facet(delta);
    let center = tri.iter().map(|&i| shaped.point3(i)).sum::<Vector3<f64>>() / 3.0;
    let t = ProjectiveTransform::rigid3(&rot, &(-(rot * center))).compose(&shape);
    let img = transform_apply(ct, r, &t)?;
    let g = PolyhedralGraph::from_combinatorial_type(ct)?;
    let v: Vec<Vector2<f64>> = (0..img.num_vertices()).map(|i| img.point3(i).xy()).collect();
    let h: Vec<f64> = (0..img.num_vertices()).map(|i| img.point3(i).z).collect();
    let f = stress_from_lift(&g, delta, &v, &h, tol.residual_tol * 10.0)?;
    let outer = g.face(delta);
    let scale = f.stress.iter().map(|w| w.abs()).fold(0.0, f64::max);
    for (e, &[a, b]) in g.edges().iter().enumerate() {
        let on_outer = outer.contains(&a) && outer.contains(&b);
        let signed = if on_outer { -f.stress[e] } else { f.stress[e] };
        if !(signed > 1e-12 * scale) {
            return Err(Error::NotAchieved(format!(
                "edge ({a}, {b}) has stress {:.3e} of the wrong sign",
                f.stress[e]
            )));
        }
    }
    Ok((t, f))
}

/// Tutte embedding followed by its Maxwell-Cremona lift, gauged so that
/// the outer triangle lies in `z = 0`: a strictly convex realization of
/// `g` with facet `k` on face `k`.
pub fn tutte_realization(
    g: &PolyhedralGraph,
    delta: usize,
    outer: [Vector2<f64>; 3],
    partial: &[f64],
    tol: &ToleranceConfig,
) -> Result<(CombinatorialType, Realization)> {
    let f = tutte_embed(g, delta, outer, partial)?;
    let w = reciprocal_build(&f, (delta, Vector2::zeros()), 1e-8)?;
    let lift = mc_lift(&f, &w, (g.face(delta)[0], 0.0), 1e-8)?;
    lift_to_polytope(&f, &lift, tol)
}
