//! Contraction sequences: convex realizations `P^n` of a polyhedral graph
//! `G` converging to a realization of a contraction-only minor `G~`, built
//! from Tutte embeddings with a growing stress on the contracted edge and
//! their Maxwell-Cremona lifts. Also the limit of gauge-fixed first-order
//! flexes along such a sequence.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Div};
use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use num_traits::{Float, FromPrimitive, Zero};

use crate::geometry::{require_separated, require_strictly_convex, rotation_between, transform_apply, ProjectiveTransform};
use crate::graph::{contract_edge, triangle_or_three_vertex, truncate_three_vertex, ContractionMap, PersistentAnchor};
use crate::linalg;
use crate::rigidity::{build_rigidity_matrix, trivial_motion_basis, Motion};
use crate::tutte_mc::{
    mc_lift, mc_position_transform, reciprocal_build, tutte_embed, lift_to_polytope, Lift,
    PlanarStressedFramework, ReciprocalFramework,
};
use crate::{CombinatorialType, Error, PolyhedralGraph, Realization, Result, ToleranceConfig};

/// Default growth factor of the contracted-edge stress.
pub const DEFAULT_GAMMA: f64 = 10.0;
/// Default number of sequence members.
pub const DEFAULT_LENGTH: usize = 8;
/// Largest accepted change between the last two normalized flexes.
pub const CAUCHY_TOL: f64 = 1e-4;
/// Smallest norm of the non-trivial part of a limit flex.
pub const NONTRIVIAL_TOL: f64 = 1e-3;
/// Fraction of each edge at `v` kept when a 3-vertex `v` is cut off.
pub const CUT_FRACTION: f64 = 0.25;

/// Class sums `ω~_IJ = Σ_{i∈I, j∈J} ω_ij`. `omega` has one entry per edge
/// of `G`; entries on edges inside a class are ignored.
pub fn contracted_stress<T>(omega: &[T], map: &ContractionMap) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T>,
{
    (0..map.num_minor_edges())
        .map(|t| {
            map.edge_class(t)
                .iter()
                .fold(T::zero(), |acc, &e| acc + omega[e].clone())
        })
        .collect()
}

/// `ω_ij = ω~_IJ / |IJ|` on edges between classes, `None` inside a class.
pub fn split_stress<T>(tilde: &[T], map: &ContractionMap) -> Vec<Option<T>>
where
    T: Clone + Div<Output = T> + FromPrimitive,
{
    (0..map.num_edges())
        .map(|e| {
            map.edge_image(e).map(|t| {
                let count = T::from_usize(map.edge_class(t).len()).expect("class size is representable");
                tilde[t].clone() / count
            })
        })
        .collect()
}

/// `ω^n_e = ω*_e` between classes and `ω^0 γ^n` inside a class.
#[derive(Clone, Debug, PartialEq)]
pub struct StressSchedule {
    base: Vec<f64>,
    intra: Vec<bool>,
    omega0: f64,
    gamma: f64,
    len: usize,
}

impl StressSchedule {
    /// `ω^0` is the largest base stress between classes.
    pub fn new(base: Vec<f64>, map: &ContractionMap, gamma: f64, len: usize) -> Result<Self> {
        if base.len() != map.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: map.num_edges(),
                found: base.len(),
            });
        }
        if !(gamma >= 1.0) || len == 0 {
            return Err(Error::Precondition("need gamma >= 1 and at least one member".into()));
        }
        let intra: Vec<bool> = (0..base.len()).map(|e| map.edge_image(e).is_none()).collect();
        let omega0 = (0..base.len())
            .filter(|&e| !intra[e])
            .map(|e| base[e])
            .fold(0.0, f64::max);
        Ok(Self {
            base,
            intra,
            omega0,
            gamma,
            len,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Partial stress of member `n` (one entry per edge).
    pub fn stress(&self, n: usize) -> Vec<f64> {
        let grow = self.omega0 * Float::powi(self.gamma, n as i32);
        self.base
            .iter()
            .zip(&self.intra)
            .map(|(&w, &inside)| if inside { grow } else { w })
            .collect()
    }
}

/// Realizations of `G` meant to converge to a realization of a minor
/// `G~`: `p_i^n -> p~_I` for `i ∈ I` and `a_σ^n -> a~_σ` for persistent
/// faces.
#[derive(Clone, Debug)]
pub struct RealizationSequence {
    graph: PolyhedralGraph,
    minor: PolyhedralGraph,
    map: ContractionMap,
    target: Realization,
    members: Vec<Realization>,
}

impl RealizationSequence {
    /// Realizations of `G` have facet `k` on face `k` of `graph`; the
    /// target has facet `t` on face `t` of `minor`.
    pub fn new(
        graph: PolyhedralGraph,
        minor: PolyhedralGraph,
        map: ContractionMap,
        target: Realization,
        members: Vec<Realization>,
    ) -> Result<Self> {
        if map.num_edges() != graph.num_edges() || map.num_classes() != minor.num_vertices() {
            return Err(Error::TypeMismatch);
        }
        if target.num_vertices() != minor.num_vertices() || target.num_facets() != minor.num_faces() {
            return Err(Error::TypeMismatch);
        }
        if members
            .iter()
            .any(|r| r.num_vertices() != graph.num_vertices() || r.num_facets() != graph.num_faces() || r.dim() != 3)
        {
            return Err(Error::TypeMismatch);
        }
        Ok(Self {
            graph,
            minor,
            map,
            target,
            members,
        })
    }

    pub fn graph(&self) -> &PolyhedralGraph {
        &self.graph
    }

    pub fn minor(&self) -> &PolyhedralGraph {
        &self.minor
    }

    pub fn map(&self) -> &ContractionMap {
        &self.map
    }

    pub fn target(&self) -> &Realization {
        &self.target
    }

    pub fn members(&self) -> &[Realization] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// How the sequence was anchored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionCase {
    /// A triangular face of `G` persisting in `G/e` serves as outer face.
    Triangle { face: usize },
    /// A 3-vertex off `e` is cut off, the sequence is built for the
    /// truncated graph, and the cut is undone.
    ThreeVertex { vertex: usize },
}

/// One member of the planar pipeline.
#[derive(Clone, Debug)]
pub struct SequenceStep {
    pub n: usize,
    pub framework: PlanarStressedFramework,
    pub reciprocal: ReciprocalFramework,
    pub lift: Lift,
}

/// A contraction sequence `P^1, ..., P^N -> P~` for one edge, with the
/// planar frameworks it was built from. In the 3-vertex case the planar
/// data lives on the truncated graphs.
#[derive(Clone, Debug)]
pub struct ContractionSequence {
    edge: [usize; 2],
    case: ContractionCase,
    transform: ProjectiveTransform,
    schedule: StressSchedule,
    planar_map: ContractionMap,
    target_framework: PlanarStressedFramework,
    target_reciprocal: ReciprocalFramework,
    target_lift: Lift,
    steps: Vec<SequenceStep>,
    sequence: RealizationSequence,
}

impl ContractionSequence {
    pub fn edge(&self) -> [usize; 2] {
        self.edge
    }

    pub fn case(&self) -> ContractionCase {
        self.case
    }

    /// The projective map taking `P~` (or its truncation) to a
    /// Maxwell-Cremona lift.
    pub fn transform(&self) -> &ProjectiveTransform {
        &self.transform
    }

    pub fn schedule(&self) -> &StressSchedule {
        &self.schedule
    }

    /// Contraction map of the graphs carrying the planar frameworks.
    pub fn planar_map(&self) -> &ContractionMap {
        &self.planar_map
    }

    pub fn target_framework(&self) -> &PlanarStressedFramework {
        &self.target_framework
    }

    pub fn target_reciprocal(&self) -> &ReciprocalFramework {
        &self.target_reciprocal
    }

    pub fn target_lift(&self) -> &Lift {
        &self.target_lift
    }

    pub fn steps(&self) -> &[SequenceStep] {
        &self.steps
    }

    pub fn sequence(&self) -> &RealizationSequence {
        &self.sequence
    }

    pub fn realizations(&self) -> &[Realization] {
        self.sequence.members()
    }
}

struct PlanarRun {
    transform: ProjectiveTransform,
    schedule: StressSchedule,
    target_framework: PlanarStressedFramework,
    target_reciprocal: ReciprocalFramework,
    target_lift: Lift,
    steps: Vec<SequenceStep>,
    members: Vec<Realization>,
}

/// Case 1 on `(g, map, minor)` with persistent triangle `delta`. The
/// drawings are translated so that the class of `anchor` sits at the
/// origin, which keeps the short edge (and its large force) accurate.
#[allow(clippy::too_many_arguments)]
fn planar_run(
    g: &PolyhedralGraph,
    map: &ContractionMap,
    minor: &PolyhedralGraph,
    target: &Realization,
    delta: usize,
    anchor: usize,
    len: usize,
    gamma: f64,
    tol: &ToleranceConfig,
) -> Result<PlanarRun> {
    let minor_ct = minor.to_combinatorial_type();
    let delta_minor = map
        .face_image(delta)
        .ok_or_else(|| Error::Precondition("the anchor triangle does not persist".into()))?;
    let (transform, target_framework) = mc_position_transform(&minor_ct, target, delta_minor, tol)?;
    let target_reciprocal = reciprocal_build(&target_framework, (delta_minor, Vector2::zeros()), 1e-8)?;
    let lifted = transform_apply(&minor_ct, target, &transform)?;
    let target_lift = Lift::new((0..lifted.num_vertices()).map(|i| lifted.point3(i).z).collect());
    // Edges of G off the anchor triangle whose class pair is an edge of the
    // contracted triangle get the magnitude of their share; any positive
    // value gives the same limit.
    let base: Vec<f64> = split_stress(target_framework.stress(), map)
        .into_iter()
        .map(|w| w.map_or(0.0, f64::abs))
        .collect();
    let schedule = StressSchedule::new(base, map, gamma, len)?;
    let tri = g.face(delta);
    let origin = target_framework.position(map.class_of(anchor));
    let mut pinned = [Vector2::zeros(); 3];
    for (k, &i) in tri.iter().enumerate() {
        pinned[k] = target_framework.position(map.class_of(i)) - origin;
    }
    let root = tri[0];
    let ct = g.to_combinatorial_type();
    let shift = ProjectiveTransform::rigid3(&Matrix3::identity(), &Vector3::new(-origin.x, -origin.y, 0.0));
    let back = shift.compose(&transform).inverse();
    let mut steps = Vec::with_capacity(len);
    let mut members = Vec::with_capacity(len);
    for n in 1..=len {
        let framework = tutte_embed(g, delta, pinned, &schedule.stress(n))?;
        let reciprocal = reciprocal_build(&framework, (delta, target_reciprocal.position(delta_minor)), 1e-8)?;
        let lift = mc_lift(&framework, &reciprocal, (root, target_lift.height(map.class_of(root))), 1e-8)?;
        let (_, q) = lift_to_polytope(&framework, &lift, tol)?;
        let p = transform_apply(&ct, &q, &back)?;
        require_separated(&ct, &p, tol)
            .map_err(|e| Error::ValidationFailed(format!("member {n}: {e}")))?;
        steps.push(SequenceStep {
            n,
            framework,
            reciprocal,
            lift,
        });
        members.push(p);
    }
    Ok(PlanarRun {
        transform,
        schedule,
        target_framework,
        target_reciprocal,
        target_lift,
        steps,
        members,
    })
}

/// Builds `P^1, ..., P^len` converging to `target`, a strictly convex
/// realization of `G/edge` in the numbering of [`contract_edge`].
///
/// With a persistent triangle, `target` is mapped projectively to a
/// Maxwell-Cremona lift over that triangle; its stress is split over the
/// edges of `G` and the contracted edge gets `ω^0 γ^n`. Each Tutte
/// embedding is lifted and mapped back. Otherwise a 3-vertex off the
/// edge is cut off in both graphs first, and restored in every member as
/// the intersection of its three facet planes.
pub fn contraction_sequence(
    g: &PolyhedralGraph,
    edge: [usize; 2],
    target: &Realization,
    len: usize,
    gamma: f64,
    tol: &ToleranceConfig,
) -> Result<ContractionSequence> {
    let (minor, map) = contract_edge(g, edge).map_err(|e| match e {
        Error::ResultNotPolyhedral | Error::NoSuchEdge(..) => {
            Error::Precondition(format!("edge ({}, {}) is not contractible", edge[0], edge[1]))
        }
        other => other,
    })?;
    let minor_ct = minor.to_combinatorial_type();
    if target.num_vertices() != minor.num_vertices() || target.num_facets() != minor.num_faces() {
        return Err(Error::TypeMismatch);
    }
    require_strictly_convex(&minor_ct, target, tol)?;
    let anchor = triangle_or_three_vertex(g, edge)?;
    let (case, run, planar_map, members) = match anchor {
        PersistentAnchor::FacialTriangle(face) => {
            let run = planar_run(g, &map, &minor, target, face, edge[0], len, gamma, tol)?;
            let members = run.members.clone();
            (ContractionCase::Triangle { face }, run, map.clone(), members)
        }
        PersistentAnchor::ThreeVertex(v) => {
            let h = truncate_three_vertex(g, v)?;
            let (h_minor, h_map) = contract_edge(&h, edge)?;
            let cut = truncated_target(g, &map, &h, &h_map, &h_minor, target, v, tol)?;
            let delta = g.num_faces();
            let run = planar_run(&h, &h_map, &h_minor, &cut, delta, edge[0], len, gamma, tol)?;
            let ct = g.to_combinatorial_type();
            let h_ct = h.to_combinatorial_type();
            let mut members = Vec::with_capacity(len);
            for (k, q) in run.members.iter().enumerate() {
                let p = restore_vertex(g, &h_ct, q, v)?;
                require_separated(&ct, &p, tol)
                    .map_err(|e| Error::ValidationFailed(format!("restored member {}: {e}", k + 1)))?;
                members.push(p);
            }
            (ContractionCase::ThreeVertex { vertex: v }, run, h_map, members)
        }
    };
    let sequence = RealizationSequence::new(g.clone(), minor, map, target.clone(), members)?;
    Ok(ContractionSequence {
        edge,
        case,
        transform: run.transform,
        schedule: run.schedule,
        planar_map,
        target_framework: run.target_framework,
        target_reciprocal: run.target_reciprocal,
        target_lift: run.target_lift,
        steps: run.steps,
        sequence,
    })
}

/// The target with vertex `[v]` cut off: the new vertices sit at
/// `CUT_FRACTION` along the edges from `[v]` to its neighbors.
#[allow(clippy::too_many_arguments)]
fn truncated_target(
    g: &PolyhedralGraph,
    map: &ContractionMap,
    h: &PolyhedralGraph,
    h_map: &ContractionMap,
    h_minor: &PolyhedralGraph,
    target: &Realization,
    v: usize,
    tol: &ToleranceConfig,
) -> Result<Realization> {
    let n = g.num_vertices();
    let rot = g.rotation(v);
    let apex = target.point3(map.class_of(v));
    let cut = |k: usize| {
        let u = target.point3(map.class_of(rot[k]));
        apex + (u - apex) * CUT_FRACTION
    };
    let mut points = DMatrix::zeros(3, h_minor.num_vertices());
    for y in 0..h.num_vertices() {
        let p = if y == v {
            cut(0)
        } else if y == n {
            cut(1)
        } else if y == n + 1 {
            cut(2)
        } else {
            target.point3(map.class_of(y))
        };
        points.set_column(h_map.class_of(y), &p);
    }
    let ct = h_minor.to_combinatorial_type();
    let r = Realization::with_fitted_normals(&ct, points)?;
    require_strictly_convex(&ct, &r, tol)?;
    Ok(r)
}

/// Drops the cut triangle of a realization of the truncated graph: vertex
/// `v` goes back to the meet of its three facet planes.
fn restore_vertex(g: &PolyhedralGraph, h_ct: &CombinatorialType, q: &Realization, v: usize) -> Result<Realization> {
    let faces = g.faces_at(v);
    let offsets = q.facet_offsets(h_ct);
    let mut m = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (row, &s) in faces.iter().enumerate() {
        m.set_row(row, &q.normal3(s).transpose());
        rhs[row] = offsets[s];
    }
    let apex = m.try_inverse().ok_or(Error::SingularSystem)? * rhs;
    let mut points = DMatrix::zeros(3, g.num_vertices());
    for i in 0..g.num_vertices() {
        let p = if i == v { apex } else { q.point3(i) };
        points.set_column(i, &p);
    }
    let normals = q.normals().columns(0, g.num_faces()).into_owned();
    Realization::new(points, normals)
}

/// Per-member convergence metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// Longest edge inside a class.
    pub edge_length: Vec<f64>,
    /// Largest `‖p_i^n - p~_[i]‖`.
    pub vertex_distance: Vec<f64>,
    /// Largest `‖a_σ^n - a~_σ‖` over persistent faces.
    pub normal_deviation: Vec<f64>,
}

impl ConvergenceReport {
    /// Whether each metric is non-increasing over the last `k` members
    /// (up to `slack` relative to the first member's value).
    pub fn tail_decreasing(&self, k: usize, slack: f64) -> bool {
        [&self.edge_length, &self.vertex_distance, &self.normal_deviation]
            .iter()
            .all(|m| {
                let start = m.len().saturating_sub(k);
                let scale = m.first().copied().unwrap_or(0.0);
                m[start..].windows(2).all(|w| w[1] <= w[0] + slack * scale)
            })
    }
}

pub fn convergence_report(seq: &RealizationSequence) -> ConvergenceReport {
    let g = &seq.graph;
    let map = &seq.map;
    let mut report = ConvergenceReport {
        edge_length: Vec::new(),
        vertex_distance: Vec::new(),
        normal_deviation: Vec::new(),
    };
    for p in &seq.members {
        let edge = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(e, _)| map.edge_image(*e).is_none())
            .map(|(_, &[a, b])| (p.point3(a) - p.point3(b)).norm())
            .fold(0.0, f64::max);
        let dist = (0..g.num_vertices())
            .map(|i| (p.point3(i) - seq.target.point3(map.class_of(i))).norm())
            .fold(0.0, f64::max);
        let normal = (0..seq.minor.num_faces())
            .map(|t| (p.normal3(map.face_origin(t)) - seq.target.normal3(t)).norm())
            .fold(0.0, f64::max);
        report.edge_length.push(edge);
        report.vertex_distance.push(dist);
        report.normal_deviation.push(normal);
    }
    report
}

/// Gaps between each member's reciprocal and lift and those of the
/// contracted framework: `max ‖w_σ^n - w~_σ‖` over persistent faces and
/// `max |h_i^n - h~_[i]|`.
pub fn pipeline_gaps(seq: &ContractionSequence) -> Vec<(f64, f64)> {
    let map = &seq.planar_map;
    let faces = seq.target_reciprocal.positions().len();
    seq.steps
        .iter()
        .map(|s| {
            let w = (0..faces)
                .map(|t| (s.reciprocal.position(map.face_origin(t)) - seq.target_reciprocal.position(t)).norm())
                .fold(0.0, f64::max);
            let h = (0..s.lift.heights().len())
                .map(|i| (s.lift.height(i) - seq.target_lift.height(map.class_of(i))).abs())
                .fold(0.0, f64::max);
            (w, h)
        })
        .collect()
}

/// Gauge for [`flex_limit`]: the members are moved so that the edge lies
/// on a line `ℓ`, and each flex is corrected by a trivial motion so that
/// both edge endpoints and the normal of `facet` stay fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlexGauge {
    pub edge: [usize; 2],
    pub facet: usize,
    /// `(point, direction)` of `ℓ`; by default the line through the
    /// target position of the edge's class along the edge direction of
    /// the first member.
    pub line: Option<(Vector3<f64>, Vector3<f64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitVerdict {
    LimitIsFlex,
    LimitDegenerate,
}

#[derive(Clone, Debug)]
pub struct FlexLimit {
    /// Limit motion of the target realization.
    pub motion: Motion,
    /// Relative residual of `motion` in the target's rigidity matrix.
    pub residual: f64,
    /// Norm of `motion` after removing its trivial part.
    pub nontrivial_norm: f64,
    /// Norm of the last change between normalized flexes.
    pub tail_difference: f64,
    pub verdict: LimitVerdict,
    /// Gauge-fixed, normalized flexes of the (moved) members.
    pub normalized: Vec<Motion>,
}

fn rotate_motion(m: &Motion, rot: &Matrix3<f64>) -> Motion {
    let r = DMatrix::from_column_slice(3, 3, rot.as_slice());
    Motion {
        pdot: &r * &m.pdot,
        adot: &r * &m.adot,
    }
}

fn rotate_realization(p: &Realization, rot: &Matrix3<f64>, shift: &Vector3<f64>) -> Result<Realization> {
    let r = DMatrix::from_column_slice(3, 3, rot.as_slice());
    let mut points = &r * p.points();
    for mut c in points.column_iter_mut() {
        c += DVector::from_column_slice(shift.as_slice());
    }
    Realization::new(points, &r * p.normals())
}

/// Adds the trivial motion (translation `t`, rotation `ω` about `p_a`) that
/// makes `ṗ_a = ṗ_b = 0` and `ȧ_σ = 0`. The rotation across the edge is
/// `d̂ × (ṗ_a - ṗ_b) / |d|`; the rotation about the edge is fitted to
/// `ȧ_σ`, which needs `σ` not orthogonal to the edge.
fn gauge_fix(p: &Realization, m: &Motion, [a, b]: [usize; 2], sigma: usize) -> Result<Motion> {
    let pa = p.point3(a);
    let d = p.point3(b) - pa;
    let len = d.norm();
    if !(len > 0.0) {
        return Err(Error::Precondition("gauge edge has zero length".into()));
    }
    let dh = d / len;
    let col = |x: &DMatrix<f64>, i: usize| Vector3::new(x[(0, i)], x[(1, i)], x[(2, i)]);
    let ma = col(&m.pdot, a);
    let across = dh.cross(&(ma - col(&m.pdot, b))) / len;
    let normal = p.normal3(sigma);
    let lever = dh.cross(&normal);
    if lever.norm() < 1e-9 {
        return Err(Error::Precondition("gauge facet is orthogonal to the gauge edge".into()));
    }
    let rhs = -col(&m.adot, sigma) - across.cross(&normal);
    let omega = across + dh * (lever.dot(&rhs) / lever.norm_squared());
    let mut out = m.clone();
    for i in 0..p.num_vertices() {
        let v = col(&m.pdot, i) - ma + omega.cross(&(p.point3(i) - pa));
        out.pdot.set_column(i, &v);
    }
    for s in 0..p.num_facets() {
        let v = col(&m.adot, s) + omega.cross(&p.normal3(s));
        out.adot.set_column(s, &v);
    }
    Ok(out)
}

/// Limit of gauge-fixed, normalized first-order flexes along a sequence.
///
/// Each member is moved rigidly so the gauge edge lies on `ℓ` (midpoint
/// on the base point), its flex is rotated along and corrected by the
/// trivial motion fixing both endpoints and the gauge facet normal, then
/// scaled to unit norm with the sign of its predecessor. The limit is
/// extrapolated from the last three members and transferred to the minor
/// (class means for vertices, origin faces for facets).
pub fn flex_limit(seq: &RealizationSequence, flexes: &[Motion], gauge: FlexGauge, tol: f64) -> Result<FlexLimit> {
    let members = &seq.members;
    if members.is_empty() || flexes.len() != members.len() {
        return Err(Error::Precondition("need one flex per member of a nonempty sequence".into()));
    }
    let g = &seq.graph;
    let [a, b] = gauge.edge;
    if g.edge_index(a, b).is_none() {
        return Err(Error::NoSuchEdge(a, b));
    }
    if gauge.facet >= g.num_faces() {
        return Err(Error::Precondition(format!("no facet {}", gauge.facet)));
    }
    let (base, dir) = gauge.line.unwrap_or_else(|| {
        let first = &members[0];
        (
            seq.target.point3(seq.map.class_of(a)),
            (first.point3(b) - first.point3(a)).normalize(),
        )
    });
    let dir = dir.normalize();
    let mut normalized: Vec<Motion> = Vec::with_capacity(members.len());
    let mut last_rot = Matrix3::identity();
    for (p, flex) in members.iter().zip(flexes) {
        let along = (p.point3(b) - p.point3(a)).normalize();
        let rot = rotation_between(&along, &dir);
        let mid = (p.point3(a) + p.point3(b)) / 2.0;
        let moved = rotate_realization(p, &rot, &(base - rot * mid))?;
        let m = rotate_motion(flex, &rot);
        let mut fixed = gauge_fix(&moved, &m, [a, b], gauge.facet)?.to_vector();
        let norm = fixed.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidFlex("a flex is trivial".into()));
        }
        fixed /= norm;
        if let Some(prev) = normalized.last() {
            if prev.to_vector().dot(&fixed) < 0.0 {
                fixed = -fixed;
            }
        }
        normalized.push(Motion::from_vector(&fixed, 3, g.num_vertices(), g.num_faces())?);
        last_rot = rot;
    }
    let vecs: Vec<DVector<f64>> = normalized.iter().map(Motion::to_vector).collect();
    let k = vecs.len();
    let (limit, tail) = if k == 1 {
        (vecs[0].clone(), 0.0)
    } else {
        let d2 = (&vecs[k - 1] - &vecs[k - 2]).norm();
        let q = if k >= 3 {
            let d1 = (&vecs[k - 2] - &vecs[k - 3]).norm();
            if d1 > 0.0 {
                d2 / d1
            } else {
                0.0
            }
        } else {
            0.0
        };
        let step = &vecs[k - 1] - &vecs[k - 2];
        let est = if q < 1.0 {
            &vecs[k - 1] + step * (q / (1.0 - q))
        } else {
            vecs[k - 1].clone()
        };
        (est, d2)
    };
    if tail > CAUCHY_TOL {
        return Err(Error::NoConvergence(tail));
    }
    let limit = Motion::from_vector(&limit, 3, g.num_vertices(), g.num_faces())?;
    let minor = &seq.minor;
    let mut reduced = Motion::zeros(3, minor.num_vertices(), minor.num_faces());
    for (c, members) in seq.map.classes().iter().enumerate() {
        let mut mean = DVector::zeros(3);
        for &i in members {
            mean += limit.pdot.column(i);
        }
        reduced.pdot.set_column(c, &(mean / members.len() as f64));
    }
    for t in 0..minor.num_faces() {
        reduced.adot.set_column(t, &limit.adot.column(seq.map.face_origin(t)));
    }
    let motion = rotate_motion(&reduced, &last_rot.transpose());
    let minor_ct = minor.to_combinatorial_type();
    let residual = build_rigidity_matrix(&minor_ct, &seq.target)?.relative_residual(&motion);
    let trivial = trivial_motion_basis(&minor_ct, &seq.target)?;
    let basis = DMatrix::from_columns(&trivial.iter().map(Motion::to_vector).collect::<Vec<_>>());
    let q = linalg::orthonormal_columns(&basis, 1e-12);
    let nontrivial_norm = linalg::project_out(&motion.to_vector(), &q).norm();
    let verdict = if residual < tol && nontrivial_norm > NONTRIVIAL_TOL {
        LimitVerdict::LimitIsFlex
    } else {
        LimitVerdict::LimitDegenerate
    };
    Ok(FlexLimit {
        motion,
        residual,
        nontrivial_norm,
        tail_difference: tail,
        verdict,
        normalized,
    })
}
