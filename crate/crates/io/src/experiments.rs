//! Families assembled from the library for the command line and the
//! acceptance suite.

use nalgebra::{DMatrix, Rotation3, Unit, Vector3};
use polyflex::constructions::minkowski_sum;
use polyflex::contraction::RealizationSequence;
use polyflex::graph::ContractionMap;
use polyflex::rigidity::Motion;
use polyflex::{CombinatorialType, Error, PolyhedralGraph, Realization, Result};

/// `R(t) = P + tQ` over several `t`, numbered like the first sum, with the
/// classes `{(i, j) : j}` of each vertex `i` of `P`, and for each member
/// the flex that turns `Q` about `axis`.
pub struct MinkowskiFamily {
    pub combinatorial_type: CombinatorialType,
    pub sequence: RealizationSequence,
    pub flexes: Vec<Motion>,
    pub labels: Vec<(usize, usize)>,
}

/// Step of the central difference for the facet velocities.
const TURN_STEP: f64 = 1e-5;

pub fn minkowski_family(
    p_ct: &CombinatorialType,
    p: &Realization,
    q: &Realization,
    axis: Vector3<f64>,
    ts: &[f64],
) -> Result<MinkowskiFamily> {
    let &t0 = ts.first().ok_or_else(|| Error::Precondition("no parameters".into()))?;
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Precondition("parameters must be positive".into()));
    }
    let axis = Unit::try_new(axis, 1e-12).ok_or_else(|| Error::Precondition("zero axis".into()))?;
    let scaled = |t: f64| Realization::from_points3(&q.points3().iter().map(|x| x * t).collect::<Vec<_>>(), &q.normals3());
    let (ct, _, labels) = minkowski_sum(p, &scaled(t0))?;
    let sum = |t: f64, angle: f64| {
        let rot = Rotation3::from_axis_angle(&axis, angle);
        let pts = DMatrix::from_fn(3, labels.len(), |k, v| p.point3(labels[v].0)[k] + t * (rot * q.point3(labels[v].1))[k]);
        Realization::with_fitted_normals(&ct, pts)
    };
    let mut members = Vec::with_capacity(ts.len());
    let mut flexes = Vec::with_capacity(ts.len());
    for &t in ts {
        members.push(sum(t, 0.0)?);
        let pdot = DMatrix::from_fn(3, labels.len(), |k, v| (axis.cross(&q.point3(labels[v].1)) * t)[k]);
        let adot = (sum(t, TURN_STEP)?.normals() - sum(t, -TURN_STEP)?.normals()) / (2.0 * TURN_STEP);
        flexes.push(Motion { pdot, adot });
    }
    let g = PolyhedralGraph::from_combinatorial_type(&ct)?;
    let minor = PolyhedralGraph::from_combinatorial_type(p_ct)?;
    let map = ContractionMap::new(&g, &minor, labels.iter().map(|l| l.0).collect())?;
    let sequence = RealizationSequence::new(g, minor, map, p.clone(), members)?;
    Ok(MinkowskiFamily {
        combinatorial_type: ct,
        sequence,
        flexes,
        labels,
    })
}
