//! Convex hulls in R^3 with merged (non-triangulated) facets, built by gift
//! wrapping from facet to facet.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{Vector2, Vector3};
use num_traits::Float;

use super::{columns3, validate_realization, Realization, ToleranceConfig};
use crate::graph::CombinatorialType;
use crate::{Error, Result};

/// Default coplanarity tolerance, relative to the diameter of the input.
pub const HULL_EPS: f64 = 1e-9;

/// Convex hull with facets as boundary cycles (counterclockwise seen from
/// outside) and outward unit normals.
#[derive(Clone, Debug)]
pub struct Hull {
    pub combinatorial_type: CombinatorialType,
    pub realization: Realization,
    /// Input index of each hull vertex; increasing.
    pub source: Vec<usize>,
}

impl Hull {
    pub fn into_parts(self) -> (CombinatorialType, Realization) {
        (self.combinatorial_type, self.realization)
    }
}

struct Facet {
    polygon: Vec<usize>,
    normal: Vector3<f64>,
}

/// Convex hull of a point set. Points within `eps_rel * diameter` of each
/// other are merged (the first one is kept), points within that distance of
/// a facet plane belong to the facet, and points that are not extreme are
/// dropped.
///
/// Plane distances are evaluated in double-double arithmetic from point
/// triples, so facets through very short edges are classified as
/// accurately as the input coordinates allow.
pub fn hull_realization(points: &[Vector3<f64>], eps_rel: f64) -> Result<Hull> {
    if points.len() < 4 || points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(Error::DegenerateInput);
    }
    let mut diam: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diam = diam.max((points[i] - points[j]).norm());
        }
    }
    if diam == 0.0 {
        return Err(Error::DegenerateInput);
    }
    let eps = eps_rel * diam;
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        if keep.iter().all(|&j| (points[i] - points[j]).norm() > eps) {
            keep.push(i);
        }
    }
    let pts: Vec<Vector3<f64>> = keep.iter().map(|&i| points[i]).collect();
    spanning_check(&pts, eps)?;

    let mut facets: Vec<Facet> = Vec::new();
    let mut by_key: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut dart_owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut add = |f: Facet,
                   facets: &mut Vec<Facet>,
                   queue: &mut VecDeque<usize>,
                   dart_owner: &mut BTreeMap<(usize, usize), usize>|
     -> Result<()> {
        let mut key = f.polygon.clone();
        key.sort_unstable();
        if by_key.contains_key(&key) {
            return Ok(());
        }
        let id = facets.len();
        let m = f.polygon.len();
        for x in 0..m {
            let dart = (f.polygon[x], f.polygon[(x + 1) % m]);
            if dart_owner.insert(dart, id).is_some() {
                return Err(Error::HullFailure(format!("edge {dart:?} lies on two facets")));
            }
        }
        by_key.insert(key, id);
        facets.push(f);
        queue.push_back(id);
        Ok(())
    };
    let f0 = initial_facet(&pts, eps)?;
    add(f0, &mut facets, &mut queue, &mut dart_owner)?;
    while let Some(id) = queue.pop_front() {
        let polygon = facets[id].polygon.clone();
        let m = polygon.len();
        for x in 0..m {
            let (p, q) = (polygon[x], polygon[(x + 1) % m]);
            if dart_owner.contains_key(&(q, p)) {
                continue;
            }
            let c = wrap(&pts, p, q, eps).ok_or_else(|| Error::HullFailure(format!("no facet beyond edge ({p}, {q})")))?;
            let f = facet_from_triple(&pts, [q, p, c], eps)?;
            if !contains_dart(&f.polygon, q, p) {
                return Err(Error::HullFailure(format!("neighbor facet misses edge ({q}, {p})")));
            }
            add(f, &mut facets, &mut queue, &mut dart_owner)?;
        }
    }
    for &(a, b) in dart_owner.keys() {
        if !dart_owner.contains_key(&(b, a)) {
            return Err(Error::HullFailure(format!("boundary edge ({a}, {b})")));
        }
    }

    let mut used: Vec<usize> = facets.iter().flat_map(|f| f.polygon.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let mut relabel = vec![usize::MAX; pts.len()];
    for (k, &i) in used.iter().enumerate() {
        relabel[i] = k;
    }
    let euler = used.len() as i64 - (dart_owner.len() / 2) as i64 + facets.len() as i64;
    if euler != 2 {
        return Err(Error::HullFailure(format!("Euler characteristic {euler}")));
    }
    let vertex_points: Vec<Vector3<f64>> = used.iter().map(|&i| pts[i]).collect();
    let normals: Vec<Vector3<f64>> = facets.iter().map(|f| f.normal).collect();
    let facet_lists: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| f.polygon.iter().map(|&i| relabel[i]).collect())
        .collect();
    let ct = CombinatorialType::new(3, used.len(), facet_lists)?;
    let realization = Realization {
        points: columns3(&vertex_points),
        normals: columns3(&normals),
    };
    let tol = ToleranceConfig {
        residual_tol: eps_rel.max(1e-12) * 10.0,
        ..ToleranceConfig::default()
    };
    let report = validate_realization(&ct, &realization, &tol)?;
    if !report.is_strictly_convex {
        return Err(Error::HullFailure(format!(
            "hull is not strictly convex (margin {:.3e}, coplanarity {:.3e})",
            report.min_convexity_margin, report.max_coplanarity_residual
        )));
    }
    Ok(Hull {
        combinatorial_type: ct,
        realization,
        source: used.iter().map(|&i| keep[i]).collect(),
    })
}

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn quick(hi: f64, lo: f64) -> Dd {
    let s = hi + lo;
    Dd {
        hi: s,
        lo: lo - (s - hi),
    }
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        quick(s.hi, s.lo + self.lo + o.lo)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = Float::mul_add(self.hi, o.hi, -p);
        quick(p, e + self.hi * o.lo + self.lo * o.hi)
    }
}

type Dd3 = [Dd; 3];

/// `a - b`, exact.
fn diff(a: &Vector3<f64>, b: &Vector3<f64>) -> Dd3 {
    [two_sum(a.x, -b.x), two_sum(a.y, -b.y), two_sum(a.z, -b.z)]
}

fn cross(u: &Dd3, v: &Dd3) -> Dd3 {
    [
        u[1].mul(v[2]).sub(u[2].mul(v[1])),
        u[2].mul(v[0]).sub(u[0].mul(v[2])),
        u[0].mul(v[1]).sub(u[1].mul(v[0])),
    ]
}

fn dot(u: &Dd3, v: &Dd3) -> f64 {
    u[0].mul(v[0]).add(u[1].mul(v[1])).add(u[2].mul(v[2])).hi
}

fn to_f64(u: &Dd3) -> Vector3<f64> {
    Vector3::new(u[0].hi, u[1].hi, u[2].hi)
}

/// Oriented plane through `pts[i], pts[j], pts[k]`; positive distances lie
/// on the side of `(p_j - p_i) x (p_k - p_i)`.
struct Plane {
    origin: Vector3<f64>,
    normal: Dd3,
    scale: f64,
}

impl Plane {
    fn new(pts: &[Vector3<f64>], [i, j, k]: [usize; 3]) -> Self {
        let normal = cross(&diff(&pts[j], &pts[i]), &diff(&pts[k], &pts[i]));
        Self {
            origin: pts[i],
            scale: to_f64(&normal).norm(),
            normal,
        }
    }

    fn distance(&self, x: &Vector3<f64>) -> f64 {
        dot(&self.normal, &diff(x, &self.origin)) / self.scale
    }

    fn unit_normal(&self) -> Vector3<f64> {
        to_f64(&self.normal) / self.scale
    }
}

/// Distance of `x` from the line through `a` and `b`.
fn line_distance(a: &Vector3<f64>, b: &Vector3<f64>, x: &Vector3<f64>) -> f64 {
    let d = diff(b, a);
    to_f64(&cross(&d, &diff(x, a))).norm() / to_f64(&d).norm()
}

/// Fails unless the points span three dimensions by more than `eps`.
fn spanning_check(pts: &[Vector3<f64>], eps: f64) -> Result<()> {
    let p0 = pts[0];
    let far = |f: &dyn Fn(&Vector3<f64>) -> f64| -> (usize, f64) {
        pts.iter()
            .enumerate()
            .map(|(i, p)| (i, f(p)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty")
    };
    let (i1, _) = far(&|p| (p - p0).norm());
    let (i2, d2) = far(&|p| line_distance(&p0, &pts[i1], p));
    if d2 <= eps {
        return Err(Error::DegenerateInput);
    }
    let plane = Plane::new(pts, [0, i1, i2]);
    let (_, d3) = far(&|p| plane.distance(p).abs());
    if d3 <= eps {
        return Err(Error::DegenerateInput);
    }
    Ok(())
}

/// Turns a plane about the line `p -> q` until it supports the point set:
/// the returned `c` makes `(q, p, c)` a plane with every point at
/// distance at most `eps` on its positive side. Among points tied with
/// the best, the one farthest from the line wins.
fn wrap(pts: &[Vector3<f64>], p: usize, q: usize, eps: f64) -> Option<usize> {
    let mut best: Option<(usize, Plane, f64)> = None;
    for (i, x) in pts.iter().enumerate() {
        if i == p || i == q {
            continue;
        }
        let r = line_distance(&pts[p], &pts[q], x);
        if r <= eps {
            continue;
        }
        let better = match &best {
            None => true,
            Some((_, plane, br)) => {
                let d = plane.distance(x);
                d > eps || (d >= -eps && r > *br)
            }
        };
        if better {
            best = Some((i, Plane::new(pts, [q, p, i]), r));
        }
    }
    best.map(|b| b.0)
}

/// A first facet: wrap from the lowest point about a horizontal line, then
/// about the segment found, in whichever direction gives a supporting
/// plane.
fn initial_facet(pts: &[Vector3<f64>], eps: f64) -> Result<Facet> {
    let a = (0..pts.len())
        .min_by(|&i, &j| {
            let (p, q) = (pts[i], pts[j]);
            p.z.total_cmp(&q.z)
                .then(p.y.total_cmp(&q.y))
                .then(p.x.total_cmp(&q.x))
        })
        .expect("nonempty");
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, p) in pts.iter().enumerate() {
        let d = p - pts[a];
        let r = Vector2::new(d.y, d.z).norm();
        if r <= eps {
            continue;
        }
        let theta = Float::atan2(d.z, d.y);
        let better = match best {
            None => true,
            Some((_, t, br)) => theta < t - 1e-12 || (theta <= t + 1e-12 && r > br),
        };
        if better {
            best = Some((i, theta, r));
        }
    }
    let b = best.ok_or(Error::DegenerateInput)?.0;
    let mut last = Error::DegenerateInput;
    for (p, q) in [(a, b), (b, a)] {
        let Some(c) = wrap(pts, p, q, eps) else { continue };
        match facet_from_triple(pts, [q, p, c], eps) {
            Ok(f) => return Ok(f),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// The facet in the plane through `pts[t[0]], pts[t[1]], pts[t[2]]`, whose
/// orientation must put every point within `eps` of its negative side:
/// its boundary polygon, counterclockwise around the outward normal.
fn facet_from_triple(pts: &[Vector3<f64>], t: [usize; 3], eps: f64) -> Result<Facet> {
    // A triple with a short side tilts the plane by the noise over that side.
    // Points near the tilted plane are candidates; the plane is refit through
    // the longest side of the triple and the candidate farthest from it that
    // still gives a supporting plane.
    let base = Plane::new(pts, t);
    let up = base.unit_normal();
    let oriented = |[a, b, c]: [usize; 3]| {
        let pl = Plane::new(pts, [a, b, c]);
        if pl.unit_normal().dot(&up) >= 0.0 {
            pl
        } else {
            Plane::new(pts, [b, a, c])
        }
    };
    let supporting = |pl: &Plane| pts.iter().all(|x| pl.distance(x) <= eps);
    let loose = eps * amplification(pts, t);
    let (a, b) = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
        .into_iter()
        .max_by(|x, y| (pts[x.0] - pts[x.1]).norm_squared().total_cmp(&(pts[y.0] - pts[y.1]).norm_squared()))
        .unwrap_or((t[0], t[1]));
    let mut near: Vec<(usize, f64)> = (0..pts.len())
        .filter(|&i| i != a && i != b && base.distance(&pts[i]).abs() <= loose)
        .map(|i| (i, line_distance(&pts[a], &pts[b], &pts[i])))
        .filter(|&(_, d)| d > eps)
        .collect();
    near.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut plane = near
        .iter()
        .map(|&(c, _)| oriented([a, b, c]))
        .find(|pl| supporting(pl))
        .unwrap_or(base);
    let strict = |pl: &Plane| -> Vec<usize> { (0..pts.len()).filter(|&i| pl.distance(&pts[i]).abs() <= eps).collect() };
    let mut members = strict(&plane);
    let wide = oriented(widest_triple(pts, &members, [a, b, members.iter().copied().find(|&i| i != a && i != b).unwrap_or(t[2])]));
    if supporting(&wide) {
        let again = strict(&wide);
        if again.len() >= members.len() {
            plane = wide;
            members = again;
        }
    }
    if !supporting(&plane) {
        return Err(Error::HullFailure("wrapped plane is not supporting".into()));
    }
    let n = plane.unit_normal();
    let e1 = {
        let t = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        (t - n * t.dot(&n)).normalize()
    };
    let e2 = n.cross(&e1);
    let origin = pts[a];
    let flat: Vec<(usize, Vector2<f64>)> = members
        .iter()
        .map(|&i| {
            let d = pts[i] - origin;
            (i, Vector2::new(d.dot(&e1), d.dot(&e2)))
        })
        .collect();
    let polygon = convex_polygon(flat, eps);
    if polygon.len() < 3 {
        return Err(Error::HullFailure("degenerate facet".into()));
    }
    Ok(Facet { polygon, normal: n })
}

/// How much the plane through `t` can tilt, relative to the point cloud,
/// from noise of a given size in the triple.
fn amplification(pts: &[Vector3<f64>], t: [usize; 3]) -> f64 {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for x in pts {
        lo = lo.inf(x);
        hi = hi.sup(x);
    }
    let extent = (hi - lo).norm();
    let altitude = (0..3)
        .map(|k| line_distance(&pts[t[(k + 1) % 3]], &pts[t[(k + 2) % 3]], &pts[t[k]]))
        .fold(f64::INFINITY, f64::min);
    if altitude > 0.0 {
        (extent / altitude).max(1.0)
    } else {
        1.0
    }
}

/// Triple of `members` spanning the largest triangle found greedily, in the
/// orientation of `t`.
fn widest_triple(pts: &[Vector3<f64>], members: &[usize], t: [usize; 3]) -> [usize; 3] {
    if members.len() < 3 {
        return t;
    }
    let far = |from: usize| {
        members
            .iter()
            .copied()
            .max_by(|&x, &y| (pts[x] - pts[from]).norm_squared().total_cmp(&(pts[y] - pts[from]).norm_squared()))
            .unwrap_or(from)
    };
    let a = far(t[0]);
    let b = far(a);
    let c = members
        .iter()
        .copied()
        .max_by(|&x, &y| line_distance(&pts[a], &pts[b], &pts[x]).total_cmp(&line_distance(&pts[a], &pts[b], &pts[y])))
        .unwrap_or(a);
    let old = Plane::new(pts, t).unit_normal();
    let new = Plane::new(pts, [a, b, c]).unit_normal();
    if new.dot(&old) >= 0.0 {
        [a, b, c]
    } else {
        [b, a, c]
    }
}

/// Counterclockwise convex hull of planar points (monotone chain), with
/// points within `eps` of a hull edge dropped.
fn convex_polygon(mut pts: Vec<(usize, Vector2<f64>)>, eps: f64) -> Vec<usize> {
    pts.sort_by(|a, b| a.1.x.total_cmp(&b.1.x).then(a.1.y.total_cmp(&b.1.y)));
    if pts.len() < 3 {
        return pts.into_iter().map(|p| p.0).collect();
    }
    let turn = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| -> bool {
        let ob = b - o;
        let cross = (a - o).perp(&ob);
        cross > eps * ob.norm()
    };
    let mut chain: Vec<(usize, Vector2<f64>)> = Vec::new();
    for pass in 0..2 {
        let start = chain.len();
        let iter: Vec<&(usize, Vector2<f64>)> = if pass == 0 {
            pts.iter().collect()
        } else {
            pts.iter().rev().collect()
        };
        for p in iter {
            while chain.len() >= start + 2 && !turn(&chain[chain.len() - 2].1, &chain[chain.len() - 1].1, &p.1) {
                chain.pop();
            }
            chain.push(*p);
        }
        chain.pop();
    }
    chain.into_iter().map(|p| p.0).collect()
}

fn contains_dart(f: &[usize], a: usize, b: usize) -> bool {
    (0..f.len()).any(|x| f[x] == a && f[(x + 1) % f.len()] == b)
}
