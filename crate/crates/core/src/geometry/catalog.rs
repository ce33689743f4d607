use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
use nalgebra::Vector3;
use num_traits::Float;

use super::{hull_realization, Realization, HULL_EPS};
use crate::graph::CombinatorialType;
use crate::{Error, Result};

/// The golden ratio to 64 significant digits.
pub const GOLDEN_RATIO_DIGITS: &str = "1.618033988749894848204586834365638117720309179805762862135448623";

/// Named polytopes. All entries are centered near the origin and built
/// through the convex hull, so facets are boundary cycles with outward
/// normals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogEntry {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
    Cuboctahedron,
    /// Regular prism over an `n`-gon, all edges of equal length.
    Prism(usize),
    /// Regular antiprism over an `n`-gon.
    Antiprism(usize),
    /// Permutations of `(0, ±1, ±2)` (truncated octahedron).
    Permutahedron,
    /// Cube `[-1, 1]^3` with apex `(0, 0, 2)` over the top square.
    CubeWithRoof,
    /// Cuboctahedron with flat pyramids on the squares at `x = ±1`.
    StackedCuboctahedron,
    /// Antiprism with a flat tetrahedron stacked on every triangle.
    AntiprismStackedK4(usize),
    /// Minkowski sum of a square and a triangle: five edge directions.
    FiveDirections,
}

impl CatalogEntry {
    /// Entries without a size parameter, plus one instance of each
    /// parameterized family.
    pub fn all() -> Vec<CatalogEntry> {
        use CatalogEntry::*;
        vec![
            Tetrahedron,
            Cube,
            Octahedron,
            Dodecahedron,
            Icosahedron,
            Cuboctahedron,
            Prism(5),
            Antiprism(8),
            Permutahedron,
            CubeWithRoof,
            StackedCuboctahedron,
            AntiprismStackedK4(8),
            FiveDirections,
        ]
    }

    /// Vertex coordinates before taking the hull.
    pub fn points(&self) -> Result<Vec<Vector3<f64>>> {
        use CatalogEntry::*;
        let v = Vector3::new;
        Ok(match *self {
            Tetrahedron => vec![v(1.0, 1.0, 1.0), v(1.0, -1.0, -1.0), v(-1.0, 1.0, -1.0), v(-1.0, -1.0, 1.0)],
            Cube => cube_points(),
            Octahedron => {
                let mut p = Vec::new();
                for k in 0..3 {
                    for s in [1.0, -1.0] {
                        let mut x = Vector3::zeros();
                        x[k] = s;
                        p.push(x);
                    }
                }
                p
            }
            Icosahedron => {
                let phi = golden_ratio();
                cyclic(&signed(&[0.0, 1.0, phi]))
            }
            Dodecahedron => {
                let phi = golden_ratio();
                let mut p = cube_points();
                p.extend(cyclic(&signed(&[0.0, 1.0 / phi, phi])));
                p
            }
            Cuboctahedron => cyclic(&signed(&[1.0, 1.0, 0.0])),
            Prism(n) => {
                check_n(n, 3)?;
                let side = 2.0 * Float::sin(PI / n as f64);
                let mut p = polygon(n, 0.0, -side / 2.0);
                p.extend(polygon(n, 0.0, side / 2.0));
                p
            }
            Antiprism(n) => antiprism(n)?,
            Permutahedron => {
                let base = signed(&[0.0, 1.0, 2.0]);
                let mut p = Vec::new();
                for b in base {
                    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                        p.push(v(b[perm[0]], b[perm[1]], b[perm[2]]));
                    }
                }
                dedup(p)
            }
            CubeWithRoof => {
                let mut p = cube_points();
                p.push(v(0.0, 0.0, 2.0));
                p
            }
            StackedCuboctahedron => {
                let mut p = cyclic(&signed(&[1.0, 1.0, 0.0]));
                p.push(v(1.5, 0.0, 0.0));
                p.push(v(-1.5, 0.0, 0.0));
                p
            }
            AntiprismStackedK4(n) => antiprism_stacked(n)?,
            FiveDirections => {
                let square = [v(1.0, 1.0, 0.0), v(1.0, -1.0, 0.0), v(-1.0, 1.0, 0.0), v(-1.0, -1.0, 0.0)];
                let triangle = [v(0.0, 0.0, -1.0), v(0.5, 0.25, 1.0), v(-0.5, 0.5, 1.0)];
                square.iter().flat_map(|s| triangle.iter().map(move |t| s + t)).collect()
            }
        })
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CatalogEntry::*;
        match self {
            Tetrahedron => write!(f, "tetrahedron"),
            Cube => write!(f, "cube"),
            Octahedron => write!(f, "octahedron"),
            Dodecahedron => write!(f, "dodecahedron"),
            Icosahedron => write!(f, "icosahedron"),
            Cuboctahedron => write!(f, "cuboctahedron"),
            Prism(n) => write!(f, "n_prism({n})"),
            Antiprism(n) => write!(f, "n_antiprism({n})"),
            Permutahedron => write!(f, "permutahedron"),
            CubeWithRoof => write!(f, "cube_with_roof"),
            StackedCuboctahedron => write!(f, "stacked_cuboctahedron"),
            AntiprismStackedK4(n) => write!(f, "antiprism_stacked_k4({n})"),
            FiveDirections => write!(f, "five_directions"),
        }
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;

    /// Accepts the names printed by `Display`; `prism(n)` and
    /// `antiprism(n)` are accepted as well.
    fn from_str(s: &str) -> Result<Self> {
        use CatalogEntry::*;
        let name: String = s.trim().to_ascii_lowercase();
        let unknown = || Error::UnknownName(s.to_string());
        if let Some(open) = name.find('(') {
            let close = name.strip_suffix(')').ok_or_else(unknown)?;
            let n: usize = close[open + 1..].trim().parse().map_err(|_| unknown())?;
            return match &name[..open] {
                "n_prism" | "prism" => Ok(Prism(n)),
                "n_antiprism" | "antiprism" => Ok(Antiprism(n)),
                "antiprism_stacked_k4" => Ok(AntiprismStackedK4(n)),
                _ => Err(unknown()),
            };
        }
        Ok(match name.as_str() {
            "tetrahedron" => Tetrahedron,
            "cube" => Cube,
            "octahedron" => Octahedron,
            "dodecahedron" => Dodecahedron,
            "icosahedron" => Icosahedron,
            "cuboctahedron" => Cuboctahedron,
            "permutahedron" => Permutahedron,
            "cube_with_roof" => CubeWithRoof,
            "stacked_cuboctahedron" => StackedCuboctahedron,
            "five_directions" => FiveDirections,
            _ => return Err(unknown()),
        })
    }
}

/// Looks up a catalog entry by name (see [`CatalogEntry`]).
pub fn catalog(name: &str) -> Result<(CombinatorialType, Realization)> {
    let entry: CatalogEntry = name.parse()?;
    Ok(hull_realization(&entry.points()?, HULL_EPS)?.into_parts())
}

fn golden_ratio() -> f64 {
    GOLDEN_RATIO_DIGITS.parse().expect("valid literal")
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Precondition(alloc::format!("family parameter must be at least {min}")));
    }
    Ok(())
}

fn cube_points() -> Vec<Vector3<f64>> {
    signed(&[1.0, 1.0, 1.0]).into_iter().map(Vector3::from).collect()
}

/// All sign patterns of the nonzero entries.
fn signed(base: &[f64; 3]) -> Vec<[f64; 3]> {
    let mut out = vec![*base];
    for k in 0..3 {
        if base[k] != 0.0 {
            let flipped: Vec<[f64; 3]> = out
                .iter()
                .map(|p| {
                    let mut q = *p;
                    q[k] = -q[k];
                    q
                })
                .collect();
            out.extend(flipped);
        }
    }
    out
}

/// Cyclic coordinate permutations.
fn cyclic(points: &[[f64; 3]]) -> Vec<Vector3<f64>> {
    let mut out = Vec::new();
    for shift in 0..3 {
        for p in points {
            out.push(Vector3::new(p[shift % 3], p[(shift + 1) % 3], p[(shift + 2) % 3]));
        }
    }
    dedup(out)
}

fn dedup(points: Vec<Vector3<f64>>) -> Vec<Vector3<f64>> {
    let mut out: Vec<Vector3<f64>> = Vec::new();
    for p in points {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn polygon(n: usize, phase: f64, z: f64) -> Vec<Vector3<f64>> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + phase) / n as f64;
            Vector3::new(Float::cos(t), Float::sin(t), z)
        })
        .collect()
}

fn antiprism(n: usize) -> Result<Vec<Vector3<f64>>> {
    check_n(n, 3)?;
    let s = Float::sin(PI / n as f64);
    let t = Float::sin(PI / (2.0 * n as f64));
    let h = Float::sqrt(4.0 * s * s - 4.0 * t * t);
    let mut p = polygon(n, 0.0, -h / 2.0);
    p.extend(polygon(n, 0.5, h / 2.0));
    Ok(p)
}

fn antiprism_stacked(n: usize) -> Result<Vec<Vector3<f64>>> {
    let base = antiprism(n)?;
    let (ct, r) = hull_realization(&base, HULL_EPS)?.into_parts();
    let mut h = 0.1 * Float::sin(PI / n as f64);
    for _ in 0..30 {
        let mut pts = r.points3();
        for (s, f) in ct.facets().iter().enumerate() {
            if f.len() == 3 {
                let c = f.iter().map(|&i| r.point3(i)).sum::<Vector3<f64>>() / 3.0;
                pts.push(c + r.normal3(s) * h);
            }
        }
        if let Ok(hull) = hull_realization(&pts, HULL_EPS) {
            if hull.source.len() == pts.len() && hull.combinatorial_type.num_facets() == 2 + 6 * n {
                return Ok(pts);
            }
        }
        h *= 0.5;
    }
    Err(Error::TooTall)
}
