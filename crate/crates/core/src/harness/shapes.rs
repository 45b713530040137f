//! Synthetic shapes with analytic edge masks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};
use crate::rng::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    /// `size × size` planar lattice; boundary rows and columns are edges.
    Grid2d,
    /// `size` points on the unit circle; every point is an edge.
    Circle,
    /// Surface lattice of a cube with `size` points per edge; points on
    /// the 12 cube edges are edges.
    CubeShell,
    /// Planar L-shaped lattice inside a `size × size` square; points on the
    /// polygon outline are edges.
    LBracket,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 4] = [
        ShapeKind::Grid2d,
        ShapeKind::Circle,
        ShapeKind::CubeShell,
        ShapeKind::LBracket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Grid2d => "grid2d",
            ShapeKind::Circle => "circle",
            ShapeKind::CubeShell => "cube-shell",
            ShapeKind::LBracket => "l-bracket",
        }
    }

    pub fn default_size(self) -> usize {
        match self {
            ShapeKind::Grid2d => 10,
            ShapeKind::Circle => 64,
            ShapeKind::CubeShell => 8,
            ShapeKind::LBracket => 12,
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grid2d" | "grid" => Ok(ShapeKind::Grid2d),
            "circle" => Ok(ShapeKind::Circle),
            "cube-shell" | "cube" => Ok(ShapeKind::CubeShell),
            "l-bracket" | "lbracket" => Ok(ShapeKind::LBracket),
            _ => Err(Error::UnknownGenerator(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    pub size: usize,
    /// Uniform coordinate noise amplitude; the mask is computed before noise.
    pub jitter: f64,
}

impl ShapeParams {
    pub fn sized(size: usize) -> Self {
        ShapeParams { size, jitter: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticShape {
    pub kind: ShapeKind,
    pub params: ShapeParams,
    pub cloud: PointCloud,
    pub edge_mask: Vec<bool>,
}

impl SyntheticShape {
    pub fn id(&self) -> String {
        format!("{}-{}", self.kind, self.params.size)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_mask.iter().filter(|&&e| e).count()
    }
}

const EDGE_TOL: f64 = 1e-9;

fn segment_distance(p: &Point3, a: &Point3, b: &Point3) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let ap = [p[0] - a[0], p[1] - a[1], p[2] - a[2]];
    let len2 = ab.iter().map(|v| v * v).sum::<f64>();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (ap.iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]];
    crate::geometry::dist(p, &c)
}

fn near_any_segment(p: &Point3, segments: &[(Point3, Point3)]) -> bool {
    segments
        .iter()
        .any(|(a, b)| segment_distance(p, a, b) <= EDGE_TOL)
}

pub fn gen_shape(kind: ShapeKind, params: ShapeParams, seed: u64) -> Result<SyntheticShape> {
    let s = params.size;
    let (points, mask): (Vec<Point3>, Vec<bool>) = match kind {
        ShapeKind::Grid2d => {
            if s < 1 {
                return Err(Error::Config("grid2d needs size >= 1".into()));
            }
            (0..s * s)
                .map(|i| {
                    let (row, col) = (i / s, i % s);
                    let edge = row == 0 || col == 0 || row == s - 1 || col == s - 1;
                    ([col as f64, row as f64, 0.0], edge)
                })
                .unzip()
        }
        ShapeKind::Circle => {
            if s < 1 {
                return Err(Error::Config("circle needs size >= 1".into()));
            }
            (0..s)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / s as f64;
                    ([t.cos(), t.sin(), 0.0], true)
                })
                .unzip()
        }
        ShapeKind::CubeShell => {
            if s < 2 {
                return Err(Error::Config("cube-shell needs size >= 2".into()));
            }
            let step = 2.0 / (s - 1) as f64;
            let corners: Vec<Point3> = (0..8)
                .map(|c| [0, 1, 2].map(|a| if c >> a & 1 == 1 { 1.0 } else { -1.0 }))
                .collect();
            let mut edges = Vec::with_capacity(12);
            for a in 0..8usize {
                for b in a + 1..8 {
                    if (a ^ b).count_ones() == 1 {
                        edges.push((corners[a], corners[b]));
                    }
                }
            }
            let mut pts = Vec::new();
            let mut mask = Vec::new();
            for z in 0..s {
                for y in 0..s {
                    for x in 0..s {
                        let on_surface = [x, y, z].iter().any(|&v| v == 0 || v == s - 1);
                        if !on_surface {
                            continue;
                        }
                        let p = [x, y, z].map(|v| -1.0 + v as f64 * step);
                        mask.push(near_any_segment(&p, &edges));
                        pts.push(p);
                    }
                }
            }
            (pts, mask)
        }
        ShapeKind::LBracket => {
            if s < 3 {
                return Err(Error::Config("l-bracket needs size >= 3".into()));
            }
            let a = (s - 1) as f64;
            let h = ((s - 1) / 2) as f64;
            let poly = [[0.0, 0.0], [a, 0.0], [a, h], [h, h], [h, a], [0.0, a]];
            let segments: Vec<(Point3, Point3)> = (0..poly.len())
                .map(|i| {
                    let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
                    ([p[0], p[1], 0.0], [q[0], q[1], 0.0])
                })
                .collect();
            let mut pts = Vec::new();
            let mut mask = Vec::new();
            for row in 0..s {
                for col in 0..s {
                    let (x, y) = (col as f64, row as f64);
                    if x > h && y > h {
                        continue;
                    }
                    let p = [x, y, 0.0];
                    mask.push(near_any_segment(&p, &segments));
                    pts.push(p);
                }
            }
            (pts, mask)
        }
    };
    let points = if params.jitter > 0.0 {
        let mut rng = rng_from(seed);
        points
            .into_iter()
            .map(|p| p.map(|v| v + rng.random_range(-params.jitter..=params.jitter)))
            .collect()
    } else {
        points
    };
    let cloud = PointCloud::with_id(points, format!("{kind}-{s}"))?;
    Ok(SyntheticShape {
        kind,
        params,
        cloud,
        edge_mask: mask,
    })
}

/// Generator lookup by name.
pub fn gen_shape_named(id: &str, params: ShapeParams, seed: u64) -> Result<SyntheticShape> {
    gen_shape(id.parse()?, params, seed)
}
