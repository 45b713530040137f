#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samble::geometry::{Point3, PointCloud};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points in the unit cube, normalized to the unit sphere.
pub fn random_cloud(n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts: Vec<Point3> = (0..n)
        .map(|_| [r.random(), r.random(), r.random()])
        .collect();
    samble::geometry::normalize_unit_sphere(&PointCloud::new(pts).unwrap())
}

/// Brute-force neighbor rows: sort every index by (squared distance,
/// not-self, index).
pub fn oracle_knn(points: &[Point3], k: usize) -> Vec<Vec<usize>> {
    (0..points.len())
        .map(|o| {
            let p = points[o];
            let mut all: Vec<(f64, bool, usize)> = points
                .iter()
                .enumerate()
                .map(|(j, q)| {
                    let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                    (d, j != o, j)
                })
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            all.into_iter().take(k).map(|t| t.2).collect()
        })
        .collect()
}

pub fn oracle_frequency(rows: &[Vec<usize>]) -> Vec<usize> {
    let mut c = vec![0; rows.len()];
    for row in rows {
        for &j in row {
            c[j] += 1;
        }
    }
    c
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
