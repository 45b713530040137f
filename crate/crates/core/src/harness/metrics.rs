//! Geometric quality proxies for a sample drawn from a cloud.

use crate::error::{Error, Result};
use crate::geometry::{dist2, PointCloud};
use crate::sample::SampleResult;

/// Coefficient of variation (population std / mean) of each sampled
/// point's distance to its nearest other sampled point. 0 is perfectly even.
pub fn metric_uniformity(sample: &SampleResult, cloud: &PointCloud) -> Result<f64> {
    let m = sample.len();
    if m < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: m,
        });
    }
    let pts = cloud.points();
    let nn: Vec<f64> = sample
        .indices
        .iter()
        .enumerate()
        .map(|(a, &i)| {
            sample
                .indices
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &j)| dist2(&pts[i], &pts[j]))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect();
    let mean = nn.iter().sum::<f64>() / m as f64;
    if mean == 0.0 {
        return Ok(0.0);
    }
    let var = nn.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / m as f64;
    Ok(var.sqrt() / mean)
}

/// Mean distance from every cloud point to its nearest sampled point.
pub fn metric_chamfer(sample: &SampleResult, cloud: &PointCloud) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 1,
            found: 0,
        });
    }
    let pts = cloud.points();
    let total: f64 = pts
        .iter()
        .map(|p| {
            sample
                .indices
                .iter()
                .map(|&j| dist2(p, &pts[j]))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(total / pts.len() as f64)
}

/// Fraction of ground-truth edge points that were sampled.
pub fn metric_edge_recall(sample: &SampleResult, edge_mask: &[bool]) -> Result<f64> {
    if edge_mask.len() != sample.n {
        return Err(Error::MissingMask(format!(
            "mask covers {} points, sample drawn from {}",
            edge_mask.len(),
            sample.n
        )));
    }
    let edges = edge_mask.iter().filter(|&&e| e).count();
    if edges == 0 {
        return Err(Error::MissingMask("mask marks no edge points".into()));
    }
    let hit = sample.indices.iter().filter(|&&i| edge_mask[i]).count();
    Ok(hit as f64 / edges as f64)
}
