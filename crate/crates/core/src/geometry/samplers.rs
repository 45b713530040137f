//! Non-learning baseline samplers driven only by coordinates.

use std::collections::BTreeMap;

use rand::Rng;

use super::cloud::{dist2, PointCloud};
use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::sample::{Policy, SampleResult};

fn check_m(m: usize, n: usize) -> Result<()> {
    if m < 1 || m > n {
        return Err(Error::InvalidM { m, n });
    }
    Ok(())
}

/// `m` distinct indices drawn uniformly without replacement.
pub fn sample_random(cloud: &PointCloud, m: usize, seed: u64) -> Result<SampleResult> {
    let n = cloud.len();
    check_m(m, n)?;
    let mut rng = rng_from(seed);
    let indices = rand::seq::index::sample(&mut rng, n, m).into_vec();
    Ok(SampleResult::new(
        n,
        indices,
        vec![0.0; m],
        vec![0; m],
        seed,
        Policy::Random,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpsStart {
    Index(usize),
    /// Start index drawn uniformly from the given seed.
    Seeded(u64),
}

impl Default for FpsStart {
    fn default() -> Self {
        FpsStart::Index(0)
    }
}

/// Greedy farthest point sampling. Scores hold each pick's distance to the
/// previously selected set (0 for the start point).
pub fn sample_fps(cloud: &PointCloud, m: usize, start: FpsStart) -> Result<SampleResult> {
    let n = cloud.len();
    check_m(m, n)?;
    let (first, seed) = match start {
        FpsStart::Index(i) if i < n => (i, 0),
        FpsStart::Index(i) => return Err(Error::InvalidM { m: i, n }),
        FpsStart::Seeded(s) => (rng_from(s).random_range(0..n), s),
    };
    let pts = cloud.points();
    let mut min_d2 = vec![f64::INFINITY; n];
    let mut taken = vec![false; n];
    let mut indices = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m);
    let mut next = first;
    let mut next_d2: f64 = 0.0;
    for _ in 0..m {
        indices.push(next);
        scores.push(next_d2.sqrt());
        taken[next] = true;
        let p = pts[next];
        let mut best = usize::MAX;
        let mut best_d2 = f64::NEG_INFINITY;
        for j in 0..n {
            if taken[j] {
                continue;
            }
            let d = dist2(&p, &pts[j]);
            if d < min_d2[j] {
                min_d2[j] = d;
            }
            if min_d2[j] > best_d2 {
                best_d2 = min_d2[j];
                best = j;
            }
        }
        next = best;
        next_d2 = best_d2;
    }
    Ok(SampleResult::new(
        n,
        indices,
        scores,
        vec![0; m],
        seed,
        Policy::Fps,
    ))
}

/// One representative per occupied cubic cell of edge `cell`: the member
/// nearest the members' centroid. More than `m_target` representatives are
/// thinned at random; fewer are returned with `shortfall` set.
pub fn sample_voxel(
    cloud: &PointCloud,
    cell: f64,
    m_target: usize,
    seed: u64,
) -> Result<SampleResult> {
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(Error::InvalidCell(cell));
    }
    let n = cloud.len();
    check_m(m_target, n)?;
    let mut reps = voxel_representatives(cloud, cell);
    let shortfall = m_target.saturating_sub(reps.len());
    if reps.len() > m_target {
        let mut rng = rng_from(seed);
        let keep = rand::seq::index::sample(&mut rng, reps.len(), m_target);
        reps = keep.iter().map(|i| reps[i]).collect();
    }
    reps.sort_unstable();
    let m = reps.len();
    let mut out = SampleResult::new(n, reps, vec![0.0; m], vec![0; m], seed, Policy::Voxel);
    out.shortfall = shortfall;
    Ok(out)
}

pub(crate) fn voxel_representatives(cloud: &PointCloud, cell: f64) -> Vec<usize> {
    let mut cells: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.points().iter().enumerate() {
        let key = p.map(|v| (v / cell).floor() as i64);
        cells.entry(key).or_default().push(i);
    }
    let pts = cloud.points();
    cells
        .values()
        .map(|members| {
            let inv = 1.0 / members.len() as f64;
            let mut c = [0.0; 3];
            for &i in members {
                for a in 0..3 {
                    c[a] += pts[i][a];
                }
            }
            let c = c.map(|v| v * inv);
            let mut best = members[0];
            let mut best_d = dist2(&pts[best], &c);
            for &i in &members[1..] {
                let d = dist2(&pts[i], &c);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Voxel sampling with the cell edge searched (log-scale bisection) so that
/// at least `m` cells are occupied whenever that is achievable.
pub fn sample_voxel_target(cloud: &PointCloud, m: usize, seed: u64) -> Result<SampleResult> {
    check_m(m, cloud.len())?;
    let pts = cloud.points();
    let mut lo_corner = [f64::INFINITY; 3];
    let mut hi_corner = [f64::NEG_INFINITY; 3];
    for p in pts {
        for a in 0..3 {
            lo_corner[a] = lo_corner[a].min(p[a]);
            hi_corner[a] = hi_corner[a].max(p[a]);
        }
    }
    let diag = dist2(&lo_corner, &hi_corner).sqrt().max(1e-12);
    let (mut lo, mut hi) = ((diag * 1e-9).ln(), (diag * 4.0).ln());
    if voxel_representatives(cloud, lo.exp()).len() < m {
        return sample_voxel(cloud, lo.exp(), m, seed);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if voxel_representatives(cloud, mid.exp()).len() >= m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sample_voxel(cloud, lo.exp(), m, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> PointCloud {
        PointCloud::new((0..n).map(|i| [i as f64, 0.0, 0.0]).collect()).unwrap()
    }

    #[test]
    fn random_full_draw_is_permutation() {
        let r = sample_random(&line(7), 7, 3).unwrap();
        assert_eq!(r.sorted_indices(), (0..7).collect::<Vec<_>>());
        assert_eq!(r, sample_random(&line(7), 7, 3).unwrap());
        assert!(matches!(
            sample_random(&line(3), 0, 1),
            Err(Error::InvalidM { .. })
        ));
        assert!(matches!(
            sample_random(&line(3), 4, 1),
            Err(Error::InvalidM { .. })
        ));
    }

    #[test]
    fn fps_line_examples() {
        let c = line(4);
        assert_eq!(
            sample_fps(&c, 2, FpsStart::Index(0)).unwrap().indices,
            vec![0, 3]
        );
        assert_eq!(
            sample_fps(&c, 3, FpsStart::Index(0)).unwrap().indices,
            vec![0, 3, 1]
        );
        for s in 0..4 {
            let r = sample_fps(&c, 4, FpsStart::Index(s)).unwrap();
            assert_eq!(r.sorted_indices(), vec![0, 1, 2, 3]);
        }
        let seeded = sample_fps(&c, 2, FpsStart::Seeded(11)).unwrap();
        assert_eq!(seeded, sample_fps(&c, 2, FpsStart::Seeded(11)).unwrap());
    }

    #[test]
    fn voxel_single_cell() {
        let c = PointCloud::new(vec![[0.1, 0.1, 0.0], [0.2, 0.3, 0.0]]).unwrap();
        let r = sample_voxel(&c, 1.0, 2, 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.shortfall, 1);
    }

    #[test]
    fn voxel_fine_cells_keep_everything() {
        let r = sample_voxel(&line(5), 0.5, 5, 0).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.shortfall, 0);
        let r = sample_voxel(&line(5), 0.5, 3, 9).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn voxel_identical_points() {
        let c = PointCloud::new(vec![[1.0, 2.0, 3.0]; 6]).unwrap();
        assert_eq!(sample_voxel(&c, 0.01, 3, 0).unwrap().indices, vec![0]);
        assert!(matches!(
            sample_voxel(&c, 0.0, 3, 0),
            Err(Error::InvalidCell(_))
        ));
        assert!(matches!(
            sample_voxel(&c, -1.0, 3, 0),
            Err(Error::InvalidCell(_))
        ));
    }

    #[test]
    fn voxel_target_reaches_m() {
        let r = sample_voxel_target(&line(50), 10, 1).unwrap();
        assert_eq!(r.len(), 10);
    }
}
