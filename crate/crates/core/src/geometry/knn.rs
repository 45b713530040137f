//! Exact k-nearest-neighbor tables.
//!
//! Rows are ordered by ascending squared distance. The query point itself
//! is always the first entry of its own row, and remaining ties are broken
//! by the smaller point index. Both search backends apply the same total
//! order to the same distance values, so their tables are bit-identical.

use std::collections::BinaryHeap;

use super::cloud::{dist2, Point3, PointCloud};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `N × k` neighbor indices, row `o` listing the neighbors of point `o`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    n: usize,
    k: usize,
    indices: Vec<usize>,
}

impl NeighborTable {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if n == 0 || k == 0 || k > n {
            return Err(Error::InvalidK { k, n });
        }
        let mut indices = Vec::with_capacity(n * k);
        let mut seen = vec![usize::MAX; n];
        for (o, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "row {o} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for &j in row {
                if j >= n || seen[j] == o {
                    return Err(Error::ShapeMismatch(format!(
                        "row {o}: index {j} out of range or repeated"
                    )));
                }
                seen[j] = o;
            }
            if seen[o] != o {
                return Err(Error::ShapeMismatch(format!(
                    "row {o} does not contain its own point"
                )));
            }
            indices.extend_from_slice(row);
        }
        Ok(NeighborTable { n, k, indices })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, o: usize) -> &[usize] {
        &self.indices[o * self.k..(o + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.indices.chunks_exact(self.k)
    }
}

/// Neighbor search backend.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NeighborSearch {
    #[default]
    Exhaustive,
    /// Uniform-grid ring search over coordinates. Clouds carrying feature
    /// rows fall back to exhaustive search.
    Grid,
}

// (squared distance bits, not-self flag, index): a total order that matches
// numeric order because squared distances are non-negative.
type Key = (u64, bool, usize);

#[inline]
fn key(d2: f64, j: usize, o: usize) -> Key {
    (d2.to_bits(), j != o, j)
}

pub fn knn(cloud: &PointCloud, k: usize) -> Result<NeighborTable> {
    knn_with(cloud, k, NeighborSearch::Exhaustive)
}

pub fn knn_with(cloud: &PointCloud, k: usize, search: NeighborSearch) -> Result<NeighborTable> {
    let n = cloud.len();
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let indices = match (cloud.features(), search) {
        (Some(f), _) => exhaustive(n, k, |o, j| feature_dist2(f, o, j)),
        (None, NeighborSearch::Exhaustive) => {
            let p = cloud.points();
            exhaustive(n, k, |o, j| dist2(&p[o], &p[j]))
        }
        (None, NeighborSearch::Grid) => Grid::build(cloud.points(), k).query_all(k),
    };
    Ok(NeighborTable { n, k, indices })
}

#[inline]
fn feature_dist2(f: &Matrix, a: usize, b: usize) -> f64 {
    f.row(a)
        .iter()
        .zip(f.row(b))
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

fn exhaustive(n: usize, k: usize, d2: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut out = Vec::with_capacity(n * k);
    let mut buf: Vec<Key> = Vec::with_capacity(n);
    for o in 0..n {
        buf.clear();
        buf.extend((0..n).map(|j| key(d2(o, j), j, o)));
        if k < n {
            buf.select_nth_unstable(k - 1);
            buf.truncate(k);
        }
        buf.sort_unstable();
        out.extend(buf.iter().map(|&(_, _, j)| j));
    }
    out
}

struct Grid<'a> {
    points: &'a [Point3],
    min: Point3,
    cell: f64,
    dims: [usize; 3],
    cell_start: Vec<usize>,
    cell_points: Vec<usize>,
}

impl<'a> Grid<'a> {
    fn build(points: &'a [Point3], k: usize) -> Self {
        let n = points.len();
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in points {
            for a in 0..3 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        let extent: Vec<f64> = (0..3).map(|a| max[a] - min[a]).collect();
        let live: Vec<f64> = extent.iter().copied().filter(|&e| e > 0.0).collect();
        let per_cell = (k as f64 / 2.0).max(2.0);
        let cell = if live.is_empty() {
            1.0
        } else {
            let cells = (n as f64 / per_cell).max(1.0);
            let vol: f64 = live.iter().product();
            (vol / cells).powf(1.0 / live.len() as f64)
        };
        let dims = [0, 1, 2].map(|a| ((extent[a] / cell).floor() as usize + 1).min(1 << 20));

        let total = dims[0] * dims[1] * dims[2];
        let mut counts = vec![0usize; total + 1];
        let mut grid = Grid {
            points,
            min,
            cell,
            dims,
            cell_start: Vec::new(),
            cell_points: vec![0; n],
        };
        let owner: Vec<usize> = points.iter().map(|p| grid.flat(grid.cell_of(p))).collect();
        for &c in &owner {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        for (i, &c) in owner.iter().enumerate() {
            grid.cell_points[fill[c]] = i;
            fill[c] += 1;
        }
        grid.cell_start = counts;
        grid
    }

    fn cell_of(&self, p: &Point3) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let c = ((p[a] - self.min[a]) / self.cell).floor();
            (c.max(0.0) as usize).min(self.dims[a] - 1)
        })
    }

    #[inline]
    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn query_all(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.points.len() * k);
        let mut heap: BinaryHeap<Key> = BinaryHeap::with_capacity(k + 1);
        for o in 0..self.points.len() {
            heap.clear();
            self.query(o, k, &mut heap);
            let mut row: Vec<Key> = heap.drain().collect();
            row.sort_unstable();
            out.extend(row.iter().map(|&(_, _, j)| j));
        }
        out
    }

    fn query(&self, o: usize, k: usize, heap: &mut BinaryHeap<Key>) {
        let q = self.points[o];
        let c = self.cell_of(&q);
        let margin = 1e-9 * self.cell;
        let mut r = 0usize;
        loop {
            self.visit_ring(c, r, |j| {
                let kk = key(dist2(&q, &self.points[j]), j, o);
                if heap.len() < k {
                    heap.push(kk);
                } else if kk < *heap.peek().expect("non-empty") {
                    heap.pop();
                    heap.push(kk);
                }
            });
            // distance from q to the outside of the visited block
            let mut bound = f64::INFINITY;
            for a in 0..3 {
                if c[a] > r {
                    let lo = self.min[a] + (c[a] - r) as f64 * self.cell;
                    bound = bound.min(q[a] - lo);
                }
                if c[a] + r + 1 < self.dims[a] {
                    let hi = self.min[a] + (c[a] + r + 1) as f64 * self.cell;
                    bound = bound.min(hi - q[a]);
                }
            }
            if bound.is_infinite() {
                return;
            }
            if heap.len() == k {
                let worst = f64::from_bits(heap.peek().expect("k >= 1").0);
                let b = (bound - margin).max(0.0);
                if worst < b * b {
                    return;
                }
            }
            r += 1;
        }
    }

    fn visit_ring(&self, c: [usize; 3], r: usize, mut f: impl FnMut(usize)) {
        let lo = c.map(|v| v.saturating_sub(r));
        let hi = [0, 1, 2].map(|a| (c[a] + r).min(self.dims[a] - 1));
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let ring = x.abs_diff(c[0]).max(y.abs_diff(c[1])).max(z.abs_diff(c[2]));
                    if ring != r {
                        continue;
                    }
                    let cell = self.flat([x, y, z]);
                    for &j in &self.cell_points[self.cell_start[cell]..self.cell_start[cell + 1]] {
                        f(j);
                    }
                }
            }
        }
    }
}

/// How many rows of the table contain each point.
pub fn neighbor_frequency(table: &NeighborTable) -> Vec<usize> {
    let mut counts = vec![0usize; table.n()];
    for row in table.rows() {
        for &j in row {
            counts[j] += 1;
        }
    }
    counts
}
