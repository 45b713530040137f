//! Dense global maps and per-point local rows, plus the two sparse
//! attention map constructions (carve a dense map, or insert local rows).

use std::fmt;
use std::str::FromStr;

use super::weights::WeightSet;
use crate::error::{Error, Result};
use crate::geometry::{NeighborTable, PointCloud};
use crate::matrix::{dot, softmax_in_place, Matrix};

/// Query and key projections of a cloud's attended rows.
pub(crate) struct Projections {
    pub q: Matrix,
    pub k: Matrix,
    pub scale: f64,
}

pub(crate) fn project(cloud: &PointCloud, ws: &WeightSet) -> Result<Projections> {
    if cloud.attended_dim() != ws.d_in() {
        return Err(Error::DimMismatch {
            expected: ws.d_in(),
            found: cloud.attended_dim(),
        });
    }
    let x = cloud.attended();
    Ok(Projections {
        q: x.matmul(ws.w_q())?,
        k: x.matmul(ws.w_k())?,
        scale: ws.scale(),
    })
}

/// Softmax over all keys for one query row.
#[inline]
pub(crate) fn global_row(q: &[f64], keys: &Matrix, scale: f64, out: &mut [f64]) {
    for (o, key) in out.iter_mut().zip(keys.iter_rows()) {
        *o = dot(q, key) / scale;
    }
    softmax_in_place(out);
}

/// Row-stochastic `N × N` map.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseAttentionMap {
    values: Matrix,
}

impl DenseAttentionMap {
    /// Wrap an existing square matrix, checking row-stochasticity.
    pub fn from_matrix(values: Matrix) -> Result<Self> {
        if values.rows() != values.cols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} is not square",
                values.rows(),
                values.cols()
            )));
        }
        for (i, row) in values.iter_rows().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-6 || row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} is not stochastic (sum {s})"
                )));
            }
        }
        Ok(DenseAttentionMap { values })
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }
}

/// Global attention over all points: `softmax((X W_Q)(X W_K)ᵀ / √d)`.
pub fn global_map(cloud: &PointCloud, ws: &WeightSet) -> Result<DenseAttentionMap> {
    let p = project(cloud, ws)?;
    let n = cloud.len();
    let mut values = Matrix::zeros(n, n);
    for i in 0..n {
        global_row(p.q.row(i), &p.k, p.scale, values.row_mut(i));
    }
    Ok(DenseAttentionMap { values })
}

/// `N × k` local attention rows aligned with a [`NeighborTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRows {
    values: Matrix,
}

impl LocalRows {
    pub fn from_matrix(values: Matrix) -> Self {
        LocalRows { values }
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn row(&self, o: usize) -> &[f64] {
        self.values.row(o)
    }
}

/// Local attention: row `o` is the softmax over its neighbors of
/// `Q(x_o) · K(x_j − x_o) / √d`.
pub fn local_rows(cloud: &PointCloud, table: &NeighborTable, ws: &WeightSet) -> Result<LocalRows> {
    if table.n() != cloud.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} rows for {} points",
            table.n(),
            cloud.len()
        )));
    }
    if cloud.attended_dim() != ws.d_in() {
        return Err(Error::DimMismatch {
            expected: ws.d_in(),
            found: cloud.attended_dim(),
        });
    }
    let x = cloud.attended();
    let q = x.matmul(ws.w_q())?;
    let scale = ws.scale();
    let d = ws.d();
    let k = table.k();
    let mut values = Matrix::zeros(cloud.len(), k);
    let mut key = vec![0.0; d];
    for o in 0..cloud.len() {
        let center = x.row(o);
        let out = values.row_mut(o);
        for (slot, &j) in out.iter_mut().zip(table.row(o)) {
            key.iter_mut().for_each(|v| *v = 0.0);
            for (t, &c) in center.iter().enumerate() {
                let off = x.get(j, t) - c;
                if off == 0.0 {
                    continue;
                }
                for (kv, w) in key.iter_mut().zip(ws.w_k().row(t)) {
                    *kv += off * w;
                }
            }
            *slot = dot(q.row(o), &key) / scale;
        }
        softmax_in_place(out);
    }
    Ok(LocalRows { values })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SamVariant {
    /// Keep the selected cells of a dense softmax map.
    #[default]
    Carve,
    /// Place per-point local softmax rows into an empty map.
    Insert,
}

impl SamVariant {
    pub fn name(self) -> &'static str {
        match self {
            SamVariant::Carve => "carve",
            SamVariant::Insert => "insert",
        }
    }
}

impl fmt::Display for SamVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "carve" => Ok(SamVariant::Carve),
            "insert" => Ok(SamVariant::Insert),
            other => Err(Error::Config(format!("unknown SAM variant `{other}`"))),
        }
    }
}

/// Row-compressed `N × N` map with exactly `k` stored cells per row.
///
/// Row `o` stores its cells in neighbor-table order. `column_counts[o]` is
/// `n_o`, the number of rows that store a cell in column `o`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAttentionMap {
    n: usize,
    k: usize,
    cols: Vec<usize>,
    vals: Vec<f64>,
    column_counts: Vec<usize>,
    variant: SamVariant,
}

impl SparseAttentionMap {
    /// Build from a table and `N·k` row-major values aligned with it.
    pub fn from_table(
        table: &NeighborTable,
        values: Vec<f64>,
        variant: SamVariant,
    ) -> Result<Self> {
        let (n, k) = (table.n(), table.k());
        if values.len() != n * k {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {n}x{k} table",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::ShapeMismatch(
                "attention values must be finite and non-negative".into(),
            ));
        }
        let mut cols = Vec::with_capacity(n * k);
        let mut column_counts = vec![0usize; n];
        for row in table.rows() {
            for &j in row {
                cols.push(j);
                column_counts[j] += 1;
            }
        }
        Ok(SparseAttentionMap {
            n,
            k,
            cols,
            vals: values,
            column_counts,
            variant,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variant(&self) -> SamVariant {
        self.variant
    }

    pub fn row_cols(&self, o: usize) -> &[usize] {
        &self.cols[o * self.k..(o + 1) * self.k]
    }

    pub fn row_values(&self, o: usize) -> &[f64] {
        &self.vals[o * self.k..(o + 1) * self.k]
    }

    pub fn column_counts(&self) -> &[usize] {
        &self.column_counts
    }

    /// `(row, col, value)` for every stored cell, rows in order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .zip(&self.vals)
            .enumerate()
            .map(move |(e, (&c, &v))| (e / self.k, c, v))
    }

    pub fn row_sum(&self, o: usize) -> f64 {
        self.row_values(o).iter().sum()
    }

    /// Column sums accumulated row by row, left to right.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            sums[*c] += v;
        }
        sums
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (r, c, v) in self.entries() {
            m.set(r, c, v);
        }
        m
    }
}

/// Keep exactly the dense cells selected by the neighbor table.
pub fn carve_sam(dense: &DenseAttentionMap, table: &NeighborTable) -> Result<SparseAttentionMap> {
    if dense.n() != table.n() {
        return Err(Error::ShapeMismatch(format!(
            "dense map is {0}x{0}, table has {1} rows",
            dense.n(),
            table.n()
        )));
    }
    let mut values = Vec::with_capacity(table.n() * table.k());
    for (o, row) in table.rows().enumerate() {
        values.extend(row.iter().map(|&j| dense.get(o, j)));
    }
    SparseAttentionMap::from_table(table, values, SamVariant::Carve)
}

/// Carve-based map computed row by row without materializing the dense
/// `N × N` matrix. Produces exactly `carve_sam(&global_map(..), table)`.
pub fn carve_global(
    cloud: &PointCloud,
    table: &NeighborTable,
    ws: &WeightSet,
) -> Result<SparseAttentionMap> {
    if table.n() != cloud.len() {
        return Err(Error::ShapeMismatch(format!(
            "table has {} rows for {} points",
            table.n(),
            cloud.len()
        )));
    }
    let p = project(cloud, ws)?;
    let n = cloud.len();
    let mut row = vec![0.0; n];
    let mut values = Vec::with_capacity(n * table.k());
    for o in 0..n {
        global_row(p.q.row(o), &p.k, p.scale, &mut row);
        values.extend(table.row(o).iter().map(|&j| row[j]));
    }
    SparseAttentionMap::from_table(table, values, SamVariant::Carve)
}

/// Place local rows at their neighbor columns of an all-zero map.
pub fn insert_sam(local: &LocalRows, table: &NeighborTable) -> Result<SparseAttentionMap> {
    let m = local.values();
    if m.rows() != table.n() || m.cols() != table.k() {
        return Err(Error::ShapeMismatch(format!(
            "local rows are {}x{}, table is {}x{}",
            m.rows(),
            m.cols(),
            table.n(),
            table.k()
        )));
    }
    SparseAttentionMap::from_table(table, m.as_slice().to_vec(), SamVariant::Insert)
}
