//! Energies against the concatenated key set `[X; bin_tokens]`.
//!
//! Tokens join the keys only; queries stay the `N` points, so the
//! point-to-point block is always `N × N` and the point-to-token block
//! `N × n_b`.

use super::maps::{project, Projections};
use super::weights::WeightSet;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::matrix::{dot, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct TokenEnergyMatrix {
    /// Pre-softmax point-to-point energies.
    pub point_block: Matrix,
    /// Pre-softmax point-to-token energies, read by the bin weights.
    pub token_block: Matrix,
    /// Point-to-point part of the joint softmax over all `N + n_b` columns.
    pub post_softmax_point_block: Matrix,
    /// Point-to-token part of the same joint softmax.
    pub post_softmax_token_block: Matrix,
}

fn token_keys(ws: &WeightSet) -> Result<Matrix> {
    if ws.n_b() == 0 {
        return Err(Error::ShapeMismatch(
            "weight set carries no bin tokens".into(),
        ));
    }
    ws.bin_tokens().matmul(ws.w_k())
}

fn energies(q: &Matrix, keys: &Matrix, scale: f64) -> Matrix {
    let mut out = Matrix::zeros(q.rows(), keys.rows());
    for i in 0..q.rows() {
        let qi = q.row(i);
        for (o, key) in out.row_mut(i).iter_mut().zip(keys.iter_rows()) {
            *o = dot(qi, key) / scale;
        }
    }
    out
}

pub fn token_energies(cloud: &PointCloud, ws: &WeightSet) -> Result<TokenEnergyMatrix> {
    let tk = token_keys(ws)?;
    let Projections { q, k, scale } = project(cloud, ws)?;
    let point_block = energies(&q, &k, scale);
    let token_block = energies(&q, &tk, scale);

    let (n, n_b) = (cloud.len(), ws.n_b());
    let mut post_p = Matrix::zeros(n, n);
    let mut post_t = Matrix::zeros(n, n_b);
    for i in 0..n {
        let (pr, tr) = (point_block.row(i), token_block.row(i));
        let max = pr
            .iter()
            .chain(tr)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (o, &e) in post_p.row_mut(i).iter_mut().zip(pr) {
            *o = (e - max).exp();
            sum += *o;
        }
        for (o, &e) in post_t.row_mut(i).iter_mut().zip(tr) {
            *o = (e - max).exp();
            sum += *o;
        }
        post_p.row_mut(i).iter_mut().for_each(|v| *v /= sum);
        post_t.row_mut(i).iter_mut().for_each(|v| *v /= sum);
    }
    Ok(TokenEnergyMatrix {
        point_block,
        token_block,
        post_softmax_point_block: post_p,
        post_softmax_token_block: post_t,
    })
}

/// Only the `N × n_b` pre-softmax token block; equal to
/// `token_energies(..).token_block` without the `N × N` work.
pub fn token_block(cloud: &PointCloud, ws: &WeightSet) -> Result<Matrix> {
    let tk = token_keys(ws)?;
    if cloud.attended_dim() != ws.d_in() {
        return Err(Error::DimMismatch {
            expected: ws.d_in(),
            found: cloud.attended_dim(),
        });
    }
    let q = cloud.attended().matmul(ws.w_q())?;
    Ok(energies(&q, &tk, ws.scale()))
}
