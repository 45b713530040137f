use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::boundaries::Partition;

/// Order of masked mean-pooling and the ReLU clamp.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Pooling {
    /// `ReLU(mean(...))`, the sampler's order.
    #[default]
    MeanThenRelu,
    /// `mean(ReLU(...))`, kept for comparison.
    ReluThenMean,
}

/// Per-bin sampling weight from the pre-softmax point-to-token energies:
/// the mean of `token_block[i, j]` over the points of bin `j`, clamped at
/// zero. Empty bins get weight 0.
pub fn bin_weights(
    token_block: &Matrix,
    partition: &Partition,
    pooling: Pooling,
) -> Result<Vec<f64>> {
    let n_b = partition.n_b();
    if token_block.rows() != partition.bins.len() || token_block.cols() != n_b {
        return Err(Error::ShapeMismatch(format!(
            "token block is {}x{}, partition has {} points in {n_b} bins",
            token_block.rows(),
            token_block.cols(),
            partition.bins.len()
        )));
    }
    let mut sums = vec![0.0; n_b];
    for (i, &j) in partition.bins.iter().enumerate() {
        let e = token_block.get(i, j);
        sums[j] += match pooling {
            Pooling::MeanThenRelu => e,
            Pooling::ReluThenMean => e.max(0.0),
        };
    }
    Ok(sums
        .into_iter()
        .zip(&partition.counts)
        .map(|(s, &beta)| {
            if beta == 0 {
                0.0
            } else {
                (s / beta as f64).max(0.0)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Matrix, Partition) {
        // p0 in bin 1, p1 and p2 in bin 0
        let tb = Matrix::from_rows(&[vec![9.0, 0.3], vec![0.2, 5.0], vec![-0.4, 5.0]]).unwrap();
        let part = Partition {
            bins: vec![1, 0, 0],
            counts: vec![2, 1],
        };
        (tb, part)
    }

    #[test]
    fn masked_mean_then_relu() {
        let (tb, part) = fixture();
        let w = bin_weights(&tb, &part, Pooling::MeanThenRelu).unwrap();
        assert_eq!(w[0], 0.0);
        assert!((w[1] - 0.3).abs() < 1e-15);
        let w = bin_weights(&tb, &part, Pooling::ReluThenMean).unwrap();
        assert!((w[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn empty_bin_and_shape_checks() {
        let tb = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let part = Partition {
            bins: vec![1, 1],
            counts: vec![0, 2],
        };
        assert_eq!(
            bin_weights(&tb, &part, Pooling::default()).unwrap(),
            vec![0.0, 3.0]
        );
        let bad = Matrix::zeros(2, 3);
        assert!(bin_weights(&bad, &part, Pooling::default()).is_err());
    }
}
