//! Point-wise sampling scores from attention maps.
//!
//! Seven indexing modes reduce a map to one score per point. Modes `i` and
//! `ii` read a dense map; modes `iii`–`vii` read a sparse map, where `n_o`
//! (the number of stored cells in column `o`) enters modes `vi` and `vii`.

use std::fmt;
use std::str::FromStr;

use crate::attention::{DenseAttentionMap, SamVariant, SparseAttentionMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IndexingMode {
    /// (i) population std of dense row `o`.
    RowStd,
    /// (ii) dense column sum.
    ColumnSum,
    /// (iii) population std of the `k` stored values of row `o`.
    SparseRowStd,
    /// (iv) sparse row sum.
    SparseRowSum,
    /// (v) sparse column sum.
    SparseColumnSum,
    /// (vi) sparse column sum / `n_o`.
    SparseColumnAverage,
    /// (vii) sparse column sum / `n_o²`.
    #[default]
    SparseColumnSquareDivided,
}

impl IndexingMode {
    pub const ALL: [IndexingMode; 7] = [
        IndexingMode::RowStd,
        IndexingMode::ColumnSum,
        IndexingMode::SparseRowStd,
        IndexingMode::SparseRowSum,
        IndexingMode::SparseColumnSum,
        IndexingMode::SparseColumnAverage,
        IndexingMode::SparseColumnSquareDivided,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            IndexingMode::RowStd => "i",
            IndexingMode::ColumnSum => "ii",
            IndexingMode::SparseRowStd => "iii",
            IndexingMode::SparseRowSum => "iv",
            IndexingMode::SparseColumnSum => "v",
            IndexingMode::SparseColumnAverage => "vi",
            IndexingMode::SparseColumnSquareDivided => "vii",
        }
    }

    pub fn needs_dense(self) -> bool {
        matches!(self, IndexingMode::RowStd | IndexingMode::ColumnSum)
    }

    /// Whether the mode is meaningful on a map built with `variant`.
    /// Insert-based rows always sum to one, which rules out the row sum.
    pub fn supports(self, variant: SamVariant) -> bool {
        !self.needs_dense()
            && !(variant == SamVariant::Insert && self == IndexingMode::SparseRowSum)
    }
}

impl fmt::Display for IndexingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for IndexingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mode = match s.to_ascii_lowercase().as_str() {
            "i" | "1" => IndexingMode::RowStd,
            "ii" | "2" => IndexingMode::ColumnSum,
            "iii" | "3" => IndexingMode::SparseRowStd,
            "iv" | "4" => IndexingMode::SparseRowSum,
            "v" | "5" => IndexingMode::SparseColumnSum,
            "vi" | "6" => IndexingMode::SparseColumnAverage,
            "vii" | "7" => IndexingMode::SparseColumnSquareDivided,
            other => return Err(Error::Config(format!("unknown indexing mode `{other}`"))),
        };
        Ok(mode)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum AttentionMapRef<'a> {
    Dense(&'a DenseAttentionMap),
    Sparse(&'a SparseAttentionMap),
}

impl<'a> From<&'a DenseAttentionMap> for AttentionMapRef<'a> {
    fn from(m: &'a DenseAttentionMap) -> Self {
        AttentionMapRef::Dense(m)
    }
}

impl<'a> From<&'a SparseAttentionMap> for AttentionMapRef<'a> {
    fn from(m: &'a SparseAttentionMap) -> Self {
        AttentionMapRef::Sparse(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub mode: IndexingMode,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl ScoreVector {
    pub fn from_raw(mode: IndexingMode, raw: Vec<f64>) -> Self {
        let normalized = normalize(&raw);
        ScoreVector {
            mode,
            raw,
            normalized,
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Raw scores under `mode`, with the normalized copy filled in.
pub fn score<'a>(map: impl Into<AttentionMapRef<'a>>, mode: IndexingMode) -> Result<ScoreVector> {
    let raw = match map.into() {
        AttentionMapRef::Dense(d) => {
            let m = d.values();
            match mode {
                IndexingMode::RowStd => m.iter_rows().map(population_std).collect(),
                IndexingMode::ColumnSum => {
                    let mut sums = vec![0.0; d.n()];
                    for row in m.iter_rows() {
                        for (s, v) in sums.iter_mut().zip(row) {
                            *s += v;
                        }
                    }
                    sums
                }
                other => {
                    return Err(Error::IncompatibleMode {
                        mode: other.roman(),
                        map: "dense",
                    })
                }
            }
        }
        AttentionMapRef::Sparse(s) => {
            if !mode.supports(s.variant()) {
                return Err(Error::IncompatibleMode {
                    mode: mode.roman(),
                    map: if mode.needs_dense() {
                        "sparse"
                    } else {
                        "insert-based sparse"
                    },
                });
            }
            let counts = s.column_counts();
            // self-inclusion guarantees every column holds at least one cell
            debug_assert!(counts.iter().all(|&c| c > 0));
            match mode {
                IndexingMode::SparseRowStd => (0..s.n())
                    .map(|o| population_std(s.row_values(o)))
                    .collect(),
                IndexingMode::SparseRowSum => (0..s.n()).map(|o| s.row_sum(o)).collect(),
                IndexingMode::SparseColumnSum => s.column_sums(),
                IndexingMode::SparseColumnAverage => s
                    .column_sums()
                    .into_iter()
                    .zip(counts)
                    .map(|(v, &c)| v / c as f64)
                    .collect(),
                IndexingMode::SparseColumnSquareDivided => s
                    .column_sums()
                    .into_iter()
                    .zip(counts)
                    .map(|(v, &c)| v / (c * c) as f64)
                    .collect(),
                IndexingMode::RowStd | IndexingMode::ColumnSum => unreachable!("rejected above"),
            }
        }
    };
    Ok(ScoreVector::from_raw(mode, raw))
}

/// Z-score by mean and population std, shifted to mean 0.5. A constant
/// input maps to all 0.5.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let Some(&first) = raw.first() else {
        return Vec::new();
    };
    if raw.iter().all(|&v| v == first) {
        return vec![0.5; raw.len()];
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let std = (raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    raw.iter().map(|v| (v - mean) / std + 0.5).collect()
}
