//! End-to-end sampling: neighbors → sparse attention → scores → bins →
//! token weights → allocation → in-bin draws.

use std::io::Write;

use super::allocate::{allocate, sampling_ratios, Allocation};
use super::boundaries::{batch_boundaries, partition, BoundaryState, Partition};
use super::sampling::{check_tau, in_bin_sample, sample_prior, sample_top_m};
use super::weights::{bin_weights, Pooling};
use crate::attention::{
    carve_global, global_map, insert_sam, local_rows, token_block, SamVariant, SparseAttentionMap,
    WeightSet,
};
use crate::error::{Error, Result};
use crate::geometry::{
    knn_with, sample_fps, sample_random, sample_voxel, sample_voxel_target, FpsStart,
    NeighborSearch, NeighborTable, PointCloud,
};
use crate::rng::bin_rng;
use crate::sample::{Policy, SampleResult};
use crate::scoring::{score, IndexingMode, ScoreVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SambleConfig {
    pub mode: IndexingMode,
    pub k: usize,
    pub n_b: usize,
    pub gamma: f64,
    pub tau: f64,
    pub variant: SamVariant,
    pub policy: Policy,
    pub seed: u64,
    pub search: NeighborSearch,
    pub pooling: Pooling,
    /// Fixed voxel edge for the voxel policy; searched when absent.
    pub voxel_cell: Option<f64>,
}

impl Default for SambleConfig {
    fn default() -> Self {
        SambleConfig::classification()
    }
}

impl SambleConfig {
    /// Six bins, γ = 0.99, τ = 0.1, mode vii on a carve-based map, k = 32.
    pub fn classification() -> Self {
        SambleConfig {
            mode: IndexingMode::SparseColumnSquareDivided,
            k: 32,
            n_b: 6,
            gamma: 0.99,
            tau: 0.1,
            variant: SamVariant::Carve,
            policy: Policy::Bin,
            seed: 0,
            search: NeighborSearch::Exhaustive,
            pooling: Pooling::MeanThenRelu,
            voxel_cell: None,
        }
    }

    /// As [`classification`](Self::classification) with four bins.
    pub fn segmentation() -> Self {
        SambleConfig {
            n_b: 4,
            ..SambleConfig::classification()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.n_b == 0 {
            return Err(Error::Config("n_b must be at least 1".into()));
        }
        super::boundaries::check_gamma(self.gamma)?;
        check_tau(self.tau)?;
        if !self.mode.needs_dense() && !self.mode.supports(self.variant) {
            return Err(Error::IncompatibleMode {
                mode: self.mode.roman(),
                map: "insert-based sparse",
            });
        }
        Ok(())
    }
}

/// Per-shape bin statistics behind a bin-based sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BinModel {
    pub n_b: usize,
    pub gamma: f64,
    pub boundaries: Vec<f64>,
    pub counts: Vec<usize>,
    pub weights: Vec<f64>,
    pub allocations: Vec<usize>,
    pub ratios: Vec<f64>,
    pub passes: usize,
}

impl BinModel {
    /// `bin beta kappa ratio omega` rows under a `#` header.
    pub fn write_histogram<W: Write>(&self, out: &mut W, shape_id: &str) -> std::io::Result<()> {
        writeln!(
            out,
            "# shape {} n_b {} gamma {}",
            if shape_id.is_empty() { "-" } else { shape_id },
            self.n_b,
            self.gamma
        )?;
        writeln!(out, "# bin beta kappa ratio omega")?;
        for j in 0..self.n_b {
            writeln!(
                out,
                "{j} {} {} {} {}",
                self.counts[j], self.allocations[j], self.ratios[j], self.weights[j]
            )?;
        }
        Ok(())
    }
}

/// How boundaries are obtained for a shape.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryMode<'a> {
    /// Use a calibrated state as is.
    Frozen(&'a BoundaryState),
    /// Fold this shape's quantiles into the state (or start one).
    Adaptive(Option<&'a BoundaryState>),
}

/// Scores and the intermediate structures that produced them.
#[derive(Debug, Clone)]
pub struct ScoredCloud {
    pub table: NeighborTable,
    /// Absent for the dense-only modes i and ii.
    pub sparse: Option<SparseAttentionMap>,
    pub scores: ScoreVector,
}

pub fn score_cloud(
    cloud: &PointCloud,
    ws: &WeightSet,
    config: &SambleConfig,
) -> Result<ScoredCloud> {
    config.validate()?;
    let table = knn_with(cloud, config.k, config.search)?;
    if config.mode.needs_dense() {
        let dense = global_map(cloud, ws)?;
        let scores = score(&dense, config.mode)?;
        return Ok(ScoredCloud {
            table,
            sparse: None,
            scores,
        });
    }
    let sparse = match config.variant {
        SamVariant::Carve => carve_global(cloud, &table, ws)?,
        SamVariant::Insert => insert_sam(&local_rows(cloud, &table, ws)?, &table)?,
    };
    let scores = score(&sparse, config.mode)?;
    Ok(ScoredCloud {
        table,
        sparse: Some(sparse),
        scores,
    })
}

/// Allocation plus per-bin prior draws given fixed bins and weights.
/// Bin `j` draws from stream `(seed, j)`; output lists bin 0 first.
pub fn sample_bins(
    scores: &[f64],
    part: &Partition,
    weights: &[f64],
    m: usize,
    tau: f64,
    seed: u64,
) -> Result<(SampleResult, Allocation)> {
    let n = scores.len();
    if part.bins.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: part.bins.len(),
        });
    }
    if m < 1 || m > n {
        return Err(Error::InvalidM { m, n });
    }
    let alloc = allocate(m, weights, &part.counts)?;
    let mut indices = Vec::with_capacity(m);
    let mut picked_scores = Vec::with_capacity(m);
    let mut bins = Vec::with_capacity(m);
    for (j, &kappa) in alloc.kappa.iter().enumerate() {
        if kappa == 0 {
            continue;
        }
        let members = part.members(j);
        let member_scores: Vec<f64> = members.iter().map(|&i| scores[i]).collect();
        let drawn = in_bin_sample(&members, &member_scores, kappa, tau, &mut bin_rng(seed, j))?;
        for i in drawn {
            indices.push(i);
            picked_scores.push(scores[i]);
            bins.push(j);
        }
    }
    Ok((
        SampleResult::new(n, indices, picked_scores, bins, seed, Policy::Bin),
        alloc,
    ))
}

#[derive(Debug, Clone)]
pub struct SambleOutput {
    pub result: SampleResult,
    pub model: BinModel,
    pub scores: ScoreVector,
    /// Boundary state after this shape (unchanged in frozen mode).
    pub state: BoundaryState,
}

/// Bin-based sampling of `m` points.
pub fn samble_sample(
    cloud: &PointCloud,
    ws: &WeightSet,
    config: &SambleConfig,
    boundaries: BoundaryMode<'_>,
    m: usize,
) -> Result<SambleOutput> {
    config.validate()?;
    let n = cloud.len();
    if m < 1 || m > n {
        return Err(Error::InvalidM { m, n });
    }
    if ws.n_b() != config.n_b {
        return Err(Error::Config(format!(
            "weights carry {} bin tokens but config asks for {} bins",
            ws.n_b(),
            config.n_b
        )));
    }
    let scored = score_cloud(cloud, ws, config)?;
    let normalized = &scored.scores.normalized;

    let state = match boundaries {
        BoundaryMode::Frozen(st) => {
            if st.n_b != config.n_b || !st.is_calibrated() {
                return Err(Error::Config(format!(
                    "frozen state has n_b {} and {} steps; config needs n_b {}",
                    st.n_b, st.steps, config.n_b
                )));
            }
            st.clone()
        }
        BoundaryMode::Adaptive(prev) => {
            let mut st = match prev {
                Some(p) if p.n_b == config.n_b => p.clone(),
                Some(p) => {
                    return Err(Error::Config(format!(
                        "state has n_b {}, config needs {}",
                        p.n_b, config.n_b
                    )))
                }
                None => BoundaryState::new(config.n_b, config.gamma)?,
            };
            st.observe(&batch_boundaries(&[normalized], config.n_b)?)?;
            st
        }
    };

    let part = partition(normalized, &state.boundaries)?;
    let tokens = token_block(cloud, ws)?;
    let weights = bin_weights(&tokens, &part, config.pooling)?;
    let (result, alloc) = sample_bins(normalized, &part, &weights, m, config.tau, config.seed)?;
    let model = BinModel {
        n_b: config.n_b,
        gamma: state.gamma,
        boundaries: state.boundaries.clone(),
        ratios: sampling_ratios(&alloc.kappa, &part.counts),
        counts: part.counts,
        weights,
        allocations: alloc.kappa,
        passes: alloc.passes,
    };
    Ok(SambleOutput {
        result,
        model,
        scores: scored.scores,
        state,
    })
}

/// Result of [`run_policy`]; score-free baselines carry no scores or bins.
#[derive(Debug, Clone)]
pub struct PolicyOutput {
    pub result: SampleResult,
    pub scores: Option<ScoreVector>,
    pub model: Option<BinModel>,
    pub state: Option<BoundaryState>,
}

/// Dispatch on `config.policy`.
pub fn run_policy(
    cloud: &PointCloud,
    ws: &WeightSet,
    config: &SambleConfig,
    boundaries: BoundaryMode<'_>,
    m: usize,
) -> Result<PolicyOutput> {
    let plain = |result| PolicyOutput {
        result,
        scores: None,
        model: None,
        state: None,
    };
    match config.policy {
        Policy::Random => Ok(plain(sample_random(cloud, m, config.seed)?)),
        Policy::Fps => {
            let mut r = sample_fps(cloud, m, FpsStart::Index(0))?;
            r.seed = config.seed;
            Ok(plain(r))
        }
        Policy::Voxel => Ok(plain(match config.voxel_cell {
            Some(cell) => sample_voxel(cloud, cell, m, config.seed)?,
            None => sample_voxel_target(cloud, m, config.seed)?,
        })),
        Policy::TopM | Policy::Prior => {
            let scored = score_cloud(cloud, ws, config)?;
            let mut result = if config.policy == Policy::TopM {
                sample_top_m(&scored.scores.normalized, m)?
            } else {
                sample_prior(&scored.scores.normalized, m, config.tau, config.seed)?
            };
            result.seed = config.seed;
            Ok(PolicyOutput {
                result,
                scores: Some(scored.scores),
                model: None,
                state: None,
            })
        }
        Policy::Bin => {
            let out = samble_sample(cloud, ws, config, boundaries, m)?;
            Ok(PolicyOutput {
                result: out.result,
                scores: Some(out.scores),
                model: Some(out.model),
                state: Some(out.state),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::init_weights;
    use crate::geometry::normalize_unit_sphere;
    use rand::{Rng, SeedableRng};

    fn cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| [rng.random(), rng.random(), rng.random::<f64>() * 0.2])
            .collect();
        normalize_unit_sphere(&PointCloud::new(pts).unwrap())
    }

    #[test]
    fn adaptive_single_shape_samples_m() {
        let c = cloud(200, 1);
        let cfg = SambleConfig {
            k: 16,
            ..SambleConfig::classification()
        };
        let ws = init_weights(3, 16, cfg.n_b, 5).unwrap();
        let out = samble_sample(&c, &ws, &cfg, BoundaryMode::Adaptive(None), 50).unwrap();
        assert_eq!(out.result.len(), 50);
        assert_eq!(out.model.allocations.iter().sum::<usize>(), 50);
        assert_eq!(out.model.counts.iter().sum::<usize>(), 200);
        assert_eq!(out.state.steps, 1);
        let mut s = out.result.sorted_indices();
        s.dedup();
        assert_eq!(s.len(), 50);
        for (b, &i) in out.result.bins.iter().zip(&out.result.indices) {
            let a = out.scores.normalized[i];
            let nu = &out.model.boundaries;
            assert!(*b == 0 || nu[*b - 1] > a);
            assert!(*b == nu.len() || a >= nu[*b]);
        }
    }

    #[test]
    fn frozen_state_is_checked() {
        let c = cloud(64, 2);
        let cfg = SambleConfig {
            k: 8,
            n_b: 4,
            ..SambleConfig::classification()
        };
        let ws = init_weights(3, 8, 4, 5).unwrap();
        let empty = BoundaryState::new(4, 0.99).unwrap();
        assert!(samble_sample(&c, &ws, &cfg, BoundaryMode::Frozen(&empty), 8).is_err());
        let wrong = init_weights(3, 8, 6, 5).unwrap();
        assert!(samble_sample(&c, &wrong, &cfg, BoundaryMode::Adaptive(None), 8).is_err());
        let mut st = BoundaryState::new(4, 0.99).unwrap();
        st.observe(&[1.0, 0.5, 0.0]).unwrap();
        let out = samble_sample(&c, &ws, &cfg, BoundaryMode::Frozen(&st), 8).unwrap();
        assert_eq!(out.state, st);
    }

    #[test]
    fn every_policy_runs() {
        let c = cloud(80, 3);
        let ws = init_weights(3, 8, 6, 5).unwrap();
        for policy in Policy::ALL {
            let cfg = SambleConfig {
                k: 8,
                policy,
                seed: 4,
                ..SambleConfig::classification()
            };
            let out = run_policy(&c, &ws, &cfg, BoundaryMode::Adaptive(None), 10).unwrap();
            assert_eq!(out.result.len(), 10, "{policy}");
            assert_eq!(out.result.policy, policy);
        }
    }

    #[test]
    fn dense_modes_and_insert_variant() {
        let c = cloud(40, 4);
        let ws = init_weights(3, 8, 6, 5).unwrap();
        for mode in [IndexingMode::RowStd, IndexingMode::ColumnSum] {
            let cfg = SambleConfig {
                k: 8,
                mode,
                ..SambleConfig::classification()
            };
            assert!(score_cloud(&c, &ws, &cfg).unwrap().sparse.is_none());
        }
        let cfg = SambleConfig {
            k: 8,
            variant: SamVariant::Insert,
            ..SambleConfig::classification()
        };
        assert!(samble_sample(&c, &ws, &cfg, BoundaryMode::Adaptive(None), 10).is_ok());
        let bad = SambleConfig {
            mode: IndexingMode::SparseRowSum,
            ..cfg
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::IncompatibleMode { .. })
        ));
    }
}
