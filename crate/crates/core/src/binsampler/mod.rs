//! Bin-based sampling: boundaries, token weights, allocation and draws,
//! plus the top-M and prior-based policies.

mod allocate;
mod boundaries;
mod pipeline;
mod sampling;
mod weights;

pub use allocate::{allocate, sampling_ratios, Allocation, ALLOCATION_EPSILON};
pub use boundaries::{batch_boundaries, momentum_update, partition, BoundaryState, Partition};
pub use pipeline::{
    run_policy, samble_sample, sample_bins, score_cloud, BinModel, BoundaryMode, PolicyOutput,
    SambleConfig, SambleOutput, ScoredCloud,
};
pub use sampling::{in_bin_sample, prior_probabilities, sample_prior, sample_top_m};
pub use weights::{bin_weights, Pooling};
