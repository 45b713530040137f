//! Point cloud downsampling driven by sparse attention maps.
//!
//! The pipeline builds a k-NN table, carves (or inserts) a sparse
//! attention map, reduces it to point-wise scores under one of seven
//! indexing modes, partitions points into score bins with momentum-learned
//! boundaries, weights each bin from bin-token energies, allocates the
//! sample budget across bins and finally draws points inside every bin
//! with a softmax prior.
//!
//! ```
//! use samble::prelude::*;
//!
//! let shape = gen_shape(ShapeKind::Grid2d, ShapeParams::sized(10), 0).unwrap();
//! let cloud = normalize_unit_sphere(&shape.cloud);
//! let config = SambleConfig { k: 8, ..SambleConfig::classification() };
//! let weights = init_weights(3, 16, config.n_b, 7).unwrap();
//! let out = samble_sample(&cloud, &weights, &config, BoundaryMode::Adaptive(None), 25).unwrap();
//! assert_eq!(out.result.len(), 25);
//! assert_eq!(out.model.allocations.iter().sum::<usize>(), 25);
//! ```
//!
//! Coordinate-only baseline samplers live in [`geometry`]; the metrics
//! used to compare them against bin-based sampling live in [`harness`].

pub mod attention;
pub mod binsampler;
mod error;
pub mod geometry;
pub mod harness;
pub mod matrix;
pub mod rng;
mod sample;
pub mod scoring;

pub use error::{Error, Result};
pub use sample::{Policy, SampleResult};

pub mod prelude {
    pub use crate::attention::{
        carve_sam, global_map, init_weights, insert_sam, load_weights, local_rows, save_weights,
        token_energies, SamVariant, SparseAttentionMap, WeightSet,
    };
    pub use crate::binsampler::{
        allocate, batch_boundaries, bin_weights, momentum_update, partition, run_policy,
        samble_sample, sample_prior, sample_top_m, BoundaryMode, BoundaryState, Pooling,
        SambleConfig,
    };
    pub use crate::geometry::{
        knn, load_pointcloud, neighbor_frequency, normalize_unit_sphere, sample_fps, sample_random,
        sample_voxel, CloudFormat, FpsStart, PointCloud,
    };
    pub use crate::harness::{
        gen_shape, metric_chamfer, metric_edge_recall, metric_uniformity, run_bench, SamplerSpec,
        ShapeKind, ShapeParams,
    };
    pub use crate::scoring::{normalize, score, IndexingMode, ScoreVector};
    pub use crate::{Error, Policy, Result, SampleResult};
}
