//! Evaluation plumbing: synthetic shapes, metrics, benchmarks and config.

mod bench;
mod config;
mod metrics;
mod shapes;

pub use bench::{run_bench, BenchRecord, BenchReport, SamplerSpec, BENCH_KEY_DIM};
pub use config::{config_to_text, load_config, parse_config, parse_config_onto};
pub use metrics::{metric_chamfer, metric_edge_recall, metric_uniformity};
pub use shapes::{gen_shape, gen_shape_named, ShapeKind, ShapeParams, SyntheticShape};
