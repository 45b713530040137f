//! Cross-sampler benchmark over synthetic shapes.

use std::fmt::Write as _;
use std::time::Instant;

use super::metrics::{metric_chamfer, metric_edge_recall, metric_uniformity};
use super::shapes::SyntheticShape;
use crate::attention::init_weights;
use crate::binsampler::{run_policy, BoundaryMode, SambleConfig};
use crate::error::Result;
use crate::geometry::normalize_unit_sphere;
use crate::sample::Policy;

/// Key dimension of the seeded weights used for learned policies.
pub const BENCH_KEY_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub name: String,
    pub config: SambleConfig,
}

impl SamplerSpec {
    pub fn new(name: impl Into<String>, config: SambleConfig) -> Self {
        SamplerSpec {
            name: name.into(),
            config,
        }
    }

    pub fn policy(policy: Policy) -> Self {
        SamplerSpec::new(
            policy.name(),
            SambleConfig {
                policy,
                ..SambleConfig::default()
            },
        )
    }

    /// One spec per policy with default settings.
    pub fn standard_set() -> Vec<SamplerSpec> {
        Policy::ALL
            .iter()
            .map(|&p| SamplerSpec::policy(p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub shape: String,
    pub sampler: String,
    pub m: usize,
    pub delivered: usize,
    pub uniformity: f64,
    pub chamfer: f64,
    pub edge_recall: f64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub seed: u64,
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    /// Whitespace-delimited table. Wall-clock times vary between runs, so
    /// they are only emitted when `timing` is set.
    pub fn to_table(&self, timing: bool) -> String {
        let mut s = String::new();
        writeln!(s, "# bench seed {} rows {}", self.seed, self.records.len()).unwrap();
        writeln!(
            s,
            "# geometric proxies stand in for downstream task accuracy: uniformity = CV of nearest-sample distances (lower is more even), chamfer = mean cloud-to-sample distance, edge_recall = sampled share of ground-truth edges"
        )
        .unwrap();
        s.push_str("shape sampler M delivered uniformity chamfer edge_recall");
        s.push_str(if timing { " ms\n" } else { "\n" });
        for r in &self.records {
            write!(
                s,
                "{} {} {} {} {} {} {}",
                r.shape, r.sampler, r.m, r.delivered, r.uniformity, r.chamfer, r.edge_recall
            )
            .unwrap();
            if timing {
                write!(s, " {:.3}", r.millis).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// Evaluate every `(shape, sampler, M)` combination in that order. Each
/// shape gets its own seed stream derived from `seed` and the shape id.
pub fn run_bench(
    shapes: &[SyntheticShape],
    samplers: &[SamplerSpec],
    ms: &[usize],
    seed: u64,
) -> Result<BenchReport> {
    let mut records = Vec::with_capacity(shapes.len() * samplers.len() * ms.len());
    for shape in shapes {
        let id = shape.id();
        let shape_seed = crate::rng::shape_seed(seed, &id);
        let cloud = normalize_unit_sphere(&shape.cloud);
        for spec in samplers {
            let cfg = SambleConfig {
                k: spec.config.k.min(cloud.len()),
                seed: shape_seed,
                ..spec.config.clone()
            };
            let ws = init_weights(cloud.attended_dim(), BENCH_KEY_DIM, cfg.n_b, shape_seed)?;
            for &m in ms {
                let start = Instant::now();
                let out = run_policy(&cloud, &ws, &cfg, BoundaryMode::Adaptive(None), m)?;
                let millis = start.elapsed().as_secs_f64() * 1e3;
                let r = &out.result;
                records.push(BenchRecord {
                    shape: id.clone(),
                    sampler: spec.name.clone(),
                    m,
                    delivered: r.len(),
                    uniformity: if r.len() >= 2 {
                        metric_uniformity(r, &cloud)?
                    } else {
                        0.0
                    },
                    chamfer: metric_chamfer(r, &cloud)?,
                    edge_recall: metric_edge_recall(r, &shape.edge_mask)?,
                    millis,
                });
            }
        }
    }
    Ok(BenchReport { seed, records })
}
