//! Full bin-based sampling of a cloud file (or a generated shape) with the
//! classification defaults, written as a sample file plus histogram.
//!
//! ```text
//! cargo run --release --example samble_pipeline -- cloud.xyz 512
//! ```

use std::io::Write;

use samble::attention::init_weights;
use samble::binsampler::{samble_sample, BoundaryMode, SambleConfig};
use samble::geometry::{load_pointcloud, normalize_unit_sphere, CloudFormat};
use samble::harness::{gen_shape, metric_uniformity, ShapeKind, ShapeParams};

fn main() -> samble::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let raw = match args.first() {
        Some(path) => load_pointcloud(path, CloudFormat::from_path(path.as_ref()))?,
        None => gen_shape(ShapeKind::CubeShell, ShapeParams::sized(20), 0)?.cloud,
    };
    let m = args
        .get(1)
        .map_or(raw.len() / 4, |s| s.parse().expect("integer M"));

    let cloud = normalize_unit_sphere(&raw);
    let config = SambleConfig {
        seed: 7,
        ..SambleConfig::classification()
    };
    let ws = init_weights(cloud.attended_dim(), 16, config.n_b, config.seed)?;
    let start = std::time::Instant::now();
    let out = samble_sample(&cloud, &ws, &config, BoundaryMode::Adaptive(None), m)?;
    let elapsed = start.elapsed();

    let mut stdout = std::io::stdout().lock();
    out.model
        .write_histogram(&mut stdout, cloud.id())
        .expect("stdout");
    writeln!(
        stdout,
        "# {} of {} points in {:.1} ms, uniformity CV {:.3}",
        out.result.len(),
        cloud.len(),
        elapsed.as_secs_f64() * 1e3,
        metric_uniformity(&out.result, &cloud)?
    )
    .expect("stdout");
    Ok(())
}
