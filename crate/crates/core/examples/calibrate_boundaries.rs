//! Learn bin boundaries with momentum over batches of shapes, then sample a
//! held-out shape with the boundaries frozen.

use samble::attention::init_weights;
use samble::binsampler::{samble_sample, score_cloud, BoundaryMode, BoundaryState, SambleConfig};
use samble::geometry::normalize_unit_sphere;
use samble::harness::{gen_shape, ShapeKind, ShapeParams};

fn main() -> samble::Result<()> {
    let config = SambleConfig {
        k: 16,
        ..SambleConfig::segmentation()
    };
    let ws = init_weights(3, 16, config.n_b, 0)?;
    let mut state = BoundaryState::new(config.n_b, config.gamma)?;

    for step in 0..50u64 {
        let batch: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                let p = ShapeParams {
                    size: 8,
                    jitter: 0.02,
                };
                let cloud =
                    normalize_unit_sphere(&gen_shape(ShapeKind::CubeShell, p, step * 4 + i)?.cloud);
                Ok(score_cloud(&cloud, &ws, &config)?.scores.normalized)
            })
            .collect::<samble::Result<_>>()?;
        state.observe_batch(&batch)?;
        if step % 10 == 9 {
            println!("step {:>2}: nu = {:.3?}", state.steps, state.boundaries);
        }
    }

    let held_out = gen_shape(
        ShapeKind::CubeShell,
        ShapeParams {
            size: 8,
            jitter: 0.02,
        },
        999,
    )?;
    let cloud = normalize_unit_sphere(&held_out.cloud);
    let out = samble_sample(&cloud, &ws, &config, BoundaryMode::Frozen(&state), 64)?;
    out.model
        .write_histogram(&mut std::io::stdout().lock(), &held_out.id())
        .expect("stdout");
    Ok(())
}
