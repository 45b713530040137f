//! Compare every sampling policy on the synthetic shapes.

use samble::harness::{gen_shape, run_bench, SamplerSpec, ShapeKind, ShapeParams};

fn main() -> samble::Result<()> {
    let shapes = [
        ShapeKind::Grid2d,
        ShapeKind::Circle,
        ShapeKind::CubeShell,
        ShapeKind::LBracket,
    ]
    .into_iter()
    .map(|k| gen_shape(k, ShapeParams::sized(k.default_size()), 0))
    .collect::<samble::Result<Vec<_>>>()?;
    let report = run_bench(&shapes, &SamplerSpec::standard_set(), &[16, 32], 0)?;
    print!("{}", report.to_table(true));
    Ok(())
}
