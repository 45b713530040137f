//! Score the same cloud under all seven indexing modes.

use samble::attention::{carve_global, global_map, init_weights};
use samble::geometry::{knn, normalize_unit_sphere};
use samble::harness::{gen_shape, ShapeKind, ShapeParams};
use samble::scoring::{score, IndexingMode};

fn main() -> samble::Result<()> {
    let shape = gen_shape(ShapeKind::LBracket, ShapeParams::sized(12), 0)?;
    let cloud = normalize_unit_sphere(&shape.cloud);
    let ws = init_weights(3, 16, 1, 3)?;
    let dense = global_map(&cloud, &ws)?;
    let sparse = carve_global(&cloud, &knn(&cloud, 8)?, &ws)?;

    println!("mode  top-5 points              edge share of top-20");
    for mode in IndexingMode::ALL {
        let s = if mode.needs_dense() {
            score(&dense, mode)?
        } else {
            score(&sparse, mode)?
        };
        let mut order: Vec<usize> = (0..cloud.len()).collect();
        order.sort_by(|&a, &b| s.normalized[b].total_cmp(&s.normalized[a]));
        let edges = order[..20].iter().filter(|&&i| shape.edge_mask[i]).count();
        println!(
            "{:>4}  {:<24}  {:.2}",
            mode.roman(),
            format!("{:?}", &order[..5]),
            edges as f64 / 20.0
        );
    }
    Ok(())
}
