//! Build carve-based and insert-based sparse attention maps for a random
//! cloud and compare their row sums and column counts.

use rand::{Rng, SeedableRng};
use samble::attention::{carve_global, init_weights, insert_sam, local_rows};
use samble::geometry::{knn, normalize_unit_sphere, PointCloud};

fn main() -> samble::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let points = (0..64)
        .map(|_| [rng.random(), rng.random(), rng.random()])
        .collect();
    let cloud = normalize_unit_sphere(&PointCloud::new(points)?);
    let ws = init_weights(3, 16, 1, 1)?;
    let table = knn(&cloud, 8)?;

    let carve = carve_global(&cloud, &table, &ws)?;
    let insert = insert_sam(&local_rows(&cloud, &table, &ws)?, &table)?;

    println!("point  carve-row-sum  insert-row-sum  n_o");
    for o in 0..8 {
        println!(
            "{o:>5}  {:>13.6}  {:>14.6}  {:>3}",
            carve.row_sum(o),
            insert.row_sum(o),
            carve.column_counts()[o]
        );
    }
    let total: usize = carve.column_counts().iter().sum();
    println!("sum of n_o = {total} = N*k = {}", cloud.len() * table.k());
    Ok(())
}
