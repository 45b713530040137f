//! How often each point of a planar grid is picked as someone's neighbor.
//!
//! Corners are chosen least, boundary points more, interior points most.
//!
//! ```text
//! cargo run --example knn_frequency -- 10 5
//! ```

use samble::geometry::{knn, neighbor_frequency};
use samble::harness::{gen_shape, ShapeKind, ShapeParams};

fn main() -> samble::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let size = args.next().unwrap_or(10);
    let k = args.next().unwrap_or(5);

    let shape = gen_shape(ShapeKind::Grid2d, ShapeParams::sized(size), 0)?;
    let counts = neighbor_frequency(&knn(&shape.cloud, k)?);

    println!("{size}x{size} grid, k = {k}");
    for row in (0..size).rev() {
        let line: Vec<String> = (0..size)
            .map(|col| format!("{:>3}", counts[row * size + col]))
            .collect();
        println!("{}", line.join(""));
    }
    Ok(())
}
