//! Split a sample budget across bins from bin sizes and weights.

use samble::binsampler::{allocate, sampling_ratios};

fn main() -> samble::Result<()> {
    let cases: [(usize, &[f64], &[usize]); 4] = [
        (4, &[1.0, 0.0], &[3, 3]),
        (4, &[1.0, 1.0], &[4, 4]),
        (10, &[5.0, 0.1, 0.0, 2.0], &[3, 20, 20, 6]),
        (2, &[1.0, 1.0, 1.0], &[5, 5, 5]),
    ];
    for (m, weights, counts) in cases {
        let a = allocate(m, weights, counts)?;
        println!(
            "M={m:<3} weights={weights:?} sizes={counts:?} -> kappa={:?} in {} passes, ratios={:?}",
            a.kappa,
            a.passes,
            sampling_ratios(&a.kappa, counts)
        );
    }
    Ok(())
}
