//! Integer per-bin sample counts from bin sizes and weights.
//!
//! Each pass scales the working weights `x_j = ω_j·β_j + ε` so their total
//! matches the remaining count and rounds. Bins that reach their size are
//! saturated: their weight drops to zero and the excess flows to the other
//! bins on the next pass. Two repairs make the total exact:
//!
//! * a pass that ends short without saturating a new bin hands the
//!   remaining units out one at a time, largest `x_j` first;
//! * rounding overshoot is taken back one unit at a time from the bin whose
//!   count most exceeds its accumulated unrounded share.

use crate::error::{Error, Result};

pub const ALLOCATION_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub kappa: Vec<usize>,
    /// Passes of the scaling loop.
    pub passes: usize,
}

pub fn allocate(m: usize, weights: &[f64], counts: &[usize]) -> Result<Allocation> {
    if weights.len() != counts.len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: counts.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Config(format!(
            "bin weights must be finite and non-negative, got {w}"
        )));
    }
    let available: usize = counts.iter().sum();
    if m > available {
        return Err(Error::Infeasible { m, available });
    }
    if m == 0 {
        return Err(Error::InvalidM { m, n: available });
    }

    let n_b = counts.len();
    let mut x: Vec<f64> = weights
        .iter()
        .zip(counts)
        .map(|(w, &b)| w * b as f64 + ALLOCATION_EPSILON)
        .collect();
    let mut kappa = vec![0usize; n_b];
    let mut share = vec![0.0f64; n_b];
    let mut passes = 0;
    let mut remaining = m as i64;

    while remaining > 0 {
        passes += 1;
        let s = remaining as f64 / x.iter().sum::<f64>();
        let before: usize = kappa.iter().sum();
        let mut saturated_now = false;
        for j in 0..n_b {
            if x[j] == 0.0 {
                continue;
            }
            let inc = s * x[j];
            share[j] += inc;
            let k = (kappa[j] as f64 + inc).round();
            if k >= counts[j] as f64 {
                kappa[j] = counts[j];
                x[j] = 0.0;
                saturated_now = true;
            } else {
                kappa[j] = k as usize;
            }
        }
        let total: usize = kappa.iter().sum();
        remaining = m as i64 - total as i64;
        if remaining > 0 && (!saturated_now || total == before) {
            hand_out(&mut kappa, &x, counts, remaining as usize);
            remaining = 0;
        }
    }

    let mut total: usize = kappa.iter().sum();
    while total > m {
        let j = (0..n_b)
            .filter(|&j| kappa[j] > 0)
            .max_by(|&a, &b| {
                let ea = kappa[a] as f64 - share[a];
                let eb = kappa[b] as f64 - share[b];
                ea.total_cmp(&eb)
                    .then(kappa[a].cmp(&kappa[b]))
                    .then(b.cmp(&a))
            })
            .expect("total > m > 0");
        kappa[j] -= 1;
        total -= 1;
    }
    Ok(Allocation { kappa, passes })
}

fn hand_out(kappa: &mut [usize], x: &[f64], counts: &[usize], mut units: usize) {
    let mut order: Vec<usize> = (0..kappa.len()).filter(|&j| kappa[j] < counts[j]).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    while units > 0 {
        let mut progressed = false;
        for &j in &order {
            if units == 0 {
                break;
            }
            if kappa[j] < counts[j] {
                kappa[j] += 1;
                units -= 1;
                progressed = true;
            }
        }
        assert!(progressed, "feasibility checked by caller");
    }
}

/// `κ_j / β_j`, or 0 for empty bins.
pub fn sampling_ratios(kappa: &[usize], counts: &[usize]) -> Vec<f64> {
    kappa
        .iter()
        .zip(counts)
        .map(|(&k, &b)| if b == 0 { 0.0 } else { k as f64 / b as f64 })
        .collect()
}
