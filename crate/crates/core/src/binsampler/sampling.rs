//! Top-M and prior-based selection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::bin_rng;
use crate::sample::{Policy, SampleResult};

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau))
    }
}

/// `softmax(a / τ)` over the given scores.
pub fn prior_probabilities(scores: &[f64], tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|a| ((a - max) / tau).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Draw `kappa` distinct members without replacement, one at a time, each
/// draw proportional to `exp(a/τ)` over the members still available.
/// `scores` is aligned with `members`. Drawing every member returns the
/// bin in member order.
pub fn in_bin_sample<R: Rng + ?Sized>(
    members: &[usize],
    scores: &[f64],
    kappa: usize,
    tau: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_tau(tau)?;
    if members.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: members.len(),
            right: scores.len(),
        });
    }
    if kappa > members.len() {
        return Err(Error::InvalidM {
            m: kappa,
            n: members.len(),
        });
    }
    if kappa == members.len() {
        return Ok(members.to_vec());
    }
    let mut pool: Vec<(usize, f64)> = members
        .iter()
        .zip(scores)
        .map(|(&i, &a)| (i, a / tau))
        .collect();
    let mut weights = Vec::with_capacity(pool.len());
    let mut picked = Vec::with_capacity(kappa);
    for _ in 0..kappa {
        let max = pool.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        weights.clear();
        weights.extend(pool.iter().map(|p| (p.1 - max).exp()));
        let total: f64 = weights.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (slot, &w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                chosen = Some(slot);
                break;
            }
        }
        // rounding can leave u == acc; fall back to the last positive weight
        let slot = chosen.unwrap_or_else(|| {
            weights
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("max has weight 1")
        });
        picked.push(pool.remove(slot).0);
    }
    Ok(picked)
}

/// The `m` highest scores, ties to the smaller index, in rank order.
pub fn sample_top_m(scores: &[f64], m: usize) -> Result<SampleResult> {
    let n = scores.len();
    if m < 1 || m > n {
        return Err(Error::InvalidM { m, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m);
    let picked = order.iter().map(|&i| scores[i]).collect();
    Ok(SampleResult::new(
        n,
        order,
        picked,
        vec![0; m],
        0,
        Policy::TopM,
    ))
}

/// Prior-based sampling over the whole cloud as one bin (stream of bin 0).
pub fn sample_prior(scores: &[f64], m: usize, tau: f64, seed: u64) -> Result<SampleResult> {
    let n = scores.len();
    if m < 1 || m > n {
        return Err(Error::InvalidM { m, n });
    }
    let members: Vec<usize> = (0..n).collect();
    let indices = in_bin_sample(&members, scores, m, tau, &mut bin_rng(seed, 0))?;
    let picked = indices.iter().map(|&i| scores[i]).collect();
    Ok(SampleResult::new(
        n,
        indices,
        picked,
        vec![0; m],
        seed,
        Policy::Prior,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    #[test]
    fn prior_examples() {
        assert_eq!(
            prior_probabilities(&[0.0, 0.0], 1.0).unwrap(),
            vec![0.5, 0.5]
        );
        let p = prior_probabilities(&[0.1, 0.0], 0.1).unwrap();
        assert!((p[0] - 0.7311).abs() < 1e-4 && (p[1] - 0.2689).abs() < 1e-4);
        assert!(matches!(
            prior_probabilities(&[0.0], 0.0),
            Err(Error::InvalidTau(_))
        ));
        assert!(matches!(
            prior_probabilities(&[0.0], f64::NAN),
            Err(Error::InvalidTau(_))
        ));
    }

    #[test]
    fn full_bin_returned_verbatim() {
        let got = in_bin_sample(&[4, 9, 2], &[5.0, -3.0, 0.0], 3, 0.1, &mut rng_from(0)).unwrap();
        assert_eq!(got, vec![4, 9, 2]);
        assert!(in_bin_sample(&[4], &[5.0], 2, 0.1, &mut rng_from(0)).is_err());
    }

    #[test]
    fn draws_are_distinct_and_reproducible() {
        let members: Vec<usize> = (10..30).collect();
        let scores: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = in_bin_sample(&members, &scores, 12, 0.5, &mut rng_from(3)).unwrap();
        let b = in_bin_sample(&members, &scores, 12, 0.5, &mut rng_from(3)).unwrap();
        assert_eq!(a, b);
        let mut s = a.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 12);
    }

    #[test]
    fn top_m_examples() {
        assert_eq!(
            sample_top_m(&[0.28, 1.82, -0.60], 2).unwrap().indices,
            vec![1, 0]
        );
        assert_eq!(
            sample_top_m(&[0.28, 1.82, -0.60], 3)
                .unwrap()
                .sorted_indices(),
            vec![0, 1, 2]
        );
        assert_eq!(
            sample_top_m(&[1.0, 0.0, 1.0, 1.0], 2).unwrap().indices,
            vec![0, 2]
        );
        assert!(sample_top_m(&[1.0], 2).is_err());
    }

    #[test]
    fn prior_is_seeded() {
        let s: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
        assert_eq!(
            sample_prior(&s, 5, 0.1, 8).unwrap(),
            sample_prior(&s, 5, 0.1, 8).unwrap()
        );
        assert!(sample_prior(&s, 0, 0.1, 8).is_err());
        assert!(sample_prior(&s, 2, -1.0, 8).is_err());
    }
}
