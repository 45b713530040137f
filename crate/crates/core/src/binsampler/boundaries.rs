//! Bin boundaries: pooled batch quantiles, momentum smoothing and
//! per-shape partitioning.
//!
//! Boundaries are stored highest first, so bin 0 holds the highest scores.
//! A vector always has `n_b − 1` entries; when neighbouring thresholds
//! coincide the bins between them are simply empty.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// `n_b − 1` cut points over the pooled scores of a batch, descending.
///
/// Sorting the `P` pooled values ascending, the cut at level `j / n_b`
/// sits midway between order statistics `c − 1` and `c` with
/// `c = ⌊j·P / n_b⌋`, so every bucket receives `⌊P/n_b⌋` or `⌈P/n_b⌉`
/// values when the scores are distinct.
pub fn batch_boundaries<S: AsRef<[f64]>>(batch: &[S], n_b: usize) -> Result<Vec<f64>> {
    if n_b == 0 {
        return Err(Error::Config("bin count must be at least 1".into()));
    }
    let mut pooled: Vec<f64> = batch
        .iter()
        .flat_map(|s| s.as_ref().iter().copied())
        .collect();
    if pooled.len() < n_b {
        return Err(Error::TooFewPoints {
            needed: n_b,
            found: pooled.len(),
        });
    }
    if pooled.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite score in batch".into()));
    }
    pooled.sort_unstable_by(f64::total_cmp);
    let p = pooled.len();
    Ok((1..n_b)
        .rev()
        .map(|j| {
            let c = j * p / n_b;
            0.5 * (pooled[c - 1] + pooled[c])
        })
        .collect())
}

/// `γ·prev + (1 − γ)·current`, elementwise.
pub fn momentum_update(prev: &[f64], current: &[f64], gamma: f64) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    if prev.len() != current.len() {
        return Err(Error::LengthMismatch {
            left: prev.len(),
            right: current.len(),
        });
    }
    Ok(prev
        .iter()
        .zip(current)
        .map(|(p, c)| gamma * p + (1.0 - gamma) * c)
        .collect())
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

/// Bin id per point and the per-bin counts `β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub bins: Vec<usize>,
    pub counts: Vec<usize>,
}

impl Partition {
    pub fn n_b(&self) -> usize {
        self.counts.len()
    }

    /// Members of bin `j` in ascending point order.
    pub fn members(&self, j: usize) -> Vec<usize> {
        self.bins
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == j).then_some(i))
            .collect()
    }
}

/// Assign each score to a bin: bin 0 iff `a ≥ ν_1`, bin `j` iff
/// `ν_j > a ≥ ν_{j+1}`, last bin iff `a < ν_{n_b−1}`. A score equal to a
/// boundary joins the higher-score bin.
pub fn partition(scores: &[f64], boundaries: &[f64]) -> Result<Partition> {
    if boundaries.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Config("boundaries must be non-increasing".into()));
    }
    let n_b = boundaries.len() + 1;
    let mut counts = vec![0usize; n_b];
    let bins = scores
        .iter()
        .map(|&a| {
            let j = boundaries.partition_point(|&nu| nu > a);
            counts[j] += 1;
            j
        })
        .collect();
    Ok(Partition { bins, counts })
}

/// Running boundary estimate and its momentum factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryState {
    pub n_b: usize,
    pub gamma: f64,
    pub steps: u64,
    pub boundaries: Vec<f64>,
}

impl BoundaryState {
    pub fn new(n_b: usize, gamma: f64) -> Result<Self> {
        if n_b == 0 {
            return Err(Error::Config("bin count must be at least 1".into()));
        }
        check_gamma(gamma)?;
        Ok(BoundaryState {
            n_b,
            gamma,
            steps: 0,
            boundaries: Vec::new(),
        })
    }

    /// Fold one batch estimate in. The first estimate is adopted as is.
    pub fn observe(&mut self, current: &[f64]) -> Result<&[f64]> {
        if current.len() + 1 != self.n_b {
            return Err(Error::LengthMismatch {
                left: self.n_b - 1,
                right: current.len(),
            });
        }
        self.boundaries = if self.steps == 0 {
            current.to_vec()
        } else {
            momentum_update(&self.boundaries, current, self.gamma)?
        };
        self.steps += 1;
        Ok(&self.boundaries)
    }

    pub fn observe_batch<S: AsRef<[f64]>>(&mut self, batch: &[S]) -> Result<&[f64]> {
        let current = batch_boundaries(batch, self.n_b)?;
        self.observe(&current)
    }

    pub fn is_calibrated(&self) -> bool {
        self.steps > 0 || self.n_b == 1
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# n_b {} gamma {} steps {}\n",
            self.n_b, self.gamma, self.steps
        );
        for b in &self.boundaries {
            writeln!(s, "{b}").expect("string write");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty state file"))?;
        let toks: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| Error::parse(1, "missing `#` header"))?
            .split_whitespace()
            .collect();
        let field = |name: &str| {
            toks.iter()
                .position(|t| *t == name)
                .and_then(|p| toks.get(p + 1))
                .ok_or_else(|| Error::parse(1, format!("header lacks `{name}`")))
        };
        let bad = |name: &str| Error::parse(1, format!("bad `{name}` value"));
        let n_b: usize = field("n_b")?.parse().map_err(|_| bad("n_b"))?;
        let gamma: f64 = field("gamma")?.parse().map_err(|_| bad("gamma"))?;
        let steps: u64 = field("steps")?.parse().map_err(|_| bad("steps"))?;
        let mut state = BoundaryState::new(n_b, gamma)?;
        state.steps = steps;
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("`{line}` is not a boundary value")))?;
            state.boundaries.push(v);
        }
        let expected = if steps == 0 { 0 } else { n_b - 1 };
        if state.boundaries.len() != expected {
            return Err(Error::Format(format!(
                "state declares n_b {n_b} with {steps} steps but lists {} boundaries",
                state.boundaries.len()
            )));
        }
        Ok(state)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_cut() {
        assert_eq!(
            batch_boundaries(&[[1.0, 2.0, 3.0, 4.0]], 2).unwrap(),
            vec![2.5]
        );
        assert_eq!(
            batch_boundaries(&[[4.0, 1.0], [3.0, 2.0]], 2).unwrap(),
            vec![2.5]
        );
        assert!(batch_boundaries(&[[1.0, 2.0]], 1).unwrap().is_empty());
        assert_eq!(batch_boundaries(&[[0.5; 6]], 3).unwrap(), vec![0.5, 0.5]);
        assert!(matches!(
            batch_boundaries(&[[1.0]], 2),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn buckets_are_equitable() {
        let vals: Vec<f64> = (0..23).map(|i| ((i * 7919) % 23) as f64).collect();
        let nu = batch_boundaries(std::slice::from_ref(&vals), 5).unwrap();
        let part = partition(&vals, &nu).unwrap();
        for c in part.counts {
            assert!(c == 4 || c == 5, "{c}");
        }
    }

    #[test]
    fn momentum_examples() {
        let v = momentum_update(&[0.0], &[1.0], 0.99).unwrap();
        assert!((v[0] - 0.01).abs() < 1e-15);
        assert_eq!(
            momentum_update(&[0.3, 0.1], &[0.3, 0.1], 0.5).unwrap(),
            vec![0.3, 0.1]
        );
        assert!(matches!(
            momentum_update(&[0.0], &[1.0, 2.0], 0.9),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            momentum_update(&[0.0], &[1.0], 1.0),
            Err(Error::InvalidGamma(_))
        ));
    }

    #[test]
    fn partition_examples() {
        let p = partition(&[0.28, 1.82, -0.60], &[0.28]).unwrap();
        assert_eq!(p.bins, vec![0, 0, 1]);
        assert_eq!(p.counts, vec![2, 1]);
        assert_eq!(partition(&[3.0, -1.0], &[]).unwrap().bins, vec![0, 0]);
        let high = partition(&[0.1, 0.2], &[5.0]).unwrap();
        assert_eq!(high.counts, vec![0, 2]);
        let collapsed = partition(&[1.0, 0.5, 0.5, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(collapsed.counts, vec![3, 0, 1]);
        assert!(partition(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn state_first_step_bypasses_momentum() {
        let mut st = BoundaryState::new(2, 0.9).unwrap();
        st.observe(&[1.0]).unwrap();
        assert_eq!(st.boundaries, vec![1.0]);
        st.observe(&[0.0]).unwrap();
        assert!((st.boundaries[0] - 0.9).abs() < 1e-15);
        assert_eq!(st.steps, 2);
        assert!(st.observe(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn state_text_round_trip() {
        let mut st = BoundaryState::new(4, 0.99).unwrap();
        st.observe(&[0.7, 0.01, -0.66]).unwrap();
        let back = BoundaryState::parse(&st.to_text()).unwrap();
        assert_eq!(back, st);
        assert!(BoundaryState::parse("# n_b 4 gamma 0.99 steps 1\n0.5\n").is_err());
    }
}
