use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which sampler produced a [`SampleResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    Random,
    Fps,
    Voxel,
    TopM,
    Prior,
    Bin,
}

impl Policy {
    pub const ALL: [Policy; 6] = [
        Policy::Random,
        Policy::Fps,
        Policy::Voxel,
        Policy::TopM,
        Policy::Prior,
        Policy::Bin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Random => "random",
            Policy::Fps => "fps",
            Policy::Voxel => "voxel",
            Policy::TopM => "top-m",
            Policy::Prior => "prior",
            Policy::Bin => "bin",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" | "rs" => Policy::Random,
            "fps" => Policy::Fps,
            "voxel" => Policy::Voxel,
            "top-m" | "topm" => Policy::TopM,
            "prior" => Policy::Prior,
            "bin" | "samble" => Policy::Bin,
            other => return Err(Error::Config(format!("unknown policy `{other}`"))),
        })
    }
}

/// Selected point indices with aligned scores and bin ids.
///
/// Baseline samplers that have no notion of a score report 0 (random,
/// voxel) or the selection distance (fps); samplers without bins put every
/// point in bin 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    pub n: usize,
    pub indices: Vec<usize>,
    pub scores: Vec<f64>,
    pub bins: Vec<usize>,
    pub seed: u64,
    pub policy: Policy,
    /// Requested minus delivered count (voxel only).
    pub shortfall: usize,
}

impl SampleResult {
    pub fn new(
        n: usize,
        indices: Vec<usize>,
        scores: Vec<f64>,
        bins: Vec<usize>,
        seed: u64,
        policy: Policy,
    ) -> Self {
        debug_assert_eq!(indices.len(), scores.len());
        debug_assert_eq!(indices.len(), bins.len());
        SampleResult {
            n,
            indices,
            scores,
            bins,
            seed,
            policy,
            shortfall: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(
            out,
            "# N {} M {} seed {} policy {}",
            self.n,
            self.indices.len(),
            self.seed,
            self.policy
        )?;
        if self.shortfall > 0 {
            write!(out, " shortfall {}", self.shortfall)?;
        }
        writeln!(out)?;
        for ((i, s), b) in self.indices.iter().zip(&self.scores).zip(&self.bins) {
            writeln!(out, "{i} {s} {b}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty sample file"))?;
        let toks: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| Error::parse(1, "missing `#` header"))?
            .split_whitespace()
            .collect();
        let field = |name: &str| -> Result<&str> {
            toks.iter()
                .position(|t| *t == name)
                .and_then(|p| toks.get(p + 1).copied())
                .ok_or_else(|| Error::parse(1, format!("header lacks `{name}`")))
        };
        let num = |name: &str| -> Result<u64> {
            field(name)?
                .parse()
                .map_err(|_| Error::parse(1, format!("bad `{name}` value")))
        };
        let n = num("N")? as usize;
        let m = num("M")? as usize;
        let seed = num("seed")?;
        let policy: Policy = field("policy")?.parse()?;
        let shortfall = if toks.contains(&"shortfall") {
            num("shortfall")? as usize
        } else {
            0
        };

        let mut result = SampleResult::new(n, Vec::new(), Vec::new(), Vec::new(), seed, policy);
        result.shortfall = shortfall;
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(Error::parse(line_no, "expected `index score bin`"));
            }
            let bad = |what: &str| Error::parse(line_no, format!("bad {what}"));
            let idx: usize = t[0].parse().map_err(|_| bad("index"))?;
            if idx >= n {
                return Err(Error::parse(line_no, format!("index {idx} >= N {n}")));
            }
            result.indices.push(idx);
            result.scores.push(t[1].parse().map_err(|_| bad("score"))?);
            result.bins.push(t[2].parse().map_err(|_| bad("bin"))?);
        }
        if result.indices.len() != m {
            return Err(Error::parse(
                1,
                format!("header says M {m}, found {} rows", result.indices.len()),
            ));
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let r = SampleResult::new(3, vec![1, 0], vec![1.82, 0.28], vec![0, 0], 7, Policy::TopM);
        assert_eq!(
            r.to_text(),
            "# N 3 M 2 seed 7 policy top-m\n1 1.82 0\n0 0.28 0\n"
        );
    }

    #[test]
    fn parse_rejects_count_mismatch() {
        assert!(SampleResult::parse("# N 3 M 2 seed 1 policy bin\n0 0.5 0\n").is_err());
        assert!(SampleResult::parse("# N 3 M 1 seed 1 policy bin\n5 0.5 0\n").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(scores in proptest::collection::vec(-1e6f64..1e6, 1..40), seed: u64, short in 0usize..3) {
            let m = scores.len();
            let mut r = SampleResult::new(m + 5, (0..m).rev().collect(), scores, (0..m).map(|i| i % 4).collect(), seed, Policy::Bin);
            r.shortfall = short;
            let back = SampleResult::parse(&r.to_text()).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
