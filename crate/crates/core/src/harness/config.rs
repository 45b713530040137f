//! Flat `key = value` configuration files.
//!
//! ```text
//! # classification defaults
//! mode = vii
//! k = 32
//! n_b = 6
//! gamma = 0.99
//! tau = 0.1
//! variant = carve
//! policy = bin
//! seed = 0
//! ```
//!
//! `key: value` is accepted too. Extra keys: `search` (`exhaustive` or
//! `grid`), `pooling` (`mean-relu` or `relu-mean`), `voxel_cell`.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::binsampler::{Pooling, SambleConfig};
use crate::error::{Error, Result};
use crate::geometry::NeighborSearch;

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad value `{raw}` for `{key}`")))
}

/// Apply the settings in `text` on top of `base`.
pub fn parse_config_onto(text: &str, mut cfg: SambleConfig) -> Result<SambleConfig> {
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| {
                Error::parse(line_no, format!("expected `key = value`, got `{line}`"))
            })?;
        let (key, val) = (key.trim(), val.trim());
        match key {
            "mode" => cfg.mode = val.parse()?,
            "k" => cfg.k = value(key, val, line_no)?,
            "n_b" => cfg.n_b = value(key, val, line_no)?,
            "gamma" => cfg.gamma = value(key, val, line_no)?,
            "tau" => cfg.tau = value(key, val, line_no)?,
            "variant" => cfg.variant = val.parse()?,
            "policy" => cfg.policy = val.parse()?,
            "seed" => cfg.seed = value(key, val, line_no)?,
            "search" => {
                cfg.search = match val {
                    "exhaustive" => NeighborSearch::Exhaustive,
                    "grid" => NeighborSearch::Grid,
                    _ => return Err(Error::parse(line_no, format!("unknown search `{val}`"))),
                }
            }
            "pooling" => {
                cfg.pooling = match val {
                    "mean-relu" => Pooling::MeanThenRelu,
                    "relu-mean" => Pooling::ReluThenMean,
                    _ => return Err(Error::parse(line_no, format!("unknown pooling `{val}`"))),
                }
            }
            "voxel_cell" => cfg.voxel_cell = Some(value(key, val, line_no)?),
            other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<SambleConfig> {
    parse_config_onto(text, SambleConfig::default())
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SambleConfig> {
    let path = path.as_ref();
    parse_config(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn config_to_text(cfg: &SambleConfig) -> String {
    let mut s = format!(
        "mode = {}\nk = {}\nn_b = {}\ngamma = {}\ntau = {}\nvariant = {}\npolicy = {}\nseed = {}\n",
        cfg.mode, cfg.k, cfg.n_b, cfg.gamma, cfg.tau, cfg.variant, cfg.policy, cfg.seed
    );
    if cfg.search == NeighborSearch::Grid {
        s.push_str("search = grid\n");
    }
    if cfg.pooling == Pooling::ReluThenMean {
        s.push_str("pooling = relu-mean\n");
    }
    if let Some(c) = cfg.voxel_cell {
        s.push_str(&format!("voxel_cell = {c}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::SamVariant;
    use crate::sample::Policy;
    use crate::scoring::IndexingMode;

    #[test]
    fn parses_all_keys() {
        let cfg = parse_config(
            "# seg\nmode = v\nk: 16\nn_b=4\ngamma = 0.9\ntau = 0.5 # hot\nvariant = insert\npolicy = prior\nseed = 12\nsearch = grid\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, IndexingMode::SparseColumnSum);
        assert_eq!((cfg.k, cfg.n_b, cfg.seed), (16, 4, 12));
        assert_eq!(cfg.variant, SamVariant::Insert);
        assert_eq!(cfg.policy, Policy::Prior);
        assert_eq!(cfg.search, NeighborSearch::Grid);
        assert_eq!(parse_config(&config_to_text(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_config("wat = 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("\nk = many"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_config("gamma = 1.5").is_err());
        assert!(parse_config("variant = insert\nmode = iv").is_err());
        assert!(parse_config("just words").is_err());
    }
}
