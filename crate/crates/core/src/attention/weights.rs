//! Query/key projections and bin-token embeddings, seeded or loaded from a
//! little-endian binary file.

use std::fs;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::rng_from;

pub const WEIGHTS_MAGIC: &[u8; 8] = b"SAMBLEWS";
pub const WEIGHTS_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 * 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Seeded(u64),
    File(PathBuf),
    Explicit,
}

/// `W_Q`, `W_K` (both `d_in × d`) and `n_b` token embeddings living in
/// input space (`n_b × d_in`), so tokens pass through `W_K` like points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    w_q: Matrix,
    w_k: Matrix,
    bin_tokens: Matrix,
    provenance: Provenance,
}

impl WeightSet {
    pub fn new(w_q: Matrix, w_k: Matrix, bin_tokens: Matrix) -> Result<Self> {
        let (d_in, d) = (w_q.rows(), w_q.cols());
        if d_in == 0 || d == 0 {
            return Err(Error::Format(
                "projection dimensions must be at least 1".into(),
            ));
        }
        if w_k.rows() != d_in || w_k.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "W_K is {}x{}, W_Q is {d_in}x{d}",
                w_k.rows(),
                w_k.cols()
            )));
        }
        if bin_tokens.rows() > 0 && bin_tokens.cols() != d_in {
            return Err(Error::DimMismatch {
                expected: d_in,
                found: bin_tokens.cols(),
            });
        }
        let bin_tokens = if bin_tokens.rows() == 0 {
            Matrix::zeros(0, d_in)
        } else {
            bin_tokens
        };
        if !(w_q.all_finite() && w_k.all_finite() && bin_tokens.all_finite()) {
            return Err(Error::Format("non-finite weight".into()));
        }
        Ok(WeightSet {
            w_q,
            w_k,
            bin_tokens,
            provenance: Provenance::Explicit,
        })
    }

    pub fn d_in(&self) -> usize {
        self.w_q.rows()
    }

    pub fn d(&self) -> usize {
        self.w_q.cols()
    }

    pub fn n_b(&self) -> usize {
        self.bin_tokens.rows()
    }

    pub fn w_q(&self) -> &Matrix {
        &self.w_q
    }

    pub fn w_k(&self) -> &Matrix {
        &self.w_k
    }

    pub fn bin_tokens(&self) -> &Matrix {
        &self.bin_tokens
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `√d`, the energy divisor.
    pub fn scale(&self) -> f64 {
        (self.d() as f64).sqrt()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = self.w_q.as_slice().len()
            + self.w_k.as_slice().len()
            + self.bin_tokens.as_slice().len();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * payload);
        out.extend_from_slice(WEIGHTS_MAGIC);
        for v in [
            WEIGHTS_VERSION,
            self.d_in() as u32,
            self.d() as u32,
            self.n_b() as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for m in [&self.w_q, &self.w_k, &self.bin_tokens] {
            for v in m.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "file is {} bytes, header needs {HEADER_LEN}",
                bytes.len()
            )));
        }
        if &bytes[..8] != WEIGHTS_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let word = |i: usize| {
            u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().expect("4 bytes")) as usize
        };
        let (version, d_in, d, n_b) = (word(0), word(1), word(2), word(3));
        if version != WEIGHTS_VERSION as usize {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let expected = (2 * d_in * d + n_b * d_in) * 8;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(Error::Format(format!(
                "header (d_in={d_in}, d={d}, n_b={n_b}) needs {expected} payload bytes, found {}",
                payload.len()
            )));
        }
        let mut values = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
        let mut take = |rows: usize, cols: usize| {
            Matrix::from_vec(rows, cols, values.by_ref().take(rows * cols).collect())
        };
        let w_q = take(d_in, d)?;
        let w_k = take(d_in, d)?;
        let tokens = take(n_b, d_in)?;
        WeightSet::new(w_q, w_k, tokens)
    }
}

/// Zero-mean Gaussian entries scaled by `1/√d_in`, deterministic per seed.
/// Generation order: `W_Q`, `W_K`, then the tokens, each row-major.
pub fn init_weights(d_in: usize, d: usize, n_b: usize, seed: u64) -> Result<WeightSet> {
    if d_in == 0 || d == 0 {
        return Err(Error::Format(
            "projection dimensions must be at least 1".into(),
        ));
    }
    let mut rng = rng_from(seed);
    let scale = 1.0 / (d_in as f64).sqrt();
    let mut draw = |rows: usize, cols: usize| {
        let data = (0..rows * cols)
            .map(|_| {
                scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
            })
            .collect();
        Matrix::from_vec(rows, cols, data).expect("sized")
    };
    let w_q = draw(d_in, d);
    let w_k = draw(d_in, d);
    let tokens = draw(n_b, d_in);
    let mut ws = WeightSet::new(w_q, w_k, tokens)?;
    ws.provenance = Provenance::Seeded(seed);
    Ok(ws)
}

pub fn save_weights(ws: &WeightSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, ws.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightSet> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut ws = WeightSet::from_bytes(&bytes)?;
    ws.provenance = Provenance::File(path.to_path_buf());
    Ok(ws)
}
