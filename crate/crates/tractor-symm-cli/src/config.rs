use serde::Serialize;
use tractor_symm::ckt_solve::CktLabel;
use tractor_symm::exact_tensor::{Metric, Scalar};

use crate::args::Common;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("signature {s},{s_neg} does not add up to n = {n}")]
    SignatureMismatch { s: usize, s_neg: usize, n: usize },
    #[error("n = {0} is below 3")]
    TooSmall(usize),
    #[error("symmetry runs need r < k, got r = {r}, k = {k}")]
    TrivialLabel { r: usize, k: usize },
    #[error("{what} = {index} is outside a basis of dimension {dim}")]
    IndexOutOfRange { what: &'static str, index: usize, dim: usize },
    #[error("k must be at least 1")]
    ZeroPower,
}

/// Validated flags shared by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub signature: (usize, usize),
    pub k: usize,
    pub p: usize,
    pub r: usize,
    pub max_degree: u32,
    pub seed: u64,
    #[serde(skip)]
    pub metric: Metric,
}

impl RunConfig {
    pub fn from_flags(c: &Common) -> Result<Self, ConfigError> {
        let (s, s_neg) = match (c.signature, c.n) {
            (Some((s, s_neg)), Some(n)) if s + s_neg != n => return Err(ConfigError::SignatureMismatch { s, s_neg, n }),
            (Some(sig), _) => sig,
            (None, n) => (n.unwrap_or(3), 0),
        };
        let n = s + s_neg;
        if n < 3 {
            return Err(ConfigError::TooSmall(n));
        }
        if c.k == 0 {
            return Err(ConfigError::ZeroPower);
        }
        let metric = Metric::new(s, s_neg).map_err(|_| ConfigError::TooSmall(n))?;
        Ok(RunConfig { n, signature: (s, s_neg), k: c.k, p: c.p, r: c.r, max_degree: c.max_degree, seed: c.seed, metric })
    }

    pub fn label(&self) -> CktLabel {
        CktLabel::new(self.p, self.r)
    }

    /// The label must give a nontrivial symmetry of `Δ^k`.
    pub fn symmetry_label(&self) -> Result<CktLabel, ConfigError> {
        if self.r >= self.k {
            return Err(ConfigError::TrivialLabel { r: self.r, k: self.k });
        }
        Ok(self.label())
    }

    /// `k − n/2`, the weight on which `Δ^k` is conformally invariant.
    pub fn critical_weight(&self) -> Scalar {
        Scalar::int(self.k as i64) - Scalar::ratio(self.n as i64, 2)
    }
}

pub fn check_index(what: &'static str, index: usize, dim: usize) -> Result<(), ConfigError> {
    if index >= dim {
        return Err(ConfigError::IndexOutOfRange { what, index, dim });
    }
    Ok(())
}
