use serde::Serialize;

use super::{Scalar, TensorError};

/// Flat diagonal metric with `s` entries `+1` followed by `s_neg` entries `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Metric {
    s: usize,
    s_neg: usize,
}

impl Metric {
    pub fn new(s: usize, s_neg: usize) -> Result<Self, TensorError> {
        let n = s + s_neg;
        if n < 3 {
            return Err(TensorError::DimensionTooSmall(n));
        }
        if n > super::MAX_VARS {
            return Err(TensorError::DimensionTooLarge(n));
        }
        Ok(Metric { s, s_neg })
    }

    pub fn euclidean(n: usize) -> Self {
        Metric::new(n, 0).expect("valid dimension")
    }

    pub fn dim(&self) -> usize {
        self.s + self.s_neg
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.s_neg)
    }

    /// Diagonal entry `g_ii`; the inverse metric has the same entries.
    pub fn diag(&self, i: usize) -> i64 {
        debug_assert!(i < self.dim());
        if i < self.s {
            1
        } else {
            -1
        }
    }

    pub fn diag_scalar(&self, i: usize) -> Scalar {
        Scalar::int(self.diag(i))
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.diag(i)
        } else {
            0
        }
    }
}
