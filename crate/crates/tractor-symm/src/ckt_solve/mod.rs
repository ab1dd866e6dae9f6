//! Generalized conformal Killing equations `[∇^{2r+1}φ]_⊠ = 0` on flat
//! space: exact polynomial solutions, Weyl dimensions, and the passage to
//! parallel tractors and back.

mod cartan;
mod lie;
mod solve;

use std::fmt;

use serde::Serialize;

use crate::exact_tensor::{Metric, Scalar, SymTensor};
use crate::tractor_calc::SlotKind;

pub use cartan::{extract, CartanSpace};
pub use lie::{lie_derivative, LieSection};
pub use solve::{solve, CktBasis};

/// `(p, r)`: rank `p` trace-free symmetric tensors of weight `2r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CktLabel {
    pub p: usize,
    pub r: usize,
}

impl CktLabel {
    pub fn new(p: usize, r: usize) -> Self {
        CktLabel { p, r }
    }

    /// Number of derivatives in the equation, `2r + 1`.
    pub fn equation_order(self) -> usize {
        2 * self.r + 1
    }

    /// Highest polynomial degree a solution can have.
    pub fn max_degree(self) -> u32 {
        (2 * self.p + 4 * self.r) as u32
    }

    /// Slot shape of the parallel tractor: `p` form pairs, then `2r`
    /// standard slots.
    pub fn tractor_slots(self) -> Vec<SlotKind> {
        let mut s = vec![SlotKind::Form; self.p];
        s.extend(std::iter::repeat_n(SlotKind::Standard, 2 * self.r));
        s
    }

    /// All labels with `p + 2r ≤ bound`.
    pub fn up_to(bound: usize) -> Vec<CktLabel> {
        (0..=bound / 2)
            .flat_map(|r| (0..=bound - 2 * r).map(move |p| CktLabel::new(p, r)))
            .collect()
    }
}

impl fmt::Display for CktLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.r)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum CktError {
    #[error("tensor has rank {found}, label needs {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("not a solution: [∇^{order}φ]_⊠ = {residue:?}")]
    NotASolution { order: usize, residue: Box<SymTensor> },
    #[error("solution space did not stabilize below degree cap {0}")]
    NoStabilization(u32),
    #[error("tractor shape does not match label {0}")]
    ShapeMismatch(CktLabel),
}

/// `[∇^{2r+1}φ]_⊠`: the trace-free symmetric part of `2r+1` raised
/// gradients of `φ`.
pub fn ckt_apply(phi: &SymTensor, label: CktLabel, g: &Metric) -> Result<SymTensor, CktError> {
    if phi.rank() != label.p {
        return Err(CktError::RankMismatch { expected: label.p, found: phi.rank() });
    }
    Ok(phi.sym_gradient(g, label.equation_order()).trace_free(g))
}

/// Weyl dimension of the `𝔰𝔬(n+2)` module with highest weight
/// `(2r+p, p, 0, …, 0)`.
pub fn weyl_dim(n: usize, label: CktLabel) -> u64 {
    let big = n + 2;
    let rank = big / 2;
    let odd = big % 2 == 1;
    let half = |k: i64| Scalar::ratio(k, 2);
    // ρ in the orthogonal basis, doubled to stay integral.
    let rho: Vec<Scalar> = (0..rank)
        .map(|i| if odd { half(2 * (rank - i) as i64 - 1) } else { Scalar::int((rank - i - 1) as i64) })
        .collect();
    let mut lam = vec![Scalar::zero(); rank];
    lam[0] = Scalar::int((2 * label.r + label.p) as i64);
    if rank > 1 {
        lam[1] = Scalar::int(label.p as i64);
    }
    let shifted: Vec<Scalar> = lam.iter().zip(&rho).map(|(l, r)| l + r).collect();
    let mut dim = Scalar::one();
    for i in 0..rank {
        for j in i + 1..rank {
            let num = &(&shifted[i] * &shifted[i]) - &(&shifted[j] * &shifted[j]);
            let den = &(&rho[i] * &rho[i]) - &(&rho[j] * &rho[j]);
            dim = dim * num / den;
        }
        if odd {
            dim = dim * &shifted[i] / &rho[i];
        }
    }
    dim.to_i64().and_then(|d| u64::try_from(d).ok()).expect("dimension is a positive integer")
}
