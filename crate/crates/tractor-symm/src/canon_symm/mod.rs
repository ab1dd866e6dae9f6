//! Canonical symmetries of powers of the Laplacian: contraction of a
//! parallel tractor with iterated double-D operators, the checks of the
//! defining identity and of the leading-term structure, and the
//! classification machinery.

pub(crate) mod checks;
mod classify;
mod cmatrix;
mod sample;

use crate::ckt_solve::{CartanSpace, CktError, CktLabel};
use crate::exact_tensor::{Metric, Poly, Scalar, SymTensor};
use crate::flat_diffop::{OpError, StdOp};
use crate::tractor_calc::{TractorError, TractorField, TractorFrame};

pub use checks::{
    gjms_factorization, leading_checks, verify_commute_double_d, verify_fund_equals_double, verify_symmetry,
    IdentityReport, LeadingReport, SymmetryReport, Verdict,
};
pub use classify::{classify, Classification};
pub use sample::{sample_symmetry, SampledSymmetry};
pub use cmatrix::{c_matrix, c_scalar, extract_constraint_matrix, reduction_chain, regularity, CMatrix, ReductionChain};

#[derive(Debug, Clone, thiserror::Error)]
pub enum CanonError {
    #[error(transparent)]
    Tractor(#[from] TractorError),
    #[error(transparent)]
    Ckt(#[from] CktError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("tractor is not parallel")]
    NotParallel,
    #[error("tractor slots do not match label {0}")]
    ShapeMismatch(CktLabel),
    #[error("d = {d} is outside 0..{k}")]
    DOutOfRange { k: usize, d: usize },
    #[error("not a symmetry: greatest term {ty} has nonzero [∇^{order}φ] = {residue:?}")]
    NotASymmetry { ty: crate::flat_diffop::OpType, order: usize, residue: Box<SymTensor> },
    #[error("constraint coefficient ({row},{col}) is not a multiple of the expected variable")]
    NotProportional { row: usize, col: usize },
    #[error("constraint matrix for k={k}, r={r} differs from C(k, k−r−1): {found}")]
    ConstraintMismatch { k: usize, r: usize, found: String },
    #[error("classification did not terminate within {0} steps")]
    NoTermination(usize),
}

/// Which derivative family realizes the operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `𝔻` and `𝔻²`, the defining choice.
    Double,
    /// The fundamental derivative `𝒟` and `𝒟²`.
    Fundamental,
}

/// `S_φ = I^{𝐀1…𝐀p B1B1'…} 𝔻_{𝐀1}⋯𝔻_{𝐀p} 𝔻²_{B1B1'}⋯𝔻²_{BrBr'}` on `𝓔[w]`.
///
/// Primarily an evaluator on polynomials; [`CanonicalSymmetry::to_stdop`]
/// recovers the normal form.
#[derive(Clone, Debug)]
pub struct CanonicalSymmetry {
    parallel: TractorField,
    label: CktLabel,
    weight: Scalar,
}

impl CanonicalSymmetry {
    /// Build from a parallel tractor whose slots are `p` form pairs then
    /// `2r` standard slots.
    pub fn build(parallel: TractorField, label: CktLabel, weight: Scalar) -> Result<Self, CanonError> {
        if parallel.slots() != label.tractor_slots().as_slice() {
            return Err(CanonError::ShapeMismatch(label));
        }
        let n = parallel.n();
        if (0..n).any(|a| !parallel.covariant(a).is_zero()) {
            return Err(CanonError::NotParallel);
        }
        Ok(CanonicalSymmetry { parallel, label, weight })
    }

    /// Split `φ` and build its symmetry.
    pub fn from_solution(phi: &SymTensor, label: CktLabel, g: &Metric, weight: Scalar) -> Result<Self, CanonError> {
        let space = CartanSpace::new(TractorFrame::new(*g), label);
        Self::build(space.split(phi)?, label, weight)
    }

    pub fn label(&self) -> CktLabel {
        self.label
    }

    pub fn weight(&self) -> &Scalar {
        &self.weight
    }

    pub fn parallel(&self) -> &TractorField {
        &self.parallel
    }

    pub fn metric(&self) -> &Metric {
        self.parallel.frame().metric()
    }

    /// The same tractor acting on another density bundle.
    pub fn at_weight(&self, weight: Scalar) -> Self {
        CanonicalSymmetry { weight, ..self.clone() }
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        self.apply_with(Family::Double, f)
    }

    pub fn apply_with(&self, family: Family, f: &Poly) -> Poly {
        let mut field = TractorField::density(*self.parallel.frame(), self.weight.clone(), f.clone());
        for _ in 0..self.label.r {
            field = match family {
                Family::Double => field.double_d2(),
                Family::Fundamental => field.fund_d2(),
            };
        }
        for _ in 0..self.label.p {
            field = match family {
                Family::Double => field.double_d(),
                Family::Fundamental => field.fund_d(),
            };
        }
        let out = TractorField::contract_leading(&self.parallel, &field).expect("slots checked at build");
        out.as_density().expect("fully contracted").clone()
    }

    /// Normal form, recovered from the action on monomials up to the
    /// formal order `p + 2r`, which bounds the differential order.
    pub fn to_stdop(&self) -> Result<StdOp, CanonError> {
        self.to_stdop_with(Family::Double)
    }

    pub fn to_stdop_with(&self, family: Family) -> Result<StdOp, CanonError> {
        let order = (self.label.p + 2 * self.label.r) as u32;
        let w = self.weight.clone();
        Ok(StdOp::reconstruct(*self.metric(), w.clone(), w, order, |f| self.apply_with(family, f))?)
    }
}
