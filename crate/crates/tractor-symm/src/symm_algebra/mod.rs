//! The algebra generated by the first-order symmetries: `𝔤` as parallel
//! adjoint tractors, the irreducible parts of a product of two of them,
//! the degree-two composition law and the ideal relations, and the graded
//! dimensions of the quotient algebra.

mod graded;
mod products;
mod relations;

use crate::canon_symm::{CanonError, CanonicalSymmetry};
use crate::ckt_solve::{extract, CartanSpace, CktError, CktLabel};
use crate::exact_tensor::{Metric, Scalar, SymTensor};
use crate::tractor_calc::{SlotKind, TractorError, TractorField, TractorFrame};


pub use graded::{brute_dim_oracle, graded_dim, graded_table, ORACLE_COLUMN_CAP};
pub use products::{boxtimes, bracket, bullet, decompose, killing, ProductDecomp};
pub use relations::{
    fund_d2_tracefree_is_x_times_d, ideal_coefficient, ideal_relation_check, killing_from_fields, lemma_extra_check,
    lie_bracket, verify_dec2can, Dec2CanReport, ExtraReport, IdealReport,
};

#[derive(Debug, Clone, thiserror::Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Tractor(#[from] TractorError),
    #[error(transparent)]
    Ckt(#[from] CktError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("expected a single form slot")]
    NotAdjoint,
    #[error("adjoint tractor is not parallel")]
    NotParallel,
    #[error("oracle needs {columns} unknowns, above the cap of {cap}")]
    Infeasible { columns: usize, cap: usize },
}

const ADJOINT: CktLabel = CktLabel { p: 1, r: 0 };

/// An element of `𝔤`: a parallel tractor with one form slot, optionally
/// remembering the conformal Killing field it came from.
#[derive(Clone, Debug)]
pub struct GElement {
    tractor: TractorField,
    generator: Option<SymTensor>,
}

impl PartialEq for GElement {
    fn eq(&self, other: &Self) -> bool {
        self.tractor == other.tractor
    }
}

impl GElement {
    pub fn new(tractor: TractorField) -> Result<Self, AlgebraError> {
        if tractor.slots() != [SlotKind::Form] {
            return Err(AlgebraError::NotAdjoint);
        }
        if (0..tractor.n()).any(|a| !tractor.covariant(a).is_zero()) {
            return Err(AlgebraError::NotParallel);
        }
        Ok(GElement { tractor, generator: None })
    }

    pub fn tractor(&self) -> &TractorField {
        &self.tractor
    }

    pub fn generator(&self) -> Option<&SymTensor> {
        self.generator.as_ref()
    }

    /// The projecting part, a conformal Killing field.
    pub fn field(&self) -> SymTensor {
        extract(&self.tractor, ADJOINT).expect("adjoint shape")
    }

    /// The first-order symmetry `S_I` acting on `𝓔[w]`.
    pub fn symmetry(&self, w: Scalar) -> CanonicalSymmetry {
        CanonicalSymmetry::build(self.tractor.clone(), ADJOINT, w).expect("checked parallel adjoint")
    }

    pub fn scale(&self, c: &Scalar) -> GElement {
        GElement { tractor: self.tractor.scale(c), generator: self.generator.as_ref().map(|g| g.scale(c)) }
    }

    pub fn add(&self, other: &GElement) -> GElement {
        let generator = self.generator.as_ref().zip(other.generator.as_ref()).map(|(a, b)| a.add(b));
        GElement { tractor: self.tractor.add(&other.tractor), generator }
    }
}

/// `𝔤 ≅ 𝔰𝔬(s+1, s'+1)` realized through the conformal Killing fields of a
/// flat metric.
#[derive(Clone, Debug)]
pub struct AdjointSpace {
    space: CartanSpace,
}

impl AdjointSpace {
    pub fn new(g: Metric) -> Self {
        AdjointSpace { space: CartanSpace::new(TractorFrame::new(g), ADJOINT) }
    }

    pub fn metric(&self) -> &Metric {
        self.space.frame().metric()
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn fields(&self) -> &[SymTensor] {
        self.space.solutions()
    }

    /// `I_φ` for a conformal Killing field `φ`.
    pub fn element(&self, phi: &SymTensor) -> Result<GElement, AlgebraError> {
        let tractor = self.space.split(phi)?;
        Ok(GElement { tractor, generator: Some(phi.clone()) })
    }

    pub fn basis(&self) -> Vec<GElement> {
        (0..self.dimension())
            .map(|i| GElement { tractor: self.space.parallel(i), generator: Some(self.space.solutions()[i].clone()) })
            .collect()
    }
}
