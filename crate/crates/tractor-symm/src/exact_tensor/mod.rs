//! Exact rational scalars, polynomials, symmetric tensors with trace and
//! Young projections, and exact linear algebra.

mod matrix;
mod metric;
mod poly;
mod scalar;
mod sparse;
mod symtensor;
mod young;

pub use matrix::{AffineSolution, ExactMatrix};
pub use metric::Metric;
pub use poly::{Monomial, Poly, MAX_VARS};
pub use scalar::{ParseScalarError, Scalar};
pub use sparse::{pivot_rows_mod_prime, SparseEchelon, SparseRow};
pub use symtensor::{Multiset, SymTensor};
pub use young::{lower_all, young22_constraints, young22_tracefree, Coefficient, KernelProjector, SlotConstraints};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("dimension {0} is below the minimum of 3")]
    DimensionTooSmall(usize),
    #[error("dimension {0} exceeds the supported maximum of {MAX_VARS}")]
    DimensionTooLarge(usize),
    #[error("rank {0} is too small for a trace")]
    RankTooSmall(usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("rows have different lengths")]
    Ragged,
    #[error("linear system is inconsistent")]
    Inconsistent,
}
