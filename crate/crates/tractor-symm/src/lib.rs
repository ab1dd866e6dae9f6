//! Exact symbolic computation of higher symmetries of powers of the flat
//! Laplacian, built on tractor calculus.

pub mod exact_tensor;
pub mod flat_diffop;
pub mod tractor_calc;
pub mod ckt_solve;
pub mod canon_symm;
pub mod symm_algebra;

/// The guide's chapters, compiled so that their examples run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    pub mod arithmetic {}
    #[doc = include_str!("../../../book/src/solutions.md")]
    pub mod solutions {}
    #[doc = include_str!("../../../book/src/symmetries.md")]
    pub mod symmetries {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    pub mod algebra {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
