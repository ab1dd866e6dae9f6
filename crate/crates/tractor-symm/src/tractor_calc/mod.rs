//! Standard and 2-form tractor calculus on flat pseudo-Euclidean space in
//! the flat scale.

mod field;
mod frame;
mod ops;
mod parallel;

pub use field::{SlotKind, TractorField};
pub use frame::{FlatScale, TractorFrame};
pub use parallel::{parallel_basis, transport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TractorError {
    #[error("expected {expected} components, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("slot kinds do not match")]
    KindMismatch,
    #[error("slots are not skew")]
    NotSkew,
    #[error("field is not parallel")]
    NotParallel,
    #[error("degree cap {0} too small: dimension still growing")]
    CapTooSmall(u32),
}
