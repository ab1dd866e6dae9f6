use std::collections::HashMap;

use crate::ckt_solve::{ckt_apply, CartanSpace, CktLabel};
use crate::exact_tensor::SymTensor;
use crate::flat_diffop::StdOp;
use crate::tractor_calc::TractorFrame;

use super::cmatrix::ratio;
use super::{CanonError, CanonicalSymmetry};

/// A symmetry of `Δ^k` written as a sum of canonical symmetries plus a
/// trivial part with right factor `Δ^k`.
#[derive(Clone, Debug)]
pub struct Classification {
    pub k: usize,
    /// Solutions in the order they were peeled off, ⊴-decreasing.
    pub components: Vec<(CktLabel, SymTensor)>,
    /// The terms with Laplacian power at least `k`.
    pub trivial: StdOp,
    /// What is left; zero for a genuine symmetry.
    pub remainder: StdOp,
}

/// Peel canonical symmetries off `op` by greatest terms.
///
/// Each greatest term must solve its label's equation; otherwise the
/// operator is not a symmetry and the violated equation is reported.
pub fn classify(op: &StdOp, k: usize) -> Result<Classification, CanonError> {
    let g = *op.metric();
    let (mut rest, trivial) = op.split_at_power(k);
    let mut spaces: HashMap<CktLabel, CartanSpace> = HashMap::new();
    let mut components = Vec::new();
    let limit = 4 * (rest.terms().count() + 1) + 64;
    for _ in 0..limit {
        let Ok((ty, psi)) = rest.greatest_term() else {
            return Ok(Classification { k, components, trivial, remainder: rest });
        };
        let psi = psi.clone();
        let label = CktLabel::new(ty.p, ty.r);
        let residue = ckt_apply(&psi, label, &g)?;
        if !residue.is_zero() {
            return Err(CanonError::NotASymmetry { ty, order: label.equation_order(), residue: Box::new(residue) });
        }
        let space = spaces.entry(label).or_insert_with(|| CartanSpace::new(TractorFrame::new(g), label));
        let s = CanonicalSymmetry::build(space.split(&psi)?, label, op.w_in().clone())?;
        let s_op = s.to_stdop()?.with_weights(op.w_in().clone(), op.w_out().clone());
        let lead = s_op.term(ty).ok_or(CanonError::NotProportional { row: ty.p, col: ty.r })?;
        let c = ratio(&psi, lead).ok_or(CanonError::NotProportional { row: ty.p, col: ty.r })?;
        rest = rest.add_scaled(&-c, &s_op);
        if rest.greatest_term().is_ok_and(|(next, _)| next >= ty) {
            return Err(CanonError::NoTermination(components.len() + 1));
        }
        components.push((label, psi));
    }
    Err(CanonError::NoTermination(limit))
}
