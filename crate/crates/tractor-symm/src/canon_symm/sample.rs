use rand::Rng;

use crate::ckt_solve::{CartanSpace, CktLabel};
use crate::exact_tensor::{Metric, Poly, Scalar, SymTensor};
use crate::flat_diffop::StdOp;
use crate::tractor_calc::TractorFrame;

use super::{CanonError, CanonicalSymmetry};

/// A symmetry of `Δ^k` with known parts: canonical symmetries of the listed
/// solutions plus a trivial tail `T ∘ Δ^k`.
#[derive(Clone, Debug)]
pub struct SampledSymmetry {
    pub k: usize,
    pub operator: StdOp,
    /// One solution per label, ⊴-decreasing.
    pub generators: Vec<(CktLabel, SymTensor)>,
    pub trivial: StdOp,
}

fn small(rng: &mut impl Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

/// Labels with `r < k` and order at most 2, greatest first.
fn labels(k: usize) -> Vec<CktLabel> {
    let mut out = vec![CktLabel::new(1, 0), CktLabel::new(0, 0)];
    if k >= 2 {
        out.insert(0, CktLabel::new(0, 1));
    }
    out
}

/// Draw a random rational combination of basis solutions for each label
/// and a random first-order tail. Zero draws are redrawn, so every label
/// contributes.
pub fn sample_symmetry(k: usize, g: &Metric, rng: &mut impl Rng) -> Result<SampledSymmetry, CanonError> {
    let n = g.dim();
    let w_in = Scalar::int(k as i64) - Scalar::ratio(n as i64, 2);
    let w_out = -(Scalar::int(k as i64) + Scalar::ratio(n as i64, 2));
    let frame = TractorFrame::new(*g);
    let mut operator = StdOp::zero(*g, w_in.clone(), w_out.clone());
    let mut generators = Vec::new();
    for label in labels(k) {
        let space = CartanSpace::new(frame, label);
        let phi = loop {
            let phi = space.solutions().iter().fold(
                SymTensor::zero(n, label.p).with_weight(Scalar::int(2 * label.r as i64)),
                |acc, s| acc.add_scaled(&small(rng), s),
            );
            if !phi.is_zero() {
                break phi;
            }
        };
        let s = CanonicalSymmetry::build(space.split(&phi)?, label, w_in.clone())?;
        operator = operator.add(&s.to_stdop()?.with_weights(w_in.clone(), w_out.clone()));
        generators.push((label, phi));
    }
    let vector = SymTensor::vector(
        (0..n)
            .map(|i| {
                let mut p = Poly::constant(n, small(rng));
                p.add_scaled(&small(rng), &Poly::var(n, (i + 1) % n));
                p
            })
            .collect(),
    );
    let constant = SymTensor::scalar(Poly::constant(n, small(rng)));
    let tail = StdOp::normalize(*g, w_out.clone(), w_out, vec![(vector, 1, 0), (constant, 0, 0)]);
    let trivial = tail.compose(&StdOp::laplacian_power(*g, k, w_in))?;
    operator = operator.add(&trivial);
    Ok(SampledSymmetry { k, operator, generators, trivial })
}
