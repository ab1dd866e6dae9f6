use crate::exact_tensor::{young22_tracefree, Poly, Scalar};
use crate::tractor_calc::{SlotKind, TractorField};

use super::GElement;

fn swap_adjacent(f: &TractorField, i: usize) -> TractorField {
    let mut order: Vec<usize> = (0..f.slots().len()).collect();
    order.swap(i, i + 1);
    f.permute(&order)
}

fn skew(f: &TractorField, i: usize) -> TractorField {
    f.sub(&swap_adjacent(f, i)).scale(&Scalar::ratio(1, 2))
}

fn dim(i: &GElement) -> Scalar {
    Scalar::int(i.tractor().n() as i64)
}

/// `I^{AP} Ī_P{}^B`, two standard slots.
fn chain(i: &GElement, j: &GElement) -> TractorField {
    i.tractor().tensor(j.tractor()).unpack_forms().trace(1, 2).expect("standard slots")
}

/// `⟨I, Ī⟩ = −4n I^{AB} Ī_{AB}`, summed over ordered pairs.
pub fn killing(i: &GElement, j: &GElement) -> Scalar {
    let c = TractorField::contract_leading(i.tractor(), j.tractor()).expect("adjoint shapes");
    let p = c.as_density().expect("fully contracted");
    let pairing = p.as_constant().expect("parallel tractors pair to a constant");
    pairing * (Scalar::int(-4) * dim(i))
}

/// `[I, Ī]^{AB} = 4 I^{[A|P} Ī_P{}^{|B]}`.
pub fn bracket(i: &GElement, j: &GElement) -> GElement {
    let t = skew(&chain(i, j), 0).scale(&Scalar::int(4)).pack(0).expect("skew by construction");
    GElement::new(t).expect("the bracket of parallel tractors is parallel")
}

/// `(I • Ī)^{BB'} = (4/n) I^{P(B} Ī_P{}^{B')₀}`.
pub fn bullet(i: &GElement, j: &GElement) -> TractorField {
    let m = chain(i, j).symmetrize(0);
    tracefree_pair(&m).scale(&(Scalar::ratio(-4, 1) / dim(i)))
}

/// `T^{AB} − (1/N) h^{AB} T_C{}^C` for two standard slots.
fn tracefree_pair(t: &TractorField) -> TractorField {
    let tr = t.trace(0, 1).expect("standard slots");
    let big = Scalar::int(t.frame().rank() as i64);
    t.sub(&tr.times_h().scale(&big.recip()))
}

/// Trace-free part of the `(2,2)` Young projection of `I ⊗ Ī`, two form
/// slots.
pub fn boxtimes(i: &GElement, j: &GElement) -> TractorField {
    let outer = i.tractor().tensor(j.tractor()).unpack_forms();
    young22(&outer)
}

fn young22(t: &TractorField) -> TractorField {
    let frame = *t.frame();
    let data = young22_tracefree(frame.rank(), &frame.h_matrix(), t.data());
    TractorField::from_data(frame, t.weight().clone(), vec![SlotKind::Form, SlotKind::Form], data).expect("rank four")
}

/// The parts of `I ⊗ Ī` in `⊠`, `⊙²₀`, `Λ²` and `ℝ`.
#[derive(Clone, Debug)]
pub struct ProductDecomp {
    pub boxtimes: TractorField,
    pub bullet: TractorField,
    pub bracket: GElement,
    pub killing: Scalar,
    /// `I ⊗ Ī` minus the recombined parts, four standard slots. It lies in
    /// the two components the recombination leaves out, `Λ⁴` and the
    /// trace-free `(2,1,1)` hook.
    pub residual: TractorField,
}

impl ProductDecomp {
    /// The residual has no `⊠` part and no traces, so the four parts
    /// reproduce `I ⊗ Ī` on everything but `Λ⁴ ⊕ (2,1,1)₀`.
    pub fn reconstructs(&self) -> bool {
        let traces_vanish = [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .all(|&(a, b)| self.residual.trace(a, b).expect("standard slots").is_zero());
        traces_vanish && young22(&self.residual).is_zero()
    }
}

/// `h^{A⁰B⁰} X^{A¹B¹}` skewed in `A⁰A¹` and in `B⁰B¹`.
fn h_times(x: &TractorField) -> TractorField {
    let raw = x.times_h().permute(&[0, 2, 1, 3]);
    skew(&skew(&raw, 0), 2)
}

pub fn decompose(i: &GElement, j: &GElement) -> ProductDecomp {
    let n = dim(i);
    let boxtimes = boxtimes(i, j);
    let bullet = bullet(i, j);
    let bracket = bracket(i, j);
    let killing = killing(i, j);

    let frame = *i.tractor().frame();
    let weight = i.tractor().weight() + j.tractor().weight();
    let scalar = TractorField::density(frame, weight, Poly::constant(frame.n(), killing.clone()));
    let hh = h_times(&scalar.times_h());
    let killing_coeff = (Scalar::int(2) * &n * (&n + &Scalar::one()) * (&n + &Scalar::int(2))).recip();

    let mut residual = i.tractor().tensor(j.tractor()).unpack_forms();
    residual = residual.sub(&boxtimes.unpack_forms());
    residual.add_scaled(&killing_coeff, &hh);
    // The bracket enters with −1/n: the trace of I ⊗ Ī has skew part −[I,Ī]/4.
    residual.add_scaled(&n.recip(), &h_times(&bracket.tractor().unpack_forms()));
    residual = residual.sub(&h_times(&bullet));
    ProductDecomp { boxtimes, bullet, bracket, killing, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tensor::{Metric, SymTensor};
    use crate::symm_algebra::AdjointSpace;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn translation(a: usize) -> SymTensor {
        SymTensor::vector((0..3).map(|b| if a == b { Poly::one(3) } else { Poly::zero(3) }).collect())
    }

    fn dilation() -> SymTensor {
        SymTensor::vector(vec![x(0), x(1), x(2)])
    }

    /// `2 x₁ x − |x|² e₁`.
    fn special_conformal() -> SymTensor {
        let sq = &(&x(0) * &x(0)) + &(&(&x(1) * &x(1)) + &(&x(2) * &x(2)));
        let comps = (0..3).map(|b| {
            let v = (&x(0) * &x(b)).scale(&Scalar::int(2));
            if b == 0 { &v - &sq } else { v }
        });
        SymTensor::vector(comps.collect())
    }

    #[test]
    fn translations_under_dilation() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let e1 = sp.element(&translation(0)).unwrap();
        let dil = sp.element(&dilation()).unwrap();
        assert_eq!(bracket(&e1, &dil), e1);
        assert_eq!(killing(&e1, &sp.element(&translation(1)).unwrap()), Scalar::zero());
    }

    #[test]
    fn translation_pairs_with_its_special_conformal_partner() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let e1 = sp.element(&translation(0)).unwrap();
        let k1 = sp.element(&special_conformal()).unwrap();
        let v = killing(&e1, &k1);
        assert!(!v.is_zero());
        assert_eq!(v, killing(&k1, &e1));
    }

    #[test]
    fn decomposition_of_a_square() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let e1 = sp.element(&translation(0)).unwrap();
        let d = decompose(&e1, &e1);
        assert!(d.bracket.tractor().is_zero());
        assert!(d.killing.is_zero());
        assert!(d.reconstructs());
    }

    #[test]
    fn decomposition_of_basis_pairs() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let basis = sp.basis();
        for (a, i) in basis.iter().enumerate() {
            for j in &basis[a..] {
                let (d, e) = (decompose(i, j), decompose(j, i));
                assert!(d.reconstructs());
                assert_eq!(d.bracket, e.bracket.scale(&-Scalar::one()));
                assert_eq!(d.bullet, e.bullet);
                assert_eq!(d.boxtimes, e.boxtimes);
                assert_eq!(d.killing, e.killing);
            }
        }
    }
}
