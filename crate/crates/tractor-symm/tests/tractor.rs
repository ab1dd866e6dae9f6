mod common;

use std::sync::OnceLock;

use common::{poly, scalar};
use proptest::prelude::*;
use tractor_symm::ckt_solve::{ckt_apply, extract, lie_derivative, CartanSpace, CktError, CktLabel, LieSection};
use tractor_symm::exact_tensor::{Metric, Multiset, Poly, Scalar, SymTensor};
use tractor_symm::tractor_calc::{SlotKind, TractorField, TractorFrame};

fn frame() -> TractorFrame {
    TractorFrame::new(Metric::euclidean(3))
}

fn standard_field() -> impl Strategy<Value = TractorField> {
    (scalar(), prop::collection::vec(poly(3, 3), 5)).prop_map(|(w, data)| {
        TractorField::from_data(frame(), w, vec![SlotKind::Standard], data).unwrap()
    })
}

fn density() -> impl Strategy<Value = TractorField> {
    (scalar(), poly(3, 4)).prop_map(|(w, f)| TractorField::density(frame(), w, f))
}

/// `−𝔻_{(A}{}^P 𝔻_{|P|B)}`.
fn minus_square(f: &TractorField) -> TractorField {
    f.double_d().double_d().unpack_forms().trace(1, 2).unwrap().symmetrize(0).scale(&Scalar::int(-1))
}

fn space(label: CktLabel) -> &'static CartanSpace {
    static KILLING: OnceLock<CartanSpace> = OnceLock::new();
    static DENSITY: OnceLock<CartanSpace> = OnceLock::new();
    let cell = if label == CktLabel::new(1, 0) { &KILLING } else { &DENSITY };
    cell.get_or_init(|| CartanSpace::new(frame(), label))
}

fn combination(label: CktLabel, coeffs: &[Scalar]) -> SymTensor {
    let sp = space(label);
    coeffs.iter().zip(sp.solutions()).fold(
        SymTensor::zero(3, label.p).with_weight(Scalar::int(2 * label.r as i64)),
        |acc, (c, s)| acc.add_scaled(c, s),
    )
}

fn labelled_coeffs() -> impl Strategy<Value = (CktLabel, Vec<Scalar>, Vec<Scalar>)> {
    prop_oneof![Just(CktLabel::new(1, 0)), Just(CktLabel::new(0, 1))].prop_flat_map(|label| {
        let dim = space(label).dimension();
        (Just(label), prop::collection::vec(scalar(), dim), prop::collection::vec(scalar(), dim))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariant_derivatives_commute(v in standard_field(), a in 0usize..3, b in 0usize..3) {
        prop_assert_eq!(v.covariant(a).covariant(b), v.covariant(b).covariant(a));
    }

    #[test]
    fn metric_is_parallel(w in scalar(), a in 0usize..3) {
        let h = TractorField::density(frame(), w, Poly::one(3)).times_h();
        prop_assert!(h.covariant(a).is_zero());
    }

    #[test]
    fn double_d2_is_a_symmetric_square(f in density()) {
        let d2 = f.double_d2();
        prop_assert_eq!(d2.permute(&[1, 0]), d2.clone());
        prop_assert_eq!(d2, minus_square(&f));
    }

    #[test]
    fn split_is_linear_and_parallel((label, a, b) in labelled_coeffs(), c in scalar()) {
        let sp = space(label);
        let (phi, psi) = (combination(label, &a), combination(label, &b));
        let sum = phi.add_scaled(&c, &psi);
        let (i, j) = (sp.split(&phi).unwrap(), sp.split(&psi).unwrap());
        let mut expected = i.clone();
        expected.add_scaled(&c, &j);
        let lifted = sp.split(&sum).unwrap();
        prop_assert_eq!(&lifted, &expected);
        prop_assert!((0..3).all(|x| lifted.covariant(x).is_zero()));
        prop_assert_eq!(extract(&lifted, label).unwrap(), sum);
    }

    #[test]
    fn perturbed_solutions_are_rejected((label, a, _) in labelled_coeffs(), slot in 0usize..3) {
        let phi = combination(label, &a);
        // A quartic in one variable solves neither equation.
        let x = Poly::var(3, slot);
        let quartic = &(&x * &x) * &(&x * &x);
        let m = Multiset::new(vec![slot as u8; label.p]);
        let bump = SymTensor::basis(3, m, quartic).with_weight(phi.weight().clone());
        let bumped = phi.add(&bump);
        let g = Metric::euclidean(3);
        prop_assert!(!ckt_apply(&bumped, label, &g).unwrap().is_zero());
        let rejected = matches!(space(label).split(&bumped), Err(CktError::NotASolution { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn contraction_with_double_d_is_the_lie_derivative(
        coeffs in prop::collection::vec(scalar(), 10),
        w in scalar(),
        f in poly(3, 4),
        cov in prop::collection::vec(poly(3, 3), 3),
    ) {
        let label = CktLabel::new(1, 0);
        let phi = combination(label, &coeffs);
        let g = Metric::euclidean(3);
        let i = space(label).split(&phi).unwrap();
        let dens = TractorField::density(frame(), w.clone(), f.clone());
        let lhs = TractorField::contract_leading(&i, &dens.double_d()).unwrap();
        let rhs = lie_derivative(&phi, &w, &LieSection::Density(f), &g);
        prop_assert_eq!(LieSection::Density(lhs.as_density().unwrap().clone()), rhs);
        let field = TractorField::from_data(frame(), w.clone(), vec![SlotKind::Tensor], cov.clone()).unwrap();
        let lhs = TractorField::contract_leading(&i, &field.double_d()).unwrap();
        let rhs = lie_derivative(&phi, &w, &LieSection::Covector(cov), &g);
        prop_assert_eq!(LieSection::Covector(lhs.data().to_vec()), rhs);
    }
}
