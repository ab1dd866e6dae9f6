use std::sync::OnceLock;

use proptest::prelude::*;
use tractor_symm::canon_symm::{classify, leading_checks, verify_symmetry, CanonicalSymmetry};
use tractor_symm::ckt_solve::{CartanSpace, CktLabel};
use tractor_symm::exact_tensor::{Metric, Poly, Scalar, SymTensor};
use tractor_symm::flat_diffop::{OpType, StdOp};
use tractor_symm::tractor_calc::{TractorField, TractorFrame};

fn euclid() -> Metric {
    Metric::euclidean(3)
}

fn space(label: CktLabel) -> CartanSpace {
    CartanSpace::new(TractorFrame::new(euclid()), label)
}

fn sample_indices(dim: usize) -> Vec<usize> {
    let mut v = vec![0, dim / 3, dim / 2, dim - 1];
    v.dedup();
    v
}

fn w_in(k: usize, g: &Metric) -> Scalar {
    Scalar::int(k as i64) - Scalar::ratio(g.dim() as i64, 2)
}

#[test]
fn symmetry_identity_across_labels_and_powers() {
    let g = euclid();
    for (label, ks) in [
        (CktLabel::new(1, 0), vec![1, 2, 3]),
        (CktLabel::new(0, 1), vec![1, 2, 3]),
        (CktLabel::new(2, 0), vec![1, 2]),
        (CktLabel::new(1, 1), vec![2]),
    ] {
        let sp = space(label);
        for i in sample_indices(sp.dimension()) {
            for &k in &ks {
                let rep = verify_symmetry(&sp.solutions()[i], label, k, &g).unwrap();
                assert!(rep.verdict.passed(), "{label} #{i} k={k}: {:?}", rep.residual);
                assert_eq!(rep.trivial, label.r >= k);
            }
        }
    }
}

#[test]
fn symmetry_identity_in_lorentzian_signature() {
    let g = Metric::new(2, 1).unwrap();
    for label in [CktLabel::new(1, 0), CktLabel::new(0, 1), CktLabel::new(2, 0)] {
        let sp = CartanSpace::new(TractorFrame::new(g), label);
        for i in sample_indices(sp.dimension()) {
            assert!(verify_symmetry(&sp.solutions()[i], label, 2, &g).unwrap().verdict.passed(), "{label} #{i}");
        }
    }
}

#[test]
fn density_solution_at_k1_is_a_trivial_symmetry() {
    let g = euclid();
    let phi = SymTensor::scalar(Poly::var(3, 0)).with_weight(Scalar::int(2));
    let rep = verify_symmetry(&phi, CktLabel::new(0, 1), 1, &g).unwrap();
    assert!(rep.verdict.passed() && rep.trivial);
    let json = rep.to_json();
    assert_eq!(json["verdict"], "pass");
    assert_eq!(json["residual_terms"].as_array().map(Vec::len), Some(0));
}

#[test]
fn leading_term_properties_for_both_weights() {
    let g = euclid();
    for label in [CktLabel::new(1, 0), CktLabel::new(0, 1), CktLabel::new(2, 0), CktLabel::new(1, 1)] {
        let sp = space(label);
        for i in sample_indices(sp.dimension()) {
            for k in [label.r + 1, label.r + 2] {
                let s = CanonicalSymmetry::build(sp.parallel(i), label, w_in(k, &g)).unwrap();
                let s_out = s.at_weight(-(Scalar::int(k as i64) + Scalar::ratio(3, 2)));
                let (a, b) = (s.to_stdop().unwrap(), s_out.to_stdop().unwrap());
                let rep = leading_checks(&[&a, &b], &sp.solutions()[i], label);
                assert!(rep.all(), "{label} #{i} k={k}: {rep:?}");
            }
        }
    }
}

#[test]
fn special_conformal_field_has_lower_terms() {
    let g = euclid();
    let label = CktLabel::new(1, 0);
    let sp = space(label);
    let last = sp.dimension() - 1;
    let op = CanonicalSymmetry::build(sp.parallel(last), label, w_in(2, &g)).unwrap().to_stdop().unwrap();
    assert!(op.term(OpType::new(0, 0)).is_some());
    assert!(leading_checks(&[&op], &sp.solutions()[last], label).all());
}

#[test]
fn dilation_and_translation_normal_forms() {
    let g = euclid();
    let label = CktLabel::new(1, 0);
    let x = |i| Poly::var(3, i);
    let dil = SymTensor::vector(vec![x(0), x(1), x(2)]);
    for w in [Scalar::int(1), Scalar::ratio(-1, 2)] {
        let s = CanonicalSymmetry::from_solution(&dil, label, &g, w.clone()).unwrap();
        let op = s.to_stdop().unwrap();
        let expected = StdOp::normalize(
            g,
            w.clone(),
            w.clone(),
            vec![(dil.clone(), 1, 0), (SymTensor::scalar(Poly::constant(3, -w.clone())), 0, 0)],
        );
        assert!(op == expected, "w={w}: {op:?}");
        assert!(op.agrees_on_monomials(&expected, 4));
        let f = &(&x(0) * &x(0)) * &x(2);
        assert_eq!(s.apply(&f), op.apply(&f));
    }
}

#[test]
fn normal_form_reproduces_the_evaluator() {
    for label in [CktLabel::new(2, 0), CktLabel::new(1, 1), CktLabel::new(0, 2)] {
        let sp = space(label);
        let i = sp.dimension() - 1;
        let s = CanonicalSymmetry::build(sp.parallel(i), label, Scalar::ratio(3, 2)).unwrap();
        let op = s.to_stdop().unwrap();
        let order = label.p + 2 * label.r;
        for m in tractor_symm::exact_tensor::Monomial::all_up_to_degree(3, order as u32 + 2) {
            let f = Poly::term(3, m, Scalar::one());
            assert_eq!(op.apply(&f), s.apply(&f), "{label}");
        }
    }
}

/// Applying `𝔻` before `𝔻²` and moving the form slot to the front gives the
/// same operator once contracted with an irreducible parallel tractor.
#[test]
fn family_order_is_immaterial_after_contraction() {
    let label = CktLabel::new(1, 1);
    let sp = space(label);
    for i in sample_indices(sp.dimension()) {
        let s = CanonicalSymmetry::build(sp.parallel(i), label, Scalar::ratio(1, 2)).unwrap();
        for m in tractor_symm::exact_tensor::Monomial::all_up_to_degree(3, 3) {
            let f = Poly::term(3, m, Scalar::one());
            let field = TractorField::density(TractorFrame::new(euclid()), Scalar::ratio(1, 2), f.clone());
            let swapped = field.double_d().double_d2().permute(&[2, 0, 1]);
            let contracted = TractorField::contract_leading(s.parallel(), &swapped).unwrap();
            assert_eq!(contracted.as_density().unwrap(), &s.apply(&f), "#{i}");
        }
    }
}

fn killing_space() -> &'static CartanSpace {
    static S: OnceLock<CartanSpace> = OnceLock::new();
    S.get_or_init(|| space(CktLabel::new(1, 0)))
}

fn density_space() -> &'static CartanSpace {
    static S: OnceLock<CartanSpace> = OnceLock::new();
    S.get_or_init(|| space(CktLabel::new(0, 1)))
}

fn combination(sp: &CartanSpace, coeffs: &[i64]) -> SymTensor {
    let label = sp.label();
    let n = 3;
    coeffs
        .iter()
        .zip(sp.solutions())
        .fold(SymTensor::zero(n, label.p).with_weight(Scalar::int(2 * label.r as i64)), |acc, (c, s)| {
            acc.add_scaled(&Scalar::int(*c), s)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn classify_separates_canonical_and_trivial_parts(
        a in prop::collection::vec(-2i64..=2, 10),
        b in prop::collection::vec(-2i64..=2, 14),
        tail in prop::collection::vec(-3i64..=3, 4),
    ) {
        let g = euclid();
        let k = 2;
        let w = w_in(k, &g);
        let phi1 = combination(killing_space(), &a);
        let phi2 = combination(density_space(), &b);
        prop_assume!(!phi1.is_zero() && !phi2.is_zero());
        let s1 = CanonicalSymmetry::from_solution(&phi1, CktLabel::new(1, 0), &g, w.clone()).unwrap().to_stdop().unwrap();
        let s2 = CanonicalSymmetry::from_solution(&phi2, CktLabel::new(0, 1), &g, w.clone()).unwrap().to_stdop().unwrap();
        let x = |i| Poly::var(3, i);
        let t_coeff = SymTensor::vector(vec![
            x(0).scale(&Scalar::int(tail[0])),
            Poly::constant(3, Scalar::int(tail[1])),
            &x(1) * &x(2).scale(&Scalar::int(tail[2])),
        ]);
        let t = StdOp::normalize(g, &w - &Scalar::int(2 * k as i64), w.clone(), vec![(t_coeff, 1, 0), (SymTensor::scalar(Poly::constant(3, Scalar::int(tail[3]))), 0, 0)]);
        let lap = StdOp::laplacian_power(g, k, w.clone());
        let trivial = t.compose(&lap).unwrap();
        let total = s1.add(&s2).add(&trivial);
        let c = classify(&total, k).unwrap();
        prop_assert!(c.remainder.is_zero());
        prop_assert!(c.trivial == trivial);
        prop_assert_eq!(c.components, vec![(CktLabel::new(0, 1), phi2), (CktLabel::new(1, 0), phi1)]);
    }
}
