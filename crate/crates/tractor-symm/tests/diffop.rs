mod common;

use common::{poly, sym_tensor};
use proptest::prelude::*;
use tractor_symm::exact_tensor::{Metric, Monomial, Poly, Scalar, SymTensor};
use tractor_symm::flat_diffop::StdOp;

/// Raw terms `(T, p, r)`: a coefficient contracted with `p` gradients
/// after `Δʳ`, at most order `max_order`.
fn raw_terms(n: usize, max_order: usize) -> impl Strategy<Value = Vec<(SymTensor, usize, usize)>> {
    let shapes: Vec<(usize, usize)> =
        (0..=max_order).flat_map(|p| (0..=(max_order - p) / 2).map(move |r| (p, r))).collect();
    prop::collection::vec(prop::sample::select(shapes), 1..=3).prop_flat_map(move |chosen| {
        chosen
            .into_iter()
            .map(|(p, r)| sym_tensor(n, p, 1).prop_map(move |t| (t, p, r)))
            .collect::<Vec<_>>()
    })
}

fn op(n: usize, max_order: usize) -> impl Strategy<Value = StdOp> {
    raw_terms(n, max_order).prop_map(move |raw| StdOp::normalize(Metric::euclidean(n), Scalar::zero(), Scalar::zero(), raw))
}

fn laplacian(f: &Poly, n: usize) -> Poly {
    (0..n).fold(Poly::zero(n), |acc, i| &acc + &f.deriv(i).deriv(i))
}

/// `Σ_M (orderings of M) T_M ∂_M Δʳ f` in Euclidean signature.
fn apply_raw(raw: &[(SymTensor, usize, usize)], f: &Poly, n: usize) -> Poly {
    raw.iter().fold(Poly::zero(n), |acc, (t, _, r)| {
        let lap = (0..*r).fold(f.clone(), |g, _| laplacian(&g, n));
        t.components().fold(acc, |acc, (m, c)| {
            let alpha = Monomial::from_exponents(&m.counts(n));
            &acc + &(c * &lap.deriv_multi(alpha)).scale(&m.orderings())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(a in op(3, 2), b in op(3, 2), c in op(3, 2)) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn composition_applies_in_sequence(a in op(3, 3), b in op(3, 3), f in poly(3, 5)) {
        prop_assert_eq!(a.compose(&b).unwrap().apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn normalize_preserves_the_action(raw in raw_terms(3, 4)) {
        let g = Metric::euclidean(3);
        let op = StdOp::normalize(g, Scalar::zero(), Scalar::zero(), raw.clone());
        for m in Monomial::all_up_to_degree(3, 5) {
            let f = Poly::term(3, m, Scalar::one());
            prop_assert_eq!(op.apply(&f), apply_raw(&raw, &f, 3));
        }
    }

    #[test]
    fn reconstruct_recovers_random_operators(o in op(3, 6)) {
        let order = o.order().unwrap_or(0) as u32;
        let back = StdOp::reconstruct(*o.metric(), Scalar::zero(), Scalar::zero(), order + 1, |f| o.apply(f)).unwrap();
        prop_assert_eq!(back, o);
    }
}

#[test]
fn reconstruct_recovers_laplacian_powers() {
    for n in [3, 4] {
        let g = Metric::euclidean(n);
        for k in 1..=3 {
            let lap = StdOp::laplacian_power(g, k, Scalar::zero());
            let back = StdOp::reconstruct(g, Scalar::zero(), lap.w_out().clone(), 2 * k as u32, |f| lap.apply(f)).unwrap();
            assert_eq!(back, lap, "n={n} k={k}");
        }
    }
}
