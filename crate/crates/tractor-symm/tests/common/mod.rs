#![allow(dead_code)]

use proptest::prelude::*;
use tractor_symm::exact_tensor::{Monomial, Multiset, Poly, Scalar, SymTensor};

pub fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3).prop_map(|(a, b)| Scalar::ratio(a, b))
}

/// Up to four terms of degree at most `degree` in `n` variables.
pub fn poly(n: usize, degree: u32) -> impl Strategy<Value = Poly> {
    let monos = Monomial::all_up_to_degree(n, degree);
    prop::collection::vec((0..monos.len(), scalar()), 0..=4).prop_map(move |terms| {
        terms.into_iter().fold(Poly::zero(n), |mut p, (i, c)| {
            p.add_term(monos[i], &c);
            p
        })
    })
}

/// A symmetric tensor with every component drawn from [`poly`].
pub fn sym_tensor(n: usize, rank: usize, degree: u32) -> impl Strategy<Value = SymTensor> {
    let slots = Multiset::all(n, rank);
    prop::collection::vec(poly(n, degree), slots.len()).prop_map(move |comps| {
        let mut t = SymTensor::zero(n, rank);
        for (m, p) in slots.iter().zip(comps) {
            t.set(m.clone(), p);
        }
        t
    })
}
