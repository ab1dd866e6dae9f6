use std::collections::BTreeMap;

use crate::exact_tensor::{Monomial, Poly, Scalar, SparseEchelon, SparseRow};

use super::{SlotKind, TractorError, TractorField, TractorFrame};

/// Parallel extension of a constant tractor given at the origin.
pub fn transport(initial: &TractorField) -> TractorField {
    initial.transform(&initial.frame().transport())
}

/// Largest degree cap tried by [`parallel_basis`] before giving up.
pub const MAX_CAP: u32 = 8;

/// Basis of the parallel sections of the given slot shape with polynomial
/// components, found by an exact kernel computation on a polynomial
/// ansatz. The cap starts at two plus the number of tractor slots and is
/// raised until the dimension is the same for two consecutive caps.
pub fn parallel_basis(
    frame: TractorFrame,
    slots: &[SlotKind],
    weight: Scalar,
) -> Result<Vec<TractorField>, TractorError> {
    let tractor_slots = slots.iter().filter(|s| **s != SlotKind::Tensor).count() as u32;
    let mut cap = 2 + tractor_slots;
    let mut last = parallel_at_cap(frame, slots, &weight, cap);
    while cap < MAX_CAP {
        cap += 1;
        let next = parallel_at_cap(frame, slots, &weight, cap);
        if next.len() == last.len() {
            return Ok(last);
        }
        last = next;
    }
    Err(TractorError::CapTooSmall(cap))
}

fn parallel_at_cap(frame: TractorFrame, slots: &[SlotKind], weight: &Scalar, cap: u32) -> Vec<TractorField> {
    let n = frame.n();
    let zero = TractorField::zero(frame, weight.clone(), slots.to_vec());
    let len = zero.data().len();
    let monos = Monomial::all_up_to_degree(n, cap);
    let unknown = |c: usize, m: usize| c * monos.len() + m;
    let cols = len * monos.len();

    // One equation per (derivative direction, component, monomial).
    let mut rows: BTreeMap<(usize, usize, Monomial), SparseRow> = BTreeMap::new();
    for c in 0..len {
        for (mi, &m) in monos.iter().enumerate() {
            let mut data = zero.data().to_vec();
            data[c] = Poly::term(n, m, Scalar::one());
            let t = TractorField::from_data(frame, weight.clone(), slots.to_vec(), data).expect("shape");
            for a in 0..n {
                for (c2, p) in t.covariant(a).data().iter().enumerate() {
                    for (m2, v) in p.terms() {
                        rows.entry((a, c2, m2)).or_default().insert(unknown(c, mi), v.clone());
                    }
                }
            }
        }
    }
    let mut ech = SparseEchelon::new(cols);
    for row in rows.into_values() {
        ech.insert(row);
    }
    // Form slots must be skew.
    let probe = TractorField::from_data(frame, weight.clone(), slots.to_vec(), (0..len).map(|_| Poly::zero(n)).collect())
        .expect("shape");
    for (c, c2) in skew_partners(&probe) {
        for mi in 0..monos.len() {
            let mut row = SparseRow::new();
            row.insert(unknown(c, mi), Scalar::one());
            *row.entry(unknown(c2, mi)).or_insert_with(Scalar::zero) += Scalar::one();
            if row.values().any(|v| !v.is_zero()) {
                ech.insert(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
        }
    }
    ech.kernel()
        .into_iter()
        .map(|v| {
            let mut data = vec![Poly::zero(n); len];
            for (c, slot) in data.iter_mut().enumerate() {
                for (mi, &m) in monos.iter().enumerate() {
                    slot.add_term(m, &v[unknown(c, mi)]);
                }
            }
            TractorField::from_data(frame, weight.clone(), slots.to_vec(), data).expect("shape")
        })
        .collect()
}

/// Pairs of component indices related by swapping the halves of one form
/// slot (including a component paired with itself on the diagonal).
fn skew_partners(t: &TractorField) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (k, s) in t.slots().iter().enumerate() {
        if *s != SlotKind::Form {
            continue;
        }
        for c in 0..t.data().len() {
            let c2 = t.swap_form_halves(k, c);
            if c <= c2 {
                out.push((c, c2));
            }
        }
    }
    out
}
