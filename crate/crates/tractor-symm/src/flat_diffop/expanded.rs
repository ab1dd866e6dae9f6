use std::collections::BTreeMap;

use crate::exact_tensor::{Metric, Monomial, Multiset, Poly, Scalar};

/// Operator written as `Σ c_α ∂^α` with polynomial coefficients, keyed by
/// the derivative exponent vector `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Expanded {
    pub n: usize,
    pub terms: BTreeMap<Monomial, Poly>,
}

/// `α! / (δ! (α−δ)!)` summed coordinatewise.
fn multi_binomial(n: usize, alpha: Monomial, delta: Monomial) -> Scalar {
    (0..n)
        .map(|i| Scalar::binomial(alpha.exponent(i) as i64, delta.exponent(i) as i64))
        .product()
}

/// Every exponent vector `δ ≤ α`.
fn below(n: usize, alpha: Monomial) -> Vec<Monomial> {
    let mut out = vec![Monomial::ONE];
    for i in 0..n {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=alpha.exponent(i) {
                let mut exps = m.exponents(n);
                exps[i] = e;
                next.push(Monomial::from_exponents(&exps));
            }
        }
        out = next;
    }
    out
}

impl Expanded {
    pub fn zero(n: usize) -> Self {
        Expanded { n, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, alpha: Monomial, c: &Scalar, p: &Poly) {
        let e = self.terms.entry(alpha).or_insert_with(|| Poly::zero(self.n));
        e.add_scaled(c, p);
        if e.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    /// `Δ^r = Σ_{|β|=r} r!/β! Π g_ii^{β_i} ∂^{2β}`.
    pub fn laplacian_power(g: &Metric, r: usize) -> Self {
        let n = g.dim();
        let mut out = Expanded::zero(n);
        for beta in Monomial::all_of_degree(n, r as u32) {
            let exps = beta.exponents(n);
            let mut c = Scalar::factorial(r as u32);
            for (i, &e) in exps.iter().enumerate() {
                c = c / Scalar::factorial(e) * Scalar::int(g.diag(i).pow(e));
            }
            let doubled: Vec<u32> = exps.iter().map(|e| 2 * e).collect();
            out.add(Monomial::from_exponents(&doubled), &c, &Poly::one(n));
        }
        out
    }

    /// `φ^{a1…ap} ∇_{a1}…∇_{ap}` for symmetric `φ` given on multisets.
    pub fn gradient_contraction<'a>(n: usize, comps: impl Iterator<Item = (&'a Multiset, &'a Poly)>) -> Self {
        let mut out = Expanded::zero(n);
        for (m, v) in comps {
            let alpha = Monomial::from_exponents(&m.counts(n));
            out.add(alpha, &m.orderings(), v);
        }
        out
    }

    /// Composition with all derivatives moved to the right in one pass.
    pub fn compose(&self, rhs: &Expanded) -> Expanded {
        let n = self.n;
        let mut out = Expanded::zero(n);
        for (&alpha, a) in &self.terms {
            let deltas = below(n, alpha);
            for (&beta, b) in &rhs.terms {
                for &delta in &deltas {
                    let db = b.deriv_multi(delta);
                    if db.is_zero() {
                        continue;
                    }
                    let c = multi_binomial(n, alpha, delta);
                    let target = delta.quotient_of(alpha) * beta;
                    out.add(target, &c, &(a * &db));
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (&alpha, c) in &self.terms {
            let d = f.deriv_multi(alpha);
            if !d.is_zero() {
                out.add_product(c, &d);
            }
        }
        out
    }
}
