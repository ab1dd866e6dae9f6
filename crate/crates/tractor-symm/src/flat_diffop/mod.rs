//! Differential operators on densities over flat space in the normal form
//! `Σ φ_r^{a1…ap} ∇_{a1}…∇_{ap} Δ^r` with trace-free symmetric coefficients.

mod expanded;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::exact_tensor::{Metric, Monomial, Multiset, Poly, Scalar, SymTensor};
pub(crate) use expanded::Expanded;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpError {
    #[error("weight mismatch: left operator expects {expected}, right operator produces {found}")]
    WeightMismatch { expected: Box<Scalar>, found: Box<Scalar> },
    #[error("the zero operator has no greatest term")]
    ZeroOperator,
    #[error("oracle is not a differential operator of order {order}: mismatch on degree {degree} monomials")]
    InconsistentOracle { order: u32, degree: u32 },
}

/// Term type `⟨p|r⟩`: `p` free gradients followed by `Δ^r`.
///
/// Ordered by level `p+r`, ties broken by formal order `p+2r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OpType {
    pub p: usize,
    pub r: usize,
}

impl OpType {
    pub fn new(p: usize, r: usize) -> Self {
        OpType { p, r }
    }

    pub fn order(self) -> usize {
        self.p + 2 * self.r
    }

    pub fn level(self) -> usize {
        self.p + self.r
    }
}

impl Ord for OpType {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.level(), self.order()).cmp(&(other.level(), other.order()))
    }
}

impl PartialOrd for OpType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}|{}>", self.p, self.r)
    }
}

/// Operator `𝓔[w_in] → 𝓔[w_out]` in normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct StdOp {
    metric: Metric,
    w_in: Scalar,
    w_out: Scalar,
    terms: BTreeMap<OpType, SymTensor>,
}

impl StdOp {
    pub fn zero(metric: Metric, w_in: Scalar, w_out: Scalar) -> Self {
        StdOp { metric, w_in, w_out, terms: BTreeMap::new() }
    }

    pub fn identity(metric: Metric, w: Scalar) -> Self {
        StdOp::laplacian_power(metric, 0, w)
    }

    /// `Δ^k : 𝓔[w] → 𝓔[w−2k]`.
    pub fn laplacian_power(metric: Metric, k: usize, w_in: Scalar) -> Self {
        let n = metric.dim();
        let w_out = &w_in - &Scalar::int(2 * k as i64);
        let mut op = StdOp::zero(metric, w_in, w_out);
        op.terms.insert(OpType::new(0, k), SymTensor::scalar(Poly::one(n)));
        op
    }

    /// Multiplication by a polynomial on `𝓔[w]`.
    pub fn multiplication(metric: Metric, w: Scalar, f: Poly) -> Self {
        StdOp::normalize(metric, w.clone(), w, vec![(SymTensor::scalar(f), 0, 0)])
    }

    /// Reduce symmetric coefficients of `T ∇^p Δ^r` to normal form by
    /// turning traces into extra Laplacians.
    pub fn normalize(metric: Metric, w_in: Scalar, w_out: Scalar, raw: Vec<(SymTensor, usize, usize)>) -> Self {
        let mut op = StdOp::zero(metric, w_in, w_out);
        for (t, p, r) in raw {
            assert_eq!(t.rank(), p, "coefficient rank must equal gradient count");
            for (q, part) in t.decompose(&metric).into_iter().enumerate() {
                op.add_term(OpType::new(p - 2 * q, r + q), &Scalar::one(), &part);
            }
        }
        op
    }

    fn add_term(&mut self, ty: OpType, c: &Scalar, t: &SymTensor) {
        if t.is_zero() || c.is_zero() {
            return;
        }
        let n = self.metric.dim();
        let cur = self.terms.remove(&ty).unwrap_or_else(|| SymTensor::zero(n, ty.p));
        let next = cur.add_scaled(c, t).trace_free(&self.metric);
        if !next.is_zero() {
            self.terms.insert(ty, next);
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn w_in(&self) -> &Scalar {
        &self.w_in
    }

    pub fn w_out(&self) -> &Scalar {
        &self.w_out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&OpType, &SymTensor)> {
        self.terms.iter()
    }

    pub fn term(&self, ty: OpType) -> Option<&SymTensor> {
        self.terms.get(&ty)
    }

    /// Formal order, the maximum of `p+2r` over stored terms.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|t| t.order()).max()
    }

    pub fn level(&self) -> Option<usize> {
        self.terms.keys().map(|t| t.level()).max()
    }

    /// The ⊴-maximal term.
    pub fn greatest_term(&self) -> Result<(OpType, &SymTensor), OpError> {
        self.terms.iter().next_back().map(|(t, c)| (*t, c)).ok_or(OpError::ZeroOperator)
    }

    pub fn add(&self, other: &StdOp) -> StdOp {
        self.add_scaled(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &StdOp) -> StdOp {
        self.add_scaled(&-Scalar::one(), other)
    }

    pub fn add_scaled(&self, c: &Scalar, other: &StdOp) -> StdOp {
        let mut out = self.clone();
        for (ty, t) in &other.terms {
            out.add_term(*ty, c, t);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> StdOp {
        let mut out = StdOp::zero(self.metric, self.w_in.clone(), self.w_out.clone());
        for (ty, t) in &self.terms {
            out.add_term(*ty, c, t);
        }
        out
    }

    /// Relabel the weights; in the flat trivialization the action is unchanged.
    pub fn with_weights(mut self, w_in: Scalar, w_out: Scalar) -> StdOp {
        self.w_in = w_in;
        self.w_out = w_out;
        self
    }

    /// Split into the part with `r < k` and the part with `r ≥ k`.
    pub fn split_at_power(&self, k: usize) -> (StdOp, StdOp) {
        let mut low = StdOp::zero(self.metric, self.w_in.clone(), self.w_out.clone());
        let mut high = low.clone();
        for (ty, t) in &self.terms {
            let dst = if ty.r < k { &mut low } else { &mut high };
            dst.terms.insert(*ty, t.clone());
        }
        (low, high)
    }

    pub(crate) fn to_expanded(&self) -> Expanded {
        let n = self.metric.dim();
        let mut out = Expanded::zero(n);
        for (ty, t) in &self.terms {
            let grad = Expanded::gradient_contraction(n, t.components());
            let lap = Expanded::laplacian_power(&self.metric, ty.r);
            for (alpha, c) in grad.terms {
                for (beta, d) in &lap.terms {
                    out.add(alpha * *beta, &Scalar::one(), &(&c * d));
                }
            }
        }
        out
    }

    pub(crate) fn from_expanded(metric: Metric, w_in: Scalar, w_out: Scalar, e: &Expanded) -> StdOp {
        let n = metric.dim();
        let mut by_order: BTreeMap<usize, SymTensor> = BTreeMap::new();
        for (alpha, c) in &e.terms {
            let m = Multiset::from_counts(&alpha.exponents(n));
            let p = m.len();
            let slot = by_order.entry(p).or_insert_with(|| SymTensor::zero(n, p));
            let coeff = c.scale(&m.orderings().recip());
            *slot = slot.add(&SymTensor::basis(n, m, coeff));
        }
        StdOp::normalize(metric, w_in, w_out, by_order.into_iter().map(|(p, t)| (t, p, 0)).collect())
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let n = self.metric.dim();
        let mut out = Poly::zero(n);
        for (ty, t) in &self.terms {
            let lap = Expanded::laplacian_power(&self.metric, ty.r).apply(f);
            for (m, c) in t.components() {
                let d = lap.deriv_multi(Monomial::from_exponents(&m.counts(n)));
                if !d.is_zero() {
                    out.add_scaled(&m.orderings(), &(c * &d));
                }
            }
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &StdOp) -> Result<StdOp, OpError> {
        if self.w_in != rhs.w_out {
            return Err(OpError::WeightMismatch { expected: Box::new(self.w_in.clone()), found: Box::new(rhs.w_out.clone()) });
        }
        let e = self.to_expanded().compose(&rhs.to_expanded());
        Ok(StdOp::from_expanded(self.metric, rhs.w_in.clone(), self.w_out.clone(), &e))
    }

    /// Recover an operator of order at most `order` from its action on
    /// monomials. The action is also checked on monomials one degree higher.
    pub fn reconstruct(
        metric: Metric,
        w_in: Scalar,
        w_out: Scalar,
        order: u32,
        oracle: impl Fn(&Poly) -> Poly,
    ) -> Result<StdOp, OpError> {
        let n = metric.dim();
        let mut e = Expanded::zero(n);
        // L(x^β) = Σ_{α≤β} c_α β!/(β−α)! x^{β−α}, solved in increasing |β|.
        for beta in Monomial::all_up_to_degree(n, order) {
            let mono = Poly::term(n, beta, Scalar::one());
            let mut rest = &oracle(&mono) - &e.apply(&mono);
            let fact: Scalar = (0..n).map(|i| Scalar::factorial(beta.exponent(i))).product();
            rest = rest.scale(&fact.recip());
            e.add(beta, &Scalar::one(), &rest);
        }
        for beta in Monomial::all_of_degree(n, order + 1) {
            let mono = Poly::term(n, beta, Scalar::one());
            if oracle(&mono) != e.apply(&mono) {
                return Err(OpError::InconsistentOracle { order, degree: order + 1 });
            }
        }
        Ok(StdOp::from_expanded(metric, w_in, w_out, &e))
    }

    /// Independent equality test: agreement on all monomials up to `degree`.
    pub fn agrees_on_monomials(&self, other: &StdOp, degree: u32) -> bool {
        let n = self.metric.dim();
        Monomial::all_up_to_degree(n, degree).into_iter().all(|m| {
            let f = Poly::term(n, m, Scalar::one());
            self.apply(&f) == other.apply(&f)
        })
    }

    /// Canonical JSON form: terms sorted ⊴-descending.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(ty, t)| json!({ "p": ty.p, "r": ty.r, "coefficient": t }))
            .collect();
        json!({ "w_in": self.w_in, "w_out": self.w_out, "terms": terms })
    }

    /// Table with rows indexed by formal order and columns by Δ-power.
    pub fn type_table(&self) -> String {
        let Some(max_o) = self.order() else { return "0\n".into() };
        let max_r = self.terms.keys().map(|t| t.r).max().unwrap_or(0);
        let mut s = String::from("order");
        for r in 0..=max_r {
            s += &format!("\tD^{r}");
        }
        s.push('\n');
        for o in (0..=max_o).rev() {
            s += &o.to_string();
            for r in 0..=max_r {
                let cell = (o >= 2 * r)
                    .then(|| self.terms.get(&OpType::new(o - 2 * r, r)))
                    .flatten()
                    .map_or(".".to_string(), |_| format!("<{}|{r}>", o - 2 * r));
                s += &format!("\t{cell}");
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for StdOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for StdOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (ty, t) in self.terms.iter().rev() {
            writeln!(f, "{ty}:")?;
            for (m, c) in t.components() {
                writeln!(f, "  [{m}] {c}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g3() -> Metric {
        Metric::euclidean(3)
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn e(idx: &[u8], v: Poly) -> SymTensor {
        SymTensor::basis(3, Multiset::new(idx.to_vec()), v)
    }

    #[test]
    fn laplacian_examples() {
        let lap = StdOp::laplacian_power(g3(), 1, Scalar::zero());
        assert_eq!(lap.apply(&(&x(0) * &x(0))), Poly::constant(3, Scalar::int(2)));
        assert!(lap.apply(&(&x(0) * &x(1))).is_zero());
        let id = StdOp::identity(g3(), Scalar::zero());
        assert_eq!(id.apply(&x(2)), x(2));
    }

    #[test]
    fn bilaplacian_of_r4_by_hand() {
        // |x|^4 = Σ x_i^4 + 2 Σ_{i<j} x_i² x_j²; Δ|x|^4 = 4(n+2)|x|², Δ²|x|^4 = 8n(n+2).
        let r2 = (0..3).fold(Poly::zero(3), |acc, i| &acc + &(&x(i) * &x(i)));
        let r4 = &r2 * &r2;
        let bi = StdOp::laplacian_power(g3(), 2, Scalar::zero());
        assert_eq!(bi.apply(&r4), Poly::constant(3, Scalar::int(120)));
    }

    #[test]
    fn normalize_e1e1() {
        let op = StdOp::normalize(g3(), Scalar::zero(), Scalar::zero(), vec![(e(&[0, 0], Poly::one(3)), 2, 0)]);
        assert_eq!(op.term(OpType::new(0, 1)).unwrap().get(&Multiset::empty()), Poly::constant(3, Scalar::ratio(1, 3)));
        let tf = op.term(OpType::new(2, 0)).unwrap();
        assert_eq!(tf.get(&Multiset::new(vec![0, 0])), Poly::constant(3, Scalar::ratio(2, 3)));
        assert_eq!(tf.get(&Multiset::new(vec![1, 1])), Poly::constant(3, Scalar::ratio(-1, 3)));
        let g = SymTensor::metric(3, &g3());
        let lap = StdOp::normalize(g3(), Scalar::zero(), Scalar::zero(), vec![(g, 2, 0)]);
        assert_eq!(lap, StdOp::laplacian_power(g3(), 1, Scalar::zero()).with_weights(Scalar::zero(), Scalar::zero()));
    }

    #[test]
    fn compose_laplacian_with_x_dx() {
        let w = Scalar::zero();
        let xd = StdOp::normalize(g3(), w.clone(), w.clone(), vec![(e(&[0], x(0)), 1, 0)]);
        let lap = StdOp::laplacian_power(g3(), 1, w.clone());
        let c = lap.compose(&xd).unwrap();
        let two = c.term(OpType::new(2, 0)).unwrap();
        assert_eq!(two.get(&Multiset::new(vec![0, 0])), Poly::constant(3, Scalar::ratio(4, 3)));
        assert_eq!(c.term(OpType::new(0, 1)).unwrap().get(&Multiset::empty()), Poly::constant(3, Scalar::ratio(2, 3)));
        assert_eq!(c.term(OpType::new(1, 1)).unwrap().get(&Multiset::new(vec![0])), x(0));
        assert_eq!(c.terms().count(), 3);
    }

    #[test]
    fn flat_derivatives_commute() {
        let w = Scalar::zero();
        let d1 = StdOp::normalize(g3(), w.clone(), w.clone(), vec![(e(&[0], Poly::one(3)), 1, 0)]);
        let d2 = StdOp::normalize(g3(), w.clone(), w.clone(), vec![(e(&[1], Poly::one(3)), 1, 0)]);
        assert_eq!(d1.compose(&d2).unwrap(), d2.compose(&d1).unwrap());
        assert_eq!(d1.compose(&StdOp::identity(g3(), w.clone())).unwrap(), d1);
        assert_eq!(d1.apply(&x(0)), Poly::one(3));
    }

    #[test]
    fn weight_mismatch_is_reported() {
        let a = StdOp::laplacian_power(g3(), 1, Scalar::zero());
        assert!(matches!(a.compose(&a), Err(OpError::WeightMismatch { .. })));
    }

    #[test]
    fn reconstruct_round_trips() {
        let lap = StdOp::laplacian_power(g3(), 1, Scalar::zero());
        let r = StdOp::reconstruct(g3(), Scalar::zero(), Scalar::int(-2), 2, |f| lap.apply(f)).unwrap();
        assert_eq!(r, lap);
        let mult = StdOp::reconstruct(g3(), Scalar::zero(), Scalar::zero(), 0, |f| &x(0) * f).unwrap();
        assert_eq!(mult, StdOp::multiplication(g3(), Scalar::zero(), x(0)));
        assert!(StdOp::reconstruct(g3(), Scalar::zero(), Scalar::zero(), 1, |f| lap.apply(f)).is_err());
    }

    #[test]
    fn greatest_term_ordering() {
        assert!(OpType::new(2, 0) > OpType::new(0, 1));
        assert!(OpType::new(3, 0) > OpType::new(1, 1));
        assert!(OpType::new(2, 1) > OpType::new(3, 0));
        assert!(StdOp::zero(g3(), Scalar::zero(), Scalar::zero()).greatest_term().is_err());
    }
}
