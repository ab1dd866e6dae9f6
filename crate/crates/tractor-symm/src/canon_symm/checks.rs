use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ckt_solve::CktLabel;
use crate::exact_tensor::{Metric, Monomial, Poly, Scalar, SymTensor};
use crate::flat_diffop::{OpType, StdOp};
use crate::tractor_calc::{TractorField, TractorFrame};

use super::{CanonError, CanonicalSymmetry, Family};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of an identity checked on every monomial up to a degree.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub verdict: Verdict,
    pub dim_checked: usize,
    /// First monomial on which the two sides differ.
    pub first_failure: Option<String>,
}

pub(crate) fn on_monomials(n: usize, degree: u32, same: impl Fn(&Poly) -> bool + Sync) -> IdentityReport {
    let monos = Monomial::all_up_to_degree(n, degree);
    let failure = monos
        .par_iter()
        .map(|&m| Poly::term(n, m, Scalar::one()))
        .find_first(|f| !same(f))
        .map(|f| f.to_string());
    IdentityReport { verdict: Verdict::from_bool(failure.is_none()), dim_checked: monos.len(), first_failure: failure }
}

/// `Δ^k S = S' Δ^k` for one canonical symmetry.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub metric: Metric,
    pub k: usize,
    pub label: CktLabel,
    pub w_in: Scalar,
    pub w_out: Scalar,
    pub verdict: Verdict,
    /// `Δ^k ∘ S − S' ∘ Δ^k` in normal form.
    pub residual: StdOp,
    /// Monomials on which the evaluators were compared directly.
    pub dim_checked: usize,
    /// `r ≥ k`: the symmetry holds but is trivial.
    pub trivial: bool,
    pub operator_order: usize,
    pub elapsed: Duration,
}

impl SymmetryReport {
    pub fn to_json(&self) -> Value {
        let (s, s_neg) = self.metric.signature();
        json!({
            "n": self.metric.dim(),
            "signature": [s, s_neg],
            "k": self.k,
            "label": {"p": self.label.p, "r": self.label.r},
            "weights": {"w_in": self.w_in.to_string(), "w_out": self.w_out.to_string()},
            "dim_checked": self.dim_checked,
            "verdict": self.verdict,
            "trivial": self.trivial,
            "operator_order": self.operator_order,
            "residual_terms": self.residual.to_json()["terms"].clone(),
            "elapsed": self.elapsed.as_secs_f64(),
        })
    }
}

fn half_dim(g: &Metric) -> Scalar {
    Scalar::ratio(g.dim() as i64, 2)
}

/// Build `S_φ` on `𝓔[k − n/2]` and `S'_φ` on `𝓔[−k − n/2]` and check
/// `Δ^k S_φ = S'_φ Δ^k`, structurally on normal forms and directly on
/// monomials of degree up to `o(S) + 2k`.
pub fn verify_symmetry(phi: &SymTensor, label: CktLabel, k: usize, g: &Metric) -> Result<SymmetryReport, CanonError> {
    let start = Instant::now();
    let kk = Scalar::int(k as i64);
    let w_in = &kk - &half_dim(g);
    let w_out = -(&kk + &half_dim(g));
    let s = CanonicalSymmetry::from_solution(phi, label, g, w_in.clone())?;
    let s_out = s.at_weight(w_out.clone());
    let lap_in = StdOp::laplacian_power(*g, k, w_in.clone());
    let lap_out = StdOp::laplacian_power(*g, k, w_in.clone()).with_weights(w_in.clone(), w_out.clone());
    let left = lap_in.compose(&s.to_stdop()?)?;
    let right = s_out.to_stdop()?.compose(&lap_out)?;
    let residual = left.sub(&right);
    let order = label.p + 2 * label.r;
    let direct = on_monomials(g.dim(), (order + 2 * k) as u32, |f| {
        lap_in.apply(&s.apply(f)) == s_out.apply(&lap_in.apply(f))
    });
    Ok(SymmetryReport {
        metric: *g,
        k,
        label,
        w_in,
        w_out,
        verdict: Verdict::from_bool(residual.is_zero() && direct.verdict.passed()),
        residual,
        dim_checked: direct.dim_checked,
        trivial: label.r >= k,
        operator_order: order,
        elapsed: start.elapsed(),
    })
}

fn double_d_power(mut field: TractorField, p: usize) -> TractorField {
    for _ in 0..p {
        field = field.double_d();
    }
    field
}

/// `(Δ^∇)^k 𝔻_{𝐀1}⋯𝔻_{𝐀p} f = 𝔻_{𝐀1}⋯𝔻_{𝐀p} Δ^k f` for `f ∈ 𝓔[w]`, with the
/// coupled Laplacian on the left.
pub fn verify_commute_double_d(k: usize, p: usize, w: &Scalar, g: &Metric, degree: u32) -> IdentityReport {
    let frame = TractorFrame::new(*g);
    let lap = StdOp::laplacian_power(*g, k, w.clone());
    let w_low = w - &Scalar::int(2 * k as i64);
    on_monomials(g.dim(), degree, |f| {
        let mut left = double_d_power(TractorField::density(frame, w.clone(), f.clone()), p);
        for _ in 0..k {
            left = left.laplacian();
        }
        let right = double_d_power(TractorField::density(frame, w_low.clone(), lap.apply(f)), p);
        left.data() == right.data()
    })
}

/// The `𝒟` and `𝔻` realizations of one symmetry agree. Both have order at
/// most `p + 2r`, so monomials up to that degree decide the question.
pub fn verify_fund_equals_double(s: &CanonicalSymmetry) -> IdentityReport {
    let degree = (s.label().p + 2 * s.label().r) as u32;
    on_monomials(s.metric().dim(), degree, |f| s.apply_with(Family::Fundamental, f) == s.apply_with(Family::Double, f))
}

/// `(−1)^k X_{A1}⋯X_{Ak} Δ^k f = D_{A1}⋯D_{Ak} f` on `𝓔[k − n/2]`.
pub fn gjms_factorization(k: usize, g: &Metric, degree: u32) -> IdentityReport {
    let frame = TractorFrame::new(*g);
    let w = Scalar::int(k as i64) - half_dim(g);
    let lap = StdOp::laplacian_power(*g, k, w.clone());
    let sign = Scalar::int(if k.is_multiple_of(2) { 1 } else { -1 });
    on_monomials(g.dim(), degree, |f| {
        let mut left = TractorField::density(frame, &w - &Scalar::int(2 * k as i64), lap.apply(f).scale(&sign));
        let mut right = TractorField::density(frame, w.clone(), f.clone());
        for _ in 0..k {
            left = left.times_x();
            right = right.tractor_d();
        }
        left.data() == right.data()
    })
}

/// The four leading-term properties for a pair `(S, S')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingReport {
    /// The `⟨p|r⟩` coefficient of both operators is `φ`.
    pub leading_is_phi: bool,
    /// Level at most `p + r`, and the greatest term is `φ`.
    pub level_bound: bool,
    /// Formal order at most `p + 2r`, attained only at `⟨p|r⟩`.
    pub order_bound: bool,
    /// No term carries a higher Laplacian power than `r`.
    pub laplacian_bound: bool,
}

impl LeadingReport {
    pub fn all(&self) -> bool {
        self.leading_is_phi && self.level_bound && self.order_bound && self.laplacian_bound
    }
}

fn same_components(a: &SymTensor, b: &SymTensor) -> bool {
    a.rank() == b.rank() && a.sub(&b.clone().with_weight(a.weight().clone())).is_zero()
}

pub fn leading_checks(ops: &[&StdOp], phi: &SymTensor, label: CktLabel) -> LeadingReport {
    let ty = OpType::new(label.p, label.r);
    let leading_is_phi = ops.iter().all(|s| s.term(ty).is_some_and(|t| same_components(t, phi)));
    let level_bound = ops.iter().all(|s| {
        s.level().is_some_and(|l| l <= ty.level())
            && s.greatest_term().is_ok_and(|(t, c)| t == ty && same_components(c, phi))
    });
    let order_bound = ops.iter().all(|s| s.terms().all(|(t, _)| t.order() < ty.order() || *t == ty));
    let laplacian_bound = ops.iter().all(|s| s.terms().all(|(t, _)| t.r <= label.r));
    LeadingReport { leading_is_phi, level_bound, order_bound, laplacian_bound }
}
