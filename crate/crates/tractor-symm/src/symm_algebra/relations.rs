use serde::Serialize;

use crate::canon_symm::checks::on_monomials;
use crate::canon_symm::{CanonicalSymmetry, Family, Verdict};
use crate::ckt_solve::{extract, CartanSpace, CktLabel};
use crate::exact_tensor::{Metric, Multiset, Poly, Scalar, SymTensor};
use crate::flat_diffop::StdOp;
use crate::tractor_calc::{TractorField, TractorFrame};

use super::{decompose, AdjointSpace, AlgebraError, GElement, ProductDecomp};

fn component(v: &SymTensor, a: usize) -> Poly {
    v.get(&Multiset::new(vec![a as u8]))
}

fn divergence(v: &SymTensor) -> Poly {
    (0..v.nvars()).fold(Poly::zero(v.nvars()), |acc, a| &acc + &component(v, a).deriv(a))
}

/// `φ^b∇_b φ̄^a − φ̄^b∇_b φ^a`.
pub fn lie_bracket(phi: &SymTensor, psi: &SymTensor) -> SymTensor {
    let n = phi.nvars();
    let along = |u: &SymTensor, f: &Poly| (0..n).fold(Poly::zero(n), |acc, b| &acc + &(&component(u, b) * &f.deriv(b)));
    SymTensor::vector((0..n).map(|a| &along(phi, &component(psi, a)) - &along(psi, &component(phi, a))).collect())
}

/// The Killing form written through the fields, flat case:
/// `−2(φ^a∇_a∇_bφ̄^b + φ̄^a∇_a∇_bφ^b) + n ∇_aφ^b ∇_bφ̄^a − ((n−2)/n) ∇·φ ∇·φ̄`.
pub fn killing_from_fields(phi: &SymTensor, psi: &SymTensor) -> Poly {
    let n = phi.nvars();
    let nn = Scalar::int(n as i64);
    let (dphi, dpsi) = (divergence(phi), divergence(psi));
    let mut out = Poly::zero(n);
    for a in 0..n {
        out.add_scaled(&Scalar::int(-2), &(&component(phi, a) * &dpsi.deriv(a)));
        out.add_scaled(&Scalar::int(-2), &(&component(psi, a) * &dphi.deriv(a)));
        for b in 0..n {
            out.add_scaled(&nn, &(&component(phi, b).deriv(a) * &component(psi, a).deriv(b)));
        }
    }
    out.add_scaled(&-(Scalar::int(n as i64 - 2) / nn), &(&dphi * &dpsi));
    out
}

fn same(a: &SymTensor, b: &SymTensor) -> bool {
    a.rank() == b.rank() && a.sub(&b.clone().with_weight(a.weight().clone())).is_zero()
}

/// The four summands of a product as operators on `𝓔[w]`.
struct Summands {
    boxtimes: CanonicalSymmetry,
    bullet: CanonicalSymmetry,
    bracket: CanonicalSymmetry,
}

impl Summands {
    fn new(d: &ProductDecomp, w: &Scalar) -> Result<Self, AlgebraError> {
        Ok(Summands {
            boxtimes: CanonicalSymmetry::build(d.boxtimes.clone(), CktLabel::new(2, 0), w.clone())?,
            bullet: CanonicalSymmetry::build(d.bullet.clone(), CktLabel::new(0, 1), w.clone())?,
            bracket: d.bracket.symmetry(w.clone()),
        })
    }

    /// `(I⊠Ī)𝔻𝔻f + (I•Ī)𝔻²f + ½[I,Ī]𝔻f + c f`.
    fn apply(&self, f: &Poly, scalar: &Scalar) -> Poly {
        let mut out = &self.boxtimes.apply(f) + &self.bullet.apply(f);
        out.add_scaled(&Scalar::ratio(1, 2), &self.bracket.apply(f));
        out.add_scaled(scalar, f);
        out
    }
}

/// `S_I S_Ī` has order 2 and so does every summand; monomials of degree 2
/// decide equality.
const PRODUCT_ORDER: u32 = 2;

/// Composition of two first-order symmetries against its four summands.
#[derive(Clone, Debug, Serialize)]
pub struct Dec2CanReport {
    pub verdict: Verdict,
    pub weight: Scalar,
    pub dim_checked: usize,
    pub first_failure: Option<String>,
    /// `w(n+w)/(n(n+1)(n+2)) ⟨I,Ī⟩`.
    pub scalar_term: Scalar,
    pub killing: Scalar,
    pub reconstructs: bool,
    /// Projecting part of `I⊠Ī` is `φ^{(a}φ̄^{b)₀}`.
    pub boxtimes_section: bool,
    /// Projecting part of `I•Ī` is `φ·φ̄ / n`.
    pub bullet_section: bool,
    /// Projecting part of `[I,Ī]` is the vector-field bracket.
    pub bracket_section: bool,
    /// `⟨I,Ī⟩` agrees with its expression through the fields.
    pub killing_formula: bool,
}

/// `S_φ S_φ̄ f` against the four summands on `𝓔[w]`, plus the identification
/// of each summand's section.
pub fn verify_dec2can(
    space: &AdjointSpace,
    phi: &SymTensor,
    psi: &SymTensor,
    w: &Scalar,
) -> Result<Dec2CanReport, AlgebraError> {
    let g = space.metric();
    let n = g.dim();
    let nn = Scalar::int(n as i64);
    let (i, j) = (space.element(phi)?, space.element(psi)?);
    let d = decompose(&i, &j);
    let parts = Summands::new(&d, w)?;
    let scalar_term = w * &(&nn + w) / (&nn * &(&nn + &Scalar::one()) * (&nn + &Scalar::int(2))) * &d.killing;
    let (s1, s2) = (i.symmetry(w.clone()), j.symmetry(w.clone()));
    let id = on_monomials(n, PRODUCT_ORDER, |f| s1.apply(&s2.apply(f)) == parts.apply(f, &scalar_term));

    let boxtimes_section = same(&extract(&d.boxtimes, CktLabel::new(2, 0))?, &phi.sym_product(psi).trace_free(g));
    let dot = phi.dot(psi, g).scale(&nn.recip());
    let bullet_section = same(&extract(&d.bullet, CktLabel::new(0, 1))?, &SymTensor::scalar(dot));
    let bracket_section = same(&d.bracket.field(), &lie_bracket(phi, psi));
    let killing_formula = killing_from_fields(phi, psi) == Poly::constant(n, d.killing.clone());
    let reconstructs = d.reconstructs();

    let ok = id.verdict.passed() && boxtimes_section && bullet_section && bracket_section && killing_formula && reconstructs;
    Ok(Dec2CanReport {
        verdict: Verdict::from_bool(ok),
        weight: w.clone(),
        dim_checked: id.dim_checked,
        first_failure: id.first_failure,
        scalar_term,
        killing: d.killing,
        reconstructs,
        boxtimes_section,
        bullet_section,
        bracket_section,
        killing_formula,
    })
}

/// `(n−2k)(n+2k) / (4n(n+1)(n+2))`.
pub fn ideal_coefficient(n: usize, k: usize) -> Scalar {
    let (n, k) = (n as i64, k as i64);
    Scalar::ratio((n - 2 * k) * (n + 2 * k), 4 * n * (n + 1) * (n + 2))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealReport {
    pub verdict: Verdict,
    pub k: usize,
    pub coefficient: Scalar,
    /// The coefficient equals `−w(n+w)/(n(n+1)(n+2))` at `w = k − n/2`.
    pub coefficient_matches: bool,
    pub dim_checked: usize,
    pub first_failure: Option<String>,
}

/// `S_{V₁}S_{V₂} − S_{V₁⊠V₂} − S_{V₁•V₂} − ½S_{[V₁,V₂]} + c⟨V₁,V₂⟩` on
/// `𝓔[k − n/2]`.
pub fn ideal_relation_check(v1: &GElement, v2: &GElement, k: usize) -> Result<IdealReport, AlgebraError> {
    let n = v1.tractor().n();
    let nn = Scalar::int(n as i64);
    let w = Scalar::int(k as i64) - Scalar::ratio(n as i64, 2);
    let coefficient = ideal_coefficient(n, k);
    let from_weight = -(&w * &(&nn + &w)) / (&nn * &(&nn + &Scalar::one()) * (&nn + &Scalar::int(2)));
    let coefficient_matches = coefficient == from_weight;
    let d = decompose(v1, v2);
    let parts = Summands::new(&d, &w)?;
    let (s1, s2) = (v1.symmetry(w.clone()), v2.symmetry(w.clone()));
    // The relation subtracts the summands and adds c⟨V₁,V₂⟩, so the summand
    // side carries −c⟨V₁,V₂⟩.
    let scalar = -(&coefficient * &d.killing);
    let id = on_monomials(n, PRODUCT_ORDER, |f| s1.apply(&s2.apply(f)) == parts.apply(f, &scalar));
    Ok(IdealReport {
        verdict: Verdict::from_bool(id.verdict.passed() && coefficient_matches),
        k,
        coefficient,
        coefficient_matches,
        dim_checked: id.dim_checked,
        first_failure: id.first_failure,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtraReport {
    pub verdict: Verdict,
    pub k: usize,
    /// Basis solutions checked.
    pub checked: usize,
    pub dim_checked: usize,
    pub first_failure: Option<String>,
}

/// For `σ` solving the `(0,k)` equation, `S_σ = σ Δ^k` on `𝓔[k − n/2]`,
/// with both derivative families. `limit` caps how many basis solutions are
/// tried.
pub fn lemma_extra_check(k: usize, g: &Metric, limit: Option<usize>) -> Result<ExtraReport, AlgebraError> {
    let label = CktLabel::new(0, k);
    let space = CartanSpace::new(TractorFrame::new(*g), label);
    let n = g.dim();
    let w = Scalar::int(k as i64) - Scalar::ratio(n as i64, 2);
    let lap = StdOp::laplacian_power(*g, k, w.clone());
    let count = limit.map_or(space.dimension(), |l| l.min(space.dimension()));
    let mut dim_checked = 0;
    for i in 0..count {
        let sigma = space.solutions()[i].get(&Multiset::empty());
        let s = CanonicalSymmetry::build(space.parallel(i), label, w.clone())?;
        let rep = on_monomials(n, 2 * k as u32, |f| {
            let expected = &sigma * &lap.apply(f);
            [Family::Double, Family::Fundamental].iter().all(|&fam| s.apply_with(fam, f) == expected)
        });
        dim_checked = rep.dim_checked;
        if let Some(m) = rep.first_failure {
            return Ok(ExtraReport {
                verdict: Verdict::Fail,
                k,
                checked: i + 1,
                dim_checked,
                first_failure: Some(format!("solution #{i} on {m}")),
            });
        }
    }
    Ok(ExtraReport { verdict: Verdict::Pass, k, checked: count, dim_checked, first_failure: None })
}

/// `𝒟²_{(CD)₀} f = −X_{(C} D_{D)₀} f`, the step that turns `S_σ` into
/// `σ Δ^k`.
pub fn fund_d2_tracefree_is_x_times_d(g: &Metric, w: &Scalar, degree: u32) -> bool {
    let frame = TractorFrame::new(*g);
    let sym_tf = |t: &TractorField| {
        let s = t.symmetrize(0);
        let tr = s.trace(0, 1).expect("standard slots");
        s.sub(&tr.times_h().scale(&Scalar::int(frame.rank() as i64).recip()))
    };
    on_monomials(g.dim(), degree, |f| {
        let field = TractorField::density(frame, w.clone(), f.clone());
        let left = sym_tf(&field.fund_d2());
        let right = sym_tf(&field.tractor_d().times_x()).scale(&-Scalar::one());
        left.data() == right.data()
    })
    .verdict
    .passed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn translation(a: usize) -> SymTensor {
        SymTensor::vector((0..3).map(|b| if a == b { Poly::one(3) } else { Poly::zero(3) }).collect())
    }

    #[test]
    fn square_of_a_translation() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let e1 = translation(0);
        for w in [Scalar::ratio(-1, 2), Scalar::int(2), Scalar::zero()] {
            let rep = verify_dec2can(&sp, &e1, &e1, &w).unwrap();
            assert!(rep.verdict.passed(), "{rep:?}");
            assert!(rep.killing.is_zero());
        }
    }

    #[test]
    fn scalar_term_drops_at_the_special_weights() {
        let sp = AdjointSpace::new(Metric::euclidean(3));
        let f = sp.fields();
        let (a, b) = (&f[0], &f[f.len() - 1]);
        for w in [Scalar::zero(), Scalar::int(-3)] {
            let rep = verify_dec2can(&sp, a, b, &w).unwrap();
            assert!(rep.verdict.passed() && rep.scalar_term.is_zero(), "{rep:?}");
        }
    }

    #[test]
    fn coefficient_identity_and_borderline() {
        for n in 3..=8 {
            for k in 1..=4 {
                let w = Scalar::int(k as i64) - Scalar::ratio(n as i64, 2);
                let nn = Scalar::int(n as i64);
                let expected = -(&w * &(&nn + &w)) / (&nn * &(&nn + &Scalar::one()) * (&nn + &Scalar::int(2)));
                assert_eq!(ideal_coefficient(n, k), expected);
            }
        }
        assert_eq!(ideal_coefficient(3, 2), Scalar::ratio(-7, 240));
        assert!(ideal_coefficient(4, 2).is_zero());
    }

    #[test]
    fn tracefree_fundamental_square() {
        let g = Metric::euclidean(3);
        for w in [Scalar::ratio(-1, 2), Scalar::int(1)] {
            assert!(fund_d2_tracefree_is_x_times_d(&g, &w, 3));
        }
    }

    #[test]
    fn density_symmetries_are_laplacian_multiples_at_k1() {
        let rep = lemma_extra_check(1, &Metric::euclidean(3), None).unwrap();
        assert!(rep.verdict.passed(), "{rep:?}");
        assert_eq!(rep.checked, 14);
    }
}
