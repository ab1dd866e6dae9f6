use crate::exact_tensor::{Metric, Poly, Scalar, SymTensor};

/// A section the Lie derivative can act on, with its conformal weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieSection {
    /// `f ∈ 𝓔[w]`.
    Density(Poly),
    /// `f_a ∈ 𝓔_a[w]`.
    Covector(Vec<Poly>),
    /// `f^a ∈ 𝓔^a[w]`.
    Vector(Vec<Poly>),
}

/// `L_φ` on weighted sections: the coordinate Lie derivative plus the
/// weight term `−(w/n)(∂_aφ^a)`.
pub fn lie_derivative(phi: &SymTensor, w: &Scalar, f: &LieSection, g: &Metric) -> LieSection {
    let n = g.dim();
    let comp: Vec<Poly> = (0..n).map(|a| phi.get(&crate::exact_tensor::Multiset::new(vec![a as u8]))).collect();
    let div: Poly = (0..n).fold(Poly::zero(n), |acc, a| &acc + &comp[a].deriv(a));
    let weight_term = div.scale(&(-(w / &Scalar::int(n as i64))));
    let transport = |h: &Poly| {
        let mut out = &weight_term * h;
        for (a, c) in comp.iter().enumerate() {
            out.add_product(c, &h.deriv(a));
        }
        out
    };
    match f {
        LieSection::Density(h) => LieSection::Density(transport(h)),
        LieSection::Covector(h) => LieSection::Covector(
            (0..n)
                .map(|a| {
                    let mut out = transport(&h[a]);
                    for b in 0..n {
                        out.add_product(&h[b], &comp[b].deriv(a));
                    }
                    out
                })
                .collect(),
        ),
        LieSection::Vector(h) => LieSection::Vector(
            (0..n)
                .map(|a| {
                    let mut out = transport(&h[a]);
                    for (b, hb) in h.iter().enumerate() {
                        out -= &(hb * &comp[a].deriv(b));
                    }
                    out
                })
                .collect(),
        ),
    }
}
