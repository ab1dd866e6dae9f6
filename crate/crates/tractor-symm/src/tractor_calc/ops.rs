//! The invariant operators, all acting on upper-index [`TractorField`]s and
//! prepending their new slots.

use crate::exact_tensor::Scalar;

use super::{SlotKind, TractorField};

impl TractorField {
    fn zero_like(&self) -> TractorField {
        TractorField::zero(*self.frame(), self.weight().clone(), self.slots().to_vec())
    }

    fn tensor_count(&self) -> usize {
        self.slots().iter().filter(|s| **s == SlotKind::Tensor).count()
    }

    /// Tractor-D: weight `w` to `w − 1`, one standard slot in front.
    pub fn tractor_d(&self) -> TractorField {
        let n = self.n();
        let w = self.weight().clone();
        let c = Scalar::int(n as i64 - 2) + Scalar::int(2) * &w;
        let mut blocks = Vec::with_capacity(n + 2);
        blocks.push(self.scale(&(&c * &w)));
        for a in 0..n {
            blocks.push(self.covariant(a).scale(&(&c * &self.frame().metric().diag_scalar(a))));
        }
        blocks.push(self.laplacian().scale(&Scalar::int(-1)));
        TractorField::from_blocks(SlotKind::Standard, blocks).with_weight(w - Scalar::one())
    }

    /// Double-D: one form slot in front, weight unchanged. Lower tensor
    /// slots contribute through the Leibniz rule.
    pub fn double_d(&self) -> TractorField {
        let n = self.n();
        let big = n + 2;
        let at = |a: usize, b: usize| a * big + b;
        let mut blocks = vec![self.zero_like(); big * big];
        let mut put = |a: usize, b: usize, f: &TractorField| {
            blocks[at(a, b)].add_scaled(&Scalar::one(), f);
            blocks[at(b, a)].add_scaled(&Scalar::int(-1), f);
        };
        let w_eff = self.weight() - &Scalar::int(self.tensor_count() as i64);
        put(n + 1, 0, &self.scale(&w_eff));
        for a in 0..n {
            put(n + 1, a + 1, &self.covariant(a).scale(&self.frame().metric().diag_scalar(a)));
        }
        for d in self.tensor_digits() {
            for b in 0..n {
                for c in 0..n {
                    if b != c {
                        let moved = self.move_digit(d, b, c).scale(&self.frame().metric().diag_scalar(b));
                        put(c + 1, b + 1, &moved);
                    }
                }
            }
        }
        TractorField::from_blocks(SlotKind::Form, blocks)
    }

    /// `𝔻²^{AB} = −(w h^{AB} + X^{(A} D^{B)})`, two standard slots in front.
    pub fn double_d2(&self) -> TractorField {
        let h = self.times_h().scale(self.weight());
        let xd = self.tractor_d().times_x().symmetrize(0);
        h.add(&xd).scale(&Scalar::int(-1))
    }

    /// `ℍ^𝐁♯f`: `(ℍ^𝐁♯f)^C = h^{C[B0} f^{B1]}` on every tractor index.
    pub fn sharp_h(&self) -> TractorField {
        let fr = *self.frame();
        let big = fr.rank();
        let half = Scalar::ratio(1, 2);
        let mut blocks = Vec::with_capacity(big * big);
        for b0 in 0..big {
            for b1 in 0..big {
                let (l0, s0) = fr.lower(b0);
                let (l1, s1) = fr.lower(b1);
                let entries = [(l0, b1, &half * &Scalar::int(s0)), (l1, b0, -(&half * &Scalar::int(s1)))];
                blocks.push(self.act_tractor(&entries));
            }
        }
        TractorField::from_blocks(SlotKind::Form, blocks)
    }

    /// Fundamental derivative `𝒟 = 𝔻 + 2ℍ♯`.
    pub fn fund_d(&self) -> TractorField {
        self.double_d().add(&self.sharp_h().scale(&Scalar::int(2)))
    }

    /// `𝒟²^{AD} = −𝒟^{(A}{}_P 𝒟^{|P|D)}`, two standard slots in front,
    /// through the closed formula
    /// `−(w h + X^{(A}D^{D)} − 4 h^{(A|B0|}𝔻^{D)B1}♯_𝐁 − 4 H̃♯♯)`.
    pub fn fund_d2(&self) -> TractorField {
        let (base, mixed, double) = self.fund_d2_terms();
        base.add(&mixed.add(&double).scale(&Scalar::int(4)))
    }

    /// The closed formula with the opposite sign on the mixed `𝔻♯` term.
    #[cfg(test)]
    pub(crate) fn fund_d2_flipped(&self) -> TractorField {
        let (base, mixed, double) = self.fund_d2_terms();
        base.add(&double.sub(&mixed).scale(&Scalar::int(4)))
    }

    /// `(𝔻²f, sym h𝔻♯f, sym H̃♯♯f)`, all of weight `w`.
    fn fund_d2_terms(&self) -> (TractorField, TractorField, TractorField) {
        let base = self.double_d2();
        let w = base.weight().clone();
        let inner = self.sharp_h();
        // 𝔻^𝐄 ♯^𝐁 f with E1 contracted against B1: slots [E0, B0].
        let mixed = inner.double_d().unpack_forms().trace(1, 3).expect("standard slots");
        // ♯^𝐁 ♯^𝐂 f, the outer ♯ acting on every tractor index.
        let double = inner.sharp_h().unpack_forms().trace(1, 3).expect("standard slots");
        (base, mixed.symmetrize(0).with_weight(w.clone()), double.symmetrize(0).with_weight(w))
    }

    /// Casimir `h_{AD} 𝒟²^{AD}`.
    pub fn casimir(&self) -> TractorField {
        self.fund_d2().trace(0, 1).expect("standard slots")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tensor::{Metric, Poly};
    use crate::tractor_calc::TractorFrame;

    fn frame() -> TractorFrame {
        TractorFrame::new(Metric::euclidean(3))
    }

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn sample() -> Poly {
        let mut p = &(&x(0) * &x(0)) * &x(1);
        p += &(&x(2) * &x(2)).scale(&Scalar::int(3));
        p += &(&(&x(0) * &x(1)) * &(&x(2) * &x(2)));
        p
    }

    fn dens(w: Scalar, p: Poly) -> TractorField {
        TractorField::density(frame(), w, p)
    }

    /// `−𝔻_{(A}{}^P 𝔻_{|P|B)}` in upper form, for a double application
    /// with slots `[outer, inner, rest]`.
    fn minus_square(dd: &TractorField) -> TractorField {
        // outer (A, P'), inner (P, B); contract P' with P.
        dd.unpack_forms().trace(1, 2).unwrap().symmetrize(0).scale(&Scalar::int(-1))
    }

    #[test]
    fn tractor_d_of_coordinate() {
        let d = dens(Scalar::one(), x(0)).tractor_d();
        assert_eq!(d.get(&[0]), &x(0).scale(&Scalar::int(3)));
        assert_eq!(d.get(&[1]), &Poly::constant(3, Scalar::int(3)));
        assert!(d.get(&[2]).is_zero() && d.get(&[3]).is_zero() && d.get(&[4]).is_zero());
        assert!(dens(Scalar::zero(), Poly::one(3)).tractor_d().is_zero());
    }

    #[test]
    fn x_dot_d_is_multiple() {
        let xf = dens(Scalar::zero(), Poly::one(3)).times_x();
        for w in [Scalar::int(2), Scalar::ratio(1, 3)] {
            let f = dens(w.clone(), sample());
            let xd = TractorField::contract_leading(&xf, &f.tractor_d()).unwrap();
            let c = (Scalar::int(1) + Scalar::int(2) * &w) * &w;
            assert_eq!(xd.as_density().unwrap(), &sample().scale(&c));
        }
    }

    #[test]
    fn double_d_of_one() {
        let w = Scalar::ratio(5, 2);
        let d = dens(w.clone(), Poly::one(3)).double_d();
        assert_eq!(d.pattern_dump(), "𝕎: 5\n");
    }

    #[test]
    fn double_d_square() {
        for w in [Scalar::one(), Scalar::ratio(-3, 2), Scalar::int(2)] {
            let f = dens(w.clone(), &x(0) * &x(1));
            let dd = f.double_d().double_d();
            let tr = dd.unpack_forms().trace(0, 2).unwrap().trace(0, 1).unwrap();
            let expect = (&x(0) * &x(1)).scale(&(Scalar::int(-2) * &w * (Scalar::int(3) + &w)));
            assert_eq!(tr.as_density().unwrap(), &expect, "w = {w}");
        }
    }

    #[test]
    fn x_skew_d_is_double_d() {
        for w in [Scalar::int(1), Scalar::ratio(-1, 2), Scalar::int(3)] {
            let f = dens(w.clone(), sample());
            let xd = f.tractor_d().times_x();
            let skew = xd.sub(&xd.permute(&[1, 0])).pack(0).unwrap();
            let rhs = f.double_d().scale(&(Scalar::int(1) + Scalar::int(2) * &w));
            assert_eq!(skew, rhs.with_weight(skew.weight().clone()));
        }
    }

    #[test]
    fn double_d2_is_minus_square() {
        for w in [Scalar::zero(), Scalar::one(), Scalar::ratio(-3, 2)] {
            let f = dens(w, sample());
            assert_eq!(f.double_d2(), minus_square(&f.double_d().double_d()));
        }
        assert!(dens(Scalar::zero(), Poly::one(3)).double_d2().is_zero());
    }

    #[test]
    fn d_x_commutator() {
        let w = Scalar::ratio(1, 2);
        let f = dens(w.clone(), sample());
        let dx = f.times_x().tractor_d();
        let xd = f.tractor_d().times_x().permute(&[1, 0]);
        let lhs = dx.sub(&xd.with_weight(dx.weight().clone()));
        let dd = f.double_d().unpack_forms();
        let rhs = dd
            .scale(&Scalar::int(-2))
            .add(&f.times_h().scale(&(Scalar::int(3) + Scalar::int(2) * &w)))
            .with_weight(lhs.weight().clone());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sharp_trivial_on_densities_and_skew() {
        let f = dens(Scalar::one(), sample());
        assert!(f.sharp_h().is_zero());
        assert_eq!(f.fund_d(), f.double_d());
        let v = f.tractor_d();
        // ⟨F♯u, u⟩ = 0 for every generator F = ℍ^𝐁.
        let s = v.sharp_h();
        let big = 5;
        for b in 0..big * big {
            let pair = TractorField::contract_leading(&v, &s.block(b).with_weight(v.weight().clone()));
            assert!(pair.unwrap().is_zero());
        }
    }

    #[test]
    fn sharp_h_formula() {
        // (ℍ^𝐁♯e_2)^C = ½(h^{C B0} δ^{B1}_2 − h^{C B1} δ^{B0}_2)
        let mut v = vec![Scalar::zero(); 5];
        v[2] = Scalar::one();
        let e2 = dens(Scalar::zero(), Poly::one(3)).tensor_vector(&v);
        let s = e2.sharp_h();
        assert_eq!(s.get(&[0, 2, 4]), &Poly::constant(3, Scalar::ratio(1, 2)));
        assert_eq!(s.get(&[2, 0, 4]), &Poly::constant(3, Scalar::ratio(-1, 2)));
        assert_eq!(s.get(&[1, 2, 1]), &Poly::constant(3, Scalar::ratio(1, 2)));
    }

    #[test]
    fn casimir_on_densities() {
        for w in [Scalar::zero(), Scalar::one(), Scalar::int(2), Scalar::ratio(-1, 2)] {
            let f = dens(w.clone(), x(0));
            let c = Scalar::int(-2) * &w * (Scalar::int(3) + &w);
            assert_eq!(f.casimir().as_density().unwrap(), &x(0).scale(&c), "w = {w}");
        }
    }

    fn vector_field(w: Scalar) -> TractorField {
        let data = (0..5)
            .map(|k| match k {
                0 => sample(),
                1 => &x(1) * &x(2),
                2 => x(0).scale(&Scalar::int(-2)),
                4 => &(&x(0) * &x(0)) + &Poly::one(3),
                _ => Poly::zero(3),
            })
            .collect();
        TractorField::from_data(frame(), w, vec![SlotKind::Standard], data).unwrap()
    }

    #[test]
    fn fund_d_commutes_with_double_d() {
        for w in [Scalar::zero(), Scalar::ratio(-1, 2), Scalar::int(2)] {
            let v = vector_field(w);
            let lhs = v.double_d().fund_d();
            let rhs = v.fund_d().double_d().permute(&[1, 0, 2]);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fund_d2_is_minus_square() {
        for w in [Scalar::zero(), Scalar::one(), Scalar::ratio(-3, 2)] {
            let v = vector_field(w);
            let sq = minus_square(&v.fund_d().fund_d());
            assert_eq!(v.fund_d2(), sq);
            assert_ne!(v.fund_d2_flipped(), sq);
        }
        let f = dens(Scalar::one(), sample());
        assert_eq!(f.fund_d2(), minus_square(&f.fund_d().fund_d()));
    }
}

