use std::fmt;

use crate::exact_tensor::{Poly, Scalar};

use super::{TractorError, TractorFrame};

/// Kind of a slot of a [`TractorField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    /// One upper tractor index.
    Standard,
    /// A skew pair of upper tractor indices, stored in full.
    Form,
    /// One lower coordinate index.
    Tensor,
}

/// One position in the mixed-radix component index. A form slot owns two.
#[derive(Clone, Copy, Debug)]
struct Digit {
    radix: usize,
    stride: usize,
    tractor: bool,
}

/// Weighted tractor-valued polynomial field in the flat scale.
///
/// Components are dense; slot 0 is the most significant digit. Form slots
/// hold the full antisymmetric `N×N` array so that both halves can be
/// treated as ordinary tractor indices.
#[derive(Clone, PartialEq, Eq)]
pub struct TractorField {
    frame: TractorFrame,
    weight: Scalar,
    slots: Vec<SlotKind>,
    data: Vec<Poly>,
}

impl TractorField {
    pub fn zero(frame: TractorFrame, weight: Scalar, slots: Vec<SlotKind>) -> Self {
        let len = shape_len(&frame, &slots);
        TractorField { frame, weight, data: vec![Poly::zero(frame.n()); len], slots }
    }

    /// Slot-free field, a section of `𝓔[w]`.
    pub fn density(frame: TractorFrame, weight: Scalar, f: Poly) -> Self {
        assert_eq!(f.nvars(), frame.n());
        TractorField { frame, weight, slots: Vec::new(), data: vec![f] }
    }

    pub fn from_data(
        frame: TractorFrame,
        weight: Scalar,
        slots: Vec<SlotKind>,
        data: Vec<Poly>,
    ) -> Result<Self, TractorError> {
        let want = shape_len(&frame, &slots);
        if data.len() != want {
            return Err(TractorError::ShapeMismatch { expected: want, found: data.len() });
        }
        Ok(TractorField { frame, weight, slots, data })
    }

    /// Prepends a slot of kind `lead`; `blocks[k]` is the sub-field at
    /// leading index `k`, all sharing one shape.
    pub fn from_blocks(lead: SlotKind, blocks: Vec<TractorField>) -> Self {
        let first = &blocks[0];
        let (frame, weight) = (first.frame, first.weight.clone());
        assert_eq!(blocks.len(), slot_len(&frame, lead));
        let mut slots = vec![lead];
        slots.extend_from_slice(&first.slots);
        let mut data = Vec::with_capacity(blocks.len() * first.data.len());
        for b in blocks {
            assert_eq!(b.slots, slots[1..]);
            data.extend(b.data);
        }
        TractorField { frame, weight, slots, data }
    }

    pub fn frame(&self) -> &TractorFrame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn weight(&self) -> &Scalar {
        &self.weight
    }

    pub fn with_weight(mut self, w: Scalar) -> Self {
        self.weight = w;
        self
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    pub fn data(&self) -> &[Poly] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    /// The only component of a slot-free field.
    pub fn as_density(&self) -> Option<&Poly> {
        self.slots.is_empty().then(|| &self.data[0])
    }

    /// Component at the given digits (a form slot takes two).
    pub fn get(&self, idx: &[usize]) -> &Poly {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], p: Poly) {
        let i = self.flat(idx);
        self.data[i] = p;
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let digits = self.digits();
        assert_eq!(idx.len(), digits.len());
        idx.iter().zip(&digits).map(|(i, d)| {
            assert!(*i < d.radix);
            i * d.stride
        }).sum()
    }

    fn digits(&self) -> Vec<Digit> {
        let n = self.n();
        let big = self.frame.rank();
        let mut out = Vec::new();
        for s in &self.slots {
            match s {
                SlotKind::Standard => out.push(Digit { radix: big, stride: 0, tractor: true }),
                SlotKind::Form => {
                    out.push(Digit { radix: big, stride: 0, tractor: true });
                    out.push(Digit { radix: big, stride: 0, tractor: true });
                }
                SlotKind::Tensor => out.push(Digit { radix: n, stride: 0, tractor: false }),
            }
        }
        let mut stride = 1;
        for d in out.iter_mut().rev() {
            d.stride = stride;
            stride *= d.radix;
        }
        out
    }

    /// Index of the first digit of each slot.
    fn slot_digit(&self, slot: usize) -> usize {
        self.slots[..slot].iter().map(|s| if *s == SlotKind::Form { 2 } else { 1 }).sum()
    }

    /// Digit positions of the tensor slots.
    pub(crate) fn tensor_digits(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&k| self.slots[k] == SlotKind::Tensor).map(|k| self.slot_digit(k)).collect()
    }

    /// Field whose components with digit `d` equal to `to` are those of
    /// `self` at `from`; all others vanish.
    pub(crate) fn move_digit(&self, d: usize, from: usize, to: usize) -> TractorField {
        let dg = self.digits()[d];
        let mut out = vec![Poly::zero(self.n()); self.data.len()];
        for (flat, p) in self.data.iter().enumerate() {
            if (flat / dg.stride) % dg.radix == from {
                out[flat - from * dg.stride + to * dg.stride] = p.clone();
            }
        }
        TractorField { data: out, ..self.clone() }
    }

    /// Flat index of component `c` with the halves of form slot `k` swapped.
    pub(crate) fn swap_form_halves(&self, k: usize, c: usize) -> usize {
        let digits = self.digits();
        let d = self.slot_digit(k);
        let (s0, s1) = (digits[d].stride, digits[d + 1].stride);
        let (a, b) = ((c / s0) % digits[d].radix, (c / s1) % digits[d + 1].radix);
        c - a * s0 - b * s1 + b * s0 + a * s1
    }

    /// Sub-field at leading index `k`.
    pub fn block(&self, k: usize) -> TractorField {
        let lead = self.slots[0];
        assert!(k < slot_len(&self.frame, lead));
        let size = self.data.len() / slot_len(&self.frame, lead);
        TractorField {
            frame: self.frame,
            weight: self.weight.clone(),
            slots: self.slots[1..].to_vec(),
            data: self.data[k * size..(k + 1) * size].to_vec(),
        }
    }

    fn same_shape(&self, other: &TractorField) {
        assert_eq!(self.frame, other.frame);
        assert_eq!(self.slots, other.slots, "slot shapes differ");
    }

    pub fn add(&self, other: &TractorField) -> TractorField {
        self.same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        TractorField { data, ..self.clone() }
    }

    pub fn sub(&self, other: &TractorField) -> TractorField {
        self.same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        TractorField { data, ..self.clone() }
    }

    pub fn add_scaled(&mut self, c: &Scalar, other: &TractorField) {
        self.same_shape(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_scaled(c, b);
        }
    }

    pub fn scale(&self, c: &Scalar) -> TractorField {
        TractorField { data: self.data.iter().map(|p| p.scale(c)).collect(), ..self.clone() }
    }

    /// `self ⊗ other`: slots concatenated, weights added.
    pub fn tensor(&self, other: &TractorField) -> TractorField {
        assert_eq!(self.frame, other.frame);
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(if a.is_zero() || b.is_zero() { Poly::zero(self.n()) } else { a * b });
            }
        }
        TractorField { frame: self.frame, weight: &self.weight + &other.weight, slots, data }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> TractorField {
        TractorField { data: self.data.iter().map(f).collect(), ..self.clone() }
    }

    /// Coordinate derivative `∂_a` of every component.
    pub fn partial(&self, a: usize) -> TractorField {
        self.map(|p| p.deriv(a))
    }

    /// `out += Σ v · (component with digit `d` moved from `j` to `i`)`.
    fn act_digit(&self, d: Digit, entries: &[(usize, usize, Scalar)], out: &mut [Poly]) {
        for (flat, p) in self.data.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let j = (flat / d.stride) % d.radix;
            for (ti, tj, v) in entries {
                if *tj == j {
                    out[flat - j * d.stride + ti * d.stride].add_scaled(v, p);
                }
            }
        }
    }

    /// Applies one tractor endomorphism, given by sparse entries, to every
    /// tractor index.
    pub fn act_tractor(&self, entries: &[(usize, usize, Scalar)]) -> TractorField {
        let mut out = vec![Poly::zero(self.n()); self.data.len()];
        for d in self.digits().into_iter().filter(|d| d.tractor) {
            self.act_digit(d, entries, &mut out);
        }
        TractorField { data: out, ..self.clone() }
    }

    /// `ρ(M)T`: the matrix `M` applied to each tractor index in turn.
    pub fn transform(&self, m: &[Vec<Poly>]) -> TractorField {
        let mut cur = self.data.clone();
        for d in self.digits().into_iter().filter(|d| d.tractor) {
            let mut out = vec![Poly::zero(self.n()); cur.len()];
            for (flat, p) in cur.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let j = (flat / d.stride) % d.radix;
                let base = flat - j * d.stride;
                for (i, row) in m.iter().enumerate() {
                    if !row[j].is_zero() {
                        out[base + i * d.stride].add_product(&row[j], p);
                    }
                }
            }
            cur = out;
        }
        TractorField { data: cur, ..self.clone() }
    }

    /// Coupled covariant derivative `∇_a` in the flat scale.
    pub fn covariant(&self, a: usize) -> TractorField {
        let gamma: Vec<_> = self.frame.gamma(a).iter().map(|&(i, j, v)| (i, j, Scalar::int(v))).collect();
        self.partial(a).add(&self.act_tractor(&gamma))
    }

    /// `∇T`, with the new lower index prepended.
    pub fn nabla(&self) -> TractorField {
        TractorField::from_blocks(SlotKind::Tensor, (0..self.n()).map(|a| self.covariant(a)).collect())
    }

    /// Coupled Laplacian `g^{ab}∇_a∇_b`. Tensor slots carry no Christoffel
    /// terms, so this is exact for them as well.
    pub fn laplacian(&self) -> TractorField {
        let mut out = TractorField::zero(self.frame, self.weight.clone(), self.slots.clone());
        for a in 0..self.n() {
            let c = self.covariant(a).covariant(a);
            out.add_scaled(&self.frame.metric().diag_scalar(a), &c);
        }
        out
    }

    /// Every form slot re-read as two standard slots. The data is unchanged.
    pub fn unpack_forms(&self) -> TractorField {
        let slots = self
            .slots
            .iter()
            .flat_map(|s| match s {
                SlotKind::Form => vec![SlotKind::Standard, SlotKind::Standard],
                k => vec![*k],
            })
            .collect();
        TractorField { slots, ..self.clone() }
    }

    /// Merges standard slots `i` and `i+1` into a form slot. They must be
    /// skew already.
    pub fn pack(&self, i: usize) -> Result<TractorField, TractorError> {
        if self.slots[i] != SlotKind::Standard || self.slots.get(i + 1) != Some(&SlotKind::Standard) {
            return Err(TractorError::KindMismatch);
        }
        if self.swap_adjacent(i).add(self) != self.scale(&Scalar::zero()) {
            return Err(TractorError::NotSkew);
        }
        let mut slots = self.slots.clone();
        slots.splice(i..i + 2, [SlotKind::Form]);
        Ok(TractorField { slots, ..self.clone() })
    }

    /// Reorders slots: slot `k` of the result is slot `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> TractorField {
        assert_eq!(order.len(), self.slots.len());
        let slots: Vec<SlotKind> = order.iter().map(|&k| self.slots[k]).collect();
        let mut out = TractorField::zero(self.frame, self.weight.clone(), slots);
        let src = self.digits();
        // digits of the result, listed as indices into `src`
        let mut map = Vec::new();
        for &k in order {
            let d0 = self.slot_digit(k);
            map.push(d0);
            if self.slots[k] == SlotKind::Form {
                map.push(d0 + 1);
            }
        }
        let dst = out.digits();
        for (flat, p) in self.data.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let target: usize = map
                .iter()
                .zip(&dst)
                .map(|(&s, d)| ((flat / src[s].stride) % src[s].radix) * d.stride)
                .sum();
            out.data[target] = p.clone();
        }
        out
    }

    fn swap_adjacent(&self, i: usize) -> TractorField {
        let mut order: Vec<usize> = (0..self.slots.len()).collect();
        order.swap(i, i + 1);
        self.permute(&order)
    }

    /// Symmetric part in slots `i`, `i+1`.
    pub fn symmetrize(&self, i: usize) -> TractorField {
        self.add(&self.swap_adjacent(i)).scale(&Scalar::ratio(1, 2))
    }

    /// Contraction of slots `i < j` of equal kind, standard or tensor, with
    /// the tractor metric or `g` respectively.
    pub fn trace(&self, i: usize, j: usize) -> Result<TractorField, TractorError> {
        assert!(i < j);
        let kind = self.slots[i];
        if kind != self.slots[j] || kind == SlotKind::Form {
            return Err(TractorError::KindMismatch);
        }
        let mut slots = self.slots.clone();
        slots.remove(j);
        slots.remove(i);
        let mut out = TractorField::zero(self.frame, self.weight.clone(), slots);
        let src = self.digits();
        let (di, dj) = (src[self.slot_digit(i)], src[self.slot_digit(j)]);
        let dst = out.digits();
        let keep: Vec<usize> = (0..src.len()).filter(|&k| k != self.slot_digit(i) && k != self.slot_digit(j)).collect();
        for (flat, p) in self.data.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let (a, b) = ((flat / di.stride) % di.radix, (flat / dj.stride) % dj.radix);
            let c = match kind {
                SlotKind::Standard => {
                    let (lb, sign) = self.frame.lower(b);
                    if lb != a { continue; }
                    sign
                }
                _ => {
                    if a != b { continue; }
                    self.frame.g(a)
                }
            };
            let target: usize =
                keep.iter().zip(&dst).map(|(&s, d)| ((flat / src[s].stride) % src[s].radix) * d.stride).sum();
            out.data[target].add_scaled(&Scalar::int(c), p);
        }
        Ok(out)
    }

    /// `v ⊗ self` for a constant tractor `v`, new standard slot in front.
    pub fn tensor_vector(&self, v: &[Scalar]) -> TractorField {
        assert_eq!(v.len(), self.frame.rank());
        TractorField::from_blocks(SlotKind::Standard, v.iter().map(|c| self.scale(c)).collect())
    }

    /// `X^A ⊗ self`. The weight goes up by one.
    pub fn times_x(&self) -> TractorField {
        let mut v = vec![Scalar::zero(); self.frame.rank()];
        v[self.frame.x_index()] = Scalar::one();
        let w = &self.weight + &Scalar::one();
        self.tensor_vector(&v).with_weight(w)
    }

    /// `h^{AB} ⊗ self`, two new standard slots in front.
    pub fn times_h(&self) -> TractorField {
        let big = self.frame.rank();
        let blocks = (0..big)
            .map(|a| {
                let row: Vec<Scalar> = (0..big).map(|b| Scalar::int(self.frame.h(a, b))).collect();
                self.tensor_vector(&row)
            })
            .collect();
        TractorField::from_blocks(SlotKind::Standard, blocks)
    }

    /// `Σ_t I^t F_t` over the leading slots of `f`, which must match the
    /// slots of `i`; tractor indices are paired through the tractor
    /// metric and tensor indices through `g`.
    pub fn contract_leading(i: &TractorField, f: &TractorField) -> Result<TractorField, TractorError> {
        let k = i.slots.len();
        if f.slots.len() < k || f.slots[..k] != i.slots[..] {
            return Err(TractorError::KindMismatch);
        }
        let digits = i.digits();
        let rest_len = f.data.len() / i.data.len().max(1);
        let mut out = TractorField::zero(f.frame, f.weight.clone(), f.slots[k..].to_vec());
        for (t, c) in i.data.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut partner = 0;
            let mut sign = 1;
            for d in &digits {
                let v = (t / d.stride) % d.radix;
                let (u, s) = if d.tractor { i.frame.lower(v) } else { (v, i.frame.g(v)) };
                partner += u * d.stride;
                sign *= s;
            }
            let sc = Scalar::int(sign);
            for (o, p) in out.data.iter_mut().zip(&f.data[partner * rest_len..(partner + 1) * rest_len]) {
                if !p.is_zero() {
                    let term = c * p;
                    o.add_scaled(&sc, &term);
                }
            }
        }
        Ok(out)
    }

    /// Projector pattern listing in canonical order, one line per nonzero
    /// coefficient. Coefficients are those of upper-index patterns; a form
    /// slot lists each unordered pair once.
    pub fn pattern_dump(&self) -> String {
        let digits = self.digits();
        let n = self.n();
        let mut lines: Vec<(PatternKey, String)> = Vec::new();
        'outer: for (flat, p) in self.data.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut key = Vec::new();
            let mut label = Vec::new();
            let mut coef = Scalar::one();
            let mut d = 0;
            for s in &self.slots {
                let v = |k: usize| (flat / digits[k].stride) % digits[k].radix;
                match s {
                    SlotKind::Standard => {
                        let a = v(d);
                        d += 1;
                        let (r, txt) = match a {
                            0 => (0, "Y".to_string()),
                            a if a == n + 1 => (2, "X".to_string()),
                            a => (1, format!("Z{a}")),
                        };
                        key.push((r, a, 0));
                        label.push(txt);
                    }
                    SlotKind::Form => {
                        let (a, b) = (v(d), v(d + 1));
                        d += 2;
                        let (r, txt, c) = match (a, b) {
                            (0, b) if b >= 1 && b <= n => (0, format!("𝕐{b}"), 2),
                            (a, b) if a >= 1 && b <= n && a < b => (1, format!("ℤ{a}{b}"), 1),
                            (a, 0) if a == n + 1 => (2, "𝕎".to_string(), 2),
                            (a, b) if a == n + 1 && b >= 1 && b <= n => (3, format!("𝕏{b}"), 2),
                            _ => continue 'outer,
                        };
                        key.push((r, a, b));
                        label.push(txt);
                        coef *= Scalar::int(c);
                    }
                    SlotKind::Tensor => {
                        let a = v(d);
                        d += 1;
                        key.push((4, a, 0));
                        label.push(format!("_{}", a + 1));
                    }
                }
            }
            lines.push((key, format!("{}: {}", label.join(" "), p.scale(&coef))));
        }
        lines.sort();
        lines.into_iter().map(|(_, l)| l + "\n").collect()
    }
}

/// Sort key of one dump line: per slot, a rank and the frame indices.
type PatternKey = Vec<(u8, usize, usize)>;

fn slot_len(frame: &TractorFrame, kind: SlotKind) -> usize {
    match kind {
        SlotKind::Standard => frame.rank(),
        SlotKind::Form => frame.rank() * frame.rank(),
        SlotKind::Tensor => frame.n(),
    }
}

fn shape_len(frame: &TractorFrame, slots: &[SlotKind]) -> usize {
    slots.iter().map(|s| slot_len(frame, *s)).product()
}

impl fmt::Debug for TractorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TractorField(w = {}, slots = {:?})", self.weight, self.slots)?;
        f.write_str(&self.pattern_dump())
    }
}
