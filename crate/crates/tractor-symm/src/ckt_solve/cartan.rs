use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::exact_tensor::{ExactMatrix, Monomial, Multiset, Poly, Scalar, SparseEchelon, SparseRow, SymTensor};
use crate::tractor_calc::{transport, SlotKind, TractorField, TractorFrame};

use super::{ckt_apply, CktError, CktLabel};

/// Where a component lives among the independent unknowns, up to sign.
type Slotting = Option<(usize, i64)>;

/// Constant tractors of shape `p` form pairs followed by `2r` standard
/// slots that lie in the irreducible (Cartan) part: skew in each pair,
/// symmetric under exchange of pairs and among standard slots, totally
/// trace-free, and killed by every three-index skew.
///
/// Parallel sections of this part correspond one-to-one to solutions of
/// the label's equation; [`CartanSpace::split`] and [`extract`] realize
/// the correspondence.
#[derive(Clone)]
pub struct CartanSpace {
    frame: TractorFrame,
    label: CktLabel,
    /// For every flat component index, its unknown and sign.
    slotting: Vec<Slotting>,
    /// Kernel basis in unknown coordinates.
    basis: Vec<BTreeMap<usize, Scalar>>,
    /// `extract(transport(K_i))` for every basis element.
    images: Vec<SymTensor>,
}

impl CartanSpace {
    pub fn new(frame: TractorFrame, label: CktLabel) -> Self {
        let big = frame.rank();
        let digits = 2 * label.p + 2 * label.r;
        let slotting = slotting(big, label);
        let unknowns = slotting.iter().flatten().map(|(u, _)| u + 1).max().unwrap_or(0);

        let mut ech = SparseEchelon::new(unknowns);
        let mut seen = BTreeSet::new();
        for size in [2usize, 3] {
            for subset in subsets(digits, size) {
                let sig = signature(&subset, label.p);
                if !seen.insert((size, sig)) || redundant(&subset, label.p) {
                    continue;
                }
                let rows = if size == 2 {
                    trace_rows(&frame, &slotting, digits, &subset)
                } else {
                    skew_rows(big, &slotting, digits, &subset)
                };
                for row in rows {
                    ech.insert(row);
                }
            }
        }
        let basis = ech.kernel_sparse();
        let mut space = CartanSpace { frame, label, slotting, basis, images: Vec::new() };
        space.images = (0..space.basis.len()).map(|i| extract_transported(&space, i)).collect();
        space
    }

    pub fn label(&self) -> CktLabel {
        self.label
    }

    pub fn frame(&self) -> &TractorFrame {
        &self.frame
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn slots(&self) -> Vec<SlotKind> {
        self.label.tractor_slots()
    }

    /// The constant tractor `Σ c_i K_i`.
    pub fn initial(&self, coords: &[Scalar]) -> TractorField {
        assert_eq!(coords.len(), self.basis.len());
        let n = self.frame.n();
        let mut by_unknown: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (c, k) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (u, v) in k {
                *by_unknown.entry(*u).or_insert_with(Scalar::zero) += c * v;
            }
        }
        let data = self
            .slotting
            .iter()
            .map(|s| match s {
                Some((u, sign)) => by_unknown.get(u).map_or_else(|| Poly::zero(n), |v| Poly::constant(n, v * &Scalar::int(*sign))),
                None => Poly::zero(n),
            })
            .collect();
        TractorField::from_data(self.frame, Scalar::zero(), self.slots(), data).expect("shape")
    }

    /// Parallel basis element `i`, transported from the origin.
    pub fn parallel(&self, i: usize) -> TractorField {
        let mut c = vec![Scalar::zero(); self.basis.len()];
        c[i] = Scalar::one();
        transport(&self.initial(&c))
    }

    /// Projecting parts of the parallel basis; a basis of the solutions.
    pub fn solutions(&self) -> &[SymTensor] {
        &self.images
    }

    /// Coordinates of `φ` in the basis of [`CartanSpace::solutions`].
    pub fn coordinates(&self, phi: &SymTensor) -> Result<Vec<Scalar>, CktError> {
        let g = self.frame.metric();
        if phi.rank() != self.label.p {
            return Err(CktError::RankMismatch { expected: self.label.p, found: phi.rank() });
        }
        let not_solution = || CktError::NotASolution {
            order: self.label.equation_order(),
            residue: Box::new(ckt_apply(phi, self.label, g).expect("rank checked")),
        };
        let mut keys: BTreeMap<(Multiset, Monomial), usize> = BTreeMap::new();
        for t in self.images.iter().chain(std::iter::once(phi)) {
            for (m, v) in t.components() {
                for (mono, _) in v.terms() {
                    let next = keys.len();
                    keys.entry((m.clone(), mono)).or_insert(next);
                }
            }
        }
        let mut a = ExactMatrix::zeros(keys.len(), self.images.len());
        let mut b = vec![Scalar::zero(); keys.len()];
        for (j, t) in self.images.iter().enumerate() {
            for (m, v) in t.components() {
                for (mono, c) in v.terms() {
                    a[(keys[&(m.clone(), mono)], j)] = c.clone();
                }
            }
        }
        for (m, v) in phi.components() {
            for (mono, c) in v.terms() {
                b[keys[&(m.clone(), mono)]] = c.clone();
            }
        }
        let sol = a.solve(&b).map_err(|_| not_solution())?;
        Ok(sol.particular)
    }

    /// The parallel tractor `I_φ` whose projecting part is `φ`.
    pub fn split(&self, phi: &SymTensor) -> Result<TractorField, CktError> {
        let c = self.coordinates(phi)?;
        Ok(transport(&self.initial(&c)))
    }
}

/// Projecting part: each form slot contracted with `2𝕏`, each standard
/// slot with `X`. In components, `2^p I^{(0,a1+1)…(0,ap+1) 0…0}`.
pub fn extract(i: &TractorField, label: CktLabel) -> Result<SymTensor, CktError> {
    if i.slots() != label.tractor_slots() {
        return Err(CktError::ShapeMismatch(label));
    }
    let n = i.n();
    let scale = Scalar::int(1 << label.p);
    let mut out = SymTensor::zero(n, label.p);
    for m in Multiset::all(n, label.p) {
        let mut idx = Vec::new();
        for &a in m.indices() {
            idx.extend([0, a as usize + 1]);
        }
        idx.extend(std::iter::repeat_n(0, 2 * label.r));
        out.set(m, i.get(&idx).scale(&scale));
    }
    Ok(out.with_weight(Scalar::int(2 * label.r as i64)))
}

/// Sorted form pairs and standard indices of one flat component.
type SlotKey = (Vec<(usize, usize)>, Vec<usize>);

/// Canonical unknown and sign of every flat component.
fn slotting(big: usize, label: CktLabel) -> Vec<Slotting> {
    let digits = 2 * label.p + 2 * label.r;
    let mut index: HashMap<SlotKey, usize> = HashMap::new();
    let total = big.pow(digits as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let t = decode(flat, big, digits);
        let mut sign = 1;
        let mut pairs = Vec::with_capacity(label.p);
        let mut zero = false;
        for k in 0..label.p {
            let (a, b) = (t[2 * k], t[2 * k + 1]);
            if a == b {
                zero = true;
                break;
            }
            if a > b {
                sign = -sign;
                pairs.push((b, a));
            } else {
                pairs.push((a, b));
            }
        }
        if zero {
            out.push(None);
            continue;
        }
        pairs.sort_unstable();
        let mut std = t[2 * label.p..].to_vec();
        std.sort_unstable();
        let next = index.len();
        let u = *index.entry((pairs, std)).or_insert(next);
        out.push(Some((u, sign)));
    }
    out
}

fn decode(mut flat: usize, big: usize, digits: usize) -> Vec<usize> {
    let mut t = vec![0; digits];
    for d in (0..digits).rev() {
        t[d] = flat % big;
        flat /= big;
    }
    t
}

fn encode(t: &[usize], big: usize) -> usize {
    t.iter().fold(0, |acc, &v| acc * big + v)
}

fn subsets(digits: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, digits: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for d in start..digits {
            cur.push(d);
            rec(d + 1, digits, size, cur, out);
            cur.pop();
        }
    }
    rec(0, digits, size, &mut cur, &mut out);
    out
}

/// Orbit label of a set of digit positions under the slot symmetries.
fn signature(subset: &[usize], p: usize) -> (Vec<usize>, usize) {
    let mut per_form = vec![0; p];
    let mut std = 0;
    for &d in subset {
        if d < 2 * p {
            per_form[d / 2] += 1;
        } else {
            std += 1;
        }
    }
    per_form.retain(|&c| c > 0);
    per_form.sort_unstable_by(|a, b| b.cmp(a));
    (per_form, std)
}

/// Conditions that hold automatically: a trace inside one pair, or a skew
/// over two symmetric standard slots.
fn redundant(subset: &[usize], p: usize) -> bool {
    let (per_form, std) = signature(subset, p);
    (subset.len() == 2 && per_form.first() == Some(&2)) || (subset.len() == 3 && std >= 2)
}

fn trace_rows(frame: &TractorFrame, slotting: &[Slotting], digits: usize, pos: &[usize]) -> Vec<SparseRow> {
    let big = frame.rank();
    let rest = digits - 2;
    let mut rows = Vec::new();
    for flat in 0..big.pow(rest as u32) {
        let others = decode(flat, big, rest);
        let mut row = SparseRow::new();
        for a in 0..big {
            let (b, eps) = frame.lower(a);
            let mut t = Vec::with_capacity(digits);
            let mut it = others.iter();
            for d in 0..digits {
                t.push(if d == pos[0] { a } else if d == pos[1] { b } else { *it.next().expect("digit") });
            }
            if let Some((u, s)) = slotting[encode(&t, big)] {
                *row.entry(u).or_insert_with(Scalar::zero) += Scalar::int(s * eps);
            }
        }
        row.retain(|_, v| !v.is_zero());
        if !row.is_empty() {
            rows.push(row);
        }
    }
    rows
}

fn skew_rows(big: usize, slotting: &[Slotting], digits: usize, pos: &[usize]) -> Vec<SparseRow> {
    const PERMS: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let rest = digits - 3;
    let mut rows = Vec::new();
    for flat in 0..big.pow(rest as u32) {
        let others = decode(flat, big, rest);
        for vals in subsets(big, 3) {
            let mut row = SparseRow::new();
            for (perm, sgn) in PERMS {
                let mut t = Vec::with_capacity(digits);
                let mut it = others.iter();
                for d in 0..digits {
                    t.push(match pos.iter().position(|&q| q == d) {
                        Some(k) => vals[perm[k]],
                        None => *it.next().expect("digit"),
                    });
                }
                if let Some((u, s)) = slotting[encode(&t, big)] {
                    *row.entry(u).or_insert_with(Scalar::zero) += Scalar::int(s * sgn);
                }
            }
            row.retain(|_, v| !v.is_zero());
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    rows
}

/// `extract(ρ(E) K_i)` computed only on the components extraction reads.
fn extract_transported(space: &CartanSpace, i: usize) -> SymTensor {
    let frame = &space.frame;
    let n = frame.n();
    let big = frame.rank();
    let label = space.label;
    let digits = 2 * label.p + 2 * label.r;
    let e = frame.transport();
    let k = &space.basis[i];
    let nonzero: Vec<(Vec<usize>, Scalar)> = space
        .slotting
        .iter()
        .enumerate()
        .filter_map(|(flat, s)| {
            let (u, sign) = (*s)?;
            k.get(&u).map(|v| (decode(flat, big, digits), v * &Scalar::int(sign)))
        })
        .collect();
    let scale = Scalar::int(1 << label.p);
    let mut out = SymTensor::zero(n, label.p);
    for m in Multiset::all(n, label.p) {
        let a = m.indices();
        let mut acc = Poly::zero(n);
        for (t, v) in &nonzero {
            let mut term = Poly::constant(n, v.clone());
            for d in 0..digits {
                let row = if d < 2 * label.p && d % 2 == 1 { a[d / 2] as usize + 1 } else { 0 };
                let entry = &e[row][t[d]];
                if entry.is_zero() {
                    term = Poly::zero(n);
                    break;
                }
                term = &term * entry;
            }
            acc += &term;
        }
        out.set(m, acc.scale(&scale));
    }
    out.with_weight(Scalar::int(2 * label.r as i64))
}

impl std::fmt::Debug for CartanSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CartanSpace").field("label", &self.label).field("dimension", &self.basis.len()).finish()
    }
}
