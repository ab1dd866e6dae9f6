use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::{ExactMatrix, Metric, Poly, Scalar, TensorError};

/// Sorted multiset of coordinate indices, the key of a symmetric component.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multiset(Vec<u8>);

impl Multiset {
    pub fn new(mut idx: Vec<u8>) -> Self {
        idx.sort_unstable();
        Multiset(idx)
    }

    pub fn empty() -> Self {
        Multiset(Vec::new())
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        Multiset(counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i as u8, c as usize)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn counts(&self, n: usize) -> Vec<u32> {
        let mut c = vec![0; n];
        for &i in &self.0 {
            c[i as usize] += 1;
        }
        c
    }

    /// Number of distinct orderings, `|M|! / prod(m_i!)`.
    pub fn orderings(&self) -> Scalar {
        let mut out = Scalar::factorial(self.0.len() as u32);
        let mut run = 1u32;
        for w in self.0.windows(2) {
            if w[0] == w[1] {
                run += 1;
                out = out / Scalar::int(run as i64);
            } else {
                run = 1;
            }
        }
        out
    }

    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Multiset::new(v)
    }

    pub fn with(&self, i: usize) -> Multiset {
        let mut v = self.0.clone();
        v.push(i as u8);
        Multiset::new(v)
    }

    /// `self` minus `sub`, or `None` when `sub` is not contained.
    pub fn minus(&self, sub: &Multiset) -> Option<Multiset> {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &x in &self.0 {
            if j < sub.0.len() && sub.0[j] == x {
                j += 1;
            } else {
                rest.push(x);
            }
        }
        (j == sub.0.len()).then_some(Multiset(rest))
    }

    /// Every sub-multiset of size `q`, each listed once.
    pub fn submultisets(&self, q: usize) -> Vec<Multiset> {
        let mut out = Vec::new();
        fn rec(src: &[u8], q: usize, cur: &mut Vec<u8>, out: &mut Vec<Multiset>) {
            if cur.len() == q {
                out.push(Multiset(cur.clone()));
                return;
            }
            let mut i = 0;
            while i < src.len() {
                cur.push(src[i]);
                rec(&src[i + 1..], q, cur, out);
                cur.pop();
                let v = src[i];
                while i < src.len() && src[i] == v {
                    i += 1;
                }
            }
        }
        rec(&self.0, q, &mut Vec::new(), &mut out);
        out
    }

    /// All multisets of size `p` over `0..n`, in sorted order.
    pub fn all(n: usize, p: usize) -> Vec<Multiset> {
        let mut out = Vec::new();
        fn rec(n: usize, p: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<Multiset>) {
            if cur.len() == p {
                out.push(Multiset(cur.clone()));
                return;
            }
            for i in start..n as u8 {
                cur.push(i);
                rec(n, p, i, cur, out);
                cur.pop();
            }
        }
        rec(n, p, 0, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", s.join(""))
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl Serialize for Multiset {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

/// Symmetric tensor with upper indices and polynomial components, stored
/// once per index multiset.
///
/// Equality compares rank and components; the weight label and trace-free
/// flag are bookkeeping.
#[derive(Clone)]
pub struct SymTensor {
    n: usize,
    rank: usize,
    weight: Scalar,
    comps: BTreeMap<Multiset, Poly>,
    tracefree: bool,
}

impl SymTensor {
    pub fn zero(n: usize, rank: usize) -> Self {
        SymTensor { n, rank, weight: Scalar::zero(), comps: BTreeMap::new(), tracefree: true }
    }

    pub fn scalar(p: Poly) -> Self {
        let mut t = SymTensor::zero(p.nvars(), 0);
        t.set(Multiset::empty(), p);
        t
    }

    /// Symmetric tensor whose only independent component is at `m`.
    pub fn basis(n: usize, m: Multiset, value: Poly) -> Self {
        let mut t = SymTensor::zero(n, m.len());
        t.set(m, value);
        t.tracefree = false;
        t
    }

    /// Rank-1 tensor from a list of polynomial components.
    pub fn vector(comps: Vec<Poly>) -> Self {
        let n = comps.first().map_or(0, Poly::nvars);
        let mut t = SymTensor::zero(n, 1);
        for (i, c) in comps.into_iter().enumerate() {
            t.set(Multiset(vec![i as u8]), c);
        }
        t.tracefree = false;
        t
    }

    pub fn with_weight(mut self, w: Scalar) -> Self {
        self.weight = w;
        self
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self) -> &Scalar {
        &self.weight
    }

    /// Whether the trace-free flag is set. Only projections set it.
    pub fn flagged_tracefree(&self) -> bool {
        self.tracefree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, m: &Multiset) -> Poly {
        self.comps.get(m).cloned().unwrap_or_else(|| Poly::zero(self.n))
    }

    pub fn get_ref(&self, m: &Multiset) -> Option<&Poly> {
        self.comps.get(m)
    }

    pub fn set(&mut self, m: Multiset, v: Poly) {
        debug_assert_eq!(m.len(), self.rank);
        self.tracefree = false;
        if v.is_zero() {
            self.comps.remove(&m);
        } else {
            self.comps.insert(m, v);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&Multiset, &Poly)> {
        self.comps.iter()
    }

    fn add_at(&mut self, m: Multiset, c: &Scalar, v: &Poly) {
        let e = self.comps.entry(m.clone()).or_insert_with(|| Poly::zero(self.n));
        e.add_scaled(c, v);
        if e.is_zero() {
            self.comps.remove(&m);
        }
    }

    /// Symmetrize a tensor given on index tuples (missing tuples are zero).
    pub fn sym_part(n: usize, rank: usize, full: &BTreeMap<Vec<u8>, Poly>) -> SymTensor {
        let mut out = SymTensor::zero(n, rank);
        for (tuple, v) in full {
            assert_eq!(tuple.len(), rank, "tuple length must equal rank");
            let m = Multiset::new(tuple.clone());
            let w = m.orderings().recip();
            out.add_at(m, &w, v);
        }
        out.tracefree = false;
        out
    }

    pub fn add(&self, other: &SymTensor) -> SymTensor {
        self.add_scaled(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        self.add_scaled(&-Scalar::one(), other)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SymTensor) -> SymTensor {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut out = self.clone();
        for (m, v) in &other.comps {
            out.add_at(m.clone(), c, v);
        }
        out.tracefree = self.tracefree && other.tracefree;
        out
    }

    pub fn scale(&self, c: &Scalar) -> SymTensor {
        let mut out = SymTensor::zero(self.n, self.rank).with_weight(self.weight.clone());
        if !c.is_zero() {
            out.comps = self.comps.iter().map(|(m, v)| (m.clone(), v.scale(c))).collect();
        }
        out.tracefree = self.tracefree;
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> SymTensor {
        let mut out = SymTensor::zero(self.n, self.rank).with_weight(self.weight.clone());
        for (m, v) in &self.comps {
            out.set(m.clone(), v * p);
        }
        out.tracefree = self.tracefree;
        out
    }

    pub fn map_components(&self, f: impl Fn(&Poly) -> Poly) -> SymTensor {
        let mut out = SymTensor::zero(self.n, self.rank).with_weight(self.weight.clone());
        for (m, v) in &self.comps {
            out.set(m.clone(), f(v));
        }
        out.tracefree = false;
        out
    }

    /// Largest total degree among the components.
    pub fn degree(&self) -> Option<u32> {
        self.comps.values().filter_map(Poly::degree).max()
    }

    /// Metric contraction of two slots.
    pub fn trace(&self, g: &Metric) -> Result<SymTensor, TensorError> {
        if self.rank < 2 {
            return Err(TensorError::RankTooSmall(self.rank));
        }
        let mut out = SymTensor::zero(self.n, self.rank - 2).with_weight(self.weight.clone());
        for (m, v) in &self.comps {
            // Each component feeds every trace entry obtained by removing a pair i,i.
            let counts = m.counts(self.n);
            for (i, &c) in counts.iter().enumerate() {
                if c >= 2 {
                    let pair = Multiset(vec![i as u8, i as u8]);
                    let rest = m.minus(&pair).expect("pair present");
                    out.add_at(rest, &g.diag_scalar(i), v);
                }
            }
        }
        out.tracefree = false;
        Ok(out)
    }

    pub fn is_tracefree(&self, g: &Metric) -> bool {
        self.rank < 2 || self.trace(g).map(|t| t.is_zero()).unwrap_or(true)
    }

    /// Symmetrized tensor product.
    pub fn sym_product(&self, other: &SymTensor) -> SymTensor {
        let rank = self.rank + other.rank;
        let mut out = SymTensor::zero(self.n, rank).with_weight(&self.weight + &other.weight);
        for (a, va) in &self.comps {
            for (b, vb) in &other.comps {
                let m = a.union(b);
                let c = &(&a.orderings() * &b.orderings()) / &m.orderings();
                let prod = va * vb;
                out.add_at(m, &c, &prod);
            }
        }
        out.tracefree = false;
        out
    }

    /// The inverse metric as a rank-2 symmetric tensor.
    pub fn metric(n: usize, g: &Metric) -> SymTensor {
        let mut t = SymTensor::zero(n, 2);
        for i in 0..n {
            t.set(Multiset(vec![i as u8, i as u8]), Poly::constant(n, g.diag_scalar(i)));
        }
        t
    }

    /// `g ⊙ ... ⊙ g` with `q` factors.
    pub fn metric_power(n: usize, g: &Metric, q: usize) -> SymTensor {
        let gm = SymTensor::metric(n, g);
        (0..q).fold(SymTensor::scalar(Poly::one(n)), |acc, _| acc.sym_product(&gm))
    }

    /// Symmetric part of `q` raised gradients: `sym(∇^{a1}…∇^{aq} T)`.
    pub fn sym_gradient(&self, g: &Metric, q: usize) -> SymTensor {
        let rank = self.rank + q;
        let mut out = SymTensor::zero(self.n, rank);
        let derivs = Multiset::all(self.n, q);
        for (m, v) in &self.comps {
            for d in &derivs {
                let counts = d.counts(self.n);
                let sign: i64 = counts.iter().enumerate().map(|(i, &c)| g.diag(i).pow(c)).product();
                let alpha = super::Monomial::from_exponents(&counts);
                let dv = v.deriv_multi(alpha);
                if dv.is_zero() {
                    continue;
                }
                let full = m.union(d);
                let c = &(&(&m.orderings() * &d.orderings()) / &full.orderings()) * &Scalar::int(sign);
                out.add_at(full, &c, &dv);
            }
        }
        out.weight = self.weight.clone();
        out.tracefree = false;
        out
    }

    /// Trace-free part, obtained by solving `tr(T - g ⊙ L) = 0` for `L`.
    pub fn trace_free(&self, g: &Metric) -> SymTensor {
        if self.tracefree || self.rank < 2 {
            let mut t = self.clone();
            t.tracefree = true;
            return t;
        }
        let lower = self.trace_correction(g);
        let mut out = self.sub(&SymTensor::metric(self.n, g).sym_product(&lower));
        out.weight = self.weight.clone();
        out.tracefree = true;
        out
    }

    /// The `L` with `T = T₀ + g ⊙ L`, `T₀` trace-free.
    fn trace_correction(&self, g: &Metric) -> SymTensor {
        let tr = self.trace(g).expect("rank >= 2");
        let proj = trace_solver(g, self.rank);
        let basis = Multiset::all(self.n, self.rank - 2);
        let mut out = SymTensor::zero(self.n, self.rank - 2);
        for (i, mi) in basis.iter().enumerate() {
            let mut acc = Poly::zero(self.n);
            for (j, mj) in basis.iter().enumerate() {
                let c = &proj[(i, j)];
                if !c.is_zero() {
                    if let Some(v) = tr.get_ref(mj) {
                        acc.add_scaled(c, v);
                    }
                }
            }
            out.set(mi.clone(), acc);
        }
        out
    }

    /// Split into trace-free pieces: `T = Σ_q g^{⊙q} ⊙ T_q`.
    pub fn decompose(&self, g: &Metric) -> Vec<SymTensor> {
        let mut parts = Vec::new();
        let mut cur = self.clone();
        loop {
            if cur.rank < 2 {
                cur.tracefree = true;
                parts.push(cur);
                return parts;
            }
            let lower = cur.trace_correction(g);
            let mut top = cur.sub(&SymTensor::metric(self.n, g).sym_product(&lower));
            top.tracefree = true;
            parts.push(top);
            cur = lower;
        }
    }

    /// Inverse of [`SymTensor::decompose`].
    pub fn recompose(n: usize, g: &Metric, parts: &[SymTensor]) -> SymTensor {
        let rank = parts.first().map_or(0, |p| p.rank);
        parts.iter().enumerate().fold(SymTensor::zero(n, rank), |acc, (q, t)| {
            acc.add(&SymTensor::metric_power(n, g, q).sym_product(t))
        })
    }

    /// Full contraction of two rank-`p` symmetric tensors, indices lowered
    /// with `g`.
    pub fn dot(&self, other: &SymTensor, g: &Metric) -> Poly {
        assert_eq!(self.rank, other.rank);
        let mut acc = Poly::zero(self.n);
        for (m, v) in &self.comps {
            if let Some(w) = other.get_ref(m) {
                let sign: i64 = m.indices().iter().map(|&i| g.diag(i as usize)).product();
                let c = &m.orderings() * &Scalar::int(sign);
                acc.add_scaled(&c, &(v * w));
            }
        }
        acc
    }
}

impl PartialEq for SymTensor {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rank == other.rank && self.comps == other.comps
    }
}

impl Eq for SymTensor {}

impl fmt::Debug for SymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymTensor(rank {}, w {}) {{", self.rank, self.weight)?;
        for (m, v) in &self.comps {
            write!(f, " {m}: {v};")?;
        }
        write!(f, " }}")
    }
}

impl Serialize for SymTensor {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.comps.len()))?;
        for (m, v) in &self.comps {
            map.serialize_entry(&m.to_string(), &v.to_string())?;
        }
        map.end()
    }
}

type SolverKey = (usize, usize, usize);

/// Memo of the inverse of `L ↦ tr(g ⊙ L)` per (signature, rank). The map is a
/// pure function of its key, so the cache never changes observable results.
fn trace_solver(g: &Metric, rank: usize) -> Arc<ExactMatrix> {
    static CACHE: OnceLock<Mutex<HashMap<SolverKey, Arc<ExactMatrix>>>> = OnceLock::new();
    let (s, s_neg) = g.signature();
    let key = (s, s_neg, rank);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().expect("cache lock").get(&key) {
        return m.clone();
    }
    let n = g.dim();
    let basis = Multiset::all(n, rank - 2);
    let index: HashMap<&Multiset, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let gm = SymTensor::metric(n, g);
    let mut a = ExactMatrix::zeros(basis.len(), basis.len());
    for (j, mj) in basis.iter().enumerate() {
        let img = gm.sym_product(&SymTensor::basis(n, mj.clone(), Poly::one(n))).trace(g).expect("rank");
        for (mi, v) in img.components() {
            a[(index[mi], j)] = v.constant_term();
        }
    }
    let inv = Arc::new(a.inverse().expect("trace map is invertible for nondegenerate metrics"));
    cache.lock().expect("cache lock").insert(key, inv.clone());
    inv
}
