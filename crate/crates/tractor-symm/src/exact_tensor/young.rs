use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{ExactMatrix, Poly, Scalar, SparseEchelon, SparseRow};

/// Index symmetries and traces imposed on a dense rank-`rank` tensor over a
/// `dim`-dimensional space, solved as an exact constraint kernel.
///
/// `lower` is the metric used to contract two upper indices.
pub struct SlotConstraints {
    dim: usize,
    rank: usize,
    lower: Vec<Vec<Scalar>>,
    rows: SparseEchelon,
}

impl SlotConstraints {
    pub fn new(dim: usize, rank: usize, lower: Vec<Vec<Scalar>>) -> Self {
        let size = dim.pow(rank as u32);
        SlotConstraints { dim, rank, lower, rows: SparseEchelon::new(size) }
    }

    pub fn size(&self) -> usize {
        self.dim.pow(self.rank as u32)
    }

    fn flat(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    fn tuples(&self) -> Vec<Vec<usize>> {
        (0..self.size())
            .map(|mut k| {
                let mut t = vec![0; self.rank];
                for slot in (0..self.rank).rev() {
                    t[slot] = k % self.dim;
                    k /= self.dim;
                }
                t
            })
            .collect()
    }

    fn push_perm_relation(&mut self, perm: &dyn Fn(&mut Vec<usize>), sign: i64) {
        for t in self.tuples() {
            let mut u = t.clone();
            perm(&mut u);
            let (a, b) = (self.flat(&t), self.flat(&u));
            let mut row = SparseRow::new();
            *row.entry(a).or_insert_with(Scalar::zero) += Scalar::one();
            *row.entry(b).or_insert_with(Scalar::zero) += Scalar::int(-sign);
            self.rows.insert(row);
        }
    }

    /// `T[..i..j..] = -T[..j..i..]`.
    pub fn skew(mut self, i: usize, j: usize) -> Self {
        self.push_perm_relation(&move |u: &mut Vec<usize>| u.swap(i, j), -1);
        self
    }

    /// `T[..i..j..] = T[..j..i..]`.
    pub fn symmetric(mut self, i: usize, j: usize) -> Self {
        self.push_perm_relation(&move |u: &mut Vec<usize>| u.swap(i, j), 1);
        self
    }

    /// Exchange of the slot pairs `(a, b)` and `(c, d)` leaves `T` unchanged.
    pub fn pair_exchange(mut self, (a, b): (usize, usize), (c, d): (usize, usize)) -> Self {
        self.push_perm_relation(
            &move |u: &mut Vec<usize>| {
                u.swap(a, c);
                u.swap(b, d);
            },
            1,
        );
        self
    }

    /// Total antisymmetrization over slots `i, j, k` vanishes.
    pub fn no_three_skew(mut self, i: usize, j: usize, k: usize) -> Self {
        let cycles: [(usize, usize, usize, i64); 6] =
            [(i, j, k, 1), (j, k, i, 1), (k, i, j, 1), (j, i, k, -1), (i, k, j, -1), (k, j, i, -1)];
        for t in self.tuples() {
            let mut row = SparseRow::new();
            for &(a, b, c, s) in &cycles {
                let mut u = t.clone();
                u[i] = t[a];
                u[j] = t[b];
                u[k] = t[c];
                *row.entry(self.flat(&u)).or_insert_with(Scalar::zero) += Scalar::int(s);
            }
            self.rows.insert(row);
        }
        self
    }

    /// Contraction of slots `i` and `j` vanishes.
    pub fn trace(mut self, i: usize, j: usize) -> Self {
        for t in self.tuples() {
            if t[i] != 0 || t[j] != 0 {
                continue;
            }
            let mut row = SparseRow::new();
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let h = &self.lower[a][b];
                    if h.is_zero() {
                        continue;
                    }
                    let mut u = t.clone();
                    u[i] = a;
                    u[j] = b;
                    *row.entry(self.flat(&u)).or_insert_with(Scalar::zero) += h;
                }
            }
            self.rows.insert(row);
        }
        self
    }

    pub fn all_traces(self) -> Self {
        let r = self.rank;
        (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).fold(self, |acc, (i, j)| acc.trace(i, j))
    }

    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.rows.kernel()
    }

    pub fn dimension(&self) -> usize {
        self.rows.nullity()
    }
}

/// Projection onto the span of `basis`, orthogonal for the pairing induced
/// by `lower` on every slot. The pairing is invariant, so for invariant
/// subspaces the projection is equivariant.
#[derive(Clone)]
pub struct KernelProjector {
    basis: Vec<Vec<Scalar>>,
    /// `(Kᵀ H K)⁻¹ Kᵀ H`, one row per basis vector, stored sparsely.
    coords: Vec<Vec<(usize, Scalar)>>,
}

impl KernelProjector {
    pub fn new(dim: usize, rank: usize, lower: &[Vec<Scalar>], basis: Vec<Vec<Scalar>>) -> Self {
        let size = dim.pow(rank as u32);
        // H applied to every basis vector: lower each slot in turn.
        let lowered: Vec<Vec<Scalar>> = basis.iter().map(|v| lower_all(dim, rank, lower, v)).collect();
        let k = basis.len();
        let gram = ExactMatrix::from_fn(k, k, |i, j| dot(&basis[i], &lowered[j]));
        let inv = gram.inverse().expect("invariant pairing is nondegenerate on the subspace");
        let coords = (0..k)
            .map(|i| {
                (0..size)
                    .filter_map(|c| {
                        let v: Scalar = (0..k).map(|j| &inv[(i, j)] * &lowered[j][c]).sum();
                        (!v.is_zero()).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        KernelProjector { basis, coords }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// Coordinates of the projection of `v` in the kernel basis.
    pub fn coordinates<T: Coefficient>(&self, v: &[T]) -> Vec<T> {
        self.coords
            .iter()
            .map(|row| {
                let mut acc = T::zero_like(&v[0]);
                for (c, s) in row {
                    acc.add_scaled(s, &v[*c]);
                }
                acc
            })
            .collect()
    }

    pub fn project<T: Coefficient>(&self, v: &[T]) -> Vec<T> {
        let c = self.coordinates(v);
        let mut out: Vec<T> = v.iter().map(T::zero_like).collect();
        for (b, ci) in self.basis.iter().zip(&c) {
            for (slot, s) in b.iter().enumerate() {
                if !s.is_zero() {
                    out[slot].add_scaled(s, ci);
                }
            }
        }
        out
    }
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

/// Lower every slot of a dense tensor with `lower`.
pub fn lower_all(dim: usize, rank: usize, lower: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    let mut cur = v.to_vec();
    for slot in 0..rank {
        let stride = dim.pow((rank - 1 - slot) as u32);
        let mut next = vec![Scalar::zero(); cur.len()];
        for (idx, x) in cur.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let a = (idx / stride) % dim;
            let base = idx - a * stride;
            for (b, h) in lower[a].iter().enumerate() {
                if !h.is_zero() {
                    next[base + b * stride] += x * h;
                }
            }
        }
        cur = next;
    }
    cur
}

/// Coefficient ring for dense tensor projections.
pub trait Coefficient: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, c: &Scalar, other: &Self);
}

impl Coefficient for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn add_scaled(&mut self, c: &Scalar, other: &Self) {
        *self += c * other;
    }
}

impl Coefficient for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.nvars())
    }
    fn add_scaled(&mut self, c: &Scalar, other: &Self) {
        Poly::add_scaled(self, c, other)
    }
}

/// The subspace of rank-4 tensors with two-row rectangular Young symmetry
/// and vanishing traces: skew in slots (0,1) and (2,3), symmetric under
/// exchanging those pairs, no three-index skew part, trace-free.
pub fn young22_constraints(dim: usize, lower: Vec<Vec<Scalar>>) -> SlotConstraints {
    SlotConstraints::new(dim, 4, lower)
        .skew(0, 1)
        .skew(2, 3)
        .pair_exchange((0, 1), (2, 3))
        .no_three_skew(0, 1, 2)
        .no_three_skew(1, 2, 3)
        .all_traces()
}

fn young22_projector(dim: usize, lower: &[Vec<Scalar>]) -> Arc<KernelProjector> {
    type Key = Vec<Vec<Scalar>>;
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<KernelProjector>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache lock").get(lower) {
        return p.clone();
    }
    let basis = young22_constraints(dim, lower.to_vec()).kernel();
    let proj = Arc::new(KernelProjector::new(dim, 4, lower, basis));
    cache.lock().expect("cache lock").insert(lower.to_vec(), proj.clone());
    proj
}

/// Trace-free part of the (2,2) Young projection of a dense rank-4 tensor.
pub fn young22_tracefree<T: Coefficient>(dim: usize, lower: &[Vec<Scalar>], t: &[T]) -> Vec<T> {
    assert_eq!(t.len(), dim.pow(4), "rank-4 tensor expected");
    young22_projector(dim, lower).project(t)
}
