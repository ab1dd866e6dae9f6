use std::collections::BTreeMap;

use super::scalar::{mul_mod, pow_mod};
use super::Scalar;

const PRIME: u64 = (1 << 61) - 1;

/// Sparse row: column index to nonzero entry.
pub type SparseRow = BTreeMap<usize, Scalar>;

/// Incremental row echelon form over the rationals.
///
/// Rows are fed one at a time and reduced against the stored pivots, so the
/// constraint systems of the solvers never have to be materialized densely.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(row: &mut SparseRow, c: &Scalar, other: &SparseRow) {
    for (&j, v) in other {
        let delta = c * v;
        match row.entry(j) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(delta);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += delta;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl SparseEchelon {
    pub fn new(cols: usize) -> Self {
        SparseEchelon { cols, pivots: BTreeMap::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Reduce `row` against the stored pivots; keeps it if independent.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, _)) = row.iter().next() else { return false };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let c = -row[&lead].clone();
                    axpy(&mut row, &c, p);
                }
                None => {
                    // Later rows may still contain stored pivot columns; those
                    // are cleared when the kernel is assembled.
                    let inv = row[&lead].recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    pub fn insert_dense(&mut self, row: &[Scalar]) -> bool {
        self.insert(row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect())
    }

    /// Fully reduced pivot rows, keyed by pivot column.
    fn reduced(&self) -> BTreeMap<usize, SparseRow> {
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&pc, row) in self.pivots.iter().rev() {
            let mut row = row.clone();
            loop {
                let hit = row.keys().find(|&&j| j != pc && done.contains_key(&j)).copied();
                let Some(j) = hit else { break };
                let c = -row[&j].clone();
                axpy(&mut row, &c, &done[&j]);
            }
            done.insert(pc, row);
        }
        done
    }

    /// Sparse basis of the null space, one vector per free column.
    pub fn kernel_sparse(&self) -> Vec<SparseRow> {
        let reduced = self.reduced();
        let mut by_free: BTreeMap<usize, SparseRow> = (0..self.cols)
            .filter(|c| !reduced.contains_key(c))
            .map(|f| (f, SparseRow::from([(f, Scalar::one())])))
            .collect();
        for (&pc, row) in &reduced {
            for (&j, v) in row {
                if j != pc {
                    by_free.get_mut(&j).expect("free column").insert(pc, -v.clone());
                }
            }
        }
        by_free.into_values().collect()
    }

    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.kernel_sparse()
            .into_iter()
            .map(|s| {
                let mut v = vec![Scalar::zero(); self.cols];
                for (j, x) in s {
                    v[j] = x;
                }
                v
            })
            .collect()
    }
}

/// Positions of the rows that raise the rank modulo a large prime, or
/// `None` when a denominator vanishes there. Rows independent modulo the
/// prime are independent over the rationals, so a count equal to `cols`
/// certifies a trivial kernel.
pub fn pivot_rows_mod_prime<'a>(rows: impl IntoIterator<Item = &'a SparseRow>, cols: usize) -> Option<Vec<usize>> {
    let p = PRIME;
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    let mut chosen = Vec::new();
    for (pos, row) in rows.into_iter().enumerate() {
        let mut r = BTreeMap::new();
        for (&j, v) in row {
            let x = v.residue(p)?;
            if x != 0 {
                r.insert(j, x);
            }
        }
        while let Some((&lead, &x)) = r.iter().next() {
            match pivots.get(&lead) {
                Some(piv) => {
                    let c = p - x;
                    for (&j, &y) in piv {
                        let e = r.entry(j).or_insert(0);
                        *e = (*e + mul_mod(c, y, p)) % p;
                        if *e == 0 {
                            r.remove(&j);
                        }
                    }
                }
                None => {
                    let inv = pow_mod(x, p - 2, p);
                    r.values_mut().for_each(|v| *v = mul_mod(*v, inv, p));
                    pivots.insert(lead, r);
                    chosen.push(pos);
                    break;
                }
            }
        }
        if pivots.len() == cols {
            break;
        }
    }
    Some(chosen)
}
