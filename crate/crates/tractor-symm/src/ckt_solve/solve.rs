use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exact_tensor::{Metric, Monomial, Multiset, Poly, Scalar, pivot_rows_mod_prime, SparseEchelon, SparseRow, SymTensor};

use super::{ckt_apply, weyl_dim, CktError, CktLabel};

/// Exact basis of the polynomial solutions for one label.
#[derive(Clone, Debug)]
pub struct CktBasis {
    pub label: CktLabel,
    pub metric: Metric,
    pub solutions: Vec<SymTensor>,
}

impl CktBasis {
    pub fn dimension(&self) -> usize {
        self.solutions.len()
    }

    pub fn to_json(&self) -> Value {
        let (s, s_neg) = self.metric.signature();
        json!({
            "label": {"p": self.label.p, "r": self.label.r},
            "n": self.metric.dim(),
            "signature": [s, s_neg],
            "dimension": self.dimension(),
            "solutions": self.solutions.iter().map(|t| {
                t.components().map(|(m, v)| (m.to_string(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>()
            }).collect::<Vec<_>>(),
        })
    }
}

fn echelon_kernel<'a>(cols: usize, rows: impl IntoIterator<Item = &'a SparseRow>) -> Vec<SparseRow> {
    let mut ech = SparseEchelon::new(cols);
    for row in rows {
        ech.insert(row.clone());
    }
    ech.kernel_sparse()
}

fn annihilates(row: &SparseRow, v: &SparseRow) -> bool {
    row.iter().filter_map(|(j, a)| v.get(j).map(|b| a * b)).sum::<Scalar>().is_zero()
}

/// Solutions homogeneous of degree `d`.
///
/// The equation and the trace condition both preserve polynomial degree
/// up to a fixed shift, so the solution space splits by degree.
fn solve_degree(label: CktLabel, g: &Metric, d: u32) -> Vec<SymTensor> {
    let n = g.dim();
    let comps = Multiset::all(n, label.p);
    let monos = Monomial::all_of_degree(n, d);
    let unknown = |c: usize, m: usize| c * monos.len() + m;
    let images: Vec<Vec<(usize, SymTensor, SymTensor)>> = comps
        .par_iter()
        .enumerate()
        .map(|(ci, c)| {
            monos
                .iter()
                .enumerate()
                .map(|(mi, &m)| {
                    let phi = SymTensor::basis(n, c.clone(), Poly::term(n, m, Scalar::one()));
                    let eq = ckt_apply(&phi, label, g).expect("rank matches");
                    let tr = if label.p >= 2 { phi.trace(g).expect("rank") } else { SymTensor::zero(n, 0) };
                    (unknown(ci, mi), eq, tr)
                })
                .collect()
        })
        .collect();
    // Reflections x^i ↦ −x^i commute with the equation for a diagonal
    // metric, so the system splits by the parity of each coordinate.
    let parity = |c: &Multiset, m: Monomial| -> u32 {
        let counts = c.counts(n);
        (0..n).fold(0, |acc, i| acc | (((counts[i] + m.exponent(i)) & 1) << i))
    };
    let mut blocks: BTreeMap<u32, BTreeMap<(bool, Multiset, Monomial), SparseRow>> = BTreeMap::new();
    let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (ci, c) in comps.iter().enumerate() {
        for (mi, &m) in monos.iter().enumerate() {
            members.entry(parity(c, m)).or_default().push(unknown(ci, mi));
        }
    }
    for (u, eq, tr) in images.iter().flatten() {
        for (flag, t) in [(false, eq), (true, tr)] {
            for (m, v) in t.components() {
                for (mono, c) in v.terms() {
                    blocks
                        .entry(parity(m, mono))
                        .or_default()
                        .entry((flag, m.clone(), mono))
                        .or_default()
                        .insert(*u, c.clone());
                }
            }
        }
    }
    let kernels: Vec<SparseRow> = members
        .into_par_iter()
        .flat_map_iter(|(key, cols)| {
            let local: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(l, &u)| (u, l)).collect();
            let mut rows: Vec<SparseRow> = blocks
                .get(&key)
                .into_iter()
                .flat_map(|b| b.values())
                .map(|row| row.iter().map(|(u, v)| (local[u], v.clone())).collect())
                .collect();
            rows.sort_by_key(|r: &SparseRow| r.len());
            let kernel = match pivot_rows_mod_prime(&rows, cols.len()) {
                Some(chosen) if chosen.len() == cols.len() => Vec::new(),
                Some(chosen) => {
                    let candidate = echelon_kernel(cols.len(), chosen.iter().map(|&i| &rows[i]));
                    if candidate.iter().all(|v| rows.iter().all(|r| annihilates(r, v))) {
                        candidate
                    } else {
                        echelon_kernel(cols.len(), &rows)
                    }
                }
                None => echelon_kernel(cols.len(), &rows),
            };
            kernel
                .into_iter()
                .map(|v| v.into_iter().map(|(l, x)| (cols[l], x)).collect::<SparseRow>())
                .collect::<Vec<_>>()
        })
        .collect();
    kernels
        .into_iter()
        .map(|v| {
            let mut t = SymTensor::zero(n, label.p);
            for (ci, c) in comps.iter().enumerate() {
                let mut p = Poly::zero(n);
                for (mi, &m) in monos.iter().enumerate() {
                    if let Some(s) = v.get(&unknown(ci, mi)) {
                        p.add_term(m, s);
                    }
                }
                t.set(c.clone(), p);
            }
            t.with_weight(Scalar::int(2 * label.r as i64))
        })
        .collect()
}

/// All polynomial solutions of `[∇^{2r+1}φ]_⊠ = 0`, trace-free `φ`.
///
/// Degrees are solved one at a time from zero. The search ends once two
/// consecutive degrees contribute nothing and the count agrees with
/// [`weyl_dim`], which bounds the solution space from above; the hard cap
/// is `2(2p + 4r + 4)`.
pub fn solve(label: CktLabel, g: &Metric) -> Result<CktBasis, CktError> {
    let hard = 2 * (label.max_degree() + 4);
    let expected = weyl_dim(g.dim(), label) as usize;
    let mut solutions = Vec::new();
    let mut empty_run = 0;
    for degree in 0..=hard {
        let found = solve_degree(label, g, degree);
        empty_run = if found.is_empty() { empty_run + 1 } else { 0 };
        solutions.extend(found);
        if empty_run >= 2 && solutions.len() == expected {
            return Ok(CktBasis { label, metric: *g, solutions });
        }
    }
    Err(CktError::NoStabilization(hard))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions() {
        let g = Metric::euclidean(3);
        for (p, r, dim) in [(0, 0, 1), (1, 0, 10), (0, 1, 14), (2, 0, 35)] {
            let b = solve(CktLabel::new(p, r), &g).unwrap();
            assert_eq!(b.dimension(), dim, "({p},{r})");
            for s in &b.solutions {
                assert!(ckt_apply(s, b.label, &g).unwrap().is_zero());
                assert!(p < 2 || s.is_tracefree(&g));
            }
        }
    }

    #[test]
    fn lorentzian_killing_fields() {
        let g = Metric::new(3, 1).unwrap();
        assert_eq!(solve(CktLabel::new(1, 0), &g).unwrap().dimension(), 15);
    }
}
