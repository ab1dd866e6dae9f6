use std::collections::{BTreeMap, HashMap};

use crate::ckt_solve::{weyl_dim, CktLabel};
use crate::exact_tensor::{Monomial, Scalar, SparseEchelon, SparseRow};

use super::AlgebraError;

/// Largest number of unknowns the oracle will eliminate over.
pub const ORACLE_COLUMN_CAP: usize = 5000;

/// `dim 𝒜_{k,t} = Σ_{j+2i=t, i<k} dim 𝒦ᵢʲ`, each summand the Weyl dimension
/// of the `(j, i)` solution space. Degree 0 is the identity alone.
pub fn graded_dim(k: usize, t: usize, n: usize) -> u64 {
    if t == 0 {
        return 1;
    }
    (0..=(t / 2).min(k.saturating_sub(1))).map(|i| weyl_dim(n, CktLabel::new(t - 2 * i, i))).sum()
}

/// Rows `t = 1..=t_max`, columns `k = 1..=k_max`, tab separated.
pub fn graded_table(n: usize, t_max: usize, k_max: usize) -> String {
    let mut s = String::from("t\\k");
    for k in 1..=k_max {
        s += &format!("\t{k}");
    }
    s.push('\n');
    for t in 1..=t_max {
        s += &t.to_string();
        for k in 1..=k_max {
            s += &format!("\t{}", graded_dim(k, t, n));
        }
        s.push('\n');
    }
    s
}

/// A monomial in `x, y ∈ ℝ^N`, kept as two halves so that `2N` may exceed
/// the packing limit of a single [`Monomial`].
type Bi = (Monomial, Monomial);

type Combo = BTreeMap<Bi, i64>;

fn bidegree(big: usize, t: usize) -> Vec<Bi> {
    let half = Monomial::all_of_degree(big, t as u32);
    half.iter().flat_map(|&x| half.iter().map(move |&y| (x, y))).collect()
}

fn push(out: &mut Combo, m: Bi, c: i64) {
    let e = out.entry(m).or_insert(0);
    *e += c;
    if *e == 0 {
        out.remove(&m);
    }
}

#[derive(Clone, Copy)]
enum Op {
    /// `y·∂_x`.
    Raise,
    /// `∂_x·∂_x`, `∂_x·∂_y`, `∂_y·∂_y`.
    Trace(bool, bool),
}

fn apply_op(op: Op, big: usize, v: &Combo) -> Combo {
    let mut out = Combo::new();
    for (&(x, y), &c) in v {
        for a in 0..big {
            match op {
                Op::Raise => {
                    if let Some(xl) = x.lower(a) {
                        push(&mut out, (xl, y * Monomial::var(a)), c * x.exponent(a) as i64);
                    }
                }
                Op::Trace(first_y, second_y) => {
                    let mut m = (x, y);
                    let mut coeff = c;
                    for on_y in [first_y, second_y] {
                        let half = if on_y { &mut m.1 } else { &mut m.0 };
                        let e = half.exponent(a) as i64;
                        match half.lower(a) {
                            Some(l) => {
                                *half = l;
                                coeff *= e;
                            }
                            None => coeff = 0,
                        }
                        if coeff == 0 {
                            break;
                        }
                    }
                    if coeff != 0 {
                        push(&mut out, m, coeff);
                    }
                }
            }
        }
    }
    out
}

const XX: Op = Op::Trace(false, false);
const XY: Op = Op::Trace(false, true);
const YY: Op = Op::Trace(true, true);

/// All words of `k` trace operators, up to the commuting order.
fn trace_words(k: usize) -> Vec<Vec<Op>> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let mut w = vec![XX; a];
            w.extend(std::iter::repeat_n(XY, b));
            w.extend(std::iter::repeat_n(YY, k - a - b));
            out.push(w);
        }
    }
    out
}

/// Brute-force `dim 𝒜_{k,t}` from polynomials in two vectors `x, y ∈ ℝ^{n+2}`.
///
/// A polynomial of bidegree `(t,t)` is a function of `x ∧ y`, hence a
/// `(t,t)` Young tensor in `⊙ᵗ𝔤`, exactly when `y·∂_x` kills it. Within
/// those, the kernel of every `k`-fold trace and of the Killing contraction
/// `Δ_xx Δ_yy − Δ_xy²` is the orthogonal complement of the ideal, so its
/// dimension is that of the quotient in degree `t`.
pub fn brute_dim_oracle(k: usize, t: usize, n: usize) -> Result<u64, AlgebraError> {
    let big = n + 2;
    let cols = bidegree(big, t);
    if cols.len() > ORACLE_COLUMN_CAP {
        return Err(AlgebraError::Infeasible { columns: cols.len(), cap: ORACLE_COLUMN_CAP });
    }
    let mut words: Vec<Vec<Op>> = vec![vec![Op::Raise]];
    words.extend(trace_words(k));
    if k > 2 {
        // Implied by the k-fold traces when k ≤ 2.
        words.push(vec![XX, YY]);
        words.push(vec![XY, XY]);
    }
    let killing_pair = words.len() - 1;
    // One row per (word, output monomial); the Killing contraction is a
    // difference of two words, so it shares its rows.
    let mut rows: HashMap<(usize, Bi), SparseRow> = HashMap::new();
    for (col, &m) in cols.iter().enumerate() {
        let start: Combo = [(m, 1)].into_iter().collect();
        for (wi, word) in words.iter().enumerate() {
            let image = word.iter().fold(start.clone(), |acc, &op| apply_op(op, big, &acc));
            let (key, sign) = if k > 2 && wi == killing_pair { (wi - 1, -1) } else { (wi, 1) };
            for (out, c) in image {
                let row = rows.entry((key, out)).or_default();
                let e = row.entry(col).or_insert_with(Scalar::zero);
                *e += Scalar::int(sign * c);
            }
        }
    }
    let mut ech = SparseEchelon::new(cols.len());
    for (_, row) in rows {
        if ech.rank() == cols.len() {
            break;
        }
        ech.insert(row);
    }
    Ok(ech.nullity() as u64)
}
