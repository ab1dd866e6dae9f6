use crate::exact_tensor::{ExactMatrix, Metric, Monomial, Multiset, Poly, Scalar, SymTensor};
use crate::flat_diffop::{OpType, StdOp};

use super::CanonError;

/// `C^s(k) = 2^s binom(k, s)`, zero outside `0 ≤ s ≤ k`.
pub fn c_scalar(s: i64, k: usize) -> Scalar {
    if s < 0 || s > k as i64 {
        return Scalar::zero();
    }
    Scalar::int(2).pow(s as u32) * Scalar::binomial(k as i64, s)
}

/// The `(k−d)×(k−d)` matrix with entries `C^{k−d+s−t}(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMatrix {
    pub k: usize,
    pub d: usize,
    pub matrix: ExactMatrix,
}

fn check_range(k: usize, d: usize) -> Result<usize, CanonError> {
    if d >= k {
        return Err(CanonError::DOutOfRange { k, d });
    }
    Ok(k - d)
}

pub fn c_matrix(k: usize, d: usize) -> Result<CMatrix, CanonError> {
    let kd = check_range(k, d)? as i64;
    let matrix = ExactMatrix::from_fn(kd as usize, kd as usize, |s, t| c_scalar(kd + s as i64 - t as i64, k));
    Ok(CMatrix { k, d, matrix })
}

impl CMatrix {
    pub fn det(&self) -> Scalar {
        self.matrix.det().expect("square")
    }

    /// Every diagonal carries a single value.
    pub fn is_toeplitz(&self) -> bool {
        let m = &self.matrix;
        (1..m.rows()).all(|s| (1..m.cols()).all(|t| m[(s, t)] == m[(s - 1, t - 1)]))
    }
}

pub fn regularity(k: usize, d: usize) -> Result<bool, CanonError> {
    Ok(!c_matrix(k, d)?.det().is_zero())
}

/// Stages of the row and column reduction proving regularity.
#[derive(Clone, Debug)]
pub struct ReductionChain {
    pub k: usize,
    pub d: usize,
    /// Entries `binom(k, k_d + s − t)`.
    pub tilde: ExactMatrix,
    pub d1: ExactMatrix,
    pub d2: ExactMatrix,
    pub d3: ExactMatrix,
    pub d4: ExactMatrix,
    /// `det C = 2^{k_d²} det C̃`.
    pub det_ratio_is_power_of_two: bool,
    pub d1_closed_form: bool,
    pub d2_closed_form: bool,
    pub d3_closed_form: bool,
    pub d4_unit_upper: bool,
}

impl ReductionChain {
    pub fn holds(&self) -> bool {
        self.det_ratio_is_power_of_two
            && self.d1_closed_form
            && self.d2_closed_form
            && self.d3_closed_form
            && self.d4_unit_upper
    }
}

fn binom(m: i64, j: i64) -> Scalar {
    if j < 0 || j > m {
        Scalar::zero()
    } else {
        Scalar::binomial(m, j)
    }
}

fn matches(m: &ExactMatrix, f: impl Fn(i64, i64) -> Scalar) -> bool {
    (0..m.rows()).all(|s| (0..m.cols()).all(|t| m[(s, t)] == f(s as i64 + 1, t as i64 + 1)))
}

/// Replay the reduction, with indices `s, t` counted from 1 as in the
/// closed forms.
pub fn reduction_chain(k: usize, d: usize) -> Result<ReductionChain, CanonError> {
    let kd = check_range(k, d)?;
    let (ki, kdi) = (k as i64, kd as i64);
    let one = Scalar::one();
    let tilde = ExactMatrix::from_fn(kd, kd, |s, t| binom(ki, kdi + s as i64 - t as i64));

    // Column sweeps: step i adds column j+1 to column j for j < k_d − i.
    let mut d1 = tilde.clone();
    for step in 1..kd {
        for j in 0..kd - step {
            d1.add_col(j, j + 1, &one);
        }
    }
    let mut d2 = d1.clone();
    for t in 0..kd {
        d2.scale_col(t, &Scalar::factorial((ki + kdi - t as i64 - 1) as u32).recip());
    }
    for s in 0..kd {
        d2.scale_row(s, &Scalar::factorial((ki - s as i64 - 1) as u32));
    }
    let mut d3 = d2.clone();
    for s in 0..kd {
        d3.scale_row(s, &Scalar::factorial((kdi + s as i64) as u32));
    }
    for t in 0..kd {
        d3.scale_col(t, &Scalar::factorial(t as u32).recip());
    }
    // Row sweeps: step i subtracts row j−1 from row j, bottom up, for j ≥ i.
    let mut d4 = d3.clone();
    for step in 1..kd {
        for j in (step..kd).rev() {
            d4.add_row(j, j - 1, &-one.clone());
        }
    }

    let det_c = c_matrix(k, d)?.det();
    let det_t = tilde.det().expect("square");
    let det_ratio_is_power_of_two = det_c == det_t * Scalar::int(2).pow((kd * kd) as u32);
    let d1_closed_form = matches(&d1, |s, t| binom(ki + kdi - t, kdi + s - t));
    let d2_closed_form = matches(&d2, |s, t| Scalar::factorial((kdi + s - t) as u32).recip());
    let d3_closed_form = matches(&d3, |s, t| binom(kdi + s - 1, kdi + s - t));
    let d4_unit_upper = d4.is_upper_triangular() && d4.diagonal().iter().all(Scalar::is_one);
    Ok(ReductionChain {
        k,
        d,
        tilde,
        d1,
        d2,
        d3,
        d4,
        det_ratio_is_power_of_two,
        d1_closed_form,
        d2_closed_form,
        d3_closed_form,
        d4_unit_upper,
    })
}

/// `c` with `a = c·b`, if any.
pub(super) fn ratio(a: &SymTensor, b: &SymTensor) -> Option<Scalar> {
    if a.is_zero() {
        return Some(Scalar::zero());
    }
    let (m, v) = b.components().find(|(_, v)| !v.is_zero())?;
    let (mono, top) = v.terms().next()?;
    let c = a.get(m).coeff(mono) / top.clone();
    a.sub(&b.scale(&c).with_weight(a.weight().clone())).is_zero().then_some(c)
}

/// Coefficient matrix of the top-level equations of `Δ^k T = T' Δ^k` for
/// `T` of level `p + r` with greatest term of type `⟨p|r⟩`.
///
/// Column `q'` is read off from `Δ^k ∘ φ ∇^{p+q'} Δ^{r−q'}` for a sample
/// coefficient `φ`; row `q` takes the `⟨p+r+q+1 | k−q−1⟩` coefficient,
/// applies `∇^{r−q}` and the trace-free symmetric projection, and divides
/// by `[∇^{2r+1−q'} φ]`. The result must equal `C(k, k−r−1)`.
pub fn extract_constraint_matrix(k: usize, p: usize, r: usize, g: &Metric) -> Result<ExactMatrix, CanonError> {
    if r >= k {
        return Err(CanonError::DOutOfRange { k, d: k.wrapping_sub(r + 1) });
    }
    let n = g.dim();
    let w = Scalar::zero();
    let mut m = ExactMatrix::zeros(r + 1, r + 1);
    for col in 0..=r {
        let rank = p + col;
        let lap_power = r - col;
        let degree = (2 * r + 1 - col) as u32;
        let sample = SymTensor::basis(n, Multiset::new(vec![0; rank]), Poly::term(n, Monomial::from_exponents(&[degree]), Scalar::one())).trace_free(g);
        let t = StdOp::normalize(*g, w.clone(), w.clone(), vec![(sample.clone(), rank, lap_power)]);
        let lap = StdOp::laplacian_power(*g, k, w.clone());
        let composed = lap.compose(&t)?;
        let variable = sample.sym_gradient(g, degree as usize).trace_free(g);
        for row in 0..=r {
            let ty = OpType::new(p + r + row + 1, k - row - 1);
            let coeff = composed.term(ty).cloned().unwrap_or_else(|| SymTensor::zero(n, ty.p));
            let lifted = coeff.sym_gradient(g, r - row).trace_free(g);
            m[(row, col)] = ratio(&lifted, &variable).ok_or(CanonError::NotProportional { row, col })?;
        }
    }
    let expected = c_matrix(k, k - r - 1)?;
    if m != expected.matrix {
        return Err(CanonError::ConstraintMismatch { k, r, found: m.to_string() });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_entries() {
        assert_eq!(c_scalar(3, 4), Scalar::int(32));
        assert_eq!(c_scalar(1, 4), Scalar::int(8));
        assert_eq!(c_scalar(5, 4), Scalar::zero());
        assert_eq!(c_matrix(4, 0).unwrap().det(), Scalar::int(2).pow(16));
        assert_eq!(c_matrix(4, 2).unwrap().det(), Scalar::int(320));
        assert!(c_matrix(4, 4).is_err());
    }

    #[test]
    fn diagonals_are_constant_and_matrices_regular() {
        for k in 1..=12 {
            for d in 0..k {
                let c = c_matrix(k, d).unwrap();
                assert!(c.is_toeplitz());
                assert!(regularity(k, d).unwrap(), "k={k} d={d}");
            }
        }
    }

    #[test]
    fn reduction_chain_closed_forms() {
        for k in 1..=8 {
            for d in 0..k {
                let ch = reduction_chain(k, d).unwrap();
                assert!(ch.holds(), "k={k} d={d}: {ch:?}");
            }
        }
    }

    #[test]
    fn constraint_matrix_small_cases() {
        let g = Metric::euclidean(3);
        let m = extract_constraint_matrix(1, 0, 0, &g).unwrap();
        assert_eq!(m, ExactMatrix::from_i64(&[&[2]]).unwrap());
        for p in [0, 1] {
            assert_eq!(extract_constraint_matrix(2, p, 1, &g).unwrap(), c_matrix(2, 0).unwrap().matrix);
        }
    }

    #[test]
    fn constraint_matrix_worked_example() {
        let m = extract_constraint_matrix(4, 0, 3, &Metric::euclidean(3)).unwrap();
        let c = |s| c_scalar(s, 4);
        assert_eq!(m.row(0), &[c(4), c(3), c(2), c(1)]);
        assert_eq!(m.row(3), &[Scalar::zero(), Scalar::zero(), Scalar::zero(), c(4)]);
    }
}
