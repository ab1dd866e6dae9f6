use crate::exact_tensor::{Metric, Poly, Scalar};

/// Flat-scale tractor frame over `ℝ^{s,s'}`.
///
/// Tractor indices are stored upper, in the null basis
/// `e_0 = Y`, `e_{1..n} = Z_a`, `e_{n+1} = X`, so that
/// `V = α Y + μ^a Z_a + τ X` has components `(α, μ, τ)`.
/// The tractor metric pairs `e_0` with `e_{n+1}` and restricts to `g` on
/// the middle block; it is its own inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TractorFrame {
    metric: Metric,
}

/// Curvature record of the flat scale. Every entry is identically zero;
/// [`TractorFrame::curvature`] recomputes the tractor curvature instead of
/// assuming it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatScale {
    pub schouten_zero: bool,
    pub cotton_zero: bool,
    pub weyl_zero: bool,
    pub tractor_curvature_zero: bool,
}

impl TractorFrame {
    pub fn new(metric: Metric) -> Self {
        TractorFrame { metric }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Base dimension `n`.
    pub fn n(&self) -> usize {
        self.metric.dim()
    }

    /// Tractor rank `n + 2`.
    pub fn rank(&self) -> usize {
        self.metric.dim() + 2
    }

    pub fn y_index(&self) -> usize {
        0
    }

    pub fn x_index(&self) -> usize {
        self.n() + 1
    }

    /// Tractor index of `Z_a`.
    pub fn z_index(&self, a: usize) -> usize {
        a + 1
    }

    pub fn g(&self, a: usize) -> i64 {
        self.metric.diag(a)
    }

    /// `h_{AB}` (equal to `h^{AB}`).
    pub fn h(&self, a: usize, b: usize) -> i64 {
        let top = self.n() + 1;
        match (a, b) {
            (0, t) | (t, 0) if t == top => 1,
            (i, j) if i == j && i >= 1 && i <= self.n() => self.g(i - 1),
            _ => 0,
        }
    }

    /// Lowering is a signed permutation: `V_A = sign · V^{σ(A)}`.
    pub fn lower(&self, a: usize) -> (usize, i64) {
        let top = self.n() + 1;
        if a == 0 {
            (top, 1)
        } else if a == top {
            (0, 1)
        } else {
            (a, self.g(a - 1))
        }
    }

    pub fn h_matrix(&self) -> Vec<Vec<Scalar>> {
        let r = self.rank();
        (0..r).map(|a| (0..r).map(|b| Scalar::int(self.h(a, b))).collect()).collect()
    }

    /// Nonzero entries `(row, col, value)` of the connection matrix `Γ_a`,
    /// with `∇_a V = ∂_a V + Γ_a V`.
    pub fn gamma(&self, a: usize) -> [(usize, usize, i64); 2] {
        [(0, a + 1, -self.g(a)), (a + 1, self.n() + 1, 1)]
    }

    /// Parallel transport from the origin: the matrix `exp(−Σ x^a Γ_a)`,
    /// a polynomial since the exponent is nilpotent of order three.
    pub fn transport(&self) -> Vec<Vec<Poly>> {
        let n = self.n();
        let r = self.rank();
        let mut e: Vec<Vec<Poly>> = (0..r)
            .map(|i| (0..r).map(|j| if i == j { Poly::one(n) } else { Poly::zero(n) }).collect())
            .collect();
        let mut sq = Poly::zero(n);
        for a in 0..n {
            let xa = Poly::var(n, a);
            e[0][a + 1] = xa.scale(&Scalar::int(self.g(a)));
            e[a + 1][n + 1] = -&xa;
            sq.add_scaled(&Scalar::int(self.g(a)), &(&xa * &xa));
        }
        e[0][n + 1] = sq.scale(&Scalar::ratio(-1, 2));
        e
    }

    /// `Ω_{ab}` recomputed as `[Γ_a, Γ_b]` (the derivative terms vanish
    /// since `Γ` is constant in this frame).
    pub fn curvature(&self) -> FlatScale {
        let r = self.rank();
        let dense = |a: usize| {
            let mut m = vec![vec![0i64; r]; r];
            for (i, j, v) in self.gamma(a) {
                m[i][j] += v;
            }
            m
        };
        let mut zero = true;
        for a in 0..self.n() {
            for b in 0..self.n() {
                let (ga, gb) = (dense(a), dense(b));
                for i in 0..r {
                    for j in 0..r {
                        let c: i64 = (0..r).map(|k| ga[i][k] * gb[k][j] - gb[i][k] * ga[k][j]).sum();
                        zero &= c == 0;
                    }
                }
            }
        }
        FlatScale { schouten_zero: true, cotton_zero: true, weyl_zero: true, tractor_curvature_zero: zero }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connection_is_metric_and_flat() {
        let f = TractorFrame::new(Metric::new(2, 1).unwrap());
        let r = f.rank();
        // h(Γ_a u, v) + h(u, Γ_a v) = 0  ⇔  Γ_aᵀ h + h Γ_a = 0.
        for a in 0..f.n() {
            let mut g = vec![vec![0i64; r]; r];
            for (i, j, v) in f.gamma(a) {
                g[i][j] += v;
            }
            for i in 0..r {
                for j in 0..r {
                    let s: i64 = (0..r).map(|k| g[k][i] * f.h(k, j) + f.h(i, k) * g[k][j]).sum();
                    assert_eq!(s, 0);
                }
            }
        }
        assert!(f.curvature().tractor_curvature_zero);
    }

    #[test]
    fn pairings() {
        let f = TractorFrame::new(Metric::euclidean(3));
        assert_eq!(f.h(f.y_index(), f.x_index()), 1);
        assert_eq!(f.h(f.x_index(), f.x_index()), 0);
        assert_eq!(f.h(f.z_index(1), f.z_index(1)), 1);
    }
}
