use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::Serialize;

use super::{Scalar, TensorError};

/// Dense rectangular matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Solution set `particular + span(kernel)` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

/// Reduced row echelon form together with its pivot columns.
struct Rref {
    m: ExactMatrix,
    pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        ExactMatrix { rows, cols, data }
    }

    /// Build from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, TensorError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TensorError::Ragged);
        }
        Ok(ExactMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, TensorError> {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::int(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale_row(&mut self, i: usize, c: &Scalar) {
        for j in 0..self.cols {
            self[(i, j)] *= c;
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &Scalar) {
        for i in 0..self.rows {
            self[(i, j)] *= c;
        }
    }

    /// Row `dst += c * row src`.
    pub fn add_row(&mut self, dst: usize, src: usize, c: &Scalar) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * c;
            self[(dst, j)] += v;
        }
    }

    /// Column `dst += c * column src`.
    pub fn add_col(&mut self, dst: usize, src: usize, c: &Scalar) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * c;
            self[(i, dst)] += v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            m.scale_row(r, &inv);
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = -m[(i, c)].clone();
                    m.add_row(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn det(&self) -> Result<Scalar, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::NotSquare(self.rows, self.cols));
        }
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            let inv = piv.recip();
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = -(&m[(i, c)] * &inv);
                    m.add_row(i, c, &f);
                }
            }
        }
        Ok(det)
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let Rref { m, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// All solutions of `self * x = b`; an inconsistent system is an error,
    /// distinct from a trivial kernel.
    pub fn solve(&self, b: &[Scalar]) -> Result<AffineSolution, TensorError> {
        assert_eq!(b.len(), self.rows);
        let aug = ExactMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let Rref { m, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(TensorError::Inconsistent);
        }
        let mut particular = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            particular[pc] = m[(r, self.cols)].clone();
        }
        Ok(AffineSolution { particular, kernel: self.kernel() })
    }

    pub fn inverse(&self) -> Result<ExactMatrix, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let aug = ExactMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let Rref { m, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(TensorError::Singular);
        }
        Ok(ExactMatrix::from_fn(n, n, |i, j| m[(i, n + j)].clone()))
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &'a ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        ExactMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| &self[(i, k)] * &rhs[(k, j)]).sum()
        })
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(ExactMatrix::identity(4).det().unwrap(), Scalar::one());
        assert_eq!(ExactMatrix::from_i64(&[&[2, 1], &[1, 2]]).unwrap().det().unwrap(), Scalar::int(3));
        assert_eq!(ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap().det().unwrap(), Scalar::int(-1));
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let k = ExactMatrix::from_i64(&[&[1, 1, 1]]).unwrap().kernel();
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn inconsistent_differs_from_empty_kernel() {
        let a = ExactMatrix::from_i64(&[&[1, 1], &[1, 1]]).unwrap();
        assert!(matches!(a.solve(&[Scalar::one(), Scalar::zero()]), Err(TensorError::Inconsistent)));
        let b = ExactMatrix::identity(2);
        let sol = b.solve(&[Scalar::one(), Scalar::int(2)]).unwrap();
        assert!(sol.kernel.is_empty());
        assert_eq!(sol.particular, vec![Scalar::one(), Scalar::int(2)]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = ExactMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]).unwrap();
        assert_eq!(&a * &a.inverse().unwrap(), ExactMatrix::identity(3));
        assert!(ExactMatrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap().inverse().is_err());
    }
}
