//! Small dense complex matrices: just enough linear algebra for seed-matrix
//! inverses, dense oracles and validation checks.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn conjugate_transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scaled(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest row 2-norm; used for scale-aware singularity thresholds.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn max_abs_diff_vec(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// LU decomposition with partial pivoting.
pub struct LuDecomposition {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
    det: Complex64,
}

impl LuDecomposition {
    pub fn new(m: &CMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Validation("LU requires a square matrix".into()));
        }
        let n = m.rows();
        let mut lu = m.data.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (pivot_row, pivot_mag) = (k..n)
                .map(|r| (r, lu[r * n + k].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pivot_mag == 0.0 {
                return Err(Error::Numerical(format!(
                    "singular matrix: zero pivot at column {k}"
                )));
            }
            if pivot_row != k {
                for c in 0..n {
                    lu.swap(k * n + c, pivot_row * n + c);
                }
                det = -det;
            }
            pivots.push(pivot_row);
            let pivot = lu[k * n + k];
            det *= pivot;
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                for c in k + 1..n {
                    let sub = factor * lu[k * n + c];
                    lu[r * n + c] -= sub;
                }
            }
        }
        Ok(LuDecomposition { n, lu, pivots, det })
    }

    pub fn det(&self) -> Complex64 {
        self.det
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        // Forward substitution (unit lower triangle).
        for r in 1..n {
            for c in 0..r {
                let sub = self.lu[r * n + c] * x[c];
                x[r] -= sub;
            }
        }
        // Back substitution.
        for r in (0..n).rev() {
            for c in r + 1..n {
                let sub = self.lu[r * n + c] * x[c];
                x[r] -= sub;
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            e[c] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e);
            e[c] = Complex64::new(0.0, 0.0);
            for r in 0..n {
                out[(r, c)] = col[r];
            }
        }
        out
    }
}

/// Scale-aware invertibility test: `|det| > tol · (max row norm)^n`.
pub fn is_invertible(m: &CMatrix, tol: f64) -> bool {
    let scale = m.max_row_norm().powi(m.rows() as i32);
    match LuDecomposition::new(m) {
        Ok(lu) => lu.det().norm() > tol * scale,
        Err(_) => false,
    }
}
