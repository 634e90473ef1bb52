//! Generic block-matrix engine for the Diţă construction.
//!
//! A `KM × KM` matrix `H` is described by a `K × K` outer matrix `A`, unit
//! diagonals `E_0..E_{K-1}` of length `M` (with `E_0 = I`), and an abstract
//! inner operator `B`; block `(j, k)` of `H` is `a_{jk} E_k B`. Both `H` and
//! `H⁻¹` are applied without ever materializing `H`, and every complex
//! multiplication and addition performed on the data vector is counted.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LuDecomposition};

/// Relative tolerance for the scale-aware singularity guard on the outer
/// matrix: `|det| > INVERTIBILITY_TOL · (max row norm)^K`.
pub const INVERTIBILITY_TOL: f64 = 1e-9;

/// Tally of complex multiplications and additions applied to signal data.
///
/// Entry generation (twiddle/diagonal phasors) is plan preparation and is
/// not counted, mirroring the convention that matrix entries are given.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub multiplications: u64,
    pub additions: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn total(&self) -> u64 {
        self.multiplications + self.additions
    }

    pub fn add_muls(&mut self, n: u64) {
        self.multiplications += n;
    }

    pub fn add_adds(&mut self, n: u64) {
        self.additions += n;
    }
}

/// A linear operator on complex vectors that reports the operations it
/// performs. The inner `B` of a Diţă spec is abstract so a block level can
/// wrap a dense matrix or another block level.
pub trait InnerOp {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[Complex64], counter: &mut OpCounter) -> Vec<Complex64>;
}

/// Dense matrix operator; counts `n²` multiplications and `n(n-1)` additions.
pub struct DenseOp {
    matrix: CMatrix,
}

impl DenseOp {
    pub fn new(matrix: CMatrix) -> Self {
        assert_eq!(matrix.rows(), matrix.cols());
        DenseOp { matrix }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

impl InnerOp for DenseOp {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, v: &[Complex64], counter: &mut OpCounter) -> Vec<Complex64> {
        let n = self.matrix.rows();
        counter.add_muls((n * n) as u64);
        counter.add_adds((n * (n - 1)) as u64);
        self.matrix.mul_vec(v)
    }
}

/// Identity operator; free of operations.
pub struct IdentityOp {
    dim: usize,
}

impl IdentityOp {
    pub fn new(dim: usize) -> Self {
        IdentityOp { dim }
    }
}

impl InnerOp for IdentityOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &[Complex64], _counter: &mut OpCounter) -> Vec<Complex64> {
        v.to_vec()
    }
}

/// Validated description of one Diţă block level.
pub struct DitaSpec<'a> {
    outer: CMatrix,
    diagonals: Vec<Vec<Complex64>>,
    inner: &'a dyn InnerOp,
}

impl<'a> DitaSpec<'a> {
    /// `diagonals` holds all `K` diagonals; `diagonals[0]` must be all ones.
    pub fn new(
        outer: CMatrix,
        diagonals: Vec<Vec<Complex64>>,
        inner: &'a dyn InnerOp,
    ) -> Result<Self> {
        let k = outer.rows();
        if outer.cols() != k || k == 0 {
            return Err(Error::Validation(
                "outer matrix must be square and nonempty".into(),
            ));
        }
        if diagonals.len() != k {
            return Err(Error::Validation(format!(
                "expected {} diagonals, got {}",
                k,
                diagonals.len()
            )));
        }
        let m = inner.dim();
        for (i, diag) in diagonals.iter().enumerate() {
            if diag.len() != m {
                return Err(Error::Validation(format!(
                    "diagonal {} has length {}, expected {}",
                    i,
                    diag.len(),
                    m
                )));
            }
            if diag.iter().any(|e| e.norm() == 0.0) {
                return Err(Error::Validation(format!(
                    "diagonal {} has a zero entry",
                    i
                )));
            }
        }
        if diagonals[0].iter().any(|e| *e != Complex64::new(1.0, 0.0)) {
            return Err(Error::Validation("E_0 must be the identity".into()));
        }
        let scale = outer.max_row_norm().powi(k as i32);
        let det_ok = LuDecomposition::new(&outer)
            .map(|lu| lu.det().norm() > INVERTIBILITY_TOL * scale)
            .unwrap_or(false);
        if !det_ok {
            return Err(Error::Validation(
                "outer matrix is numerically singular".into(),
            ));
        }
        Ok(DitaSpec {
            outer,
            diagonals,
            inner,
        })
    }

    pub fn outer_dim(&self) -> usize {
        self.outer.rows()
    }

    pub fn inner_dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn len(&self) -> usize {
        self.outer_dim() * self.inner_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                actual,
            });
        }
        Ok(())
    }

    /// `H v`: block row `j` of the output is `Σ_k a_{jk} E_k (B v_k)`.
    pub fn apply(&self, v: &[Complex64], counter: &mut OpCounter) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        let k = self.outer_dim();
        let m = self.inner_dim();

        // Shared across rows: one inner apply and one diagonal scale per chunk.
        let mut scaled: Vec<Vec<Complex64>> = Vec::with_capacity(k);
        for (idx, chunk) in v.chunks(m).enumerate() {
            let mut w = self.inner.apply(chunk, counter);
            if idx > 0 {
                for (x, e) in w.iter_mut().zip(&self.diagonals[idx]) {
                    *x *= e;
                }
                counter.add_muls(m as u64);
            }
            scaled.push(w);
        }

        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for row in 0..k {
            let dst = &mut out[row * m..(row + 1) * m];
            for (col, src) in scaled.iter().enumerate() {
                let a = self.outer[(row, col)];
                if col == 0 {
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d = a * s;
                    }
                } else {
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += a * s;
                    }
                }
            }
            counter.add_muls((m * k) as u64);
            counter.add_adds((m * (k - 1)) as u64);
        }
        Ok(out)
    }

    /// `H⁻¹ w` with `C = A⁻¹`: output block `k` is `B⁻¹ E_k⁻¹ (Σ_ℓ c_{kℓ} w_ℓ)`.
    pub fn inverse_apply(
        &self,
        inner_inverse: &dyn InnerOp,
        w: &[Complex64],
        counter: &mut OpCounter,
    ) -> Result<Vec<Complex64>> {
        self.check_len(w.len())?;
        if inner_inverse.dim() != self.inner_dim() {
            return Err(Error::ShapeMismatch {
                expected: self.inner_dim(),
                actual: inner_inverse.dim(),
            });
        }
        let k = self.outer_dim();
        let m = self.inner_dim();

        let lu = LuDecomposition::new(&self.outer)?;
        let det = lu.det();
        let scale = self.outer.max_row_norm().powi(k as i32);
        if det.norm() <= INVERTIBILITY_TOL * scale {
            return Err(Error::Numerical(format!(
                "outer matrix is singular: |det| = {:.3e} with scale {:.3e}",
                det.norm(),
                scale
            )));
        }
        let outer_inv = lu.inverse();

        let chunks: Vec<&[Complex64]> = w.chunks(m).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); w.len()];
        for row in 0..k {
            let mut acc = vec![Complex64::new(0.0, 0.0); m];
            for col in 0..k {
                let c = outer_inv[(row, col)];
                let src = chunks[col];
                if col == 0 {
                    for (d, s) in acc.iter_mut().zip(src) {
                        *d = c * s;
                    }
                } else {
                    for (d, s) in acc.iter_mut().zip(src) {
                        *d += c * s;
                    }
                }
            }
            counter.add_muls((m * k) as u64);
            counter.add_adds((m * (k - 1)) as u64);
            if row > 0 {
                // Unit-modulus diagonals invert by conjugation; general
                // entries by division.
                for (x, e) in acc.iter_mut().zip(&self.diagonals[row]) {
                    *x /= e;
                }
                counter.add_muls(m as u64);
            }
            let solved = inner_inverse.apply(&acc, counter);
            out[row * m..(row + 1) * m].copy_from_slice(&solved);
        }
        Ok(out)
    }

    /// Dense assembly of `H` from the block formula, given the dense inner
    /// matrix. Oracle-scale only.
    pub fn dense(&self, inner_dense: &CMatrix) -> Result<CMatrix> {
        if inner_dense.rows() != self.inner_dim() || inner_dense.cols() != self.inner_dim() {
            return Err(Error::ShapeMismatch {
                expected: self.inner_dim(),
                actual: inner_dense.rows(),
            });
        }
        let k = self.outer_dim();
        let m = self.inner_dim();
        let n = k * m;
        let mut h = CMatrix::zeros(n, n);
        for bj in 0..k {
            for bk in 0..k {
                let a = self.outer[(bj, bk)];
                for r in 0..m {
                    let e = self.diagonals[bk][r];
                    for c in 0..m {
                        h[(bj * m + r, bk * m + c)] = a * e * inner_dense[(r, c)];
                    }
                }
            }
        }
        Ok(h)
    }
}

/// Paper bound on operations for one block apply: `K·O_M + 3MK² − 2MK`.
pub fn dita_op_bound(k: u64, m: u64, o_m: u64) -> u64 {
    k * o_m + 3 * m * k * k - 2 * m * k
}
