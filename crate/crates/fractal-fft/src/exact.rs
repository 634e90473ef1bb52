//! Exact arithmetic substrate: rational phases, arbitrary-precision vectors
//! and integer matrices.
//!
//! All orbit points and transform phases are carried as exact rationals;
//! floating point enters only when a reduced phase is turned into a unit
//! phasor. Quarter-turn phases snap to the exact constants `1`, `-1`, `i`,
//! `-i`, so products of them remain exact in `f64`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Fraction of a full turn, reduced to `[0, 1)`. Represents the unit complex
/// number `e^{-2πiθ}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phase(BigRational);

impl Phase {
    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    /// Reduces an arbitrary rational modulo 1.
    pub fn from_rational(r: BigRational) -> Self {
        let floor = r.floor();
        Phase(r - floor)
    }

    pub fn from_integers(numer: i64, denom: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Sum of two phases, reduced modulo 1.
    pub fn add(&self, other: &Phase) -> Phase {
        Self::from_rational(&self.0 + &other.0)
    }

    /// Phase of the conjugate phasor: `-θ mod 1`.
    pub fn negated(&self) -> Phase {
        Self::from_rational(-&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("phase in [0,1) converts to f64")
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Evaluates `e^{-2πiθ}` with exact values for quarter-turn phases.
pub fn unit_phasor(phase: &Phase) -> Complex64 {
    let r = phase.as_rational();
    if r.denom().is_one() {
        return Complex64::new(1.0, 0.0);
    }
    if *r.denom() == BigInt::from(2) {
        return Complex64::new(-1.0, 0.0);
    }
    if *r.denom() == BigInt::from(4) {
        // Reduced numerator is 1 or 3.
        return if *r.numer() == BigInt::one() {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
    }
    let angle = -TAU * phase.to_f64();
    Complex64::new(angle.cos(), angle.sin())
}

/// Memoizes [`unit_phasor`] per distinct reduced phase, so repeated phases
/// across a plan or dense matrix evaluate to bitwise-identical complexes.
#[derive(Debug, Default)]
pub struct PhasorCache {
    map: HashMap<Phase, Complex64>,
}

impl PhasorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phasor(&mut self, phase: &Phase) -> Complex64 {
        if let Some(z) = self.map.get(phase) {
            return *z;
        }
        let z = unit_phasor(phase);
        self.map.insert(phase.clone(), z);
        z
    }
}

/// Column vector with exact rational components, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalVector {
    components: Vec<BigRational>,
}

impl RationalVector {
    pub fn new(components: Vec<BigRational>) -> Self {
        RationalVector { components }
    }

    pub fn zero(dim: usize) -> Self {
        RationalVector {
            components: vec![BigRational::zero(); dim],
        }
    }

    pub fn from_bigints(v: &[BigInt]) -> Self {
        RationalVector {
            components: v.iter().map(|x| BigRational::from(x.clone())).collect(),
        }
    }

    pub fn from_i64(v: &[i64]) -> Self {
        RationalVector {
            components: v
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[BigRational] {
        &self.components
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        debug_assert_eq!(self.dim(), other.dim());
        RationalVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn dot(&self, other: &RationalVector) -> BigRational {
        debug_assert_eq!(self.dim(), other.dim());
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_integer(&self) -> bool {
        self.components.iter().all(|c| c.denom().is_one())
    }

    /// Integer content, if every component has unit denominator.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        if !self.is_integer() {
            return None;
        }
        Some(self.components.iter().map(|c| c.numer().clone()).collect())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if c.denom().is_one() {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())?;
            }
        }
        Ok(())
    }
}

pub fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Square integer matrix, row-major, arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Validation("matrix must be nonempty".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Validation(format!(
                    "matrix row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    dim
                )));
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    pub fn rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        let mut rows = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            let mut row = Vec::with_capacity(self.dim);
            for c in 0..self.dim {
                row.push(self.entry(r, c).to_i64()?);
            }
            rows.push(row);
        }
        Some(rows)
    }

    pub fn transpose(&self) -> IntMatrix {
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entry(r, c).clone();
            }
        }
        IntMatrix { dim: d, entries }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut entries = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = BigInt::zero();
                for k in 0..d {
                    acc += self.entry(r, k) * other.entry(k, c);
                }
                entries[r * d + c] = acc;
            }
        }
        IntMatrix { dim: d, entries }
    }

    pub fn pow(&self, exp: u32) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.dim);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.entry(r, c) * &v[c]).sum())
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &RationalVector) -> RationalVector {
        debug_assert_eq!(v.dim(), self.dim);
        let mut out = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            let mut acc = BigRational::zero();
            for c in 0..self.dim {
                acc += BigRational::from(self.entry(r, c).clone()) * &v.components()[c];
            }
            out.push(acc);
        }
        RationalVector::new(out)
    }

    /// Fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        let d = self.dim;
        if d == 1 {
            return self.entries[0].clone();
        }
        let mut m = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d - 1 {
            if m[k * d + k].is_zero() {
                // Pivot: find a nonzero entry below.
                let Some(swap) = (k + 1..d).find(|&r| !m[r * d + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..d {
                    m.swap(k * d + c, swap * d + c);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let num = &m[i * d + j] * &m[k * d + k] - &m[i * d + k] * &m[k * d + j];
                    m[i * d + j] = num / &prev;
                }
                m[i * d + k] = BigInt::zero();
            }
            prev = m[k * d + k].clone();
        }
        sign * m[(d - 1) * d + (d - 1)].clone()
    }

    /// Classical adjugate: `adj(M) * M = det(M) * I`.
    pub fn adjugate(&self) -> IntMatrix {
        let d = self.dim;
        if d == 1 {
            return IntMatrix::identity(1);
        }
        let mut entries = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                let minor = self.minor(r, c).determinant();
                let cofactor = if (r + c) % 2 == 0 { minor } else { -minor };
                // Transposed placement.
                entries[c * d + r] = cofactor;
            }
        }
        IntMatrix { dim: d, entries }
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> IntMatrix {
        let d = self.dim;
        let mut entries = Vec::with_capacity((d - 1) * (d - 1));
        for r in 0..d {
            if r == skip_r {
                continue;
            }
            for c in 0..d {
                if c == skip_c {
                    continue;
                }
                entries.push(self.entry(r, c).clone());
            }
        }
        IntMatrix {
            dim: d - 1,
            entries,
        }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| self.entry(r, c).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }
}

/// Exact inverse of an integer matrix, held as adjugate over determinant.
#[derive(Debug, Clone)]
pub struct IntMatrixInverse {
    adjugate: IntMatrix,
    det: BigInt,
}

impl IntMatrixInverse {
    pub fn new(m: &IntMatrix) -> Result<Self> {
        let det = m.determinant();
        if det.is_zero() {
            return Err(Error::Validation(
                "matrix is singular over the rationals".into(),
            ));
        }
        Ok(IntMatrixInverse {
            adjugate: m.adjugate(),
            det,
        })
    }

    pub fn dim(&self) -> usize {
        self.adjugate.dim()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// Applies `M⁻¹` to an exact rational vector.
    pub fn apply(&self, v: &RationalVector) -> RationalVector {
        let det = BigRational::from(self.det.clone());
        let d = self.dim();
        let mut out = Vec::with_capacity(d);
        for r in 0..d {
            let mut acc = BigRational::zero();
            for c in 0..d {
                acc += BigRational::from(self.adjugate.entry(r, c).clone()) * &v.components()[c];
            }
            out.push(acc / &det);
        }
        RationalVector::new(out)
    }

    pub fn apply_ints(&self, v: &[BigInt]) -> RationalVector {
        self.apply(&RationalVector::from_bigints(v))
    }

    /// Exact quadratic form `c · M⁻¹ b` for integer vectors `c`, `b`.
    pub fn quadratic_form(&self, c: &[BigInt], b: &[BigInt]) -> BigRational {
        let d = self.dim();
        debug_assert_eq!(c.len(), d);
        debug_assert_eq!(b.len(), d);
        let mut acc = BigInt::zero();
        for (r, c_r) in c.iter().enumerate() {
            for (s, b_s) in b.iter().enumerate() {
                acc += c_r * self.adjugate.entry(r, s) * b_s;
            }
        }
        BigRational::new(acc, self.det.clone())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        let det = self.det.to_f64().unwrap_or(f64::NAN);
        self.adjugate
            .to_f64_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x / det).collect())
            .collect()
    }
}

/// `k^n`, failing when the result would exceed `cap`.
pub fn checked_level_size(k: usize, n: u32, cap: usize) -> Result<usize> {
    let mut size: usize = 1;
    for _ in 0..n {
        size = size
            .checked_mul(k)
            .ok_or_else(|| Error::Resource(format!("{}^{} overflows the machine word", k, n)))?;
        if size > cap {
            return Err(Error::Resource(format!(
                "{}^{} exceeds the size cap {}",
                k, n, cap
            )));
        }
    }
    Ok(size)
}
