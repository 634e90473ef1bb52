//! Iterated function systems, exact orbit points under both composition
//! orderings, base-K digit utilities and the digit-reversal permutation.
//!
//! The spatial system is `ψ_j(x) = A(x + b_j)` with `A⁻¹` integer; the dual
//! frequency system is `ρ_j(x) = Bx + c_j` with `B = (Aᵀ)⁻¹ = (A⁻¹)ᵀ`, so
//! `B` is itself an integer matrix. Orbit points are exact rationals.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{IntMatrix, IntMatrixInverse, RationalVector};

/// Default cap on `K^N` for point-set generation and transform plans.
pub const DEFAULT_SIZE_CAP: usize = 1 << 20;

/// Which way an index's digits drive the composition of maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `Ψ_j = ψ_{j_0} ∘ ψ_{j_1} ∘ … ∘ ψ_{j_{N-1}}` (innermost map from the
    /// most significant digit).
    Obverse,
    /// `Ψ̃_j = ψ_{j_{N-1}} ∘ … ∘ ψ_{j_0}` (innermost map from the least
    /// significant digit).
    Reverse,
}

impl Ordering {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "obverse" => Ok(Ordering::Obverse),
            "reverse" => Ok(Ordering::Reverse),
            other => Err(Error::Validation(format!(
                "unknown ordering {other:?}; expected \"obverse\" or \"reverse\""
            ))),
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordering::Obverse => write!(f, "obverse"),
            Ordering::Reverse => write!(f, "reverse"),
        }
    }
}

/// Spatial (`S_N`) or frequency (`T_N`) point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    Spatial,
    Frequency,
}

impl PointKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spatial" => Ok(PointKind::Spatial),
            "frequency" => Ok(PointKind::Frequency),
            other => Err(Error::Validation(format!(
                "unknown kind {other:?}; expected \"spatial\" or \"frequency\""
            ))),
        }
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointKind::Spatial => write!(f, "spatial"),
            PointKind::Frequency => write!(f, "frequency"),
        }
    }
}

/// Base-K digits of `j`, least significant first: `j = Σ j_n K^n`.
pub fn base_digits(j: usize, base: usize, len: u32) -> Result<Vec<usize>> {
    validate_digit_args(j, base, len)?;
    let mut digits = Vec::with_capacity(len as usize);
    let mut rest = j;
    for _ in 0..len {
        digits.push(rest % base);
        rest /= base;
    }
    Ok(digits)
}

/// Digit-reversal conjugate `j̃ = j_{N-1} + j_{N-2}K + … + j_0 K^{N-1}`.
pub fn digit_reverse(j: usize, base: usize, len: u32) -> Result<usize> {
    validate_digit_args(j, base, len)?;
    Ok(digit_reverse_unchecked(j, base, len))
}

pub(crate) fn digit_reverse_unchecked(j: usize, base: usize, len: u32) -> usize {
    let mut rest = j;
    let mut out = 0;
    for _ in 0..len {
        out = out * base + rest % base;
        rest /= base;
    }
    out
}

/// Permutes `v` by the digit-reversal conjugate: `out[m] = v[m̃]`.
pub fn digit_reversal_permute<T: Clone>(v: &[T], base: usize, len: u32) -> Result<Vec<T>> {
    validate_digit_args(0, base, len)?;
    let expected = crate::exact::checked_level_size(base, len, usize::MAX)?;
    if v.len() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            actual: v.len(),
        });
    }
    Ok((0..v.len())
        .map(|m| v[digit_reverse_unchecked(m, base, len)].clone())
        .collect())
}

fn validate_digit_args(j: usize, base: usize, len: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::OutOfRange(format!("base {base} must be at least 2")));
    }
    if len == 0 {
        return Err(Error::OutOfRange("digit length must be at least 1".into()));
    }
    let mut size: usize = 1;
    for _ in 0..len {
        size = size
            .checked_mul(base)
            .ok_or_else(|| Error::OutOfRange(format!("{base}^{len} overflows")))?;
    }
    if j >= size {
        return Err(Error::OutOfRange(format!(
            "index {j} out of range for {base}^{len} = {size}"
        )));
    }
    Ok(())
}

fn validate_translations(
    dim: usize,
    count: usize,
    translations: &[Vec<i64>],
    name: &str,
) -> Result<Vec<Vec<BigInt>>> {
    if translations.len() != count {
        return Err(Error::Validation(format!(
            "expected {} translation vectors {}, got {}",
            count,
            name,
            translations.len()
        )));
    }
    let mut out = Vec::with_capacity(count);
    for (i, t) in translations.iter().enumerate() {
        if t.len() != dim {
            return Err(Error::Validation(format!(
                "translation {}_{} has dimension {}, expected {}",
                name,
                i,
                t.len(),
                dim
            )));
        }
        out.push(t.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
    }
    if out[0].iter().any(|x: &BigInt| !x.is_zero()) {
        return Err(Error::Validation(format!(
            "translation {}_0 must be the zero vector",
            name
        )));
    }
    Ok(out)
}

/// The contraction system `{ψ_j(x) = A(x + b_j)}`, stored through the
/// integer matrix `A⁻¹`.
#[derive(Debug, Clone)]
pub struct SpatialIfs {
    dim: usize,
    branch_count: usize,
    a_inverse: IntMatrix,
    a_matrix: IntMatrixInverse,
    translations: Vec<Vec<BigInt>>,
}

impl SpatialIfs {
    pub fn new(a_inverse_rows: &[Vec<i64>], translations: &[Vec<i64>]) -> Result<Self> {
        let a_inverse = IntMatrix::from_rows(a_inverse_rows)?;
        let dim = a_inverse.dim();
        let a_matrix = IntMatrixInverse::new(&a_inverse)
            .map_err(|_| Error::Validation("a_inverse is singular over the rationals".into()))?;
        if translations.is_empty() {
            return Err(Error::Validation(
                "at least one translation b_0 required".into(),
            ));
        }
        let translations = validate_translations(dim, translations.len(), translations, "b")?;
        Ok(SpatialIfs {
            dim,
            branch_count: translations.len(),
            a_inverse,
            a_matrix,
            translations,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    pub fn a_inverse(&self) -> &IntMatrix {
        &self.a_inverse
    }

    /// Exact `A = (A⁻¹)⁻¹` as adjugate over determinant.
    pub fn a_matrix(&self) -> &IntMatrixInverse {
        &self.a_matrix
    }

    pub fn translation(&self, j: usize) -> &[BigInt] {
        &self.translations[j]
    }

    pub fn translations(&self) -> &[Vec<BigInt>] {
        &self.translations
    }

    /// `ψ_j(x) = A(x + b_j)`, exactly.
    pub fn map_apply(&self, j: usize, x: &RationalVector) -> RationalVector {
        let shifted = x.add(&RationalVector::from_bigints(&self.translations[j]));
        self.a_matrix.apply(&shifted)
    }

    /// Estimate of the operator 2-norm of `A` (power iteration on `AᵀA`).
    pub fn spectral_norm(&self) -> f64 {
        let a = self.a_matrix.to_f64_rows();
        let d = self.dim;
        // Gram matrix G = AᵀA.
        let mut g = vec![0.0f64; d * d];
        for r in 0..d {
            for c in 0..d {
                g[r * d + c] = (0..d).map(|k| a[k][r] * a[k][c]).sum();
            }
        }
        let mut v: Vec<f64> = (0..d).map(|i| 1.0 + i as f64 * 1e-3).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w: Vec<f64> = (0..d)
                .map(|r| (0..d).map(|c| g[r * d + c] * v[c]).sum())
                .collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm;
            v = w.iter().map(|x| x / norm).collect();
        }
        lambda.sqrt()
    }

    /// Contraction check `‖A‖₂ < 1`. The algebra does not require it, so a
    /// violation is surfaced as a warning by callers, never an error.
    pub fn is_contraction(&self) -> bool {
        self.spectral_norm() < 1.0
    }

    /// `Ψ_{j,N}(0)` / `Ψ̃_{j,N}(0)` by direct composition of the maps.
    pub fn orbit_point(&self, ordering: Ordering, j: usize, level: u32) -> Result<RationalVector> {
        self.orbit_point_at(ordering, j, level, &RationalVector::zero(self.dim))
    }

    /// Orbit of an arbitrary exact point under the composed maps.
    pub fn orbit_point_at(
        &self,
        ordering: Ordering,
        j: usize,
        level: u32,
        x: &RationalVector,
    ) -> Result<RationalVector> {
        let digits = composition_digits(j, self.branch_count, level)?;
        let mut y = x.clone();
        for &d in composition_order(&digits, ordering) {
            y = self.map_apply(d, &y);
        }
        // composition_order yields the innermost map first.
        Ok(y)
    }

    /// All `K^N` points of `S_N` in the requested ordering, via the level
    /// recurrences (each level extends the previous one branch at a time).
    pub fn generate_point_set(
        &self,
        ordering: Ordering,
        level: u32,
        cap: usize,
    ) -> Result<OrderedPointSet> {
        if level == 0 {
            return Err(Error::OutOfRange("level must be at least 1".into()));
        }
        crate::exact::checked_level_size(self.branch_count, level, cap)?;
        let k = self.branch_count;
        let mut points: Vec<RationalVector> = (0..k)
            .map(|j| self.map_apply(j, &RationalVector::zero(self.dim)))
            .collect();
        for n in 2..=level {
            let mut next = Vec::with_capacity(points.len() * k);
            match ordering {
                Ordering::Obverse => {
                    // Ψ_{ℓK^{n-1}+q, n}(0) = Ψ_{q, n-1}(0) + Aⁿ b_ℓ
                    let a_pow = IntMatrixInverse::new(&self.a_inverse.pow(n))
                        .expect("power of invertible matrix is invertible");
                    for branch in 0..k {
                        let offset = a_pow.apply_ints(&self.translations[branch]);
                        for p in &points {
                            next.push(p.add(&offset));
                        }
                    }
                }
                Ordering::Reverse => {
                    // Ψ̃_{ℓK^{n-1}+q, n}(0) = ψ_ℓ(Ψ̃_{q, n-1}(0))
                    for branch in 0..k {
                        for p in &points {
                            next.push(self.map_apply(branch, p));
                        }
                    }
                }
            }
            points = next;
        }
        Ok(OrderedPointSet::new(
            level,
            ordering,
            PointKind::Spatial,
            points,
        ))
    }
}

/// The dual expansion system `{ρ_j(x) = Bx + c_j}` with integer `B`.
#[derive(Debug, Clone)]
pub struct FrequencyIfs {
    dim: usize,
    branch_count: usize,
    b_matrix: IntMatrix,
    translations: Vec<Vec<BigInt>>,
}

impl FrequencyIfs {
    pub fn new(b_rows: &[Vec<i64>], translations: &[Vec<i64>]) -> Result<Self> {
        let b_matrix = IntMatrix::from_rows(b_rows)?;
        if b_matrix.determinant().is_zero() {
            return Err(Error::Validation("b_matrix is singular".into()));
        }
        let dim = b_matrix.dim();
        if translations.is_empty() {
            return Err(Error::Validation(
                "at least one translation c_0 required".into(),
            ));
        }
        let translations = validate_translations(dim, translations.len(), translations, "c")?;
        Ok(FrequencyIfs {
            dim,
            branch_count: translations.len(),
            b_matrix,
            translations,
        })
    }

    /// Builds the system dual to `spatial`: `B = (A⁻¹)ᵀ`.
    pub fn dual_to(spatial: &SpatialIfs, translations: &[Vec<i64>]) -> Result<Self> {
        let b = spatial.a_inverse().transpose();
        let rows = b
            .rows_i64()
            .ok_or_else(|| Error::Validation("a_inverse entries exceed i64".into()))?;
        Self::new(&rows, translations)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    pub fn b_matrix(&self) -> &IntMatrix {
        &self.b_matrix
    }

    pub fn translation(&self, j: usize) -> &[BigInt] {
        &self.translations[j]
    }

    pub fn translations(&self) -> &[Vec<BigInt>] {
        &self.translations
    }

    /// `ρ_j(x) = Bx + c_j` on integer vectors.
    pub fn map_apply_int(&self, j: usize, x: &[BigInt]) -> Vec<BigInt> {
        self.b_matrix
            .mul_vec(x)
            .into_iter()
            .zip(&self.translations[j])
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `ρ_j` on exact rational vectors (used by the additivity identities).
    pub fn map_apply(&self, j: usize, x: &RationalVector) -> RationalVector {
        let d = self.dim;
        let mut out = Vec::with_capacity(d);
        for r in 0..d {
            let mut acc = num_rational::BigRational::from(self.translations[j][r].clone());
            for c in 0..d {
                acc += num_rational::BigRational::from(self.b_matrix.entry(r, c).clone())
                    * &x.components()[c];
            }
            out.push(acc);
        }
        RationalVector::new(out)
    }

    /// `R_{j,N}(0)` / `R̃_{j,N}(0)` by direct composition; always integer.
    pub fn orbit_point(&self, ordering: Ordering, j: usize, level: u32) -> Result<RationalVector> {
        let digits = composition_digits(j, self.branch_count, level)?;
        let mut y = vec![BigInt::zero(); self.dim];
        for &d in composition_order(&digits, ordering) {
            y = self.map_apply_int(d, &y);
        }
        Ok(RationalVector::from_bigints(&y))
    }

    pub fn orbit_point_at(
        &self,
        ordering: Ordering,
        j: usize,
        level: u32,
        x: &RationalVector,
    ) -> Result<RationalVector> {
        let digits = composition_digits(j, self.branch_count, level)?;
        let mut y = x.clone();
        for &d in composition_order(&digits, ordering) {
            y = self.map_apply(d, &y);
        }
        Ok(y)
    }

    /// All `K^N` points of `T_N` in the requested ordering.
    pub fn generate_point_set(
        &self,
        ordering: Ordering,
        level: u32,
        cap: usize,
    ) -> Result<OrderedPointSet> {
        if level == 0 {
            return Err(Error::OutOfRange("level must be at least 1".into()));
        }
        crate::exact::checked_level_size(self.branch_count, level, cap)?;
        let k = self.branch_count;
        let mut points: Vec<Vec<BigInt>> = self.translations.clone();
        for n in 2..=level {
            let mut next = Vec::with_capacity(points.len() * k);
            match ordering {
                Ordering::Obverse => {
                    // R_{ℓK^{n-1}+q, n}(0) = R_{q, n-1}(0) + B^{n-1} c_ℓ
                    let b_pow = self.b_matrix.pow(n - 1);
                    for branch in 0..k {
                        let offset = b_pow.mul_vec(&self.translations[branch]);
                        for p in &points {
                            next.push(p.iter().zip(&offset).map(|(a, b)| a + b).collect());
                        }
                    }
                }
                Ordering::Reverse => {
                    // R̃_{ℓK^{n-1}+q, n}(0) = B R̃_{q, n-1}(0) + c_ℓ
                    for branch in 0..k {
                        for p in &points {
                            next.push(self.map_apply_int(branch, p));
                        }
                    }
                }
            }
            points = next;
        }
        let points = points
            .iter()
            .map(|p| RationalVector::from_bigints(p))
            .collect();
        Ok(OrderedPointSet::new(
            level,
            ordering,
            PointKind::Frequency,
            points,
        ))
    }
}

fn composition_digits(j: usize, k: usize, level: u32) -> Result<Vec<usize>> {
    if level == 0 {
        return Err(Error::OutOfRange("level must be at least 1".into()));
    }
    if k == 1 {
        if j != 0 {
            return Err(Error::OutOfRange(format!(
                "index {j} out of range for K = 1"
            )));
        }
        return Ok(vec![0; level as usize]);
    }
    base_digits(j, k, level)
}

/// Digits in innermost-map-first order for the given composition ordering.
fn composition_order(
    digits: &[usize],
    ordering: Ordering,
) -> Box<dyn Iterator<Item = &usize> + '_> {
    match ordering {
        // Ψ_j = ψ_{j_0} ∘ … ∘ ψ_{j_{N-1}}: the most significant digit's map
        // is applied first.
        Ordering::Obverse => Box::new(digits.iter().rev()),
        Ordering::Reverse => Box::new(digits.iter()),
    }
}

/// An enumerated point set `S_N` or `T_N` with its ordering tag.
#[derive(Debug, Clone)]
pub struct OrderedPointSet {
    level: u32,
    ordering: Ordering,
    kind: PointKind,
    points: Vec<RationalVector>,
    has_duplicates: bool,
}

impl OrderedPointSet {
    fn new(level: u32, ordering: Ordering, kind: PointKind, points: Vec<RationalVector>) -> Self {
        let mut seen = HashSet::with_capacity(points.len());
        let mut has_duplicates = false;
        for p in &points {
            if !seen.insert(p.clone()) {
                has_duplicates = true;
                break;
            }
        }
        OrderedPointSet {
            level,
            ordering,
            kind,
            points,
            has_duplicates,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn kind(&self) -> PointKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, j: usize) -> &RationalVector {
        &self.points[j]
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    /// True when two indices map to the same point (the transform stays
    /// defined by the index set; callers decide whether to warn).
    pub fn has_duplicates(&self) -> bool {
        self.has_duplicates
    }
}
