//! Seed matrix `M₁`, transform plans and the fast recursive application of
//! `M_N`, `M̃_N` and their inverses.
//!
//! The matrices are `[M_N]_{jk} = e^{-2πi R_{j,N}(0)·Ψ_{k,N}(0)}` (obverse
//! ordering on rows and columns) and the analogous `M̃_N` for the reverse
//! ordering. Under the obverse ordering `M_N` splits into `K × K` blocks
//! `m_{ℓm} D_{N,m} M_{N-1}`; under the reverse ordering into
//! `m_{ℓm} M̃_{N-1} D̃_{N,ℓ}`. Plans store only the `K`-entry diagonal factor
//! tables per level; full diagonals are expanded transiently per apply via
//! the Kronecker recurrence `D_{N,m} = D_{N-1,m} ⊗ E_{N,m}`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dita::OpCounter;
use crate::error::{Error, Result};
use crate::exact::{checked_level_size, IntMatrixInverse, Phase, PhasorCache, RationalVector};
use crate::ifs::{digit_reverse_unchecked, FrequencyIfs, Ordering, PointKind, SpatialIfs};
use crate::ifs::{OrderedPointSet, DEFAULT_SIZE_CAP};
use crate::linalg::{CMatrix, LuDecomposition};

/// Dense matrices and identity verification are held to oracle scale.
pub const DENSE_CAP: usize = 4096;

/// Tolerance for the Hadamard classification `‖M₁*M₁ − K·I‖ ≤ tol`.
pub const HADAMARD_TOL: f64 = 1e-9;

/// Scale-aware invertibility threshold for `M₁`.
pub const M1_DET_TOL: f64 = 1e-9;

/// Residual bound for the computed `M₁⁻¹`.
pub const M1_RESIDUAL_TOL: f64 = 1e-12;

/// Property class of the seed matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum M1Class {
    #[default]
    Invertible,
    Hadamard,
}

impl M1Class {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "invertible" => Ok(M1Class::Invertible),
            "hadamard" => Ok(M1Class::Hadamard),
            other => Err(Error::Validation(format!(
                "unknown class {other:?}; expected \"invertible\" or \"hadamard\""
            ))),
        }
    }
}

impl fmt::Display for M1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            M1Class::Invertible => write!(f, "invertible"),
            M1Class::Hadamard => write!(f, "hadamard"),
        }
    }
}

/// A validated spatial/frequency pair together with its seed matrix.
#[derive(Debug, Clone)]
pub struct FractalSystem {
    spatial: SpatialIfs,
    frequency: FrequencyIfs,
    m1_phases: Vec<Phase>,
    m1: CMatrix,
    m1_class: M1Class,
    size_cap: usize,
}

/// Validates the pairing, builds `M₁` from exact phases and classifies it.
///
/// `[M₁]_{jk} = e^{-2πi c_j·A b_k}`; the first row and column are all ones
/// since `b_0 = c_0 = 0`. Fails when `M₁` does not reach `required_class`.
pub fn build_system(
    spatial: SpatialIfs,
    frequency: FrequencyIfs,
    required_class: M1Class,
) -> Result<FractalSystem> {
    if spatial.dim() != frequency.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: spatial {} vs frequency {}",
            spatial.dim(),
            frequency.dim()
        )));
    }
    if spatial.branch_count() != frequency.branch_count() {
        return Err(Error::Validation(format!(
            "branch count mismatch: spatial {} vs frequency {}",
            spatial.branch_count(),
            frequency.branch_count()
        )));
    }
    if frequency.b_matrix() != &spatial.a_inverse().transpose() {
        return Err(Error::Validation(
            "frequency matrix must satisfy B = (A^T)^-1, i.e. the transpose of a_inverse".into(),
        ));
    }

    let k = spatial.branch_count();
    let a = spatial.a_matrix();
    let mut cache = PhasorCache::new();
    let mut m1_phases = Vec::with_capacity(k * k);
    let mut m1 = CMatrix::zeros(k, k);
    for j in 0..k {
        for kk in 0..k {
            let phase = Phase::from_rational(
                a.quadratic_form(frequency.translation(j), spatial.translation(kk)),
            );
            m1[(j, kk)] = cache.phasor(&phase);
            m1_phases.push(phase);
        }
    }

    let gram = m1.conjugate_transpose().mul(&m1);
    let target = CMatrix::identity(k).scaled(Complex64::new(k as f64, 0.0));
    let hadamard = gram.max_abs_diff(&target) <= HADAMARD_TOL;
    let m1_class = if hadamard {
        M1Class::Hadamard
    } else if crate::linalg::is_invertible(&m1, M1_DET_TOL) {
        M1Class::Invertible
    } else {
        return Err(Error::Validation(
            "M1 singular: no invertible seed matrix for this translation choice".into(),
        ));
    };
    if required_class == M1Class::Hadamard && m1_class != M1Class::Hadamard {
        return Err(Error::Validation(
            "M1 is invertible but not Hadamard; required class hadamard".into(),
        ));
    }

    Ok(FractalSystem {
        spatial,
        frequency,
        m1_phases,
        m1,
        m1_class,
        size_cap: DEFAULT_SIZE_CAP,
    })
}

impl FractalSystem {
    pub fn spatial(&self) -> &SpatialIfs {
        &self.spatial
    }

    pub fn frequency(&self) -> &FrequencyIfs {
        &self.frequency
    }

    pub fn branch_count(&self) -> usize {
        self.spatial.branch_count()
    }

    pub fn dim(&self) -> usize {
        self.spatial.dim()
    }

    pub fn m1(&self) -> &CMatrix {
        &self.m1
    }

    pub fn m1_phase(&self, j: usize, k: usize) -> &Phase {
        &self.m1_phases[j * self.branch_count() + k]
    }

    pub fn m1_class(&self) -> M1Class {
        self.m1_class
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    /// Exact `c·Aⁿb mod 1` for integer vectors `c`, `b` and `n ≥ 1`.
    pub fn phase(&self, c_vec: &[BigInt], n: u32, b_vec: &[BigInt]) -> Phase {
        let a_pow = IntMatrixInverse::new(&self.spatial.a_inverse().pow(n))
            .expect("power of invertible matrix is invertible");
        Phase::from_rational(a_pow.quadratic_form(c_vec, b_vec))
    }

    pub fn orbit_point(
        &self,
        kind: PointKind,
        ordering: Ordering,
        j: usize,
        level: u32,
    ) -> Result<RationalVector> {
        match kind {
            PointKind::Spatial => self.spatial.orbit_point(ordering, j, level),
            PointKind::Frequency => self.frequency.orbit_point(ordering, j, level),
        }
    }

    pub fn generate_point_set(
        &self,
        kind: PointKind,
        ordering: Ordering,
        level: u32,
    ) -> Result<OrderedPointSet> {
        match kind {
            PointKind::Spatial => self
                .spatial
                .generate_point_set(ordering, level, self.size_cap),
            PointKind::Frequency => {
                self.frequency
                    .generate_point_set(ordering, level, self.size_cap)
            }
        }
    }

    /// Dense `M_N` (obverse) or `M̃_N` (reverse); rows are frequency points,
    /// columns spatial points. Oracle scale (`K^N ≤ 4096`).
    pub fn dense_matrix(&self, level: u32, ordering: Ordering) -> Result<CMatrix> {
        let mut cache = PhasorCache::new();
        self.dense_matrix_with_cache(level, ordering, &mut cache)
    }

    fn dense_matrix_with_cache(
        &self,
        level: u32,
        ordering: Ordering,
        cache: &mut PhasorCache,
    ) -> Result<CMatrix> {
        if level == 0 {
            return Err(Error::OutOfRange("level must be at least 1".into()));
        }
        let size = checked_level_size(self.branch_count(), level, DENSE_CAP)?;
        let freq = self
            .frequency
            .generate_point_set(ordering, level, DENSE_CAP)?;
        let spat = self
            .spatial
            .generate_point_set(ordering, level, DENSE_CAP)?;
        let mut m = CMatrix::zeros(size, size);
        for j in 0..size {
            for k in 0..size {
                let phase = Phase::from_rational(freq.point(j).dot(spat.point(k)));
                m[(j, k)] = cache.phasor(&phase);
            }
        }
        Ok(m)
    }

    /// Checks the permutation conjugation `P M̃_N P = M_N` and the two block
    /// assemblies against the dense matrices at this level.
    pub fn verify_block_identities(&self, level: u32) -> Result<BlockIdentityReport> {
        if level == 0 {
            return Err(Error::OutOfRange("level must be at least 1".into()));
        }
        let size = checked_level_size(self.branch_count(), level, DENSE_CAP)?;
        if level == 1 {
            // All three identities degenerate at the seed level.
            return Ok(BlockIdentityReport {
                level,
                permutation_deviation: 0.0,
                obverse_assembly_deviation: 0.0,
                reverse_assembly_deviation: 0.0,
            });
        }
        let k = self.branch_count();
        let sub = size / k;
        let mut cache = PhasorCache::new();
        let m_ob = self.dense_matrix_with_cache(level, Ordering::Obverse, &mut cache)?;
        let m_rev = self.dense_matrix_with_cache(level, Ordering::Reverse, &mut cache)?;
        let prev_ob = self.dense_matrix_with_cache(level - 1, Ordering::Obverse, &mut cache)?;
        let prev_rev = self.dense_matrix_with_cache(level - 1, Ordering::Reverse, &mut cache)?;

        let mut permutation_deviation: f64 = 0.0;
        for r in 0..size {
            let rr = digit_reverse_unchecked(r, k, level);
            for c in 0..size {
                let cc = digit_reverse_unchecked(c, k, level);
                let dev = (m_ob[(r, c)] - m_rev[(rr, cc)]).norm();
                permutation_deviation = permutation_deviation.max(dev);
            }
        }

        // Theorem-1 assembly: block (ℓ, m) = m_{ℓm} D_{N,m} M_{N-1} with the
        // diagonal taken from its direct definition.
        let freq_prev =
            self.frequency
                .generate_point_set(Ordering::Obverse, level - 1, DENSE_CAP)?;
        let a_pow = IntMatrixInverse::new(&self.spatial.a_inverse().pow(level))
            .expect("power of invertible matrix is invertible");
        let mut obverse_assembly_deviation: f64 = 0.0;
        for m in 0..k {
            let shift = a_pow.apply_ints(self.spatial.translation(m));
            let diag: Vec<Complex64> = (0..sub)
                .map(|p| cache.phasor(&Phase::from_rational(freq_prev.point(p).dot(&shift))))
                .collect();
            for l in 0..k {
                let coeff = self.m1[(l, m)];
                for p in 0..sub {
                    let row_factor = coeff * diag[p];
                    for q in 0..sub {
                        let assembled = row_factor * prev_ob[(p, q)];
                        let dev = (assembled - m_ob[(l * sub + p, m * sub + q)]).norm();
                        obverse_assembly_deviation = obverse_assembly_deviation.max(dev);
                    }
                }
            }
        }

        // Theorem-2 assembly: block (ℓ, m) = m_{ℓm} M̃_{N-1} D̃_{N,ℓ}.
        let spat_prev = self
            .spatial
            .generate_point_set(Ordering::Reverse, level - 1, DENSE_CAP)?;
        let mut reverse_assembly_deviation: f64 = 0.0;
        for l in 0..k {
            let c_l = RationalVector::from_bigints(self.frequency.translation(l));
            let diag: Vec<Complex64> = (0..sub)
                .map(|p| {
                    let a_psi = self.spatial.a_matrix().apply(spat_prev.point(p));
                    cache.phasor(&Phase::from_rational(c_l.dot(&a_psi)))
                })
                .collect();
            for m in 0..k {
                let coeff = self.m1[(l, m)];
                for p in 0..sub {
                    for q in 0..sub {
                        let assembled = coeff * prev_rev[(p, q)] * diag[q];
                        let dev = (assembled - m_rev[(l * sub + p, m * sub + q)]).norm();
                        reverse_assembly_deviation = reverse_assembly_deviation.max(dev);
                    }
                }
            }
        }

        Ok(BlockIdentityReport {
            level,
            permutation_deviation,
            obverse_assembly_deviation,
            reverse_assembly_deviation,
        })
    }

    /// Precomputes the per-level diagonal factor tables and `M₁⁻¹`.
    pub fn build_plan(&self, level: u32, ordering: Ordering) -> Result<TransformPlan> {
        if level == 0 {
            return Err(Error::OutOfRange("level must be at least 1".into()));
        }
        checked_level_size(self.branch_count(), level, self.size_cap)?;
        let k = self.branch_count();

        let lu = LuDecomposition::new(&self.m1)
            .map_err(|_| Error::Numerical("M1 singular: cannot build a plan".into()))?;
        let m1_inverse = lu.inverse();
        let residual = self.m1.mul(&m1_inverse).max_abs_diff(&CMatrix::identity(k));
        if residual > M1_RESIDUAL_TOL {
            return Err(Error::Numerical(format!(
                "M1 inverse residual {residual:.3e} exceeds {M1_RESIDUAL_TOL:.0e}"
            )));
        }

        let mut cache = PhasorCache::new();
        let mut diag_phases: Vec<Vec<Vec<Phase>>> = Vec::new();
        let mut diag_phasors: Vec<Vec<Vec<Complex64>>> = Vec::new();
        for n in 2..=level {
            let a_pow = IntMatrixInverse::new(&self.spatial.a_inverse().pow(n))
                .expect("power of invertible matrix is invertible");
            // grid[u][m] = c_u · Aⁿ b_m mod 1
            let grid: Vec<Vec<Phase>> = (0..k)
                .map(|u| {
                    (0..k)
                        .map(|m| {
                            Phase::from_rational(a_pow.quadratic_form(
                                self.frequency.translation(u),
                                self.spatial.translation(m),
                            ))
                        })
                        .collect()
                })
                .collect();
            let mut level_phases = Vec::with_capacity(k);
            for branch in 0..k {
                let factor: Vec<Phase> = match ordering {
                    // E_{n,m}[u] = e^{-2πi c_u·Aⁿ b_m}
                    Ordering::Obverse => grid.iter().map(|row| row[branch].clone()).collect(),
                    // Ẽ_{n,ℓ}[u] = e^{-2πi c_ℓ·Aⁿ b_u}
                    Ordering::Reverse => grid[branch].clone(),
                };
                level_phases.push(factor);
            }
            let level_phasors = level_phases
                .iter()
                .map(|f| f.iter().map(|p| cache.phasor(p)).collect())
                .collect();
            diag_phases.push(level_phases);
            diag_phasors.push(level_phasors);
        }

        Ok(TransformPlan {
            system: self.clone(),
            level,
            ordering,
            diag_phases,
            diag_phasors,
            m1_inverse,
        })
    }
}

/// Maximum entrywise deviations of the three block identities at one level.
#[derive(Debug, Clone, Copy)]
pub struct BlockIdentityReport {
    pub level: u32,
    /// `P M̃_N P` vs `M_N`.
    pub permutation_deviation: f64,
    /// Theorem-1 block assembly vs dense `M_N`.
    pub obverse_assembly_deviation: f64,
    /// Theorem-2 block assembly vs dense `M̃_N`.
    pub reverse_assembly_deviation: f64,
}

impl BlockIdentityReport {
    pub fn max_deviation(&self) -> f64 {
        self.permutation_deviation
            .max(self.obverse_assembly_deviation)
            .max(self.reverse_assembly_deviation)
    }
}

/// Precomputed factorization data for fast forward/inverse application.
///
/// Memory is `O(N·K²)`: only the `K`-entry `E`-factor tables per level are
/// stored, never the `K^{N-1}`-entry diagonals.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    system: FractalSystem,
    level: u32,
    ordering: Ordering,
    /// `diag_phases[n-2][branch][u]`: exact phase of the level-`n` factor.
    diag_phases: Vec<Vec<Vec<Phase>>>,
    diag_phasors: Vec<Vec<Vec<Complex64>>>,
    m1_inverse: CMatrix,
}

impl TransformPlan {
    pub fn system(&self) -> &FractalSystem {
        &self.system
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// `K^N`, the signal length this plan applies to.
    pub fn len(&self) -> usize {
        self.system.branch_count().pow(self.level)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn m1_inverse(&self) -> &CMatrix {
        &self.m1_inverse
    }

    /// Exact phases of `E_{n,branch}` (obverse) or `Ẽ_{n,branch}` (reverse),
    /// for `2 ≤ n ≤ N`.
    pub fn diag_factor_phases(&self, n: u32, branch: usize) -> &[Phase] {
        &self.diag_phases[(n - 2) as usize][branch]
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

    /// Expands the per-level diagonals `D_{n,m}` (branches `1..K`) via the
    /// Kronecker recurrence. Scratch data for one apply; not stored.
    fn expand_diagonals(&self) -> Vec<Vec<Vec<Complex64>>> {
        let k = self.system.branch_count();
        let mut ws: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(self.diag_phasors.len());
        for n in 2..=self.level {
            let idx = (n - 2) as usize;
            let mut level_diags = Vec::with_capacity(k.saturating_sub(1));
            for branch in 1..k {
                let factor = &self.diag_phasors[idx][branch];
                let diag = if n == 2 {
                    factor.clone()
                } else {
                    let prev = &ws[idx - 1][branch - 1];
                    let mut out = Vec::with_capacity(prev.len() * k);
                    for p in prev {
                        for e in factor {
                            out.push(p * e);
                        }
                    }
                    out
                };
                level_diags.push(diag);
            }
            ws.push(level_diags);
        }
        ws
    }

    /// Fast `M_N v` (obverse) or `M̃_N v` (reverse).
    pub fn forward(&self, v: &[Complex64], counter: &mut OpCounter) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        let ws = self.expand_diagonals();
        Ok(match self.ordering {
            Ordering::Obverse => self.obverse_forward(self.level, v, &ws, counter),
            Ordering::Reverse => self.reverse_forward(self.level, v, &ws, counter),
        })
    }

    /// Fast `M_N⁻¹ w` / `M̃_N⁻¹ w` via the block inverse.
    pub fn inverse(&self, w: &[Complex64], counter: &mut OpCounter) -> Result<Vec<Complex64>> {
        self.check_len(w.len())?;
        let ws = self.expand_diagonals();
        Ok(match self.ordering {
            Ordering::Obverse => self.obverse_inverse(self.level, w, &ws, counter),
            Ordering::Reverse => self.reverse_inverse(self.level, w, &ws, counter),
        })
    }

    /// Fast `M_N* w` / `M̃_N* w` (conjugate transpose). For a Hadamard
    /// system this equals `K^N · M_N⁻¹ w`.
    pub fn adjoint(&self, w: &[Complex64], counter: &mut OpCounter) -> Result<Vec<Complex64>> {
        self.check_len(w.len())?;
        let ws = self.expand_diagonals();
        Ok(match self.ordering {
            Ordering::Obverse => self.obverse_adjoint(self.level, w, &ws, counter),
            Ordering::Reverse => self.reverse_adjoint(self.level, w, &ws, counter),
        })
    }

    fn obverse_forward(
        &self,
        level: u32,
        v: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_counted(self.system.m1(), v, counter);
        }
        let k = self.system.branch_count();
        let m = v.len() / k;
        let mut parts: Vec<Vec<Complex64>> = v
            .chunks(m)
            .map(|chunk| self.obverse_forward(level - 1, chunk, ws, counter))
            .collect();
        let diags = &ws[(level - 2) as usize];
        for branch in 1..k {
            for (x, e) in parts[branch].iter_mut().zip(&diags[branch - 1]) {
                *x *= e;
            }
            counter.add_muls(m as u64);
        }
        combine_blocks(self.system.m1(), &parts, m, counter)
    }

    fn reverse_forward(
        &self,
        level: u32,
        v: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_counted(self.system.m1(), v, counter);
        }
        let k = self.system.branch_count();
        let m = v.len() / k;
        let chunks: Vec<&[Complex64]> = v.chunks(m).collect();
        let diags = &ws[(level - 2) as usize];
        let mut out = Vec::with_capacity(v.len());
        for row in 0..k {
            let mut t = row_combination(self.system.m1(), row, &chunks, m, counter);
            if row > 0 {
                for (x, e) in t.iter_mut().zip(&diags[row - 1]) {
                    *x *= e;
                }
                counter.add_muls(m as u64);
            }
            out.extend(self.reverse_forward(level - 1, &t, ws, counter));
        }
        out
    }

    fn obverse_inverse(
        &self,
        level: u32,
        w: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_counted(&self.m1_inverse, w, counter);
        }
        let k = self.system.branch_count();
        let m = w.len() / k;
        let chunks: Vec<&[Complex64]> = w.chunks(m).collect();
        let diags = &ws[(level - 2) as usize];
        let mut out = Vec::with_capacity(w.len());
        for row in 0..k {
            let mut s = row_combination(&self.m1_inverse, row, &chunks, m, counter);
            if row > 0 {
                // Unit-modulus diagonals invert by conjugation.
                for (x, e) in s.iter_mut().zip(&diags[row - 1]) {
                    *x *= e.conj();
                }
                counter.add_muls(m as u64);
            }
            out.extend(self.obverse_inverse(level - 1, &s, ws, counter));
        }
        out
    }

    fn reverse_inverse(
        &self,
        level: u32,
        w: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_counted(&self.m1_inverse, w, counter);
        }
        let k = self.system.branch_count();
        let m = w.len() / k;
        let mut parts: Vec<Vec<Complex64>> = w
            .chunks(m)
            .map(|chunk| self.reverse_inverse(level - 1, chunk, ws, counter))
            .collect();
        let diags = &ws[(level - 2) as usize];
        for branch in 1..k {
            for (x, e) in parts[branch].iter_mut().zip(&diags[branch - 1]) {
                *x *= e.conj();
            }
            counter.add_muls(m as u64);
        }
        combine_blocks(&self.m1_inverse, &parts, m, counter)
    }

    fn obverse_adjoint(
        &self,
        level: u32,
        w: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_adjoint_counted(self.system.m1(), w, counter);
        }
        let k = self.system.branch_count();
        let m = w.len() / k;
        let chunks: Vec<&[Complex64]> = w.chunks(m).collect();
        let diags = &ws[(level - 2) as usize];
        let mut out = Vec::with_capacity(w.len());
        for row in 0..k {
            // M_N* block (m, ℓ) = conj(m_{ℓm}) M_{N-1}* D_{N,m}*.
            let mut s = row_combination_adjoint(self.system.m1(), row, &chunks, m, counter);
            if row > 0 {
                for (x, e) in s.iter_mut().zip(&diags[row - 1]) {
                    *x *= e.conj();
                }
                counter.add_muls(m as u64);
            }
            out.extend(self.obverse_adjoint(level - 1, &s, ws, counter));
        }
        out
    }

    fn reverse_adjoint(
        &self,
        level: u32,
        w: &[Complex64],
        ws: &[Vec<Vec<Complex64>>],
        counter: &mut OpCounter,
    ) -> Vec<Complex64> {
        if level == 1 {
            return dense_mul_adjoint_counted(self.system.m1(), w, counter);
        }
        let k = self.system.branch_count();
        let m = w.len() / k;
        let mut parts: Vec<Vec<Complex64>> = w
            .chunks(m)
            .map(|chunk| self.reverse_adjoint(level - 1, chunk, ws, counter))
            .collect();
        let diags = &ws[(level - 2) as usize];
        for branch in 1..k {
            for (x, e) in parts[branch].iter_mut().zip(&diags[branch - 1]) {
                *x *= e.conj();
            }
            counter.add_muls(m as u64);
        }
        // M̃_N* block (m, ℓ) = conj(m_{ℓm}) D̃_{N,ℓ}* M̃_{N-1}*.
        combine_blocks_adjoint(self.system.m1(), &parts, m, counter)
    }

    /// Checks, for every level `2 ≤ n ≤ N` and every branch, that the
    /// Kronecker-recurrence diagonal phases equal the direct-definition
    /// phases as exact rationals mod 1.
    pub fn verify_diagonal_recurrence(&self) -> Result<bool> {
        let k = self.system.branch_count();
        for n in 2..=self.level {
            let idx = (n - 2) as usize;
            // Expand recurrence phases exactly.
            let mut rec: Vec<Vec<Phase>> = Vec::with_capacity(k);
            for branch in 0..k {
                let factor = &self.diag_phases[idx][branch];
                let expanded = if n == 2 {
                    factor.clone()
                } else {
                    let prev = &rec_prev(&self.diag_phases, n, branch);
                    let mut out = Vec::with_capacity(prev.len() * k);
                    for p in prev {
                        for e in factor {
                            out.push(p.add(e));
                        }
                    }
                    out
                };
                rec.push(expanded);
            }

            // Direct definitions.
            match self.ordering {
                Ordering::Obverse => {
                    let freq_prev = self.system.frequency().generate_point_set(
                        Ordering::Obverse,
                        n - 1,
                        self.system.size_cap(),
                    )?;
                    let a_pow = IntMatrixInverse::new(&self.system.spatial().a_inverse().pow(n))
                        .expect("power of invertible matrix is invertible");
                    for (branch, rec_branch) in rec.iter().enumerate() {
                        let shift = a_pow.apply_ints(self.system.spatial().translation(branch));
                        for (p, point) in freq_prev.points().iter().enumerate() {
                            let direct = Phase::from_rational(point.dot(&shift));
                            if rec_branch[p] != direct {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ordering::Reverse => {
                    let spat_prev = self.system.spatial().generate_point_set(
                        Ordering::Reverse,
                        n - 1,
                        self.system.size_cap(),
                    )?;
                    for (branch, rec_branch) in rec.iter().enumerate() {
                        let c_l = RationalVector::from_bigints(
                            self.system.frequency().translation(branch),
                        );
                        for (p, point) in spat_prev.points().iter().enumerate() {
                            let a_psi = self.system.spatial().a_matrix().apply(point);
                            let direct = Phase::from_rational(c_l.dot(&a_psi));
                            if rec_branch[p] != direct {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Expands recurrence phases up to level `n - 1` for one branch.
fn rec_prev(diag_phases: &[Vec<Vec<Phase>>], n: u32, branch: usize) -> Vec<Phase> {
    let mut acc: Vec<Phase> = diag_phases[0][branch].clone();
    for lvl in 3..n {
        let factor = &diag_phases[(lvl - 2) as usize][branch];
        let mut out = Vec::with_capacity(acc.len() * factor.len());
        for p in &acc {
            for e in factor {
                out.push(p.add(e));
            }
        }
        acc = out;
    }
    acc
}

fn dense_mul_counted(m: &CMatrix, v: &[Complex64], counter: &mut OpCounter) -> Vec<Complex64> {
    let n = m.rows();
    counter.add_muls((n * n) as u64);
    counter.add_adds((n * (n - 1)) as u64);
    m.mul_vec(v)
}

fn dense_mul_adjoint_counted(
    m: &CMatrix,
    v: &[Complex64],
    counter: &mut OpCounter,
) -> Vec<Complex64> {
    let n = m.rows();
    counter.add_muls((n * n) as u64);
    counter.add_adds((n * (n - 1)) as u64);
    (0..n)
        .map(|r| (0..n).map(|c| m[(c, r)].conj() * v[c]).sum())
        .collect()
}

/// `out[i] = Σ_col coeff[row, col] · chunks[col][i]` for one output row.
fn row_combination(
    coeff: &CMatrix,
    row: usize,
    chunks: &[&[Complex64]],
    m: usize,
    counter: &mut OpCounter,
) -> Vec<Complex64> {
    let k = chunks.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (col, chunk) in chunks.iter().enumerate() {
        let a = coeff[(row, col)];
        if col == 0 {
            for (d, s) in out.iter_mut().zip(*chunk) {
                *d = a * s;
            }
        } else {
            for (d, s) in out.iter_mut().zip(*chunk) {
                *d += a * s;
            }
        }
    }
    counter.add_muls((m * k) as u64);
    counter.add_adds((m * (k - 1)) as u64);
    out
}

fn row_combination_adjoint(
    coeff: &CMatrix,
    row: usize,
    chunks: &[&[Complex64]],
    m: usize,
    counter: &mut OpCounter,
) -> Vec<Complex64> {
    let k = chunks.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (col, chunk) in chunks.iter().enumerate() {
        let a = coeff[(col, row)].conj();
        if col == 0 {
            for (d, s) in out.iter_mut().zip(*chunk) {
                *d = a * s;
            }
        } else {
            for (d, s) in out.iter_mut().zip(*chunk) {
                *d += a * s;
            }
        }
    }
    counter.add_muls((m * k) as u64);
    counter.add_adds((m * (k - 1)) as u64);
    out
}

/// Output block `row` = `Σ_col coeff[row, col] · parts[col]`, all rows.
fn combine_blocks(
    coeff: &CMatrix,
    parts: &[Vec<Complex64>],
    m: usize,
    counter: &mut OpCounter,
) -> Vec<Complex64> {
    let k = parts.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m * k];
    for row in 0..k {
        let dst = &mut out[row * m..(row + 1) * m];
        for (col, part) in parts.iter().enumerate() {
            let a = coeff[(row, col)];
            if col == 0 {
                for (d, s) in dst.iter_mut().zip(part) {
                    *d = a * s;
                }
            } else {
                for (d, s) in dst.iter_mut().zip(part) {
                    *d += a * s;
                }
            }
        }
        counter.add_muls((m * k) as u64);
        counter.add_adds((m * (k - 1)) as u64);
    }
    out
}

fn combine_blocks_adjoint(
    coeff: &CMatrix,
    parts: &[Vec<Complex64>],
    m: usize,
    counter: &mut OpCounter,
) -> Vec<Complex64> {
    let k = parts.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m * k];
    for row in 0..k {
        let dst = &mut out[row * m..(row + 1) * m];
        for (col, part) in parts.iter().enumerate() {
            let a = coeff[(col, row)].conj();
            if col == 0 {
                for (d, s) in dst.iter_mut().zip(part) {
                    *d = a * s;
                }
            } else {
                for (d, s) in dst.iter_mut().zip(part) {
                    *d += a * s;
                }
            }
        }
        counter.add_muls((m * k) as u64);
        counter.add_adds((m * (k - 1)) as u64);
    }
    out
}

/// Paper closed form `P_N = K^{N-1}P₁ + 3(N-1)K^{N+1} − 2(N-1)K^N`.
pub fn plan_op_count_bound(k: u64, n: u32, p1: u64) -> u64 {
    let n64 = n as u64;
    k.pow(n - 1) * p1 + 3 * (n64 - 1) * k.pow(n + 1) - 2 * (n64 - 1) * k.pow(n)
}

/// Dense apply cost `K^{2N} + K^N (K^N − 1)` for contrast in benchmarks.
pub fn dense_op_count(k: u64, n: u32) -> u64 {
    let size = k.pow(n);
    size * size + size * (size - 1)
}
