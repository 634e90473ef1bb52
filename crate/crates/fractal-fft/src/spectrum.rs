//! Search for integer frequency translations that make the seed matrix
//! invertible or Hadamard.
//!
//! The invertible case follows the character-theoretic construction: the
//! exponentials `x ↦ e^{-2πi x·A b_j}` are characters on `Z^d / B Z^d`, so
//! whenever the `A b_j` are pairwise non-congruent the character matrix over
//! the cosets has orthogonal columns and contains an invertible `K × K`
//! submatrix. The Hadamard case has no such criterion and is brute-forced
//! over a bounded integer box.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{IntMatrix, Phase, PhasorCache};
use crate::ifs::{FrequencyIfs, SpatialIfs};
use crate::linalg::CMatrix;
use crate::transform::{build_system, M1Class};

/// Cap on `|det B|` for coset enumeration.
pub const DEFAULT_COSET_CAP: usize = 10_000;

/// Cap on the number of candidate tuples evaluated by the box search.
const BOX_CANDIDATE_CAP: u64 = 2_000_000;

/// A full set of coset representatives of `Z^d / B Z^d`.
#[derive(Debug, Clone)]
pub struct CosetSystem {
    b_matrix: IntMatrix,
    representatives: Vec<Vec<BigInt>>,
}

impl CosetSystem {
    pub fn b_matrix(&self) -> &IntMatrix {
        &self.b_matrix
    }

    pub fn representatives(&self) -> &[Vec<BigInt>] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }
}

/// Enumerates exactly `|det B|` pairwise-incongruent integer vectors by
/// scanning the box `[0, L)^d` with `L = |det B|` and deduplicating by the
/// congruence test `x ≡ y ⇔ B⁻¹(x−y) ∈ Z^d`. Deterministic order, first
/// coordinate fastest.
pub fn coset_representatives(b: &IntMatrix, cap: usize) -> Result<CosetSystem> {
    let det = b.determinant();
    if det.is_zero() {
        return Err(Error::Validation(
            "coset enumeration requires det B != 0".into(),
        ));
    }
    let order = det.abs();
    let count = order
        .to_usize()
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::Resource(format!("|det B| = {} exceeds cap {}", order, cap)))?;

    let d = b.dim();
    let adj = b.adjugate();
    // adj(B)·x mod |det B| is a complete coset invariant: L·Z^d ⊆ B Z^d.
    let key_of = |x: &[BigInt]| -> Vec<BigInt> {
        adj.mul_vec(x)
            .into_iter()
            .map(|v| {
                let r = v % &order;
                if r.is_negative() {
                    r + &order
                } else {
                    r
                }
            })
            .collect()
    };

    let mut seen: HashSet<Vec<BigInt>> = HashSet::with_capacity(count);
    let mut representatives = Vec::with_capacity(count);
    let mut x = vec![BigInt::zero(); d];
    'scan: loop {
        if seen.insert(key_of(&x)) {
            representatives.push(x.clone());
            if representatives.len() == count {
                break;
            }
        }
        // Odometer over [0, L)^d, first coordinate fastest.
        for slot in x.iter_mut() {
            *slot += 1;
            if *slot < order {
                continue 'scan;
            }
            *slot = BigInt::zero();
        }
        break;
    }
    debug_assert_eq!(representatives.len(), count);
    Ok(CosetSystem {
        b_matrix: b.clone(),
        representatives,
    })
}

/// `|det B| × K` matrix with entries `e^{-2πi x_r·A b_j}` over the coset
/// representatives; columns are orthogonal under the non-congruence
/// hypothesis.
pub fn character_matrix(spatial: &SpatialIfs, cosets: &CosetSystem) -> CMatrix {
    let a = spatial.a_matrix();
    let k = spatial.branch_count();
    let mut cache = PhasorCache::new();
    CMatrix::from_fn(cosets.len(), k, |r, c| {
        let phase = Phase::from_rational(
            a.quadratic_form(&cosets.representatives()[r], spatial.translation(c)),
        );
        cache.phasor(&phase)
    })
}

/// Outcome of a frequency-translation search. `translations` of `None`
/// means the bound was exhausted, never that no choice exists.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub translations: Option<Vec<Vec<i64>>>,
    /// Whether `A b_j − A b_k ∉ Z^d` held for every pair (the hypothesis
    /// under which the coset construction is guaranteed to work).
    pub hypothesis_holds: bool,
    pub bound: i64,
}

/// Finds `c_0 = 0, c_1, …, c_{K-1}` so that the seed matrix reaches
/// `target`. Invertible targets try the coset representatives first, then
/// fall back to the box `[-bound, bound]^d`; Hadamard targets go straight
/// to the box. Candidates are ranked by norm then sign pattern, so results
/// are deterministic and small translations are preferred.
pub fn search_frequencies(
    spatial: &SpatialIfs,
    target: M1Class,
    search_bound: i64,
) -> Result<SearchReport> {
    if search_bound < 1 {
        return Err(Error::Validation("search bound must be at least 1".into()));
    }
    let hypothesis_holds = pairwise_hypothesis(spatial);

    if target == M1Class::Invertible {
        if let Some(found) = coset_search(spatial) {
            return Ok(SearchReport {
                translations: Some(found),
                hypothesis_holds,
                bound: search_bound,
            });
        }
    }

    let found = box_search(spatial, target, search_bound)?;
    Ok(SearchReport {
        translations: found,
        hypothesis_holds,
        bound: search_bound,
    })
}

/// `A b_j − A b_k ∉ Z^d` for every pair `j ≠ k`.
fn pairwise_hypothesis(spatial: &SpatialIfs) -> bool {
    let det = spatial.a_inverse().determinant();
    let adj = spatial.a_inverse().adjugate();
    let k = spatial.branch_count();
    for j in 0..k {
        for l in j + 1..k {
            let diff: Vec<BigInt> = spatial
                .translation(j)
                .iter()
                .zip(spatial.translation(l))
                .map(|(a, b)| a - b)
                .collect();
            let image = adj.mul_vec(&diff);
            if image.iter().all(|v| (v % &det).is_zero()) {
                return false;
            }
        }
    }
    true
}

/// Greedy selection of `K` coset representatives whose character-matrix
/// rows span: starting from the zero representative, repeatedly add the row
/// with the largest Gram-Schmidt residual (ties to the lowest index).
fn coset_search(spatial: &SpatialIfs) -> Option<Vec<Vec<i64>>> {
    let b = spatial.a_inverse().transpose();
    let cosets = coset_representatives(&b, DEFAULT_COSET_CAP).ok()?;
    let k = spatial.branch_count();
    if cosets.len() < k {
        return None;
    }
    let chars = character_matrix(spatial, &cosets);

    let rows: Vec<Vec<Complex64>> = (0..cosets.len()).map(|r| chars.row(r).to_vec()).collect();
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vec<Complex64>> = vec![normalized(&rows[0])?];
    while chosen.len() < k {
        let mut best: Option<(usize, f64, Vec<Complex64>)> = None;
        for (r, row) in rows.iter().enumerate() {
            if chosen.contains(&r) {
                continue;
            }
            let mut residual = row.clone();
            for base in &basis {
                let coeff: Complex64 = base.iter().zip(&residual).map(|(b, x)| b.conj() * x).sum();
                for (res, b) in residual.iter_mut().zip(base) {
                    *res -= coeff * b;
                }
            }
            let norm = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(_, n, _)| norm > *n) {
                best = Some((r, norm, residual));
            }
        }
        let (r, norm, residual) = best?;
        if norm < 1e-9 {
            return None;
        }
        chosen.push(r);
        basis.push(residual.iter().map(|z| z / norm).collect());
    }

    let candidate: Option<Vec<Vec<i64>>> = chosen
        .iter()
        .map(|&r| {
            cosets.representatives()[r]
                .iter()
                .map(|v| v.to_i64())
                .collect::<Option<Vec<i64>>>()
        })
        .collect();
    let candidate = candidate?;
    validate_candidate(spatial, &candidate, M1Class::Invertible).then_some(candidate)
}

fn normalized(row: &[Complex64]) -> Option<Vec<Complex64>> {
    let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    Some(row.iter().map(|z| z / norm).collect())
}

/// Exhaustive scan of `(c_1, …, c_{K-1})` tuples over the ranked box.
fn box_search(spatial: &SpatialIfs, target: M1Class, bound: i64) -> Result<Option<Vec<Vec<i64>>>> {
    let d = spatial.dim();
    let k = spatial.branch_count();
    let candidates = ranked_box(d, bound)?;
    let slots = k - 1;
    if slots == 0 {
        let candidate = vec![vec![0i64; d]];
        return Ok(validate_candidate(spatial, &candidate, target).then_some(candidate));
    }

    let per_slot = (candidates.len() - 1) as u64; // index 0 is the zero vector
    let mut total: u64 = 1;
    for _ in 0..slots {
        total = total.saturating_mul(per_slot);
        if total > BOX_CANDIDATE_CAP {
            return Err(Error::Resource(format!(
                "box search space exceeds {} candidate tuples; reduce the bound",
                BOX_CANDIDATE_CAP
            )));
        }
    }

    // Odometer over candidate indices, most significant slot first; index 0
    // (the zero vector) always collides with c_0 and is skipped.
    let mut indices = vec![1usize; slots];
    loop {
        let distinct = {
            let mut sorted = indices.clone();
            sorted.sort_unstable();
            sorted.windows(2).all(|w| w[0] != w[1])
        };
        if distinct {
            let mut candidate = Vec::with_capacity(k);
            candidate.push(vec![0i64; d]);
            for &i in &indices {
                candidate.push(candidates[i].clone());
            }
            if validate_candidate(spatial, &candidate, target) {
                return Ok(Some(candidate));
            }
        }
        // Advance.
        let mut slot = slots;
        loop {
            if slot == 0 {
                return Ok(None);
            }
            slot -= 1;
            indices[slot] += 1;
            if indices[slot] < candidates.len() {
                break;
            }
            indices[slot] = 1;
        }
    }
}

/// All vectors of `[-bound, bound]^d` sorted by squared norm, then by
/// component pattern with positive entries before negative ones (so the
/// one-dimensional order is 0, 1, -1, 2, -2, …).
fn ranked_box(d: usize, bound: i64) -> Result<Vec<Vec<i64>>> {
    let width = (2 * bound + 1) as u64;
    let mut size: u64 = 1;
    for _ in 0..d {
        size = size.saturating_mul(width);
        if size > BOX_CANDIDATE_CAP {
            return Err(Error::Resource(format!(
                "candidate box has more than {} vectors; reduce the bound",
                BOX_CANDIDATE_CAP
            )));
        }
    }
    let mut all = Vec::with_capacity(size as usize);
    let mut current = vec![-bound; d];
    'gen: loop {
        all.push(current.clone());
        for slot in current.iter_mut() {
            *slot += 1;
            if *slot <= bound {
                continue 'gen;
            }
            *slot = -bound;
        }
        break;
    }
    all.sort_by_key(|v| {
        let norm_sq: i64 = v.iter().map(|&x| x * x).sum();
        let pattern: Vec<(i64, bool)> = v.iter().map(|&x| (x.abs(), x < 0)).collect();
        (norm_sq, pattern)
    });
    Ok(all)
}

fn validate_candidate(spatial: &SpatialIfs, c: &[Vec<i64>], target: M1Class) -> bool {
    let Ok(freq) = FrequencyIfs::dual_to(spatial, c) else {
        return false;
    };
    build_system(spatial.clone(), freq, target).is_ok()
}
