//! Fast forward and inverse exponential-basis transforms on finite
//! iterated-function-system point sets.
//!
//! A spatial IFS `ψ_j(x) = A(x + b_j)` generates the `K^N` data points
//! `S_N`; the dual frequency IFS `ρ_j(x) = Bx + c_j` with `B = (Aᵀ)⁻¹`
//! generates the integer frequencies `T_N`. When the `K × K` seed matrix
//! `M₁ = (e^{-2πi c_j·A b_k})` is invertible, the `K^N × K^N` transform
//! matrices factor into nested block forms, and both the transform and its
//! inverse apply in `O(N·K^N)` operations instead of `O(K^{2N})`.
//!
//! The classical radix-2 FFT is the special case `A⁻¹ = [2]`, `b = {0, 1}`,
//! `c = {0, 1}`; spectral fractals such as the quarter Cantor set
//! (`A⁻¹ = [4]`, `b = {0, 2}`, `c = {0, 1}`) give orthogonal exponential
//! bases on genuinely irregular point sets.
//!
//! Modules:
//! - [`ifs`]: systems, exact orbit points, digit utilities and the
//!   digit-reversal permutation;
//! - [`dita`]: the generic block-matrix engine with operation counting;
//! - [`transform`]: seed matrix, plans, fast applies, dense oracles and
//!   identity verification;
//! - [`spectrum`]: coset enumeration and the frequency-translation search;
//! - [`config`]: JSON configs and the `re,im` signal file format.

pub mod config;
pub mod dita;
mod error;
pub mod exact;
pub mod ifs;
pub mod linalg;
pub mod spectrum;
pub mod transform;

pub use config::SystemConfig;
pub use dita::{dita_op_bound, DitaSpec, InnerOp, OpCounter};
pub use error::{Error, Result};
pub use exact::{Phase, RationalVector};
pub use ifs::{
    base_digits, digit_reversal_permute, digit_reverse, FrequencyIfs, OrderedPointSet, Ordering,
    PointKind, SpatialIfs,
};
pub use spectrum::{
    character_matrix, coset_representatives, search_frequencies, CosetSystem, SearchReport,
};
pub use transform::{
    build_system, dense_op_count, plan_op_count_bound, BlockIdentityReport, FractalSystem, M1Class,
    TransformPlan,
};
