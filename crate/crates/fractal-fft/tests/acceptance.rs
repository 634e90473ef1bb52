//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured deviations. Tolerances are pinned in the assertions.

mod common;

use std::time::Instant;

use common::{dyadic, fixtures, quarter_cantor, sierpinski, Lcg};
use fractal_fft::exact::{int_vec, IntMatrixInverse, RationalVector};
use fractal_fft::linalg::{inf_norm, max_abs_diff_vec, LuDecomposition};
use fractal_fft::{
    digit_reversal_permute, plan_op_count_bound, search_frequencies, M1Class, OpCounter, Ordering,
    SpatialIfs,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Criterion 1: the dyadic fixture at N = 10 reproduces the classical FFT:
/// the obverse fast apply equals the naive DFT of the digit-reversed input
/// to 1e-9, and the fast path runs in under a second.
#[test]
fn criterion_1_classical_fft_equivalence() {
    let sys = dyadic();
    let level = 10u32;
    let n = 1usize << level;
    let plan = sys.build_plan(level, Ordering::Obverse).unwrap();
    let v = Lcg(101).vec(n);

    let start = Instant::now();
    let mut counter = OpCounter::new();
    let fast = plan.forward(&v, &mut counter).unwrap();
    let fast_elapsed = start.elapsed();

    let permuted = digit_reversal_permute(&v, 2, level).unwrap();
    let naive: Vec<Complex64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let angle = -std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64;
                    c(angle.cos(), angle.sin()) * permuted[k]
                })
                .sum()
        })
        .collect();

    let deviation = max_abs_diff_vec(&fast, &naive);
    assert!(deviation < 1e-9, "deviation {deviation:.3e} >= 1e-9");
    assert!(
        fast_elapsed.as_secs_f64() < 1.0,
        "fast apply took {:.3}s",
        fast_elapsed.as_secs_f64()
    );
    println!(
        "criterion 1 classical-FFT equivalence: PASS (deviation {:.3e}, fast path {:.3} ms)",
        deviation,
        fast_elapsed.as_secs_f64() * 1e3
    );
}

/// Criterion 2: forward and inverse fast applies match dense products and
/// LU solves to 1e-9 on 20 random vectors, for every fixture and every N
/// with K^N <= 1024, both orderings.
#[test]
fn criterion_2_dense_oracle_equivalence() {
    let mut rng = Lcg(202);
    let mut worst_forward: f64 = 0.0;
    let mut worst_inverse: f64 = 0.0;
    for (name, sys) in fixtures() {
        let k = sys.branch_count();
        let mut level = 1u32;
        while k.pow(level) <= 1024 {
            for ordering in [Ordering::Obverse, Ordering::Reverse] {
                let dense = sys.dense_matrix(level, ordering).unwrap();
                let lu = LuDecomposition::new(&dense).unwrap();
                let plan = sys.build_plan(level, ordering).unwrap();
                for _ in 0..20 {
                    let v = rng.vec(plan.len());
                    let mut counter = OpCounter::new();

                    let fast = plan.forward(&v, &mut counter).unwrap();
                    let dev = max_abs_diff_vec(&fast, &dense.mul_vec(&v));
                    assert!(dev < 1e-9, "{name} N={level} {ordering} forward: {dev:.3e}");
                    worst_forward = worst_forward.max(dev);

                    let fast_inv = plan.inverse(&v, &mut counter).unwrap();
                    let dev = max_abs_diff_vec(&fast_inv, &lu.solve(&v));
                    assert!(dev < 1e-9, "{name} N={level} {ordering} inverse: {dev:.3e}");
                    worst_inverse = worst_inverse.max(dev);
                }
            }
            level += 1;
        }
    }
    println!(
        "criterion 2 dense-oracle equivalence: PASS (worst forward {:.3e}, worst inverse {:.3e})",
        worst_forward, worst_inverse
    );
}

/// Criterion 3: Hadamard corollary on the quarter Cantor fixture for
/// N = 6..8: two fast applies give M*(Mv) = K^N v within 1e-8 relative.
#[test]
fn criterion_3_hadamard_corollary() {
    let sys = quarter_cantor();
    assert_eq!(sys.m1_class(), M1Class::Hadamard);
    let mut rng = Lcg(303);
    let mut worst: f64 = 0.0;
    for level in 6..=8u32 {
        let plan = sys.build_plan(level, Ordering::Obverse).unwrap();
        let scale = 2f64.powi(level as i32);
        let v = rng.vec(plan.len());
        let mut counter = OpCounter::new();
        let w = plan.forward(&v, &mut counter).unwrap();
        let z = plan.adjoint(&w, &mut counter).unwrap();
        let dev = z
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * scale).norm())
            .fold(0.0f64, f64::max);
        let tol = 1e-8 * scale * inf_norm(&v);
        assert!(dev < tol, "N={level}: {dev:.3e} >= {tol:.3e}");
        worst = worst.max(dev / (scale * inf_norm(&v)));
    }
    println!("criterion 3 Hadamard corollary: PASS (worst relative deviation {worst:.3e})");
}

/// Criterion 4: the permutation conjugation and both block assemblies
/// reproduce the dense matrices to 1e-10 for N <= 5 on all fixtures, and
/// exactly (deviation 0.0) where the phases are quarter-turn exact.
#[test]
fn criterion_4_block_identities() {
    let mut worst: f64 = 0.0;
    for (name, sys) in fixtures() {
        for level in 1..=5u32 {
            let report = sys.verify_block_identities(level).unwrap();
            assert!(
                report.max_deviation() < 1e-10,
                "{name} N={level}: {report:?}"
            );
            // The permutation identity is a relabeling of cached phasors and
            // must be bitwise exact on every fixture.
            assert_eq!(
                report.permutation_deviation, 0.0,
                "{name} N={level} permutation"
            );
            worst = worst.max(report.max_deviation());
        }
    }
    // Dyadic N = 2: every phase is a quarter turn, so the assemblies are
    // float-exact as well.
    let report = dyadic().verify_block_identities(2).unwrap();
    assert_eq!(report.obverse_assembly_deviation, 0.0);
    assert_eq!(report.reverse_assembly_deviation, 0.0);
    println!("criterion 4 block identities: PASS (worst deviation {worst:.3e}, dyadic N=2 exact)");
}

/// Criterion 5: the Kronecker-recurrence diagonal phases equal the
/// direct-definition phases as exact rationals mod 1 (zero tolerance) for
/// N <= 5 on all fixtures, both orderings.
#[test]
fn criterion_5_diagonal_recurrence_exact() {
    for (name, sys) in fixtures() {
        for ordering in [Ordering::Obverse, Ordering::Reverse] {
            let plan = sys.build_plan(5, ordering).unwrap();
            assert!(
                plan.verify_diagonal_recurrence().unwrap(),
                "{name} {ordering}: recurrence phases differ from direct definition"
            );
        }
    }
    println!("criterion 5 diagonal recurrence: PASS (exact rational equality, N <= 5)");
}

/// Criterion 6: measured operation counts stay within the closed-form bound
/// (P1 = 2K² − K) for K = 2 up to N = 10 and K = 3 up to N = 6, and the
/// ratio measured/(N·K^N) grows by at most 5% from N = 4 on.
#[test]
fn criterion_6_operation_counts() {
    let mut rng = Lcg(606);
    for (name, sys, max_level) in [
        ("dyadic", dyadic(), 10u32),
        ("sierpinski", sierpinski(), 6u32),
    ] {
        let k = sys.branch_count() as u64;
        let p1 = 2 * k * k - k;
        let mut ratios = Vec::new();
        for level in 1..=max_level {
            let plan = sys.build_plan(level, Ordering::Obverse).unwrap();
            let v = rng.vec(plan.len());
            let mut counter = OpCounter::new();
            plan.forward(&v, &mut counter).unwrap();
            let measured = counter.total();
            let bound = plan_op_count_bound(k, level, p1);
            assert!(
                measured <= bound,
                "{name} N={level}: measured {measured} > bound {bound}"
            );
            ratios.push(measured as f64 / (level as f64 * k.pow(level) as f64));
        }
        let base = ratios[3]; // N = 4
        let max_ratio = ratios[3..].iter().cloned().fold(0.0f64, f64::max);
        assert!(
            max_ratio <= base * 1.05,
            "{name}: ratio grew from {base:.4} at N=4 to {max_ratio:.4}"
        );
        println!(
            "criterion 6 operation counts ({name}): PASS (max ratio {:.4}, growth {:.2}% from N=4)",
            max_ratio,
            (max_ratio / base - 1.0) * 100.0
        );
    }
}

/// Criterion 7: round trips inverse(forward(v)) = v within 1e-8 relative,
/// both orderings, all fixtures, N up to 10 for K = 2 (6 for K = 3).
#[test]
fn criterion_7_round_trip() {
    let mut rng = Lcg(707);
    let mut worst: f64 = 0.0;
    for (name, sys) in fixtures() {
        let max_level = if sys.branch_count() == 2 { 10 } else { 6 };
        for level in 1..=max_level {
            for ordering in [Ordering::Obverse, Ordering::Reverse] {
                let plan = sys.build_plan(level, ordering).unwrap();
                let v = rng.vec(plan.len());
                let mut counter = OpCounter::new();
                let round = plan
                    .inverse(&plan.forward(&v, &mut counter).unwrap(), &mut counter)
                    .unwrap();
                let dev = max_abs_diff_vec(&round, &v);
                let tol = 1e-8 * inf_norm(&v);
                assert!(
                    dev < tol,
                    "{name} N={level} {ordering}: {dev:.3e} >= {tol:.3e}"
                );
                worst = worst.max(dev / inf_norm(&v));
            }
        }
    }
    println!("criterion 7 round trip: PASS (worst relative deviation {worst:.3e})");
}

/// Criterion 8: spectrum search. Middle-third: invertible succeeds,
/// Hadamard exhausts bound 50. Quarter Cantor: Hadamard succeeds with
/// M1 = [[1,1],[1,-1]].
#[test]
fn criterion_8_spectrum_search() {
    let middle = SpatialIfs::new(&[vec![3]], &[vec![0], vec![2]]).unwrap();
    let report = search_frequencies(&middle, M1Class::Invertible, 50).unwrap();
    let found = report.translations.expect("invertible search must succeed");
    assert_eq!(found, vec![vec![0], vec![1]]);

    let report = search_frequencies(&middle, M1Class::Hadamard, 50).unwrap();
    assert!(
        report.translations.is_none(),
        "no Hadamard seed matrix exists for the middle-third system"
    );

    let quarter = SpatialIfs::new(&[vec![4]], &[vec![0], vec![2]]).unwrap();
    let report = search_frequencies(&quarter, M1Class::Hadamard, 50).unwrap();
    let found = report
        .translations
        .expect("quarter-Cantor Hadamard search must succeed");
    assert_eq!(found, vec![vec![0], vec![1]]);
    let freq = fractal_fft::FrequencyIfs::dual_to(&quarter, &found).unwrap();
    let sys = fractal_fft::build_system(quarter, freq, M1Class::Hadamard).unwrap();
    assert_eq!(sys.m1()[(0, 0)], c(1.0, 0.0));
    assert_eq!(sys.m1()[(0, 1)], c(1.0, 0.0));
    assert_eq!(sys.m1()[(1, 0)], c(1.0, 0.0));
    assert_eq!(sys.m1()[(1, 1)], c(-1.0, 0.0));
    println!("criterion 8 spectrum search: PASS (middle-third invertible/Hadamard, quarter-Cantor Hadamard)");
}

/// Criterion 9: the composition identities hold exactly in rational
/// arithmetic for random integer inputs, N <= 4, on every fixture:
/// additivity, integrality, and the one-level unfoldings.
#[test]
fn criterion_9_lemma_suite_exact() {
    let mut rng = Lcg(909);
    for (name, sys) in fixtures() {
        let spat = sys.spatial();
        let freq = sys.frequency();
        let d = sys.dim();
        let k = sys.branch_count();
        for level in 1..=4u32 {
            let size = k.pow(level);
            let a_pow = IntMatrixInverse::new(&spat.a_inverse().pow(level)).unwrap();
            let b_pow = freq.b_matrix().pow(level);
            for j in 0..size {
                // Additivity: orbit(x + y) = orbit(x) + A^N y (resp. B^N y),
                // exactly, for both orderings and both systems.
                let x = RationalVector::from_i64(&rng.int_vec(d, 9));
                let y_raw = rng.int_vec(d, 9);
                let y = RationalVector::from_i64(&y_raw);
                let xy = x.add(&y);
                for ordering in [Ordering::Obverse, Ordering::Reverse] {
                    let lhs = spat.orbit_point_at(ordering, j, level, &xy).unwrap();
                    let rhs = spat
                        .orbit_point_at(ordering, j, level, &x)
                        .unwrap()
                        .add(&a_pow.apply(&y));
                    assert_eq!(lhs, rhs, "{name} spatial additivity j={j} N={level}");

                    let lhs = freq.orbit_point_at(ordering, j, level, &xy).unwrap();
                    let rhs = freq.orbit_point_at(ordering, j, level, &x).unwrap().add(
                        &RationalVector::from_bigints(&b_pow.mul_vec(&int_vec(&y_raw))),
                    );
                    assert_eq!(lhs, rhs, "{name} frequency additivity j={j} N={level}");

                    // Integrality: A^{-N} Ψ(0) ∈ Z^d and R(0) ∈ Z^d.
                    let psi = spat.orbit_point(ordering, j, level).unwrap();
                    let pulled = spat.a_inverse().pow(level).mul_rational_vec(&psi);
                    assert!(
                        pulled.is_integer(),
                        "{name} spatial integrality j={j} N={level}"
                    );
                    let r = freq.orbit_point(ordering, j, level).unwrap();
                    assert!(
                        r.is_integer(),
                        "{name} frequency integrality j={j} N={level}"
                    );
                }

                // One-level unfolding (all four variants), N >= 2.
                if level >= 2 {
                    let sub = k.pow(level - 1);
                    let branch = j / sub;
                    let q = j % sub;

                    let psi = spat.orbit_point(Ordering::Obverse, j, level).unwrap();
                    let rhs = spat
                        .orbit_point(Ordering::Obverse, q, level - 1)
                        .unwrap()
                        .add(&a_pow.apply_ints(spat.translation(branch)));
                    assert_eq!(psi, rhs, "{name} obverse spatial unfolding j={j} N={level}");

                    let psi = spat.orbit_point(Ordering::Reverse, j, level).unwrap();
                    let prev = spat.orbit_point(Ordering::Reverse, q, level - 1).unwrap();
                    assert_eq!(
                        psi,
                        spat.map_apply(branch, &prev),
                        "{name} reverse spatial unfolding j={j} N={level}"
                    );

                    let r = freq.orbit_point(Ordering::Obverse, j, level).unwrap();
                    let shift = RationalVector::from_bigints(
                        &freq
                            .b_matrix()
                            .pow(level - 1)
                            .mul_vec(freq.translation(branch)),
                    );
                    let rhs = freq
                        .orbit_point(Ordering::Obverse, q, level - 1)
                        .unwrap()
                        .add(&shift);
                    assert_eq!(r, rhs, "{name} obverse frequency unfolding j={j} N={level}");

                    let r = freq.orbit_point(Ordering::Reverse, j, level).unwrap();
                    let prev = freq.orbit_point(Ordering::Reverse, q, level - 1).unwrap();
                    assert_eq!(
                        r,
                        freq.map_apply(branch, &prev),
                        "{name} reverse frequency unfolding j={j} N={level}"
                    );
                }
            }
        }
    }
    println!("criterion 9 lemma suite: PASS (exact rational identities, N <= 4, all fixtures)");
}
