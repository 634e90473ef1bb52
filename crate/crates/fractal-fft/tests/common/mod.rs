#![allow(dead_code)]

use fractal_fft::{build_system, FractalSystem, FrequencyIfs, M1Class, SpatialIfs};
use num_complex::Complex64;

/// Radix-2 FFT as an IFS pair: the unit interval with equispaced points.
pub fn dyadic() -> FractalSystem {
    let spat = SpatialIfs::new(&[vec![2]], &[vec![0], vec![1]]).unwrap();
    let freq = FrequencyIfs::dual_to(&spat, &[vec![0], vec![1]]).unwrap();
    build_system(spat, freq, M1Class::Hadamard).unwrap()
}

/// Quarter Cantor set with its spectral frequency system.
pub fn quarter_cantor() -> FractalSystem {
    let spat = SpatialIfs::new(&[vec![4]], &[vec![0], vec![2]]).unwrap();
    let freq = FrequencyIfs::dual_to(&spat, &[vec![0], vec![1]]).unwrap();
    build_system(spat, freq, M1Class::Hadamard).unwrap()
}

/// Middle-third Cantor set; invertible but provably not Hadamard.
pub fn middle_third() -> FractalSystem {
    let spat = SpatialIfs::new(&[vec![3]], &[vec![0], vec![2]]).unwrap();
    let freq = FrequencyIfs::dual_to(&spat, &[vec![0], vec![1]]).unwrap();
    build_system(spat, freq, M1Class::Invertible).unwrap()
}

/// Two-dimensional three-branch system (Sierpinski-type), det M1 = 4.
pub fn sierpinski() -> FractalSystem {
    let spat = SpatialIfs::new(
        &[vec![2, 0], vec![0, 2]],
        &[vec![0, 0], vec![1, 0], vec![0, 1]],
    )
    .unwrap();
    let freq = FrequencyIfs::dual_to(&spat, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
    build_system(spat, freq, M1Class::Invertible).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, FractalSystem)> {
    vec![
        ("dyadic", dyadic()),
        ("quarter-cantor", quarter_cantor()),
        ("middle-third", middle_third()),
        ("sierpinski", sierpinski()),
    ]
}

/// Small deterministic generator for test data.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    pub fn next_complex(&mut self) -> Complex64 {
        Complex64::new(self.next_f64(), self.next_f64())
    }

    pub fn vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.next_complex()).collect()
    }

    /// Integer in `[-magnitude, magnitude]`.
    pub fn next_int(&mut self, magnitude: i64) -> i64 {
        let span = (2 * magnitude + 1) as u64;
        (self.next_u64() % span) as i64 - magnitude
    }

    pub fn int_vec(&mut self, dim: usize, magnitude: i64) -> Vec<i64> {
        (0..dim).map(|_| self.next_int(magnitude)).collect()
    }
}
