//! Shared fixtures for the pipeline benchmarks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specset_core::linalg::CMatrix;

/// Deterministic complex Gaussian matrix scaled like a Ginibre draw.
pub fn seeded_matrix(seed: u64, n: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    let entries = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(rand_distr::StandardNormal);
            let im: f64 = rng.sample(rand_distr::StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    CMatrix::new(n, n, entries).expect("square dimensions")
}

/// Deterministic polynomial coefficients for a single-piece test function.
pub fn seeded_coeffs(seed: u64, degree: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
