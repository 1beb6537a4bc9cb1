//! Oracles and generators shared by the integration tests. Everything here
//! is deliberately independent of the library's own numerics: polynomials of
//! matrices are evaluated by Horner's rule, unitaries come from plain
//! Gram–Schmidt.

use num_complex::Complex64;
use rand::Rng;
use specset_core::linalg::{self, CMatrix};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ginibre-style draw: independent complex Gaussian entries scaled by 1/√(2n).
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> CMatrix {
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    let entries = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(rand_distr::StandardNormal);
            let im: f64 = rng.sample(rand_distr::StandardNormal);
            c(re * scale, im * scale)
        })
        .collect();
    CMatrix::new(n, n, entries).unwrap()
}

/// `p(T)` for `p(z) = Σ coeffs[k] (z - center)^k`, evaluated by Horner's
/// rule on the shifted matrix.
pub fn horner_poly_of_matrix(coeffs: &[Complex64], center: Complex64, t: &CMatrix) -> CMatrix {
    let n = t.n_rows();
    let mut shifted = t.clone();
    for i in 0..n {
        shifted.set(i, i, shifted.get(i, i) - center);
    }
    let mut acc = CMatrix::zeros(n, n);
    for &a in coeffs.iter().rev() {
        acc = linalg::mat_mul(&acc, &shifted).unwrap();
        for i in 0..n {
            acc.set(i, i, acc.get(i, i) + a);
        }
    }
    acc
}

/// Random unitary from two rounds of Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im: f64 = rng.sample(rand_distr::StandardNormal);
                    c(re, im)
                })
                .collect()
        })
        .collect();
    for pass in 0..2 {
        for j in 0..n {
            for i in 0..j {
                let proj = linalg::vec_dot(&cols[i], &cols[j]);
                let col_i = cols[i].clone();
                for (x, &y) in cols[j].iter_mut().zip(&col_i) {
                    *x -= proj * y;
                }
            }
            let norm = linalg::vec_norm(&cols[j]);
            assert!(norm > 1e-8, "degenerate draw in pass {pass}");
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
    }
    let entries = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| cols[j][i])
        .collect();
    CMatrix::new(n, n, entries).unwrap()
}

/// Max entry-wise deviation between two matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}
