//! Dense complex linear algebra sized for desk-scale operators (n <= 64).
//!
//! Everything here is deterministic: the power iterations start from a fixed
//! perturbed all-ones vector and use fixed-order arithmetic, so two runs on
//! identical input produce bitwise-identical output.

use num_complex::Complex64;
use thiserror::Error;

/// Iteration cap shared by the power-method routines.
const MAX_POWER_ITERS: usize = 50_000;
/// Stop when successive Rayleigh quotients differ by less than this, relatively.
const RAYLEIGH_STAGNATION: f64 = 1e-15;
/// A pivot below `SINGULAR_PIVOT_REL * ||A||_1` aborts the factorization.
const SINGULAR_PIVOT_REL: f64 = 1e-14;
/// Allowed relative deviation from Hermitian symmetry.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("entry list has length {got}, expected {expected}")]
    BadEntryCount { got: usize, expected: usize },
    #[error("matrix is numerically singular (pivot {pivot:.3e} < threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if entries.len() != n_rows * n_cols {
            return Err(LinalgError::BadEntryCount {
                got: entries.len(),
                expected: n_rows * n_cols,
            });
        }
        if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(CMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(LinalgError::BadEntryCount {
                got: rows.iter().map(|r| r.len()).sum(),
                expected: n_rows * n_cols,
            });
        }
        let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::new(n_rows, n_cols, entries)
    }

    /// Real-valued convenience constructor used heavily in tests.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&lifted)
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            entries: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n_cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// `self += s * other`; shapes must agree.
    pub fn axpy(&mut self, s: Complex64, other: &CMatrix) {
        assert_eq!(self.n_rows, other.n_rows, "axpy: row mismatch");
        assert_eq!(self.n_cols, other.n_cols, "axpy: column mismatch");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
    }

    /// Matrix-vector product; `v.len()` must equal `n_cols`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n_cols, "apply: vector length mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_rows];
        for i in 0..self.n_rows {
            let row = &self.entries[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.n_cols {
            let mut s = 0.0;
            for i in 0..self.n_rows {
                s += self.get(i, j).norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &CMatrix) -> Result<(), LinalgError> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.n_rows,
                left_cols: self.n_cols,
                right_rows: other.n_rows,
                right_cols: other.n_cols,
            });
        }
        Ok(())
    }
}

/// `A * B`; fails unless inner dimensions agree.
pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    if a.n_cols != b.n_rows {
        return Err(LinalgError::DimensionMismatch {
            left_rows: a.n_rows,
            left_cols: a.n_cols,
            right_rows: b.n_rows,
            right_cols: b.n_cols,
        });
    }
    let mut out = CMatrix::zeros(a.n_rows, b.n_cols);
    for i in 0..a.n_rows {
        for k in 0..a.n_cols {
            let aik = a.get(i, k);
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..b.n_cols {
                let cur = out.get(i, j);
                out.set(i, j, cur + aik * b.get(k, j));
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.n_cols, a.n_rows);
    for i in 0..a.n_rows {
        for j in 0..a.n_cols {
            out.set(j, i, a.get(i, j).conj());
        }
    }
    out
}

/// Solve `A X = B` by LU with row pivoting.
///
/// The factorization aborts with `SingularMatrix` when a pivot falls below
/// `1e-14 * ||A||_1`, so near-singular systems are refused rather than
/// answered with garbage.
pub fn solve_linear(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.n_rows,
            cols: a.n_cols,
        });
    }
    if a.n_rows != b.n_rows {
        return Err(LinalgError::DimensionMismatch {
            left_rows: a.n_rows,
            left_cols: a.n_cols,
            right_rows: b.n_rows,
            right_cols: b.n_cols,
        });
    }
    let norm = a.norm_one();
    if norm == 0.0 {
        return Err(LinalgError::SingularMatrix {
            pivot: 0.0,
            threshold: 0.0,
        });
    }
    let threshold = SINGULAR_PIVOT_REL * norm;
    lu_solve(a, b, Some(threshold))
}

/// LU solve with an optional pivot floor; `None` only rejects exact zeros.
fn lu_solve(a: &CMatrix, b: &CMatrix, threshold: Option<f64>) -> Result<CMatrix, LinalgError> {
    let n = a.n_rows;
    let mut lu = a.entries.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = lu[k * n + k].norm();
        for i in (k + 1)..n {
            let mag = lu[i * n + k].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        let floor = threshold.unwrap_or(0.0);
        if pivot_mag <= floor {
            return Err(LinalgError::SingularMatrix {
                pivot: pivot_mag,
                threshold: floor,
            });
        }
        if pivot_row != k {
            for j in 0..n {
                lu.swap(k * n + j, pivot_row * n + j);
            }
            perm.swap(k, pivot_row);
        }
        let pivot = lu[k * n + k];
        for i in (k + 1)..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[k * n + j];
                lu[i * n + j] -= sub;
            }
        }
    }

    let n_rhs = b.n_cols;
    let mut x = CMatrix::zeros(n, n_rhs);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for rhs in 0..n_rhs {
        for i in 0..n {
            col[i] = b.get(perm[i], rhs);
        }
        // forward substitution (unit lower triangle)
        for i in 1..n {
            let mut acc = col[i];
            for j in 0..i {
                acc -= lu[i * n + j] * col[j];
            }
            col[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = col[i];
            for j in (i + 1)..n {
                acc -= lu[i * n + j] * col[j];
            }
            col[i] = acc / lu[i * n + i];
        }
        for i in 0..n {
            x.set(i, rhs, col[i]);
        }
    }
    Ok(x)
}

/// Hermitian inner product, conjugate-linear in the first argument.
pub fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .fold(Complex64::new(0.0, 0.0), |acc, t| acc + t)
}

/// Euclidean norm.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic start vector: all ones with a small index-dependent tilt so
/// that symmetric eigenspaces are still reached.
fn start_vector(n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0 + 1e-3 * k as f64, 0.0))
        .collect();
    let norm = vec_norm(&v);
    for x in v.iter_mut() {
        *x /= norm;
    }
    v
}

/// Largest singular value via power iteration on `A* A`.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let m = mat_mul(&adjoint(a), a).expect("adjoint product dimensions always agree");
    let rho = dominant_rayleigh(&m);
    rho.max(0.0).sqrt()
}

/// Power iteration for the dominant eigenvalue of a Hermitian PSD matrix.
fn dominant_rayleigh(m: &CMatrix) -> f64 {
    let n = m.n_rows;
    let mut v = start_vector(n);
    let mut rho = 0.0f64;
    let mut basis_tried = 0usize;
    for iter in 0..MAX_POWER_ITERS {
        let w = m.apply(&v);
        let rho_new = vec_dot(&v, &w).re;
        let wn = vec_norm(&w);
        if wn == 0.0 {
            // start vector sat in the kernel; fall back to basis vectors
            if basis_tried >= n {
                return 0.0;
            }
            v = vec![Complex64::new(0.0, 0.0); n];
            v[basis_tried] = Complex64::new(1.0, 0.0);
            basis_tried += 1;
            continue;
        }
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / wn;
        }
        if iter > 0 && (rho_new - rho).abs() <= RAYLEIGH_STAGNATION * rho_new.abs() {
            return rho_new;
        }
        rho = rho_new;
    }
    rho
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
///
/// Shifted power iteration (shift `||H||_1` makes the target eigenvalue the
/// dominant one) followed by a few inverse-iteration polish steps so the
/// residual `||Hx - lambda x||` lands near machine precision even when the
/// top of the spectrum is poorly separated. The returned eigenvector phase is
/// normalized: its first component of largest modulus is real nonnegative.
pub fn hermitian_extreme_eig(h: &CMatrix) -> Result<(f64, Vec<Complex64>), LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.n_rows,
            cols: h.n_cols,
        });
    }
    let n = h.n_rows;
    let ha = adjoint(h);
    let dev = h.sub(&ha)?.frobenius_norm();
    let scale_f = h.frobenius_norm();
    if dev > HERMITIAN_TOL * scale_f {
        return Err(LinalgError::NotHermitian { deviation: dev });
    }
    // symmetrize away rounding-level asymmetry
    let hs = h.add(&ha)?.scale(Complex64::new(0.5, 0.0));
    let scale = hs.norm_one();
    if scale == 0.0 {
        let mut e1 = vec![Complex64::new(0.0, 0.0); n];
        e1[0] = Complex64::new(1.0, 0.0);
        return Ok((0.0, e1));
    }

    let mut shifted = hs.clone();
    for i in 0..n {
        let d = shifted.get(i, i);
        shifted.set(i, i, d + Complex64::new(scale, 0.0));
    }

    let mut v = start_vector(n);
    let mut rho = 0.0f64;
    let mut basis_tried = 0usize;
    for iter in 0..MAX_POWER_ITERS {
        let w = shifted.apply(&v);
        let rho_new = vec_dot(&v, &w).re;
        let wn = vec_norm(&w);
        if wn == 0.0 {
            if basis_tried >= n {
                break;
            }
            v = vec![Complex64::new(0.0, 0.0); n];
            v[basis_tried] = Complex64::new(1.0, 0.0);
            basis_tried += 1;
            continue;
        }
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / wn;
        }
        if iter > 0 && (rho_new - rho).abs() <= RAYLEIGH_STAGNATION * (1.0 + rho_new.abs()) {
            break;
        }
        rho = rho_new;
    }

    let mut lambda = vec_dot(&v, &hs.apply(&v)).re;
    // Inverse-iteration polish: one or two solves against a slightly offset
    // shift collapse any leftover mixing with nearby eigenvalues.
    for _ in 0..3 {
        let hv = hs.apply(&v);
        let resid: f64 = vec_norm(
            &hv.iter()
                .zip(&v)
                .map(|(a, b)| a - b * Complex64::new(lambda, 0.0))
                .collect::<Vec<_>>(),
        );
        if resid <= 1e-13 * scale {
            break;
        }
        let mut delta = 1e-11 * scale;
        let mut polished = false;
        for _ in 0..4 {
            let mut shifted_sys = hs.clone();
            for i in 0..n {
                let d = shifted_sys.get(i, i);
                shifted_sys.set(i, i, d - Complex64::new(lambda + delta, 0.0));
            }
            let rhs = CMatrix::new(n, 1, v.clone()).expect("vector entries are finite");
            match lu_solve(&shifted_sys, &rhs, None) {
                Ok(y) => {
                    let yv: Vec<Complex64> = (0..n).map(|i| y.get(i, 0)).collect();
                    let yn = vec_norm(&yv);
                    if yn.is_finite() && yn > 0.0 {
                        v = yv.iter().map(|x| x / yn).collect();
                        lambda = vec_dot(&v, &hs.apply(&v)).re;
                        polished = true;
                        break;
                    }
                    delta *= 10.0;
                }
                Err(_) => delta *= 10.0,
            }
        }
        if !polished {
            break;
        }
    }

    // phase normalization: first component of largest modulus becomes real >= 0
    let mut idx = 0;
    let mut best = -1.0f64;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm();
        if m > best + 1e-15 * best.abs() && m > best {
            best = m;
            idx = i;
        }
    }
    let lead = v[idx];
    if lead.norm() > 0.0 {
        let phase = lead.conj() / lead.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
    Ok((lambda, v))
}
