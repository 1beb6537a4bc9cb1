//! Numerical range boundary via the support-function eigenvalue sweep.
//!
//! For each angle the Hermitian part of the rotated operator is formed; its
//! top eigenvalue is the support value and the eigenvector's Rayleigh point
//! `x* T x` is a boundary point of the numerical range. The sweep therefore
//! produces both a support-function table and boundary points of the convex
//! set itself.

use crate::geometry::{Disk, Domain};
use crate::linalg::{self, CMatrix, LinalgError};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Fixed shuffle seed for the enclosing-disk algorithm (determinism).
const ENCLOSING_SHUFFLE_SEED: u64 = 0x5eed_d15c;

#[derive(Debug, Error)]
pub enum NumrangeError {
    #[error("need at least 8 sweep angles, got {0}")]
    TooFewAngles(usize),
    #[error("boundary holds no samples")]
    EmptyBoundary,
    #[error("containment test requires a single-component (convex) domain, got {0} components")]
    MultiComponentDomain(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One sweep sample: angle, support value, attaining boundary point.
#[derive(Debug, Clone, Copy)]
pub struct NrSample {
    pub theta: f64,
    pub support: f64,
    pub point: Complex64,
}

/// Discretized numerical-range boundary.
#[derive(Debug, Clone)]
pub struct NRBoundary {
    samples: Vec<NrSample>,
}

impl NRBoundary {
    pub fn samples(&self) -> &[NrSample] {
        &self.samples
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.point).collect()
    }
}

/// Support value and attaining point of the numerical range at angle `theta`:
/// maximizes `Re(e^{i theta} w)` over `w = x* T x`, `|x| = 1`.
pub fn support_point(t: &CMatrix, theta: f64) -> Result<(f64, Complex64), NumrangeError> {
    let rotated = t.scale(Complex64::from_polar(1.0, theta));
    let herm = rotated
        .add(&linalg::adjoint(&rotated))?
        .scale(Complex64::new(0.5, 0.0));
    let (support, x) = linalg::hermitian_extreme_eig(&herm)?;
    let tx = t.apply(&x);
    let point = linalg::vec_dot(&x, &tx);
    Ok((support, point))
}

/// Sweep `n_angles` equispaced angles over `[0, 2*pi)`.
pub fn numerical_range_boundary(
    t: &CMatrix,
    n_angles: usize,
) -> Result<NRBoundary, NumrangeError> {
    if n_angles < 8 {
        return Err(NumrangeError::TooFewAngles(n_angles));
    }
    let mut samples = Vec::with_capacity(n_angles);
    for k in 0..n_angles {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n_angles as f64;
        let (support, point) = support_point(t, theta)?;
        samples.push(NrSample {
            theta,
            support,
            point,
        });
    }
    Ok(NRBoundary { samples })
}

/// Minimal enclosing disk of the boundary points, radius grown by `margin`.
pub fn enclosing_disk(boundary: &NRBoundary, margin: f64) -> Result<Disk, NumrangeError> {
    let points = boundary.points();
    if points.is_empty() {
        return Err(NumrangeError::EmptyBoundary);
    }
    let (center, radius) = min_enclosing_disk(&points);
    // radius may be zero for a single point; the margin keeps the disk proper
    Ok(Disk::new(center, (radius + margin).max(f64::MIN_POSITIVE))
        .expect("finite center and positive radius"))
}

/// True iff every boundary point lies in the (single, convex) component with
/// clearance at least `margin`.
pub fn convex_domain_contains_w(
    domain: &Domain,
    boundary: &NRBoundary,
    margin: f64,
) -> Result<bool, NumrangeError> {
    if domain.len() != 1 {
        return Err(NumrangeError::MultiComponentDomain(domain.len()));
    }
    Ok(boundary
        .samples()
        .iter()
        .all(|s| domain.contains(s.point, margin)))
}

/// Default inflation margin used when wrapping a numerical range in a disk.
pub fn default_margin(t: &CMatrix) -> f64 {
    1e-3 * (1.0 + linalg::operator_norm(t))
}

/// Exact minimal enclosing disk (Welzl-style incremental construction with a
/// deterministic seeded shuffle). Returns (center, radius).
pub fn min_enclosing_disk(points: &[Complex64]) -> (Complex64, f64) {
    assert!(!points.is_empty());
    let mut pts: Vec<Complex64> = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(ENCLOSING_SHUFFLE_SEED);
    pts.shuffle(&mut rng);

    let mut center = pts[0];
    let mut radius = 0.0f64;
    for i in 1..pts.len() {
        if in_disk(center, radius, pts[i]) {
            continue;
        }
        // pts[i] is on the boundary of the minimal disk of pts[..=i]
        center = pts[i];
        radius = 0.0;
        for j in 0..i {
            if in_disk(center, radius, pts[j]) {
                continue;
            }
            // pts[i], pts[j] both on the boundary
            center = 0.5 * (pts[i] + pts[j]);
            radius = (pts[i] - center).norm();
            for k in 0..j {
                if in_disk(center, radius, pts[k]) {
                    continue;
                }
                let (c3, r3) = circumscribe(pts[i], pts[j], pts[k]);
                center = c3;
                radius = r3;
            }
        }
    }
    (center, radius)
}

fn in_disk(center: Complex64, radius: f64, p: Complex64) -> bool {
    (p - center).norm() <= radius * (1.0 + 1e-14) + 1e-300
}

/// Circle through three points, or the diametral circle of the farthest pair
/// when they are (near-)collinear.
fn circumscribe(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, f64) {
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-14 * (a.norm() + b.norm() + c.norm() + 1.0).powi(2) {
        // collinear fallback: diametral disk of the farthest pair
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .iter()
            .max_by(|(p1, q1), (p2, q2)| {
                (p1 - q1)
                    .norm()
                    .partial_cmp(&(p2 - q2).norm())
                    .expect("finite distances")
            })
            .copied()
            .expect("three candidate pairs");
        let center = 0.5 * (p + q);
        return (center, (p - center).norm());
    }
    let ux = (a.norm_sqr() * (b.im - c.im) + b.norm_sqr() * (c.im - a.im)
        + c.norm_sqr() * (a.im - b.im))
        / d;
    let uy = (a.norm_sqr() * (c.re - b.re) + b.norm_sqr() * (a.re - c.re)
        + c.norm_sqr() * (b.re - a.re))
        / d;
    let center = Complex64::new(ux, uy);
    let radius = (a - center)
        .norm()
        .max((b - center).norm())
        .max((c - center).norm());
    (center, radius)
}
