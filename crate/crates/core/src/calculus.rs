//! Contour-integral functional calculus and the boundary Cauchy transform.
//!
//! `f(T)` is evaluated as `(1/2πi) ∮ f(ζ) (ζI - T)^{-1} dζ` over the domain
//! boundary; the Cauchy transform substitutes `conj(f(ζ))` for `f(ζ)`. The
//! context caches one resolvent per quadrature node and refuses to report
//! results until the quadrature reproduces `1 -> I` and `z -> T` to within
//! the calibration tolerance, which monitors both node resolution and
//! spectrum containment.

use crate::funcspace::{self, FuncspaceError, PieceKind, PiecewiseHolo};
use crate::geometry::{BoundaryQuadrature, Component, Domain, GeometryError};
use crate::linalg::{self, CMatrix, LinalgError};
use crate::numrange;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Both calibration residuals must fall below this before results are trusted.
pub const CALIBRATION_TOL: f64 = 1e-8;
/// Interior Cauchy evaluation keeps this many node spacings from the boundary.
pub const EVAL_CLEARANCE_SPACINGS: f64 = 10.0;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error("quadrature node {node} sits on (or numerically near) the spectrum")]
    NodeOnSpectrum { node: Complex64 },
    #[error(
        "context is not calibrated (residuals {res_identity:.3e}, {res_t:.3e} exceed {tol:.3e}); \
         check node count and spectrum containment"
    )]
    Uncalibrated {
        res_identity: f64,
        res_t: f64,
        tol: f64,
    },
    #[error("evaluation point {z} is outside the domain interior")]
    OutsideDomain { z: Complex64 },
    #[error(
        "evaluation point {z} is too close to the boundary ({dist:.3e} < {required:.3e}); \
         raise the node count or move the point"
    )]
    TooCloseToBoundary { z: Complex64, dist: f64, required: f64 },
    #[error("operation requires a single-disk domain")]
    NotSingleDisk,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error(transparent)]
    InvalidFunction(#[from] FuncspaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Result of the node-measure positivity scan.
#[derive(Debug, Clone, Copy)]
pub struct RealPartCheck {
    /// Minimum over nodes of the smallest eigenvalue of `M_j + M_j^*`.
    pub min_real_eigenvalue: f64,
    /// Whether the convex single-component containment precondition held;
    /// when false the value is reported but carries no positivity guarantee.
    pub containment_ok: bool,
}

/// Cached contour data for one `(T, domain, quadrature)` triple.
#[derive(Debug, Clone)]
pub struct CalculusContext {
    t: CMatrix,
    domain: Domain,
    quadrature: BoundaryQuadrature,
    resolvents: Vec<CMatrix>,
    res_identity: f64,
    res_t: f64,
}

impl CalculusContext {
    pub fn new(
        t: CMatrix,
        domain: Domain,
        quadrature: BoundaryQuadrature,
    ) -> Result<Self, CalculusError> {
        if !t.is_square() {
            return Err(CalculusError::NotSquare {
                rows: t.n_rows(),
                cols: t.n_cols(),
            });
        }
        let n = t.n_rows();
        let identity = CMatrix::identity(n);
        let resolvents: Result<Vec<CMatrix>, CalculusError> = quadrature
            .nodes()
            .par_iter()
            .map(|node| {
                let mut shifted = t.scale(Complex64::new(-1.0, 0.0));
                for i in 0..n {
                    let d = shifted.get(i, i);
                    shifted.set(i, i, d + node.zeta);
                }
                linalg::solve_linear(&shifted, &identity).map_err(|e| match e {
                    LinalgError::SingularMatrix { .. } => CalculusError::NodeOnSpectrum {
                        node: node.zeta,
                    },
                    other => CalculusError::Linalg(other),
                })
            })
            .collect();
        let resolvents = resolvents?;

        let mut ctx = CalculusContext {
            t,
            domain,
            quadrature,
            resolvents,
            res_identity: f64::INFINITY,
            res_t: f64::INFINITY,
        };
        let q1 = ctx.weighted_resolvent_sum(|_, _| Complex64::new(1.0, 0.0));
        let qz = ctx.weighted_resolvent_sum(|_, zeta| zeta);
        ctx.res_identity = linalg::operator_norm(&q1.sub(&CMatrix::identity(n))?);
        ctx.res_t = linalg::operator_norm(&qz.sub(&ctx.t)?);
        Ok(ctx)
    }

    /// Convenience constructor building the quadrature in place.
    pub fn with_nodes(
        t: CMatrix,
        domain: Domain,
        nodes_per_component: usize,
    ) -> Result<Self, CalculusError> {
        let quadrature = crate::geometry::boundary_quadrature(&domain, nodes_per_component)?;
        Self::new(t, domain, quadrature)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.t
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn quadrature(&self) -> &BoundaryQuadrature {
        &self.quadrature
    }

    /// Calibration residuals `(||quad(1) - I||, ||quad(z) - T||)`.
    pub fn calibrate(&self) -> (f64, f64) {
        (self.res_identity, self.res_t)
    }

    pub fn is_calibrated(&self) -> bool {
        self.res_identity <= CALIBRATION_TOL && self.res_t <= CALIBRATION_TOL
    }

    fn ensure_calibrated(&self) -> Result<(), CalculusError> {
        if self.is_calibrated() {
            Ok(())
        } else {
            Err(CalculusError::Uncalibrated {
                res_identity: self.res_identity,
                res_t: self.res_t,
                tol: CALIBRATION_TOL,
            })
        }
    }

    /// `(1/2πi) Σ_j w_j c_j R_j` with `c_j = coeff(j, ζ_j)`.
    fn weighted_resolvent_sum(
        &self,
        coeff: impl Fn(usize, Complex64) -> Complex64,
    ) -> CMatrix {
        let n = self.t.n_rows();
        let mut acc = CMatrix::zeros(n, n);
        for (j, node) in self.quadrature.nodes().iter().enumerate() {
            acc.axpy(node.weight * coeff(j, node.zeta), &self.resolvents[j]);
        }
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        acc.scale(Complex64::new(1.0, 0.0) / two_pi_i)
    }

    /// `f(T)` through the cached contour. Requires calibration and a function
    /// valid on the context domain.
    pub fn func_of_matrix(&self, f: &PiecewiseHolo) -> Result<CMatrix, CalculusError> {
        self.ensure_calibrated()?;
        funcspace::validate(f, &self.domain)?;
        let values = self.boundary_values(f);
        Ok(self.weighted_resolvent_sum(|j, _| values[j]))
    }

    /// Operator Cauchy transform: `(1/2πi) Σ w_j conj(f(ζ_j)) R_j`.
    pub fn cauchy_transform_of_matrix(&self, f: &PiecewiseHolo) -> Result<CMatrix, CalculusError> {
        self.ensure_calibrated()?;
        funcspace::validate(f, &self.domain)?;
        let values = self.boundary_values(f);
        Ok(self.weighted_resolvent_sum(|j, _| values[j].conj()))
    }

    fn boundary_values(&self, f: &PiecewiseHolo) -> Vec<Complex64> {
        self.quadrature
            .nodes()
            .iter()
            .map(|node| f.eval_on_component(node.component, self.domain.center(node.component), node.zeta))
            .collect()
    }

    /// Scan the per-node measure `M_j = (1/2πi) w_j R_j` for positive real
    /// part: reports the minimum eigenvalue of `M_j + M_j^*` across nodes.
    /// Positivity is only guaranteed when the domain is a single convex
    /// component containing the closed numerical range; the flag records
    /// whether that precondition held.
    pub fn realpart_measure_check(&self) -> Result<RealPartCheck, CalculusError> {
        self.ensure_calibrated()?;
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut min_eig = f64::INFINITY;
        for (j, node) in self.quadrature.nodes().iter().enumerate() {
            let m = self.resolvents[j].scale(node.weight / two_pi_i);
            let s = m.add(&linalg::adjoint(&m))?;
            let neg = s.scale(Complex64::new(-1.0, 0.0));
            let (top, _) = linalg::hermitian_extreme_eig(&neg)?;
            min_eig = min_eig.min(-top);
        }
        let containment_ok = if self.domain.len() == 1 {
            match numrange::numerical_range_boundary(&self.t, 360) {
                Ok(boundary) => {
                    numrange::convex_domain_contains_w(&self.domain, &boundary, 0.0)
                        .unwrap_or(false)
                }
                Err(_) => false,
            }
        } else {
            false
        };
        Ok(RealPartCheck {
            min_real_eigenvalue: min_eig,
            containment_ok,
        })
    }
}

/// Scalar Cauchy transform `(Cf̄)(z) = (1/2πi) ∮ conj(f(ζ)) / (ζ - z) dζ` at
/// an interior point `z` kept well away from the boundary.
pub fn cauchy_transform_eval(
    f: &PiecewiseHolo,
    domain: &Domain,
    quadrature: &BoundaryQuadrature,
    z: Complex64,
) -> Result<Complex64, CalculusError> {
    funcspace::validate(f, domain)?;
    if !domain.contains(z, 0.0) {
        return Err(CalculusError::OutsideDomain { z });
    }
    let dist = domain
        .components()
        .iter()
        .map(|c| c.distance_to_boundary(z))
        .fold(f64::INFINITY, f64::min);
    let required = EVAL_CLEARANCE_SPACINGS * quadrature.max_spacing();
    if dist < required {
        return Err(CalculusError::TooCloseToBoundary { z, dist, required });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for node in quadrature.nodes() {
        let v = f.eval_on_component(node.component, domain.center(node.component), node.zeta);
        acc += node.weight * v.conj() / (node.zeta - z);
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok(acc / two_pi_i)
}

/// Taylor form of the Cauchy transform on a single-disk domain: returns the
/// degree-`degree` polynomial with coefficients
/// `a_k = (1/2πi) ∮ conj(f(ζ)) / (ζ - c)^{k+1} dζ`,
/// which represents `Cf̄` inside the disk. This is the polynomial realization
/// used when a companion function must live in the same algebra as `f`.
pub fn cauchy_transform_polynomial(
    f: &PiecewiseHolo,
    domain: &Domain,
    quadrature: &BoundaryQuadrature,
    degree: usize,
) -> Result<PiecewiseHolo, CalculusError> {
    funcspace::validate(f, domain)?;
    let disk = match domain.components() {
        [Component::Disk(d)] => *d,
        _ => return Err(CalculusError::NotSingleDisk),
    };
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    for node in quadrature.nodes() {
        let v = f
            .eval_on_component(node.component, disk.center, node.zeta)
            .conj();
        let shifted = node.zeta - disk.center;
        let mut inv_pow = Complex64::new(1.0, 0.0) / shifted;
        for a in coeffs.iter_mut() {
            *a += node.weight * v * inv_pow;
            inv_pow /= shifted;
        }
    }
    for a in coeffs.iter_mut() {
        *a /= two_pi_i;
    }
    Ok(PiecewiseHolo::from_kinds(vec![PieceKind::Polynomial(
        coeffs,
    )]))
}
