//! Piecewise holomorphic functions on multi-component domains.
//!
//! A function assigns one piece per component: a constant, a polynomial in
//! `(z - center)` powers, or a rational piece with an explicit pole list.
//! Polynomial coefficients are stored relative to the owning component's
//! center, which keeps boundary evaluation well-conditioned and makes the
//! coefficient algebra (add/multiply) exact.

use crate::geometry::Domain;
use num_complex::Complex64;
use thiserror::Error;

/// Rational results beyond this numerator/denominator degree are refused.
pub const MAX_RATIONAL_DEGREE: usize = 32;
/// Declared poles must stay this far outside the component's bounding radius.
pub const POLE_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FuncspaceError {
    #[error("piece count {pieces} does not match component count {components}")]
    PieceCountMismatch { pieces: usize, components: usize },
    #[error("piece component indices must cover 0..n exactly once")]
    BadComponentIndices,
    #[error("point {0} lies outside every component closure")]
    OutsideDomain(Complex64),
    #[error("pole {pole} is within {dist:.3e} of component {component} center; requires >= {required:.3e}")]
    PoleTooClose {
        pole: Complex64,
        component: usize,
        dist: f64,
        required: f64,
    },
    #[error("operands live on different domains ({left} vs {right} pieces)")]
    DomainMismatch { left: usize, right: usize },
    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("rational piece needs a nonzero denominator")]
    EmptyDenominator,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceKind {
    Constant(Complex64),
    /// `coeffs[k]` multiplies `(z - center)^k`.
    Polynomial(Vec<Complex64>),
    /// `num(z - center) / den(z - center)` with declared poles (absolute
    /// coordinates). The pole list is the authoritative statement of where
    /// the piece is not holomorphic.
    Rational {
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        poles: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub component: usize,
    pub kind: PieceKind,
}

/// One piece per component, ordered by component index.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseHolo {
    pieces: Vec<Piece>,
}

fn trim_trailing_zeros(mut v: Vec<Complex64>) -> Vec<Complex64> {
    while v.len() > 1 && v.last().map_or(false, |c| c.re == 0.0 && c.im == 0.0) {
        v.pop();
    }
    v
}

fn poly_eval(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * w + c;
    }
    acc
}

fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim_trailing_zeros(out)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_trailing_zeros(out)
}

fn kind_finite(kind: &PieceKind) -> bool {
    let all = |v: &[Complex64]| v.iter().all(|c| c.re.is_finite() && c.im.is_finite());
    match kind {
        PieceKind::Constant(c) => c.re.is_finite() && c.im.is_finite(),
        PieceKind::Polynomial(p) => all(p),
        PieceKind::Rational { num, den, poles } => all(num) && all(den) && all(poles),
    }
}

impl PieceKind {
    fn as_poly(&self) -> Option<Vec<Complex64>> {
        match self {
            PieceKind::Constant(c) => Some(vec![*c]),
            PieceKind::Polynomial(p) => Some(p.clone()),
            PieceKind::Rational { .. } => None,
        }
    }
}

impl PiecewiseHolo {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self, FuncspaceError> {
        pieces.sort_by_key(|p| p.component);
        let ok_indices = pieces.iter().enumerate().all(|(i, p)| p.component == i);
        if !ok_indices {
            return Err(FuncspaceError::BadComponentIndices);
        }
        if pieces.iter().any(|p| !kind_finite(&p.kind)) {
            return Err(FuncspaceError::NonFinite);
        }
        for p in &pieces {
            if let PieceKind::Rational { den, .. } = &p.kind {
                if den.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                    return Err(FuncspaceError::EmptyDenominator);
                }
            }
        }
        Ok(PiecewiseHolo { pieces })
    }

    /// Pieces in component order; panics on non-finite coefficients, so only
    /// use with literal inputs (tests, internal construction).
    pub fn from_kinds(kinds: Vec<PieceKind>) -> Self {
        let pieces = kinds
            .into_iter()
            .enumerate()
            .map(|(component, kind)| Piece { component, kind })
            .collect();
        Self::new(pieces).expect("literal pieces are well-formed")
    }

    /// The constant-`c` function on an `n`-component domain.
    pub fn constant(c: Complex64, n: usize) -> Self {
        Self::from_kinds(vec![PieceKind::Constant(c); n])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Evaluate the piece owned by component `k`; `center` is that
    /// component's center. Callers guarantee `z` avoids declared poles.
    pub fn eval_on_component(&self, k: usize, center: Complex64, z: Complex64) -> Complex64 {
        let w = z - center;
        match &self.pieces[k].kind {
            PieceKind::Constant(c) => *c,
            PieceKind::Polynomial(coeffs) => poly_eval(coeffs, w),
            PieceKind::Rational { num, den, .. } => poly_eval(num, w) / poly_eval(den, w),
        }
    }

    /// Highest polynomial degree across pieces (rational counts max of
    /// numerator and denominator degree).
    pub fn max_degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| match &p.kind {
                PieceKind::Constant(_) => 0,
                PieceKind::Polynomial(c) => c.len().saturating_sub(1),
                PieceKind::Rational { num, den, .. } => {
                    (num.len().saturating_sub(1)).max(den.len().saturating_sub(1))
                }
            })
            .max()
            .unwrap_or(0)
    }
}

/// Check `f` against `domain`: piece count matches and every declared pole
/// keeps its distance from the owning component.
pub fn validate(f: &PiecewiseHolo, domain: &Domain) -> Result<(), FuncspaceError> {
    if f.len() != domain.len() {
        return Err(FuncspaceError::PieceCountMismatch {
            pieces: f.len(),
            components: domain.len(),
        });
    }
    for (k, piece) in f.pieces().iter().enumerate() {
        if let PieceKind::Rational { poles, .. } = &piece.kind {
            let comp = &domain.components()[k];
            let required = comp.bounding_radius() + POLE_CLEARANCE;
            for &pole in poles {
                let dist = (pole - comp.center()).norm();
                if dist < required {
                    return Err(FuncspaceError::PoleTooClose {
                        pole,
                        component: k,
                        dist,
                        required,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Evaluate `f` at `z`, locating the component whose closure holds `z`.
pub fn evaluate(
    f: &PiecewiseHolo,
    domain: &Domain,
    z: Complex64,
) -> Result<Complex64, FuncspaceError> {
    validate(f, domain)?;
    let k = domain
        .component_of(z)
        .ok_or(FuncspaceError::OutsideDomain(z))?;
    Ok(f.eval_on_component(k, domain.center(k), z))
}

fn combine_mul(a: &PieceKind, b: &PieceKind) -> Result<PieceKind, FuncspaceError> {
    use PieceKind::*;
    let degree_guard = |num: &[Complex64], den: &[Complex64]| -> Result<(), FuncspaceError> {
        let d = (num.len().saturating_sub(1)).max(den.len().saturating_sub(1));
        if d > MAX_RATIONAL_DEGREE {
            return Err(FuncspaceError::UnsupportedOperation(format!(
                "rational product degree {d} exceeds {MAX_RATIONAL_DEGREE}"
            )));
        }
        Ok(())
    };
    match (a, b) {
        (Rational { num, den, poles }, other) | (other, Rational { num, den, poles }) => {
            match other {
                Rational {
                    num: num2,
                    den: den2,
                    poles: poles2,
                } => {
                    let n = poly_mul(num, num2);
                    let d = poly_mul(den, den2);
                    degree_guard(&n, &d)?;
                    let mut ps = poles.clone();
                    ps.extend_from_slice(poles2);
                    Ok(Rational {
                        num: n,
                        den: d,
                        poles: ps,
                    })
                }
                _ => {
                    let p = other.as_poly().expect("non-rational piece");
                    let n = poly_mul(num, &p);
                    degree_guard(&n, den)?;
                    Ok(Rational {
                        num: n,
                        den: den.clone(),
                        poles: poles.clone(),
                    })
                }
            }
        }
        (x, y) => {
            let p = poly_mul(&x.as_poly().unwrap(), &y.as_poly().unwrap());
            Ok(if p.len() == 1 {
                Constant(p[0])
            } else {
                Polynomial(p)
            })
        }
    }
}

fn combine_add(a: &PieceKind, b: &PieceKind) -> Result<PieceKind, FuncspaceError> {
    use PieceKind::*;
    let degree_guard = |num: &[Complex64], den: &[Complex64]| -> Result<(), FuncspaceError> {
        let d = (num.len().saturating_sub(1)).max(den.len().saturating_sub(1));
        if d > MAX_RATIONAL_DEGREE {
            return Err(FuncspaceError::UnsupportedOperation(format!(
                "rational sum degree {d} exceeds {MAX_RATIONAL_DEGREE}"
            )));
        }
        Ok(())
    };
    match (a, b) {
        (
            Rational { num, den, poles },
            Rational {
                num: num2,
                den: den2,
                poles: poles2,
            },
        ) => {
            let n = poly_add(&poly_mul(num, den2), &poly_mul(num2, den));
            let d = poly_mul(den, den2);
            degree_guard(&n, &d)?;
            let mut ps = poles.clone();
            ps.extend_from_slice(poles2);
            Ok(Rational {
                num: n,
                den: d,
                poles: ps,
            })
        }
        (Rational { num, den, poles }, other) | (other, Rational { num, den, poles }) => {
            let p = other.as_poly().expect("non-rational piece");
            let n = poly_add(num, &poly_mul(&p, den));
            degree_guard(&n, den)?;
            Ok(Rational {
                num: n,
                den: den.clone(),
                poles: poles.clone(),
            })
        }
        (x, y) => {
            let p = poly_add(&x.as_poly().unwrap(), &y.as_poly().unwrap());
            Ok(if p.len() == 1 {
                Constant(p[0])
            } else {
                Polynomial(p)
            })
        }
    }
}

fn zip_pieces(
    f: &PiecewiseHolo,
    g: &PiecewiseHolo,
    op: impl Fn(&PieceKind, &PieceKind) -> Result<PieceKind, FuncspaceError>,
) -> Result<PiecewiseHolo, FuncspaceError> {
    if f.len() != g.len() {
        return Err(FuncspaceError::DomainMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let kinds: Result<Vec<PieceKind>, FuncspaceError> = f
        .pieces()
        .iter()
        .zip(g.pieces())
        .map(|(a, b)| op(&a.kind, &b.kind))
        .collect();
    Ok(PiecewiseHolo::from_kinds(kinds?))
}

/// Pointwise product; both operands must live on the same domain.
pub fn multiply(f: &PiecewiseHolo, g: &PiecewiseHolo) -> Result<PiecewiseHolo, FuncspaceError> {
    zip_pieces(f, g, combine_mul)
}

/// Pointwise sum; both operands must live on the same domain.
pub fn add(f: &PiecewiseHolo, g: &PiecewiseHolo) -> Result<PiecewiseHolo, FuncspaceError> {
    zip_pieces(f, g, combine_add)
}

/// Scalar multiple.
pub fn scale(f: &PiecewiseHolo, s: Complex64) -> PiecewiseHolo {
    let kinds = f
        .pieces()
        .iter()
        .map(|p| match &p.kind {
            PieceKind::Constant(c) => PieceKind::Constant(c * s),
            PieceKind::Polynomial(coeffs) => {
                PieceKind::Polynomial(coeffs.iter().map(|c| c * s).collect())
            }
            PieceKind::Rational { num, den, poles } => PieceKind::Rational {
                num: num.iter().map(|c| c * s).collect(),
                den: den.clone(),
                poles: poles.clone(),
            },
        })
        .collect();
    PiecewiseHolo::from_kinds(kinds)
}
