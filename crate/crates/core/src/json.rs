//! JSON wire formats for matrices, domains, piecewise functions and
//! optimizer output. Complex numbers travel as `[re, im]` pairs; geometry
//! and function variants are tagged enums so files stay self-describing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcspace::{FuncspaceError, Piece, PieceKind, PiecewiseHolo};
use crate::geometry::{Component, Disk, Domain, Ellipse, GeometryError};
use crate::linalg::{CMatrix, LinalgError};
use crate::optimize::OptResult;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Funcspace(#[from] FuncspaceError),
}

fn c(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().copied().map(pair).collect()
}

fn cs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().copied().map(c).collect()
}

/// Dense complex matrix as nested rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = (0..m.n_rows())
            .map(|i| (0..m.n_cols()).map(|j| pair(m.get(i, j))).collect())
            .collect();
        MatrixJson { rows }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, JsonError> {
        let rows: Vec<Vec<Complex64>> = self.rows.iter().map(|r| cs(r)).collect();
        Ok(CMatrix::from_rows(&rows)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComponentJson {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainJson {
    pub components: Vec<ComponentJson>,
}

impl DomainJson {
    pub fn from_domain(domain: &Domain) -> Self {
        let components = domain
            .components()
            .iter()
            .map(|comp| match comp {
                Component::Disk(d) => ComponentJson::Disk {
                    center: pair(d.center),
                    radius: d.radius,
                },
                Component::Ellipse(e) => ComponentJson::Ellipse {
                    center: pair(e.center),
                    semi_major: e.semi_major,
                    semi_minor: e.semi_minor,
                    rotation: e.rotation,
                },
            })
            .collect();
        DomainJson { components }
    }

    pub fn to_domain(&self) -> Result<Domain, JsonError> {
        let components = self
            .components
            .iter()
            .map(|comp| {
                Ok(match comp {
                    ComponentJson::Disk { center, radius } => {
                        Component::Disk(Disk::new(c(*center), *radius)?)
                    }
                    ComponentJson::Ellipse {
                        center,
                        semi_major,
                        semi_minor,
                        rotation,
                    } => Component::Ellipse(Ellipse::new(
                        c(*center),
                        *semi_major,
                        *semi_minor,
                        *rotation,
                    )?),
                })
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Ok(Domain::new(components)?)
    }
}

/// One piece of a piecewise function. `component` may be omitted on input,
/// in which case the piece's position in the array is used; output always
/// carries it explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceJson {
    Constant {
        #[serde(default)]
        component: Option<usize>,
        value: [f64; 2],
    },
    Polynomial {
        #[serde(default)]
        component: Option<usize>,
        /// Coefficients of powers of `(z - center)`, constant term first.
        coeffs: Vec<[f64; 2]>,
    },
    Rational {
        #[serde(default)]
        component: Option<usize>,
        num: Vec<[f64; 2]>,
        den: Vec<[f64; 2]>,
        poles: Vec<[f64; 2]>,
    },
}

impl PieceJson {
    fn component(&self) -> Option<usize> {
        match self {
            PieceJson::Constant { component, .. }
            | PieceJson::Polynomial { component, .. }
            | PieceJson::Rational { component, .. } => *component,
        }
    }

    fn kind(&self) -> PieceKind {
        match self {
            PieceJson::Constant { value, .. } => PieceKind::Constant(c(*value)),
            PieceJson::Polynomial { coeffs, .. } => PieceKind::Polynomial(cs(coeffs)),
            PieceJson::Rational {
                num, den, poles, ..
            } => PieceKind::Rational {
                num: cs(num),
                den: cs(den),
                poles: cs(poles),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionJson {
    pub pieces: Vec<PieceJson>,
}

impl FunctionJson {
    pub fn from_function(f: &PiecewiseHolo) -> Self {
        let pieces = f
            .pieces()
            .iter()
            .map(|p| {
                let component = Some(p.component);
                match &p.kind {
                    PieceKind::Constant(v) => PieceJson::Constant {
                        component,
                        value: pair(*v),
                    },
                    PieceKind::Polynomial(coeffs) => PieceJson::Polynomial {
                        component,
                        coeffs: pairs(coeffs),
                    },
                    PieceKind::Rational { num, den, poles } => PieceJson::Rational {
                        component,
                        num: pairs(num),
                        den: pairs(den),
                        poles: pairs(poles),
                    },
                }
            })
            .collect();
        FunctionJson { pieces }
    }

    pub fn to_function(&self) -> Result<PiecewiseHolo, JsonError> {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(at, p)| Piece {
                component: p.component().unwrap_or(at),
                kind: p.kind(),
            })
            .collect();
        Ok(PiecewiseHolo::new(pieces)?)
    }
}

/// Serializable form of an optimizer run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptResultJson {
    pub k_lower: f64,
    pub best_f: FunctionJson,
    pub seed: u64,
    pub evals: usize,
}

impl OptResultJson {
    pub fn from_result(r: &OptResult) -> Self {
        OptResultJson {
            k_lower: r.k_lower,
            best_f: FunctionJson::from_function(&r.best),
            seed: r.seed,
            evals: r.evals,
        }
    }

    pub fn to_result(&self) -> Result<OptResult, JsonError> {
        Ok(OptResult {
            k_lower: self.k_lower,
            best: self.best_f.to_function()?,
            evals: self.evals,
            seed: self.seed,
        })
    }
}
