//! Spectral-set machinery for small dense complex operators.
//!
//! The crate computes numerical ranges, builds boundary quadratures on
//! disk/ellipse domains, evaluates functions of a matrix through contour
//! integrals, applies the boundary Cauchy transform, and checks the
//! two-condition lemma that yields the 1+sqrt(2) spectral-set bound,
//! including the two-disk example where that bound is attained exactly.
//! A derivative-free search produces certified lower bounds for the
//! spectral-set constant of a given operator/domain pair.

pub mod calculus;
pub mod funcspace;
pub mod geometry;
pub mod json;
pub mod lemma;
pub mod linalg;
pub mod numrange;
pub mod optimize;

pub use calculus::{cauchy_transform_eval, CalculusContext, RealPartCheck};
pub use funcspace::{Piece, PieceKind, PiecewiseHolo};
pub use geometry::{BoundaryQuadrature, Component, Disk, Domain, Ellipse};
pub use lemma::{ConstantLedger, LemmaReport};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use numrange::NRBoundary;
pub use optimize::{FamilyConfig, OptResult, SearchConfig, SweepSummary};
