//! Disk/ellipse domain geometry and boundary quadrature.
//!
//! A domain is a finite union of closed disks and ellipses with pairwise
//! disjoint closures. Boundaries are parametrized counterclockwise and
//! discretized with the periodic trapezoid rule, which is spectrally accurate
//! for the analytic integrands used downstream.

use crate::funcspace::{self, FuncspaceError, PiecewiseHolo};
use num_complex::Complex64;
use thiserror::Error;

/// Minimum admissible gap between component closures.
pub const DISJOINT_GAP: f64 = 1e-9;
/// Default number of boundary samples per component for sup-norm estimation.
pub const DEFAULT_SUP_SAMPLES: usize = 2048;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("ellipse axes must satisfy semi_major >= semi_minor > 0, got ({major}, {minor})")]
    InvalidAxes { major: f64, minor: f64 },
    #[error("center must be finite")]
    NonFiniteCenter,
    #[error("domain needs at least one component")]
    EmptyDomain,
    #[error("components {i} and {j} are closer than the required gap ({gap:.3e} < {required:.3e})")]
    ComponentsOverlap {
        i: usize,
        j: usize,
        gap: f64,
        required: f64,
    },
    #[error("quadrature needs at least 16 nodes per component, got {0}")]
    TooFewNodes(usize),
    #[error("inflation amount must be positive and finite, got {0}")]
    InvalidInflation(f64),
    #[error("sup-norm needs at least 16 samples per component, got {0}")]
    TooFewSamples(usize),
    #[error("function invalid on this domain: {0}")]
    InvalidFunction(#[from] FuncspaceError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(GeometryError::NonFiniteCenter);
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Disk { center, radius })
    }
}

/// Ellipse with counterclockwise rotation (radians) of the major axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub rotation: f64,
}

impl Ellipse {
    pub fn new(
        center: Complex64,
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    ) -> Result<Self, GeometryError> {
        if !center.re.is_finite() || !center.im.is_finite() || !rotation.is_finite() {
            return Err(GeometryError::NonFiniteCenter);
        }
        if !(semi_minor.is_finite()
            && semi_major.is_finite()
            && semi_minor > 0.0
            && semi_major >= semi_minor)
        {
            return Err(GeometryError::InvalidAxes {
                major: semi_major,
                minor: semi_minor,
            });
        }
        Ok(Ellipse {
            center,
            semi_major,
            semi_minor,
            rotation,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Disk(Disk),
    Ellipse(Ellipse),
}

impl Component {
    pub fn center(&self) -> Complex64 {
        match self {
            Component::Disk(d) => d.center,
            Component::Ellipse(e) => e.center,
        }
    }

    /// Radius of the smallest origin-centered-at-`center` disk containing the
    /// component: the disk radius, or the ellipse semi-major axis.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Component::Disk(d) => d.radius,
            Component::Ellipse(e) => e.semi_major,
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Component::Disk(d) => std::f64::consts::PI * d.radius * d.radius,
            Component::Ellipse(e) => std::f64::consts::PI * e.semi_major * e.semi_minor,
        }
    }

    fn single_diameter(&self) -> f64 {
        match self {
            Component::Disk(d) => 2.0 * d.radius,
            Component::Ellipse(e) => 2.0 * e.semi_major,
        }
    }

    /// Counterclockwise boundary point at parameter `t` in `[0, 2*pi)`.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        match self {
            Component::Disk(d) => d.center + d.radius * Complex64::new(t.cos(), t.sin()),
            Component::Ellipse(e) => {
                let local = Complex64::new(e.semi_major * t.cos(), e.semi_minor * t.sin());
                e.center + Complex64::from_polar(1.0, e.rotation) * local
            }
        }
    }

    /// Derivative of `boundary_point` with respect to `t`.
    pub fn boundary_derivative(&self, t: f64) -> Complex64 {
        match self {
            Component::Disk(d) => d.radius * Complex64::new(-t.sin(), t.cos()),
            Component::Ellipse(e) => {
                let local = Complex64::new(-e.semi_major * t.sin(), e.semi_minor * t.cos());
                Complex64::from_polar(1.0, e.rotation) * local
            }
        }
    }

    /// Support value `max Re(z * conj(u))` over the component, `u = e^{i theta}`.
    pub fn support(&self, theta: f64) -> f64 {
        let u = Complex64::from_polar(1.0, theta);
        let base = (self.center() * u.conj()).re;
        match self {
            Component::Disk(d) => base + d.radius,
            Component::Ellipse(e) => {
                let phi = theta - e.rotation;
                let (s, c) = phi.sin_cos();
                base + (e.semi_major * e.semi_major * c * c
                    + e.semi_minor * e.semi_minor * s * s)
                    .sqrt()
            }
        }
    }

    pub fn is_inside(&self, z: Complex64) -> bool {
        match self {
            Component::Disk(d) => (z - d.center).norm() < d.radius,
            Component::Ellipse(e) => {
                let w = (z - e.center) * Complex64::from_polar(1.0, -e.rotation);
                let x = w.re / e.semi_major;
                let y = w.im / e.semi_minor;
                x * x + y * y < 1.0
            }
        }
    }

    pub(crate) fn is_in_closure(&self, z: Complex64, slack: f64) -> bool {
        match self {
            Component::Disk(d) => (z - d.center).norm() <= d.radius + slack,
            Component::Ellipse(e) => {
                let w = (z - e.center) * Complex64::from_polar(1.0, -e.rotation);
                let x = w.re / (e.semi_major + slack);
                let y = w.im / (e.semi_minor + slack);
                x * x + y * y <= 1.0
            }
        }
    }

    /// Euclidean distance from `z` to the boundary curve (either side).
    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        match self {
            Component::Disk(d) => ((z - d.center).norm() - d.radius).abs(),
            Component::Ellipse(e) => {
                // reduce to the first quadrant of the axis-aligned frame, then
                // dense sampling plus golden-section refinement on the
                // parametric distance
                let w = (z - e.center) * Complex64::from_polar(1.0, -e.rotation);
                let px = w.re.abs();
                let py = w.im.abs();
                let dist = |t: f64| {
                    let dx = e.semi_major * t.cos() - px;
                    let dy = e.semi_minor * t.sin() - py;
                    (dx * dx + dy * dy).sqrt()
                };
                let samples = 256;
                let mut best_t = 0.0;
                let mut best = dist(0.0);
                for k in 1..=samples {
                    let t = std::f64::consts::FRAC_PI_2 * k as f64 / samples as f64;
                    let d = dist(t);
                    if d < best {
                        best = d;
                        best_t = t;
                    }
                }
                let step = std::f64::consts::FRAC_PI_2 / samples as f64;
                let mut lo = (best_t - step).max(0.0);
                let mut hi = (best_t + step).min(std::f64::consts::FRAC_PI_2);
                let gr = (5f64.sqrt() - 1.0) / 2.0;
                for _ in 0..80 {
                    let m1 = hi - gr * (hi - lo);
                    let m2 = lo + gr * (hi - lo);
                    if dist(m1) <= dist(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                dist(0.5 * (lo + hi))
            }
        }
    }
}

/// Finite union of components with pairwise disjoint closures.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    components: Vec<Component>,
}

impl Domain {
    pub fn new(components: Vec<Component>) -> Result<Self, GeometryError> {
        if components.is_empty() {
            return Err(GeometryError::EmptyDomain);
        }
        // Disjointness: exact for disk pairs; bounding disks otherwise, which
        // is conservative (never accepts an overlapping pair).
        for i in 0..components.len() {
            for j in (i + 1)..components.len() {
                let a = &components[i];
                let b = &components[j];
                let dist = (a.center() - b.center()).norm();
                let gap = dist - a.bounding_radius() - b.bounding_radius();
                if gap < DISJOINT_GAP {
                    return Err(GeometryError::ComponentsOverlap {
                        i,
                        j,
                        gap,
                        required: DISJOINT_GAP,
                    });
                }
            }
        }
        Ok(Domain { components })
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        Ok(Domain {
            components: vec![Component::Disk(Disk::new(center, radius)?)],
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn center(&self, k: usize) -> Complex64 {
        self.components[k].center()
    }

    /// True iff `z` lies strictly inside some component with distance at
    /// least `margin` from its boundary. The boundary itself is excluded.
    pub fn contains(&self, z: Complex64, margin: f64) -> bool {
        self.components
            .iter()
            .any(|c| c.is_inside(z) && c.distance_to_boundary(z) >= margin)
    }

    /// Component whose closure holds `z`, if any; closures are disjoint so the
    /// index is unique up to the tiny slack.
    pub fn component_of(&self, z: Complex64) -> Option<usize> {
        let slack = 1e-9;
        self.components.iter().position(|c| c.is_in_closure(z, slack))
    }

    /// Supremum of `|p - q|` over the closed domain.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for c in &self.components {
            best = best.max(c.single_diameter());
        }
        for i in 0..self.components.len() {
            for j in (i + 1)..self.components.len() {
                best = best.max(pair_diameter(&self.components[i], &self.components[j]));
            }
        }
        best
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| c.area()).sum()
    }

    /// Grow every component by `eps`: disks gain radius, ellipses scale both
    /// axes by `1 + eps/semi_minor` so the support function grows by at least
    /// `eps` (the result contains the `eps`-parallel body).
    pub fn inflate(&self, eps: f64) -> Result<Domain, GeometryError> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(GeometryError::InvalidInflation(eps));
        }
        let grown: Result<Vec<Component>, GeometryError> = self
            .components
            .iter()
            .map(|c| match c {
                Component::Disk(d) => Ok(Component::Disk(Disk::new(d.center, d.radius + eps)?)),
                Component::Ellipse(e) => {
                    let scale = 1.0 + eps / e.semi_minor;
                    Ok(Component::Ellipse(Ellipse::new(
                        e.center,
                        e.semi_major * scale,
                        e.semi_minor * scale,
                        e.rotation,
                    )?))
                }
            })
            .collect();
        Domain::new(grown?)
    }
}

/// `sup |p - q|` for `p`, `q` in two disjoint convex components:
/// maximize the sum of opposite support functions over the direction angle.
fn pair_diameter(a: &Component, b: &Component) -> f64 {
    if let (Component::Disk(da), Component::Disk(db)) = (a, b) {
        return (da.center - db.center).norm() + da.radius + db.radius;
    }
    let width = |theta: f64| a.support(theta) + b.support(theta + std::f64::consts::PI);
    let coarse = 4096;
    let mut best_theta = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..coarse {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / coarse as f64;
        let w = width(theta);
        if w > best {
            best = w;
            best_theta = theta;
        }
    }
    let step = 2.0 * std::f64::consts::PI / coarse as f64;
    let mut lo = best_theta - step;
    let mut hi = best_theta + step;
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - gr * (hi - lo);
        let m2 = lo + gr * (hi - lo);
        if width(m1) >= width(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    width(0.5 * (lo + hi))
}

/// One node of a boundary quadrature: location, complex weight (derivative
/// times parameter step), and owning component.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureNode {
    pub zeta: Complex64,
    pub weight: Complex64,
    pub component: usize,
}

/// Periodic-trapezoid discretization of every component boundary.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    nodes: Vec<QuadratureNode>,
    nodes_per_component: usize,
    n_components: usize,
}

impl BoundaryQuadrature {
    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn nodes_per_component(&self) -> usize {
        self.nodes_per_component
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// Largest gap between consecutive nodes of any component.
    pub fn max_spacing(&self) -> f64 {
        let n = self.nodes_per_component;
        let mut worst = 0.0f64;
        for comp in 0..self.n_components {
            let slice = &self.nodes[comp * n..(comp + 1) * n];
            for j in 0..n {
                let next = slice[(j + 1) % n].zeta;
                worst = worst.max((next - slice[j].zeta).norm());
            }
        }
        worst
    }
}

/// Discretize `∮ . dζ` over every component boundary with `nodes_per_component`
/// equispaced parameter nodes (trapezoid rule; spectrally accurate here).
pub fn boundary_quadrature(
    domain: &Domain,
    nodes_per_component: usize,
) -> Result<BoundaryQuadrature, GeometryError> {
    if nodes_per_component < 16 {
        return Err(GeometryError::TooFewNodes(nodes_per_component));
    }
    let n = nodes_per_component;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut nodes = Vec::with_capacity(domain.len() * n);
    for (k, comp) in domain.components().iter().enumerate() {
        for j in 0..n {
            let t = step * j as f64;
            nodes.push(QuadratureNode {
                zeta: comp.boundary_point(t),
                weight: comp.boundary_derivative(t) * step,
                component: k,
            });
        }
    }
    Ok(BoundaryQuadrature {
        nodes,
        nodes_per_component: n,
        n_components: domain.len(),
    })
}

/// Supremum of `|f|` over the domain boundary, estimated by sampling each
/// component boundary at `samples_per_component` equispaced parameters. By the
/// maximum principle this is the sup over the closed domain.
pub fn sup_norm(
    f: &PiecewiseHolo,
    domain: &Domain,
    samples_per_component: usize,
) -> Result<f64, GeometryError> {
    if samples_per_component < 16 {
        return Err(GeometryError::TooFewSamples(samples_per_component));
    }
    funcspace::validate(f, domain)?;
    let mut best = 0.0f64;
    for (k, comp) in domain.components().iter().enumerate() {
        let center = comp.center();
        for j in 0..samples_per_component {
            let t = 2.0 * std::f64::consts::PI * j as f64 / samples_per_component as f64;
            let z = comp.boundary_point(t);
            let v = f.eval_on_component(k, center, z);
            best = best.max(v.norm());
        }
    }
    Ok(best)
}

/// `sup_norm` with the default sample count.
pub fn sup_norm_default(f: &PiecewiseHolo, domain: &Domain) -> Result<f64, GeometryError> {
    sup_norm(f, domain, DEFAULT_SUP_SAMPLES)
}
