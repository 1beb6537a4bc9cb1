//! Derivative-free search for the worst norm ratio `‖f(T)‖ / sup_Ω |f|`.
//!
//! The ratio of any concrete `f` is a certified lower bound for the
//! spectral-set constant of the pair `(T, Ω)`, so the optimizer only ever
//! produces safe numbers: it searches over piecewise polynomials with a
//! bounded coefficient box and reports the best ratio it saw together with
//! the function realising it. Restarted Nelder–Mead is used because the
//! objective is cheap, low-dimensional and not differentiable at norm
//! crossings.
//!
//! Everything is deterministic for a fixed seed: each restart and each
//! ensemble trial draws from its own counter-indexed stream, and parallel
//! collection preserves index order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{CalculusContext, CalculusError};
use crate::funcspace::{PieceKind, PiecewiseHolo};
use crate::geometry::{self, Domain, GeometryError};
use crate::linalg::{self, CMatrix, LinalgError};
use crate::numrange::{self, NumrangeError};

/// Stream offset between ensemble trials, so per-trial sub-searches never
/// share a seed with the matrix draws.
const TRIAL_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("context failed calibration: residuals ({res_identity:.3e}, {res_t:.3e})")]
    NotCalibrated { res_identity: f64, res_t: f64 },
    #[error("bad search configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Numrange(#[from] NumrangeError),
}

/// Shape of the search family: one polynomial per component, all
/// coefficients confined to a square box in the complex plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub degree_per_component: usize,
    /// Half-width of the admissible box for each coefficient's real and
    /// imaginary part. The ratio is scale-invariant, so the box only
    /// matters for conditioning, not for the supremum.
    pub coefficient_box: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            degree_per_component: 4,
            coefficient_box: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_evals_per_restart: usize,
    pub seed: u64,
    /// Simplex collapse threshold that triggers the next polish level.
    pub shrink_tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 32,
            max_evals_per_restart: 2000,
            seed: 0,
            shrink_tolerance: 1e-9,
        }
    }
}

/// Best ratio found, the function attaining it, and the work spent.
#[derive(Debug, Clone)]
pub struct OptResult {
    pub k_lower: f64,
    pub best: PiecewiseHolo,
    pub evals: usize,
    pub seed: u64,
}

/// Maximises `‖f(T)‖ / sup|f|` over the family on a calibrated context.
pub fn estimate_constant(
    ctx: &CalculusContext,
    family: &FamilyConfig,
    search: &SearchConfig,
) -> Result<OptResult, OptimizeError> {
    if !ctx.is_calibrated() {
        let (res_identity, res_t) = ctx.calibrate();
        return Err(OptimizeError::NotCalibrated {
            res_identity,
            res_t,
        });
    }
    if search.restarts == 0 || search.max_evals_per_restart == 0 {
        return Err(OptimizeError::BadConfig(
            "restarts and max_evals_per_restart must be positive".into(),
        ));
    }
    if !(family.coefficient_box > 0.0) || !(search.shrink_tolerance > 0.0) {
        return Err(OptimizeError::BadConfig(
            "coefficient_box and shrink_tolerance must be positive".into(),
        ));
    }

    let ncomp = ctx.domain().len();
    let coeffs_per = family.degree_per_component + 1;
    let dim = 2 * coeffs_per * ncomp;
    let boxw = family.coefficient_box;

    let decode = |x: &[f64]| -> PiecewiseHolo {
        let kinds = (0..ncomp)
            .map(|k| {
                let coeffs = (0..coeffs_per)
                    .map(|d| {
                        let at = 2 * (coeffs_per * k + d);
                        Complex64::new(x[at].clamp(-boxw, boxw), x[at + 1].clamp(-boxw, boxw))
                    })
                    .collect();
                PieceKind::Polynomial(coeffs)
            })
            .collect();
        PiecewiseHolo::from_kinds(kinds)
    };
    let ratio_of = |x: &[f64]| -> f64 {
        let f = decode(x);
        let sup = geometry::sup_norm_default(&f, ctx.domain())
            .expect("bounded polynomial pieces are valid on their domain");
        if sup == 0.0 {
            return 0.0;
        }
        let ft = ctx
            .func_of_matrix(&f)
            .expect("calibrated context accepts polynomial pieces");
        linalg::operator_norm(&ft) / sup
    };
    let cost = |x: &[f64]| -> f64 { -ratio_of(x) };

    let runs: Vec<(f64, Vec<f64>, usize)> = (0..search.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
            rng.set_stream(r as u64 + 1);
            let x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-boxw..=boxw)).collect();
            restart_search(
                &cost,
                x0,
                boxw / 4.0,
                search.max_evals_per_restart,
                search.shrink_tolerance,
            )
        })
        .collect();

    let mut best_cost = f64::INFINITY;
    let mut best_x: Vec<f64> = vec![0.0; dim];
    let mut evals = 0;
    for (c, x, used) in runs {
        evals += used;
        if c < best_cost {
            best_cost = c;
            best_x = x;
        }
    }
    Ok(OptResult {
        k_lower: -best_cost,
        best: decode(&best_x),
        evals,
        seed: search.seed,
    })
}

/// One restart: a simplex descent from `x0`, then up to two polish rounds
/// restarted at the incumbent with a ten-fold smaller step, all within the
/// evaluation budget.
fn restart_search(
    cost: &(impl Fn(&[f64]) -> f64 + Sync),
    x0: Vec<f64>,
    step0: f64,
    budget: usize,
    tol: f64,
) -> (f64, Vec<f64>, usize) {
    let mut used = 1;
    let mut best_c = cost(&x0);
    let mut best_x = x0;
    let mut step = step0;
    for _level in 0..3 {
        if used >= budget {
            break;
        }
        let (c, x, u) = simplex_descent(cost, best_x.clone(), step, budget - used, tol);
        used += u;
        if c < best_c {
            best_c = c;
            best_x = x;
        }
        step *= 0.1;
    }
    (best_c, best_x, used)
}

/// Plain Nelder–Mead (reflect 1, expand 2, contract 1/2, shrink 1/2) with a
/// stable tie-break so runs are reproducible bit for bit.
fn simplex_descent(
    cost: &(impl Fn(&[f64]) -> f64 + Sync),
    start: Vec<f64>,
    step: f64,
    budget: usize,
    tol: f64,
) -> (f64, Vec<f64>, usize) {
    let d = start.len();
    if budget < d + 2 {
        let c = cost(&start);
        return (c, start, 1);
    }
    let mut pts = vec![start.clone()];
    for i in 0..d {
        let mut p = start.clone();
        p[i] += step;
        pts.push(p);
    }
    let mut costs: Vec<f64> = pts.iter().map(|p| cost(p)).collect();
    let mut used = d + 1;

    loop {
        // Stable sort keeps insertion order on exact ties.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| costs[a].partial_cmp(&costs[b]).expect("finite costs"));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        costs = order.iter().map(|&i| costs[i]).collect();

        let spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= tol || used >= budget {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|j| pts[..d].iter().map(|p| p[j]).sum::<f64>() / d as f64)
            .collect();
        let worst = pts[d].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let cr = cost(&reflect);
        used += 1;

        if cr < costs[0] {
            if used < budget {
                let expand: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| 3.0 * c - 2.0 * w)
                    .collect();
                let ce = cost(&expand);
                used += 1;
                if ce < cr {
                    pts[d] = expand;
                    costs[d] = ce;
                    continue;
                }
            }
            pts[d] = reflect;
            costs[d] = cr;
        } else if cr < costs[d - 1] {
            pts[d] = reflect;
            costs[d] = cr;
        } else {
            let (candidate, base) = if cr < costs[d] {
                let outside: Vec<f64> = centroid
                    .iter()
                    .zip(&reflect)
                    .map(|(c, r)| 0.5 * (c + r))
                    .collect();
                (outside, cr)
            } else {
                let inside: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| 0.5 * (c + w))
                    .collect();
                (inside, costs[d])
            };
            if used >= budget {
                break;
            }
            let cc = cost(&candidate);
            used += 1;
            if cc < base {
                pts[d] = candidate;
                costs[d] = cc;
            } else {
                if used + d > budget {
                    break;
                }
                for i in 1..=d {
                    pts[i] = pts[i]
                        .iter()
                        .zip(&pts[0])
                        .map(|(p, b)| 0.5 * (p + b))
                        .collect();
                    costs[i] = cost(&pts[i]);
                }
                used += d;
            }
        }
    }

    let mut best = 0;
    for i in 1..=d {
        if costs[i] < costs[best] {
            best = i;
        }
    }
    (costs[best], pts[best].clone(), used)
}

/// Per-trial and aggregate results of [`random_ensemble_sweep`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub argmax_trial: usize,
    /// Seed of the sub-search inside the worst trial, for replay.
    pub argmax_seed: u64,
    pub ratios: Vec<f64>,
}

/// Draws `trials` complex Ginibre matrices of size `n` (entries
/// `(N(0,1) + i·N(0,1)) / √(2n)`), wraps each in a disk slightly larger
/// than its numerical range and runs a short ratio search on it. Trial `t`
/// uses stream `t` of the seed, so any single trial can be replayed alone.
pub fn random_ensemble_sweep(
    n: usize,
    trials: usize,
    seed: u64,
    family: &FamilyConfig,
) -> Result<SweepSummary, OptimizeError> {
    if n == 0 || trials == 0 {
        return Err(OptimizeError::BadConfig(
            "matrix size and trial count must be positive".into(),
        ));
    }
    let per_trial: Vec<Result<f64, OptimizeError>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let scale = 1.0 / (2.0 * n as f64).sqrt();
            let entries: Vec<Complex64> = (0..n * n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect();
            let t_mat = CMatrix::new(n, n, entries)?;
            let boundary = numrange::numerical_range_boundary(&t_mat, 720)?;
            let base = numrange::enclosing_disk(&boundary, 0.0)?;
            // Near-normal draws put an eigenvalue essentially on the
            // numerical-range boundary; a margin proportional to the radius
            // keeps the 256-node quadrature calibrated for every draw.
            let margin = numrange::default_margin(&t_mat).max(0.1 * base.radius);
            let domain = Domain::disk(base.center, base.radius + margin)?;
            let ctx = CalculusContext::with_nodes(t_mat, domain, 256)?;
            let sub = SearchConfig {
                restarts: 6,
                max_evals_per_restart: 400,
                seed: seed.wrapping_add((t as u64).wrapping_mul(TRIAL_SEED_STRIDE)),
                shrink_tolerance: 1e-9,
            };
            Ok(estimate_constant(&ctx, family, &sub)?.k_lower)
        })
        .collect();
    let ratios: Vec<f64> = per_trial.into_iter().collect::<Result<_, _>>()?;

    let mut argmax_trial = 0;
    for (i, &r) in ratios.iter().enumerate() {
        if r > ratios[argmax_trial] {
            argmax_trial = i;
        }
    }
    let max_ratio = ratios[argmax_trial];
    let mean_ratio = ratios.iter().sum::<f64>() / trials as f64;
    Ok(SweepSummary {
        n,
        trials,
        seed,
        max_ratio,
        mean_ratio,
        argmax_trial,
        argmax_seed: seed.wrapping_add((argmax_trial as u64).wrapping_mul(TRIAL_SEED_STRIDE)),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lemma;

    const SQ2: f64 = std::f64::consts::SQRT_2;

    fn extremal_ctx() -> CalculusContext {
        CalculusContext::with_nodes(lemma::extremal_matrix(), lemma::extremal_domain(), 256)
            .unwrap()
    }

    fn quick_search(seed: u64) -> SearchConfig {
        SearchConfig {
            restarts: 8,
            max_evals_per_restart: 1500,
            seed,
            shrink_tolerance: 1e-9,
        }
    }

    #[test]
    fn recovers_sharp_constant_with_constants_only() {
        let ctx = extremal_ctx();
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let out = estimate_constant(&ctx, &family, &quick_search(7)).unwrap();
        assert!(
            out.k_lower >= 1.0 + SQ2 - 1e-6,
            "found only {}",
            out.k_lower
        );
        // Lower bound stays a lower bound: the sharp value is also the max.
        assert!(out.k_lower <= 1.0 + SQ2 + 1e-6, "exceeded {}", out.k_lower);
    }

    #[test]
    fn normal_matrix_on_eigenvalue_disks_is_flat() {
        // diag(0,1) on the same two disks: ‖f(T)‖ = max(|f(0)|, |f(1)|)
        // exactly, so every nonzero constant pair scores exactly 1.
        let t = CMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let ctx = CalculusContext::with_nodes(t, lemma::extremal_domain(), 256).unwrap();
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let out = estimate_constant(&ctx, &family, &quick_search(3)).unwrap();
        assert!((out.k_lower - 1.0).abs() <= 1e-9, "ratio {}", out.k_lower);
    }

    #[test]
    fn scaled_nilpotent_approaches_disk_ceiling() {
        // ‖T‖ = 2 on a disk of radius 1.01 around the numerical range:
        // f = z alone already scores 2/1.01.
        let t = CMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let domain = Domain::disk(Complex64::new(0.0, 0.0), 1.01).unwrap();
        let ctx = CalculusContext::with_nodes(t, domain, 256).unwrap();
        let family = FamilyConfig {
            degree_per_component: 1,
            coefficient_box: 4.0,
        };
        let out = estimate_constant(&ctx, &family, &quick_search(11)).unwrap();
        assert!(
            out.k_lower >= 2.0 / 1.01 - 1e-3,
            "found only {}",
            out.k_lower
        );
        assert!(out.k_lower <= 2.0 + 1e-6);
    }

    #[test]
    fn higher_degree_does_not_lose_ground() {
        let ctx = extremal_ctx();
        let deg0 = estimate_constant(
            &ctx,
            &FamilyConfig {
                degree_per_component: 0,
                coefficient_box: 2.0,
            },
            &quick_search(5),
        )
        .unwrap();
        let deg1 = estimate_constant(
            &ctx,
            &FamilyConfig {
                degree_per_component: 1,
                coefficient_box: 2.0,
            },
            &quick_search(5),
        )
        .unwrap();
        assert!(
            deg1.k_lower >= deg0.k_lower - 5e-3,
            "deg0 {} vs deg1 {}",
            deg0.k_lower,
            deg1.k_lower
        );
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let ctx = extremal_ctx();
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let search = SearchConfig {
            restarts: 4,
            max_evals_per_restart: 400,
            seed: 42,
            shrink_tolerance: 1e-9,
        };
        let a = estimate_constant(&ctx, &family, &search).unwrap();
        let b = estimate_constant(&ctx, &family, &search).unwrap();
        assert_eq!(a.k_lower.to_bits(), b.k_lower.to_bits());
        assert_eq!(a.evals, b.evals);
        assert_eq!(a.best.pieces(), b.best.pieces());
    }

    #[test]
    fn reported_ratio_is_recomputable_from_best_f() {
        let ctx = extremal_ctx();
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let out = estimate_constant(&ctx, &family, &quick_search(1)).unwrap();
        let recomputed = lemma::spectral_ratio(&ctx, &out.best).unwrap();
        assert!(
            (recomputed - out.k_lower).abs() <= 1e-12,
            "stored {} vs recomputed {}",
            out.k_lower,
            recomputed
        );
    }

    #[test]
    fn rejects_uncalibrated_context() {
        // Domain far away from the spectrum: quadrature cannot reproduce T.
        let t = lemma::extremal_matrix();
        let domain = Domain::disk(Complex64::new(40.0, 0.0), 1.0).unwrap();
        let ctx = CalculusContext::with_nodes(t, domain, 64).unwrap();
        assert!(!ctx.is_calibrated());
        let err = estimate_constant(&ctx, &FamilyConfig::default(), &SearchConfig::default())
            .unwrap_err();
        assert!(matches!(err, OptimizeError::NotCalibrated { .. }));
    }

    #[test]
    fn rejects_empty_budgets() {
        let ctx = extremal_ctx();
        let bad = SearchConfig {
            restarts: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(
            estimate_constant(&ctx, &FamilyConfig::default(), &bad),
            Err(OptimizeError::BadConfig(_))
        ));
    }

    #[test]
    fn scalar_ensemble_is_always_flat() {
        // For 1×1 matrices every ratio is exactly |f(t)| / sup|f| = 1 at the
        // optimum, and constants attain it.
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let summary = random_ensemble_sweep(1, 4, 99, &family).unwrap();
        assert_eq!(summary.ratios.len(), 4);
        for &r in &summary.ratios {
            assert!((r - 1.0).abs() <= 1e-9, "ratio {r}");
        }
        assert!((summary.mean_ratio - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn small_ensemble_respects_disk_ceiling() {
        let family = FamilyConfig {
            degree_per_component: 2,
            coefficient_box: 4.0,
        };
        let summary = random_ensemble_sweep(2, 3, 2024, &family).unwrap();
        assert!(summary.max_ratio <= 2.0 + 1e-6, "max {}", summary.max_ratio);
        assert!(summary.max_ratio >= 1.0 - 1e-9);
        assert_eq!(summary.ratios[summary.argmax_trial], summary.max_ratio);
    }

    #[test]
    fn sweep_reruns_are_identical() {
        let family = FamilyConfig {
            degree_per_component: 0,
            coefficient_box: 2.0,
        };
        let a = random_ensemble_sweep(2, 2, 5, &family).unwrap();
        let b = random_ensemble_sweep(2, 2, 5, &family).unwrap();
        assert_eq!(a.max_ratio.to_bits(), b.max_ratio.to_bits());
        assert_eq!(a.ratios, b.ratios);
        assert_eq!(a.argmax_trial, b.argmax_trial);
    }
}
