//! Command-line driver around `specset-core`.
//!
//! Exit codes: 0 success, 2 input/output or validation failure, 3 a numeric
//! gate failed (hypotheses violated, sharp ratio missed), 4 the quadrature
//! failed its calibration gate (domain and spectrum geometrically
//! incompatible). Output files are written atomically: a partial file is
//! never left behind, and gate failures still produce the full report.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use specset_core::calculus::{self, CalculusContext, CalculusError};
use specset_core::json::{DomainJson, FunctionJson, MatrixJson, OptResultJson};
use specset_core::lemma::{self, LemmaError, LemmaReport};
use specset_core::linalg::CMatrix;
use specset_core::numrange;
use specset_core::optimize::{self, FamilyConfig, OptimizeError, SearchConfig};
use specset_core::{Domain, PiecewiseHolo};

const EXIT_INPUT: u8 = 2;
const EXIT_GATE: u8 = 3;
const EXIT_CALIBRATION: u8 = 4;

/// Tolerance on the reproduced sharp ratio `1 + √2`.
const SHARPNESS_GATE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "specset",
    version,
    about = "Numerical range, contour functional calculus and spectral-set constants \
             for small dense complex operators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the numerical-range boundary of a matrix as CSV
    Numrange {
        /// Matrix file (JSON, rows of [re, im] pairs)
        #[arg(long)]
        matrix: PathBuf,
        /// Number of support directions to sweep
        #[arg(long, default_value_t = 720)]
        angles: usize,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the sharp two-disk instance end to end
    Sharpness {
        /// Quadrature nodes per boundary component
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check both hypotheses and the norm ratio for (T, domain, f, g)
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        /// Domain file (JSON, tagged disk/ellipse components)
        #[arg(long)]
        domain: PathBuf,
        /// Function file for f (JSON, tagged pieces)
        #[arg(long)]
        f: PathBuf,
        /// Function file for g, or the literal `auto-cauchy` to realise g as
        /// the polynomial Cauchy transform of f (single-disk domains only)
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        /// Taylor degree used by `auto-cauchy`
        #[arg(long, default_value_t = 8)]
        cauchy_degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the spectral-set constants ledger for a domain
    Bounds {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the worst norm ratio over piecewise polynomials
    Optimize {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        /// Polynomial degree per component
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Half-width of the coefficient box
        #[arg(long, default_value_t = 4.0)]
        coeff_box: f64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_evals: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ratio search over a random matrix ensemble
    Sweep {
        /// Matrix size
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn gate(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_GATE,
            message: message.into(),
        }
    }

    fn calibration(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CALIBRATION,
            message: message.into(),
        }
    }
}

/// Calibration-class calculus errors exit 4, everything else is an input
/// problem.
fn calculus_failure(e: CalculusError) -> Failure {
    match e {
        CalculusError::Uncalibrated { .. } | CalculusError::NodeOnSpectrum { .. } => {
            Failure::calibration(e.to_string())
        }
        other => Failure::input(other.to_string()),
    }
}

fn lemma_failure(e: LemmaError) -> Failure {
    match e {
        LemmaError::Calculus(inner) => calculus_failure(inner),
        other => Failure::input(other.to_string()),
    }
}

fn optimize_failure(e: OptimizeError) -> Failure {
    match e {
        OptimizeError::NotCalibrated { .. } => Failure::calibration(e.to_string()),
        OptimizeError::Calculus(inner) => calculus_failure(inner),
        other => Failure::input(other.to_string()),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::input(format!("cannot read {what} file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::input(format!("cannot parse {what} file {}: {e}", path.display()))
    })
}

fn read_matrix(path: &Path) -> Result<CMatrix, Failure> {
    let json: MatrixJson = read_json(path, "matrix")?;
    json.to_matrix()
        .map_err(|e| Failure::input(format!("bad matrix in {}: {e}", path.display())))
}

fn read_domain(path: &Path) -> Result<Domain, Failure> {
    let json: DomainJson = read_json(path, "domain")?;
    json.to_domain()
        .map_err(|e| Failure::input(format!("bad domain in {}: {e}", path.display())))
}

fn read_function(path: &Path) -> Result<PiecewiseHolo, Failure> {
    let json: FunctionJson = read_json(path, "function")?;
    json.to_function()
        .map_err(|e| Failure::input(format!("bad function in {}: {e}", path.display())))
}

/// Writes to stdout, or atomically to a file: the content lands in a
/// temporary sibling first and is renamed into place.
fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| {
                Failure::input(format!("cannot create temporary file in {}: {e}", dir.display()))
            })?;
            tmp.write_all(content.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write output: {e}")))?;
            tmp.persist(p)
                .map_err(|e| Failure::input(format!("cannot move output into place: {e}")))?;
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

fn build_context(t: CMatrix, domain: Domain, nodes: usize) -> Result<CalculusContext, Failure> {
    CalculusContext::with_nodes(t, domain, nodes).map_err(calculus_failure)
}

fn cmd_numrange(matrix: &Path, angles: usize, out: Option<&Path>) -> Result<(), Failure> {
    let t = read_matrix(matrix)?;
    let boundary = numrange::numerical_range_boundary(&t, angles)
        .map_err(|e| Failure::input(e.to_string()))?;
    let mut csv = String::from("theta,support,re,im\n");
    for s in boundary.samples() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            s.theta, s.support, s.point.re, s.point.im
        ));
    }
    write_output(out, &csv)
}

fn cmd_sharpness(nodes: usize, out: Option<&Path>) -> Result<(), Failure> {
    let domain = lemma::extremal_domain();
    let h = lemma::extremal_sign_flip();
    let g = lemma::reflected_companion(&h, &domain).map_err(lemma_failure)?;
    let ctx = build_context(lemma::extremal_matrix(), domain, nodes)?;
    let report = lemma::verify_conditions(&ctx, &h, &g).map_err(lemma_failure)?;
    write_output(out, &to_pretty_json(&report))?;
    let sharp = 1.0 + std::f64::consts::SQRT_2;
    if (report.ratio - sharp).abs() > SHARPNESS_GATE {
        return Err(Failure::gate(format!(
            "sharp ratio missed: got {}, want {} within {}",
            report.ratio, sharp, SHARPNESS_GATE
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput {
    calibrated: bool,
    res_identity: f64,
    res_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conclusion_holds: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    matrix: &Path,
    domain: &Path,
    f: &Path,
    g: &str,
    nodes: usize,
    cauchy_degree: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let t = read_matrix(matrix)?;
    let domain = read_domain(domain)?;
    let f = read_function(f)?;
    let ctx = build_context(t, domain, nodes)?;
    let (res_identity, res_t) = ctx.calibrate();
    if !ctx.is_calibrated() {
        let output = VerifyOutput {
            calibrated: false,
            res_identity,
            res_t,
            report: None,
            conclusion_holds: None,
        };
        write_output(out, &to_pretty_json(&output))?;
        return Err(Failure::calibration(format!(
            "quadrature failed calibration: residuals ({res_identity:.3e}, {res_t:.3e})"
        )));
    }
    let g = if g == "auto-cauchy" {
        calculus::cauchy_transform_polynomial(&f, ctx.domain(), ctx.quadrature(), cauchy_degree)
            .map_err(calculus_failure)?
    } else {
        read_function(Path::new(g))?
    };
    let report = lemma::verify_conditions(&ctx, &f, &g).map_err(lemma_failure)?;
    let conditions_ok = report.cond1_ok && report.cond2_ok;
    let output = VerifyOutput {
        calibrated: true,
        res_identity,
        res_t,
        conclusion_holds: Some(report.conclusion_holds()),
        report: Some(report),
    };
    write_output(out, &to_pretty_json(&output))?;
    if !conditions_ok {
        return Err(Failure::gate(
            "hypotheses not satisfied; see the written report".to_string(),
        ));
    }
    Ok(())
}

fn cmd_bounds(domain: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let domain = read_domain(domain)?;
    let ledger =
        lemma::ConstantLedger::for_domain(&domain).map_err(|e| Failure::input(e.to_string()))?;
    write_output(out, &to_pretty_json(&ledger))
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    matrix: &Path,
    domain: &Path,
    degree: usize,
    coeff_box: f64,
    restarts: usize,
    max_evals: usize,
    seed: u64,
    nodes: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let t = read_matrix(matrix)?;
    let domain = read_domain(domain)?;
    let ctx = build_context(t, domain, nodes)?;
    let family = FamilyConfig {
        degree_per_component: degree,
        coefficient_box: coeff_box,
    };
    let search = SearchConfig {
        restarts,
        max_evals_per_restart: max_evals,
        seed,
        shrink_tolerance: 1e-9,
    };
    let result = optimize::estimate_constant(&ctx, &family, &search).map_err(optimize_failure)?;
    write_output(out, &to_pretty_json(&OptResultJson::from_result(&result)))
}

fn cmd_sweep(
    n: usize,
    trials: usize,
    seed: u64,
    degree: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let family = FamilyConfig {
        degree_per_component: degree,
        coefficient_box: 4.0,
    };
    let summary =
        optimize::random_ensemble_sweep(n, trials, seed, &family).map_err(optimize_failure)?;
    write_output(out, &to_pretty_json(&summary))
}

fn init_threads() {
    if let Ok(v) = std::env::var("SPECSET_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Numrange {
            matrix,
            angles,
            out,
        } => cmd_numrange(&matrix, angles, out.as_deref()),
        Cmd::Sharpness { nodes, out } => cmd_sharpness(nodes, out.as_deref()),
        Cmd::Verify {
            matrix,
            domain,
            f,
            g,
            nodes,
            cauchy_degree,
            out,
        } => cmd_verify(
            &matrix,
            &domain,
            &f,
            &g,
            nodes,
            cauchy_degree,
            out.as_deref(),
        ),
        Cmd::Bounds { domain, out } => cmd_bounds(&domain, out.as_deref()),
        Cmd::Optimize {
            matrix,
            domain,
            degree,
            coeff_box,
            restarts,
            max_evals,
            seed,
            nodes,
            out,
        } => cmd_optimize(
            &matrix,
            &domain,
            degree,
            coeff_box,
            restarts,
            max_evals,
            seed,
            nodes,
            out.as_deref(),
        ),
        Cmd::Sweep {
            n,
            trials,
            seed,
            degree,
            out,
        } => cmd_sweep(n, trials, seed, degree, out.as_deref()),
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
