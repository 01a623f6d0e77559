//! Convergence-rate estimation, singularity analysis through the closed-loop
//! matrix and the fixed-point derivative, and the generalized Riccati pencil.

use serde::{Deserialize, Serialize};

use crate::densecore::{eigenvalues, kron, solve_linear, spectral_radius, LinalgError, Matrix};
use crate::nme::{NmeError, NmeProblem};
use crate::{ComplexPair, DenseMatrix};

/// Largest ratio `e⁽ⁿ⁺¹⁾/e⁽ⁿ⁾` still classified as linear.
pub const LINEAR_FACTOR_MAX: f64 = 0.95;
/// Normalized RMS residual a hypothesis must reach to be accepted.
pub const FIT_TOL: f64 = 0.15;
/// Minimum number of post-burn-in samples.
pub const MIN_SAMPLES: usize = 8;
/// Minimum length of the pre-plateau window that is fitted.
pub const MIN_WINDOW: usize = 4;
/// Plateau: relative change below `PLATEAU_RTOL·ε` over `PLATEAU_SPAN` steps.
pub const PLATEAU_RTOL: f64 = 10.0;
pub const PLATEAU_SPAN: usize = 5;
/// Distance from the unit circle counted as "on".
pub const CIRCLE_TOL: f64 = 1e-6;
/// Radius around `+1` used by the chain-length heuristic.
pub const P_CLUSTER_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("need at least {needed} samples after burn-in, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Nme(#[from] NmeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateClass {
    Quadratic,
    Linear { factor: f64 },
    Sublinear { power: f64 },
    Stalled,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub class: RateClass,
    /// First and last iteration index of the fitted window.
    pub window: (usize, usize),
    /// Normalized RMS residual of the chosen fit.
    pub fit_residual: f64,
}

/// Least-squares line `y ≈ a + b·x`; returns `(a, b, rms)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let ss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (a, b, (ss / n).sqrt())
}

fn spread(y: &[f64]) -> f64 {
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    (hi - lo).max(f64::MIN_POSITIVE)
}

/// Length of the prefix that decreases strictly and has not yet plateaued.
pub fn pre_stall_len(e: &[f64]) -> usize {
    let plateau = PLATEAU_RTOL * f64::EPSILON;
    for i in 0..e.len() {
        if !(e[i].is_finite() && e[i] > 0.0) || (i > 0 && e[i] >= e[i - 1]) {
            return i;
        }
        if i + PLATEAU_SPAN < e.len() && (e[i] - e[i + PLATEAU_SPAN]).abs() <= plateau * e[i] {
            return i;
        }
    }
    e.len()
}

/// Error at which convergence stalls: the last (smallest) value of the
/// pre-stall prefix. Lucky dips during the erratic phase that follows are
/// not counted. An error that reaches exactly zero reports zero.
pub fn stall_accuracy(errors: &[f64]) -> Option<f64> {
    match pre_stall_len(errors) {
        0 => None,
        len if errors.get(len) == Some(&0.0) => Some(0.0),
        len => Some(errors[len - 1]),
    }
}

/// [`estimate_rate_points`] with the iteration index equal to the position.
pub fn estimate_rate(errors: &[f64], burn_in: usize) -> Result<RateEstimate, DiagnosticsError> {
    let pts: Vec<(usize, f64)> = errors.iter().copied().enumerate().collect();
    estimate_rate_points(&pts, burn_in)
}

/// Classifies the decay of `(n, e⁽ⁿ⁾)` samples with `n ≥ burn_in`, fitted over
/// the window that ends at the first stall (non-decrease or plateau).
pub fn estimate_rate_points(points: &[(usize, f64)], burn_in: usize) -> Result<RateEstimate, DiagnosticsError> {
    let pts: Vec<(usize, f64)> = points.iter().copied().filter(|p| p.0 >= burn_in).collect();
    if pts.len() < MIN_SAMPLES {
        return Err(DiagnosticsError::InsufficientData { needed: MIN_SAMPLES, got: pts.len() });
    }
    if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(DiagnosticsError::InvalidArgument("iteration indices must increase".into()));
    }
    let e: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let len = pre_stall_len(&e);
    if len < MIN_WINDOW {
        let last = pts[len.saturating_sub(1)].0;
        return Ok(RateEstimate { class: RateClass::Stalled, window: (pts[0].0, last), fit_residual: 0.0 });
    }
    let pts = &pts[..len];
    let window = (pts[0].0, pts[len - 1].0);
    let n: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let scale = spread(&y);

    let mut candidates = Vec::new();
    let (_, slope, rms) = line_fit(&n, &y);
    let factor = slope.exp();
    if factor > 0.0 && factor < LINEAR_FACTOR_MAX {
        candidates.push((RateClass::Linear { factor }, rms / scale));
    }
    let logn: Vec<f64> = n.iter().map(|v| (v + 1.0).ln()).collect();
    let (_, slope, rms) = line_fit(&logn, &y);
    if slope < 0.0 {
        candidates.push((RateClass::Sublinear { power: -slope }, rms / scale));
    }
    // quadratic: y_{i+1} = 2·y_i + c on consecutive iterations
    let consecutive = pts.windows(2).all(|w| w[1].0 == w[0].0 + 1);
    if consecutive {
        let d: Vec<f64> = y.windows(2).map(|w| w[1] - 2.0 * w[0]).collect();
        let c = d.iter().sum::<f64>() / d.len() as f64;
        let rms = (d.iter().map(|v| (v - c).powi(2)).sum::<f64>() / d.len() as f64).sqrt();
        candidates.push((RateClass::Quadratic, rms / spread(&y[1..])));
    }
    let best = candidates.into_iter().min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match best {
        Some((class, r)) if r <= FIT_TOL => RateEstimate { class, window, fit_residual: r },
        Some((_, r)) => RateEstimate { class: RateClass::Inconclusive, window, fit_residual: r },
        None => RateEstimate { class: RateClass::Inconclusive, window, fit_residual: f64::INFINITY },
    })
}

/// Newton's linear factor `2^{-1/p}` for a longest Jordan chain of length `p`.
pub fn expected_newton_factor(p: usize) -> f64 {
    assert!(p >= 1, "chain length must be positive");
    2f64.powf(-1.0 / p as f64)
}

/// Closed-loop matrix `X⁻¹P1`.
pub fn closed_loop(x: &DenseMatrix, p1: &DenseMatrix) -> Result<DenseMatrix, DiagnosticsError> {
    solve_linear(x, p1).map_err(|e| match e {
        LinalgError::SingularSystem { .. } => NmeError::SingularIterate.into(),
        other => other.into(),
    })
}

/// Derivative of `X ↦ P0 − P1ᵀX⁻¹P1` in vec form: `K⊗K` with `K = P1ᵀX⁻¹`.
pub fn fpi_derivative(x: &DenseMatrix, p1: &DenseMatrix) -> Result<DenseMatrix, DiagnosticsError> {
    let k = closed_loop(x, p1)?.transpose();
    Ok(kron(&k, &k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub eigenvalues: Vec<ComplexPair>,
    /// Eigenvalues within the circle tolerance of the unit circle.
    pub unit_eigs: usize,
    pub max_modulus: f64,
    /// Spectral radius of the fixed-point derivative.
    pub derivative_radius: f64,
    /// Eigenvalues within the cluster tolerance of `+1` (advisory).
    pub p_estimate: usize,
    pub is_singular: bool,
}

pub fn classify_singularity(prob: &NmeProblem<f64>, x: &DenseMatrix) -> Result<SingularityReport, DiagnosticsError> {
    classify_singularity_with(prob, x, CIRCLE_TOL, P_CLUSTER_TOL)
}

pub fn classify_singularity_with(
    prob: &NmeProblem<f64>,
    x: &DenseMatrix,
    circle_tol: f64,
    p_cluster_tol: f64,
) -> Result<SingularityReport, DiagnosticsError> {
    let cl = closed_loop(x, &prob.p1)?;
    let eigs = eigenvalues(&cl)?;
    let max_modulus = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unit_eigs = eigs.iter().filter(|z| (z.norm() - 1.0).abs() <= circle_tol).count();
    let p_estimate = eigs.iter().filter(|z| (*z - ComplexPair::new(1.0, 0.0)).norm() <= p_cluster_tol).count();
    let derivative_radius = spectral_radius(&fpi_derivative(x, &prob.p1)?)?;
    Ok(SingularityReport {
        eigenvalues: eigs,
        unit_eigs,
        max_modulus,
        derivative_radius,
        p_estimate,
        is_singular: max_modulus >= 1.0 - circle_tol,
    })
}

/// Pencil `M − λN` of the generalized discrete Riccati equation specialized to
/// `E = B = C = I`, `R = D = 0`, `Q = P0`, `A = P1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilPair {
    pub m: DenseMatrix,
    pub n: DenseMatrix,
}

/// `M = [[0,0,I],[P0,I,−P1ᵀ],[P1,0,0]]`, `N = [[I,0,0],[0,0,0],[0,−I,0]]`.
pub fn gdare_pencil(prob: &NmeProblem<f64>) -> PencilPair {
    let d = prob.dim();
    let eye = Matrix::<f64>::identity(d);
    let mut m = Matrix::zeros(3 * d, 3 * d);
    let mut n = Matrix::zeros(3 * d, 3 * d);
    m.set_block(0, 2 * d, &eye);
    m.set_block(d, 0, &prob.p0);
    m.set_block(d, d, &eye);
    m.set_block(d, 2 * d, &-&prob.p1.transpose());
    m.set_block(2 * d, 0, &prob.p1);
    n.set_block(0, 0, &eye);
    n.set_block(2 * d, d, &-&eye);
    PencilPair { m, n }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CirclePosition {
    Inside,
    On,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PencilPoint {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub position: CirclePosition,
}

/// Overall placement of the closed-loop eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CirclePattern {
    Inside,
    On,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilReport {
    pub points: Vec<PencilPoint>,
    pub pattern: CirclePattern,
}

/// Closed-loop eigenvalues at `x` with their position relative to the unit
/// circle. These are the generalized eigenvalues of [`gdare_pencil`] that
/// belong to the stabilizing solution.
pub fn pencil_unit_circle_report(
    prob: &NmeProblem<f64>,
    x: &DenseMatrix,
    circle_tol: f64,
) -> Result<PencilReport, DiagnosticsError> {
    let eigs = eigenvalues(&closed_loop(x, &prob.p1)?)?;
    let points: Vec<PencilPoint> = eigs
        .iter()
        .map(|z| {
            let modulus = z.norm();
            let position = if (modulus - 1.0).abs() <= circle_tol {
                CirclePosition::On
            } else if modulus < 1.0 {
                CirclePosition::Inside
            } else {
                CirclePosition::Outside
            };
            PencilPoint { re: z.re, im: z.im, modulus, position }
        })
        .collect();
    let all = |p: CirclePosition| points.iter().all(|q| q.position == p);
    let pattern = if all(CirclePosition::Inside) {
        CirclePattern::Inside
    } else if all(CirclePosition::On) {
        CirclePattern::On
    } else {
        CirclePattern::Mixed
    };
    Ok(PencilReport { points, pattern })
}
