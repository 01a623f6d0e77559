//! The nonlinear matrix equation `X = P0 − P1ᵀX⁻¹P1`: residual, fixed-point
//! and Newton solvers, factor extraction, accuracy metrics and the
//! equivalent reformulations of the equation.

use serde::{Deserialize, Serialize};

use crate::densecore::{
    cholesky_default, default_pivot_tol, kron, norm_2, solve_linear, solve_lower, spectral_radius, unvec,
    vec_of, LinalgError, Ldlt, Matrix, Scalar, SYMMETRY_RTOL,
};
use crate::densecore::{cholesky, scaled_tol};
use crate::matpoly::{MatLaurentPoly, MatPolyError};
use crate::DenseMatrix;

/// Default residual tolerance relative to `‖P0‖₂` (for `f64`).
pub const TOL_RESIDUAL_RTOL: f64 = 1e-13;
/// Default iteration cap of the fixed-point solver.
pub const FPI_MAX_ITER: usize = 1_000_000;
/// Default iteration cap of the Newton solver.
pub const NEWTON_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NmeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("P0 is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite: pivot {pivot_index} = {pivot_value:e}")]
    NotPositiveDefinite { pivot_index: usize, pivot_value: f64 },
    #[error("iterate is singular")]
    SingularIterate,
    #[error("Newton system is numerically singular")]
    SingularJacobian,
    #[error(transparent)]
    Linalg(LinalgError),
    #[error(transparent)]
    MatPoly(#[from] MatPolyError),
}

impl From<LinalgError> for NmeError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite { pivot_index, pivot_value } => {
                NmeError::NotPositiveDefinite { pivot_index, pivot_value }
            }
            LinalgError::NotSymmetric { asymmetry } => NmeError::NotSymmetric { asymmetry },
            other => NmeError::Linalg(other),
        }
    }
}

/// The pair `(P0, P1)` of a degree-one (possibly block-embedded) problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NmeProblem<T> {
    pub p0: Matrix<T>,
    pub p1: Matrix<T>,
    pub label: String,
}

impl<T: Scalar> NmeProblem<T> {
    /// Validates shapes, symmetry of `P0` and its positive definiteness.
    pub fn new(p0: Matrix<T>, p1: Matrix<T>, label: impl Into<String>) -> Result<Self, NmeError> {
        if !p0.is_square() || p0.shape() != p1.shape() {
            return Err(NmeError::DimensionMismatch(format!(
                "P0 is {}x{}, P1 is {}x{}",
                p0.rows(),
                p0.cols(),
                p1.rows(),
                p1.cols()
            )));
        }
        let asym = p0.asymmetry();
        if asym > scaled_tol::<T>(SYMMETRY_RTOL) * p0.norm_fro() && !(T::is_exact() && asym == 0.0) {
            return Err(NmeError::NotSymmetric { asymmetry: asym });
        }
        let p0 = if T::is_exact() { p0 } else { p0.symmetrize() };
        Ldlt::factor(&p0, default_pivot_tol(&p0))?;
        Ok(Self { p0, p1, label: label.into() })
    }

    /// Block-embedded problem of a para-Hermitian polynomial.
    pub fn from_poly(p: &MatLaurentPoly<T>, label: impl Into<String>) -> Result<Self, NmeError> {
        let (p0, p1) = p.block_embed()?;
        Self::new(p0, p1, label)
    }

    pub fn dim(&self) -> usize {
        self.p0.rows()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> NmeProblem<U> {
        NmeProblem { p0: self.p0.map(&f), p1: self.p1.map(&f), label: self.label.clone() }
    }

    pub fn to_f64(&self) -> NmeProblem<f64> {
        self.map(|v| v.to_f64())
    }

    fn p0_norm2(&self) -> f64 {
        norm_2(&self.p0.to_f64()).unwrap_or_else(|_| self.p0.norm_fro())
    }
}

/// Which iterates are written to the trace. The final iterate is always kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceSampling {
    All,
    Every(usize),
    /// About `per_decade` records per decade of `n`.
    LogSpaced { per_decade: usize },
}

impl TraceSampling {
    pub fn includes(&self, n: usize) -> bool {
        match *self {
            TraceSampling::All => true,
            TraceSampling::Every(k) => n % k.max(1) == 0,
            TraceSampling::LogSpaced { per_decade } => {
                if n <= 1 {
                    return true;
                }
                let slot = |v: usize| (per_decade.max(1) as f64 * (v as f64).log10()).floor() as i64;
                slot(n) > slot(n - 1)
            }
        }
    }
}

/// Stopping rules and measurement options.
///
/// `None` tolerances select the defaults `1e-13·‖P0‖₂` (residual) and
/// `ε·‖P0‖₂` (step), scaled to the precision of `T`. Zero disables a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub tol_residual: Option<f64>,
    pub tol_step: Option<f64>,
    /// `None` selects the solver's own cap.
    pub max_iter: Option<usize>,
    pub record_trace: bool,
    pub sampling: TraceSampling,
    pub reference_h0: Option<Matrix<T>>,
    pub reference_x: Option<Matrix<T>>,
}

impl<T> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tol_residual: None,
            tol_step: None,
            max_iter: None,
            record_trace: true,
            sampling: TraceSampling::All,
            reference_h0: None,
            reference_x: None,
        }
    }
}

impl<T> SolverConfig<T> {
    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = Some(n);
        self
    }

    pub fn with_tolerances(mut self, residual: f64, step: f64) -> Self {
        self.tol_residual = Some(residual);
        self.tol_step = Some(step);
        self
    }

    pub fn with_reference(mut self, h0: Option<Matrix<T>>, x: Option<Matrix<T>>) -> Self {
        self.reference_h0 = h0;
        self.reference_x = x;
        self
    }

    pub fn with_sampling(mut self, s: TraceSampling) -> Self {
        self.sampling = s;
        self
    }
}

/// Metrics of one iterate `X⁽ⁿ⁾`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub n: usize,
    /// `‖P0 − H0H0ᵀ − H1H1ᵀ‖₂`
    pub eps_p: f64,
    /// `‖H0 − H0_ref‖₂`
    pub eps_h: Option<f64>,
    /// `‖X − X_ref‖₂`
    pub eps_x: Option<f64>,
    /// `‖X⁽ⁿ⁾ − X⁽ⁿ⁻¹⁾‖_F`, zero at `n = 0`
    pub step_norm: f64,
    pub min_pivot: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
}

impl IterationTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// `(n, eps_H)` pairs.
    pub fn eps_h_points(&self) -> Vec<(usize, f64)> {
        self.records.iter().filter_map(|r| r.eps_h.map(|e| (r.n, e))).collect()
    }

    /// `(n, eps_X)` pairs.
    pub fn eps_x_points(&self) -> Vec<(usize, f64)> {
        self.records.iter().filter_map(|r| r.eps_x.map(|e| (r.n, e))).collect()
    }

    pub fn best_eps_h(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.eps_h).reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
    Stalled,
    /// The iterate at `iteration` lost positive definiteness; the result
    /// holds the last positive definite iterate.
    IndefiniteBreakdown { iteration: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorResult<T> {
    pub x: Matrix<T>,
    /// `None` when a Cholesky pivot has no square root in `T`.
    pub h0: Option<Matrix<T>>,
    pub h1: Option<Matrix<T>>,
    pub trace: IterationTrace,
    pub status: Status,
    /// Index of the returned iterate.
    pub iterations: usize,
    pub final_record: TraceRecord,
}

impl<T> FactorResult<T> {
    pub fn factors(&self) -> Option<(&Matrix<T>, &Matrix<T>)> {
        Some((self.h0.as_ref()?, self.h1.as_ref()?))
    }
}

/// `X − P0 + P1ᵀX⁻¹P1`, symmetrized.
pub fn residual_f<T: Scalar>(x: &Matrix<T>, prob: &NmeProblem<T>) -> Result<Matrix<T>, NmeError> {
    let y = solve_linear(x, &prob.p1).map_err(|_| NmeError::SingularIterate)?;
    Ok((&(x - &prob.p0) + &prob.p1.transpose_mul(&y)).symmetrize())
}

/// One Bauer step `P0 − P1ᵀX⁻¹P1`, symmetrized.
pub fn fpi_step<T: Scalar>(x: &Matrix<T>, prob: &NmeProblem<T>) -> Result<Matrix<T>, NmeError> {
    let y = solve_linear(x, &prob.p1).map_err(|_| NmeError::SingularIterate)?;
    Ok((&prob.p0 - &prob.p1.transpose_mul(&y)).symmetrize())
}

/// Newton correction from `Y = X⁻¹P1` and `f = f(X)`: solves
/// `(I − K⊗K)·vec(ΔX) = −vec(f)` with `K = P1ᵀX⁻¹ = Yᵀ`.
fn newton_delta<T: Scalar>(y: &Matrix<T>, f: &Matrix<T>) -> Result<Matrix<T>, NmeError> {
    let d = f.rows();
    if f.as_slice().iter().all(num_traits::Zero::is_zero) {
        return Ok(Matrix::zeros(d, d));
    }
    let k = y.transpose();
    let j = &Matrix::identity(d * d) - &kron(&k, &k);
    let rhs = -&vec_of(f);
    let dv = solve_linear(&j, &rhs).map_err(|_| NmeError::SingularJacobian)?;
    Ok(unvec(&dv, d, d)?)
}

/// One Newton step; returns the next iterate and `‖ΔX‖_F`.
pub fn newton_step<T: Scalar>(x: &Matrix<T>, prob: &NmeProblem<T>) -> Result<(Matrix<T>, f64), NmeError> {
    let y = solve_linear(x, &prob.p1).map_err(|_| NmeError::SingularIterate)?;
    let f = (&(x - &prob.p0) + &prob.p1.transpose_mul(&y)).symmetrize();
    let delta = newton_delta(&y, &f)?;
    Ok(((x + &delta).symmetrize(), delta.norm_fro()))
}

/// `H0 = chol(X)` and `H1 = P1ᵀH0⁻ᵀ`, so that `H1·H0ᵀ = P1ᵀ`.
pub fn extract_factors<T: Scalar>(
    x: &Matrix<T>,
    prob: &NmeProblem<T>,
) -> Result<(Matrix<T>, Matrix<T>), NmeError> {
    let h0 = cholesky_default(x)?;
    let h1 = solve_lower(&h0, &prob.p1)?.transpose();
    Ok((h0, h1))
}

fn norm2_of<T: Scalar>(a: &Matrix<T>) -> f64 {
    let af = a.to_f64();
    norm_2(&af).unwrap_or_else(|_| af.norm_fro())
}

/// `‖P0 − H0H0ᵀ − H1H1ᵀ‖₂`.
pub fn metric_eps_p<T: Scalar>(h0: &Matrix<T>, h1: &Matrix<T>, prob: &NmeProblem<T>) -> f64 {
    norm2_of(&(&(&prob.p0 - &h0.mul_transpose(h0)) - &h1.mul_transpose(h1)))
}

/// `‖H0 − H0_ref‖₂`.
pub fn metric_eps_h<T: Scalar>(h0: &Matrix<T>, reference: &Matrix<T>) -> f64 {
    norm2_of(&(h0 - reference))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Method {
    Fpi,
    Newton,
}

/// State of one positive definite iterate.
struct Iterate<T> {
    x: Matrix<T>,
    ldlt: Ldlt<T>,
    y: Matrix<T>,
    f: Matrix<T>,
}

impl<T: Scalar> Iterate<T> {
    fn new(x: Matrix<T>, prob: &NmeProblem<T>) -> Result<Self, NmeError> {
        let ldlt = Ldlt::factor(&x, default_pivot_tol(&x))?;
        let y = ldlt.solve(&prob.p1);
        let f = (&(&x - &prob.p0) + &prob.p1.transpose_mul(&y)).symmetrize();
        Ok(Self { x, ldlt, y, f })
    }

    fn factors(&self, prob: &NmeProblem<T>) -> Option<(Matrix<T>, Matrix<T>)> {
        let h0 = self.ldlt.cholesky_factor()?;
        let h1 = solve_lower(&h0, &prob.p1).ok()?.transpose();
        Some((h0, h1))
    }

    fn record(
        &self,
        n: usize,
        step_norm: f64,
        prob: &NmeProblem<T>,
        cfg: &SolverConfig<T>,
    ) -> (TraceRecord, Option<(Matrix<T>, Matrix<T>)>) {
        let factors = self.factors(prob);
        let eps_p = match &factors {
            Some((h0, h1)) => metric_eps_p(h0, h1, prob),
            None => norm2_of(&self.f),
        };
        let eps_h = match (&factors, &cfg.reference_h0) {
            (Some((h0, _)), Some(r)) => Some(metric_eps_h(h0, r)),
            _ => None,
        };
        let eps_x = cfg.reference_x.as_ref().map(|r| norm2_of(&(&self.x - r)));
        let rec = TraceRecord { n, eps_p, eps_h, eps_x, step_norm, min_pivot: self.ldlt.min_pivot() };
        (rec, factors)
    }
}

fn solve<T: Scalar>(
    prob: &NmeProblem<T>,
    cfg: &SolverConfig<T>,
    method: Method,
) -> Result<FactorResult<T>, NmeError> {
    let p0n = prob.p0_norm2();
    let tol_res = cfg.tol_residual.unwrap_or(scaled_tol::<T>(TOL_RESIDUAL_RTOL) * p0n);
    let tol_step = cfg.tol_step.unwrap_or(scaled_tol::<T>(f64::EPSILON) * p0n);
    let max_iter = cfg.max_iter.unwrap_or(match method {
        Method::Fpi => FPI_MAX_ITER,
        Method::Newton => NEWTON_MAX_ITER,
    });
    let proxy_gate = 2.0 * (prob.dim() as f64).sqrt() * tol_res;

    let mut it = Iterate::new(prob.p0.clone(), prob)?;
    let mut trace = IterationTrace::default();
    let mut step_norm = 0.0;
    let mut n = 0usize;
    let status = loop {
        let fro = it.f.norm_fro();
        let mut pending: Option<(TraceRecord, Option<(Matrix<T>, Matrix<T>)>)> = None;
        let converged = if fro <= proxy_gate {
            let (rec, fac) = it.record(n, step_norm, prob, cfg);
            let ok = rec.eps_p <= tol_res;
            pending = Some((rec, fac));
            ok
        } else {
            false
        };
        let stalled = n >= 1 && step_norm <= tol_step;
        let last = converged || stalled || n >= max_iter;
        if cfg.record_trace && !last && cfg.sampling.includes(n) {
            let rec = pending.as_ref().map(|p| p.0).unwrap_or_else(|| it.record(n, step_norm, prob, cfg).0);
            trace.records.push(rec);
        }
        if last {
            let status = if converged {
                Status::Converged
            } else if stalled {
                Status::Stalled
            } else {
                Status::MaxIterations
            };
            return Ok(finish(it, n, step_norm, status, trace, pending, prob, cfg));
        }
        let next_x = match method {
            Method::Fpi => (&prob.p0 - &prob.p1.transpose_mul(&it.y)).symmetrize(),
            Method::Newton => match newton_delta(&it.y, &it.f) {
                Ok(delta) => (&it.x + &delta).symmetrize(),
                Err(e) if n == 0 => return Err(e),
                Err(_) => break Status::Stalled,
            },
        };
        let next_step = (&next_x - &it.x).norm_fro();
        match Iterate::new(next_x, prob) {
            Ok(next) => {
                it = next;
                step_norm = next_step;
                n += 1;
            }
            Err(NmeError::NotPositiveDefinite { .. }) => {
                break Status::IndefiniteBreakdown { iteration: n + 1 };
            }
            Err(e) => return Err(e),
        }
    };
    Ok(finish(it, n, step_norm, status, trace, None, prob, cfg))
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    it: Iterate<T>,
    n: usize,
    step_norm: f64,
    status: Status,
    mut trace: IterationTrace,
    pending: Option<(TraceRecord, Option<(Matrix<T>, Matrix<T>)>)>,
    prob: &NmeProblem<T>,
    cfg: &SolverConfig<T>,
) -> FactorResult<T> {
    let (rec, factors) = pending.unwrap_or_else(|| it.record(n, step_norm, prob, cfg));
    if cfg.record_trace && trace.last().map_or(true, |r| r.n < n) {
        trace.records.push(rec);
    }
    let (h0, h1) = match factors {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    FactorResult { x: it.x, h0, h1, trace, status, iterations: n, final_record: rec }
}

/// Fixed-point (Bauer) iteration from `X⁽⁰⁾ = P0`.
pub fn fpi_solve<T: Scalar>(prob: &NmeProblem<T>, cfg: &SolverConfig<T>) -> Result<FactorResult<T>, NmeError> {
    solve(prob, cfg, Method::Fpi)
}

/// Newton's method with the dense Kronecker system, from `X⁽⁰⁾ = P0`.
pub fn newton_solve<T: Scalar>(
    prob: &NmeProblem<T>,
    cfg: &SolverConfig<T>,
) -> Result<FactorResult<T>, NmeError> {
    solve(prob, cfg, Method::Newton)
}

/// Last block row `(H1, H0)` of the Cholesky factor of the `blocks`-block
/// Toeplitz matrix with diagonal `P0`, superdiagonal `P1` and subdiagonal
/// `P1ᵀ`. With `n = blocks − 1`, `H0 = chol(X⁽ⁿ⁾)` and
/// `H1 = P1ᵀ·chol(X⁽ⁿ⁻¹⁾)⁻ᵀ`, i.e. the factors of fixed-point iterates `n`
/// and `n − 1` respectively.
pub fn bauer_toeplitz_factors<T: Scalar>(
    prob: &NmeProblem<T>,
    blocks: usize,
) -> Result<(Matrix<T>, Matrix<T>), NmeError> {
    let d = prob.dim();
    let n = blocks.max(2);
    let mut t = Matrix::zeros(n * d, n * d);
    let p1t = prob.p1.transpose();
    for b in 0..n {
        t.set_block(b * d, b * d, &prob.p0);
        if b + 1 < n {
            t.set_block(b * d, (b + 1) * d, &prob.p1);
            t.set_block((b + 1) * d, b * d, &p1t);
        }
    }
    let l = cholesky(&t, default_pivot_tol(&t))?;
    let h0 = l.block((n - 1) * d, (n - 1) * d, d, d);
    let h1 = l.block((n - 1) * d, (n - 2) * d, d, d);
    Ok((h0, h1))
}

/// The normalized form `X̃ = I − ÃᵀX̃⁻¹Ã` with `P0 = MᵀM`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplified<T> {
    /// Upper-triangular `M = chol(P0)ᵀ`.
    pub m: Matrix<T>,
    /// `Ã = M⁻ᵀ·P1·M⁻¹`.
    pub a_tilde: Matrix<T>,
}

impl<T: Scalar> Simplified<T> {
    pub fn problem(&self, label: impl Into<String>) -> Result<NmeProblem<T>, NmeError> {
        NmeProblem::new(Matrix::identity(self.m.rows()), self.a_tilde.clone(), label)
    }

    /// `X̃ = M⁻ᵀXM⁻¹`.
    pub fn to_tilde(&self, x: &Matrix<T>) -> Result<Matrix<T>, NmeError> {
        let l = self.m.transpose();
        let a = solve_lower(&l, x)?;
        Ok(solve_lower(&l, &a.transpose())?.transpose().symmetrize())
    }

    /// `X = MᵀX̃M`.
    pub fn from_tilde(&self, xt: &Matrix<T>) -> Matrix<T> {
        self.m.transpose_mul(&(xt * &self.m)).symmetrize()
    }
}

pub fn to_simplified<T: Scalar>(prob: &NmeProblem<T>) -> Result<Simplified<T>, NmeError> {
    let l = cholesky_default(&prob.p0)?;
    let a = solve_lower(&l, &prob.p1)?;
    let a_tilde = solve_lower(&l, &a.transpose())?.transpose();
    Ok(Simplified { m: l.transpose(), a_tilde })
}

/// Reduction of `X = Q + AᵀX⁻¹A` to the standard form `Y = R − BᵀY⁻¹B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedReduction<T> {
    /// `R = Q + AᵀQ⁻¹A + AQ⁻¹Aᵀ`
    pub r: Matrix<T>,
    /// `B = AQ⁻¹A`
    pub b: Matrix<T>,
    /// `AQ⁻¹Aᵀ`, subtracted from `Y` to recover `X`.
    pub shift: Matrix<T>,
}

impl<T: Scalar> ModifiedReduction<T> {
    pub fn recover(&self, y: &Matrix<T>) -> Matrix<T> {
        (y - &self.shift).symmetrize()
    }

    pub fn problem(&self, label: impl Into<String>) -> Result<NmeProblem<T>, NmeError> {
        NmeProblem::new(self.r.clone(), self.b.clone(), label)
    }
}

pub fn modified_to_standard<T: Scalar>(q: &Matrix<T>, a: &Matrix<T>) -> Result<ModifiedReduction<T>, NmeError> {
    cholesky_default(q)?;
    let qa = solve_linear(q, a)?;
    let qat = solve_linear(q, &a.transpose())?;
    let b = a * &qa;
    let shift = (a * &qat).symmetrize();
    let r = (&(q + &a.transpose_mul(&qa)) + &shift).symmetrize();
    Ok(ModifiedReduction { r, b, shift })
}

/// Spectral-radius conditions for a maximal solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    /// `ρ(P1·P0⁻¹)`, necessary `≤ 1/2`
    pub nec1: f64,
    /// `ρ((P1+P1ᵀ)·P0⁻¹)`, necessary `≤ 1`
    pub nec2: f64,
    /// `ρ((P1−P1ᵀ)·P0⁻¹)`, necessary `≤ 1`
    pub nec3: f64,
    /// `√‖P1ᵀP0⁻¹P1P0⁻¹‖₂`, sufficient `≤ 1/2`
    pub sufficient: f64,
    pub nec_ok: bool,
    pub suff_ok: bool,
}

/// Relative slack on the bounds so that equality cases pass.
const EXISTENCE_SLACK: f64 = 1e-12;

pub fn existence_conditions(prob: &NmeProblem<f64>) -> Result<ExistenceReport, NmeError> {
    cholesky_default(&prob.p0)?;
    let p0 = &prob.p0;
    let p1 = &prob.p1;
    // M·P0⁻¹ = (P0⁻¹·Mᵀ)ᵀ by symmetry of P0
    let right = |m: &DenseMatrix| -> Result<DenseMatrix, NmeError> { Ok(solve_linear(p0, &m.transpose())?.transpose()) };
    let nec1 = spectral_radius(&right(p1)?)?;
    let nec2 = spectral_radius(&right(&(p1 + &p1.transpose()))?)?;
    let nec3 = spectral_radius(&right(&(p1 - &p1.transpose()))?)?;
    let sufficient = norm_2(&(&p1.transpose() * &solve_linear(p0, &right(p1)?)?))?.sqrt();
    let ok = |v: f64, bound: f64| v <= bound * (1.0 + EXISTENCE_SLACK);
    Ok(ExistenceReport {
        nec1,
        nec2,
        nec3,
        sufficient,
        nec_ok: ok(nec1, 0.5) && ok(nec2, 1.0) && ok(nec3, 1.0),
        suff_ok: ok(sufficient, 0.5),
    })
}
