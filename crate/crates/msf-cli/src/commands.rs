//! Subcommand implementations.

use std::path::Path;

use msf::corpus::{self, CorpusEntry};
use msf::diagnostics::{
    classify_singularity, estimate_rate_points, gdare_pencil, pencil_unit_circle_report, stall_accuracy, RateClass,
    CIRCLE_TOL,
};
use msf::matpoly::{
    block_embed_factors, block_extract, circle_zeros, MatLaurentPoly, MatrixJson, PolyJson, CIRCLE_TOL as ZERO_CIRCLE_TOL,
    CLUSTER_TOL,
};
use msf::nme::{
    existence_conditions, fpi_solve, newton_solve, IterationTrace, NmeProblem, SolverConfig, Status, TraceRecord,
};
use msf::surd::{exact_scalar_solve, exact_verify, VerifyReport};
use msf::{DenseMatrix, DoubleDouble, Matrix, Scalar, SurdElem, SurdMatrix};
use serde::Deserialize;

use crate::report::{
    write_json, write_trace_csv, AnalyzeReport, PencilOutput, RatesReport, RunReport, ScalarSolutionText,
    SingularitySummary, VerifyOutput,
};
use crate::{
    AnalyzeArgs, CliError, FactorArgs, Method, Outcome, PencilArgs, Precision, RatesArgs, Source, VerifyArgs,
};

/// Relative tolerance of the para-Hermitian check.
const PARA_TOL: f64 = 1e-12;
/// Smallest eigenvalue on the circle still counted as semidefinite.
const PSD_TOL: f64 = 1e-10;

/// A problem read from a file or the corpus, exact when possible.
struct Loaded {
    label: String,
    exact: Option<MatLaurentPoly<SurdElem>>,
    float: MatLaurentPoly<f64>,
    entry: Option<CorpusEntry>,
}

impl Loaded {
    fn r(&self) -> usize {
        self.float.size()
    }

    fn m(&self) -> usize {
        self.float.degree()
    }

    /// Embedded problem in scalar type `T`.
    fn problem<T: Scalar>(&self) -> Result<NmeProblem<T>, CliError> {
        Ok(match &self.exact {
            Some(p) => NmeProblem::from_poly(p, &self.label)?.map(surd_to::<T>),
            None => NmeProblem::from_poly(&self.float, &self.label)?.map(|v| T::from_f64(*v)),
        })
    }

    /// Embedded `(Ĥ0, X)` of the recorded solution.
    fn reference<T: Scalar>(&self) -> Result<Option<(Matrix<T>, Matrix<T>)>, CliError> {
        let Some(e) = &self.entry else { return Ok(None) };
        let Some(x) = &e.x else { return Ok(None) };
        let (h0, _) = e.embedded_factors()?;
        Ok(Some((h0.map(surd_to::<T>), x.map(surd_to::<T>))))
    }
}

fn surd_to<T: Scalar>(v: &SurdElem) -> T {
    v.to_scalar::<T>().unwrap_or_else(|| T::from_f64(v.to_f64()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".to_string(), |s| s.to_string_lossy().into_owned())
}

fn load_entry(id: usize) -> Result<Loaded, CliError> {
    let e = corpus::get(id)?;
    Ok(Loaded { label: e.label.to_string(), float: e.poly.to_f64(), exact: Some(e.poly.clone()), entry: Some(e) })
}

fn load_poly(pj: &PolyJson, label: String) -> Result<Loaded, CliError> {
    let exact = pj.to_surd_poly().ok();
    let float = match &exact {
        Some(p) => p.to_f64(),
        None => pj.to_poly()?,
    };
    Ok(Loaded { label, exact, float, entry: None })
}

fn load(src: &Source) -> Result<Loaded, CliError> {
    match (&src.example, &src.input) {
        (Some(id), _) => load_entry(*id),
        (None, Some(path)) => {
            let pj: PolyJson = serde_json::from_str(&read_text(path)?)?;
            load_poly(&pj, label_of(path))
        }
        (None, None) => Err(CliError::Usage("one of --input or --example is required".into())),
    }
}

/// Solver output converted to double precision.
struct Run {
    x: DenseMatrix,
    factors: Option<(DenseMatrix, DenseMatrix)>,
    trace: IterationTrace,
    status: Status,
    iterations: usize,
    last: TraceRecord,
}

fn solve_at<T: Scalar>(loaded: &Loaded, method: Method, cfg: SolverConfig<T>) -> Result<Run, CliError> {
    let prob = loaded.problem::<T>()?;
    let (h0, x) = loaded.reference::<T>()?.unzip();
    let cfg = cfg.with_reference(h0, x);
    let r = match method {
        Method::Fpi => fpi_solve(&prob, &cfg)?,
        Method::Newton => newton_solve(&prob, &cfg)?,
    };
    Ok(Run {
        x: r.x.to_f64(),
        factors: r.factors().map(|(a, b)| (a.to_f64(), b.to_f64())),
        trace: r.trace,
        status: r.status,
        iterations: r.iterations,
        last: r.final_record,
    })
}

fn config<T>(tol: Option<f64>, step: Option<f64>, max_iter: Option<usize>) -> SolverConfig<T> {
    SolverConfig { tol_residual: tol, tol_step: step, max_iter, ..SolverConfig::default() }
}

fn solve(
    loaded: &Loaded,
    method: Method,
    precision: Precision,
    tol: Option<f64>,
    step: Option<f64>,
    max_iter: Option<usize>,
) -> Result<Run, CliError> {
    match precision {
        Precision::F64 => solve_at::<f64>(loaded, method, config(tol, step, max_iter)),
        Precision::Dd => solve_at::<DoubleDouble>(loaded, method, config(tol, step, max_iter)),
    }
}

fn eps_h_values(trace: &IterationTrace) -> Vec<f64> {
    trace.eps_h_points().into_iter().map(|(_, e)| e).collect()
}

pub fn factor(a: &FactorArgs) -> Result<Outcome, CliError> {
    let loaded = load(&a.source)?;
    let run = solve(&loaded, a.method, a.precision, a.tol, None, a.max_iter)?;
    if let Some(path) = &a.trace {
        write_trace_csv(&run.trace, path)?;
    }
    let has_ref = run.last.eps_h.is_some();
    let points = if has_ref {
        run.trace.eps_h_points()
    } else {
        run.trace.records.iter().map(|r| (r.n, r.eps_p)).collect()
    };
    let rate = estimate_rate_points(&points, a.burn_in).ok();
    let (factors, extraction_discrepancy) = match &run.factors {
        Some((h0, h1)) => {
            let (hs, dev) = block_extract(h0, h1, loaded.m(), loaded.r(), f64::INFINITY)?;
            (hs.iter().map(MatrixJson::from_f64).collect(), Some(dev))
        }
        None => (Vec::new(), None),
    };
    let prob = loaded.problem::<f64>()?;
    let singularity = classify_singularity(&prob, &run.x).ok().map(|s| SingularitySummary::from(&s));
    let report = RunReport {
        label: loaded.label.clone(),
        method: a.method.name().into(),
        precision: a.precision.name().into(),
        status: run.status,
        iterations: run.iterations,
        final_eps_p: run.last.eps_p,
        final_eps_h: run.last.eps_h,
        final_eps_x: run.last.eps_x,
        stall_eps_h: stall_accuracy(&eps_h_values(&run.trace)),
        rate,
        factors,
        extraction_discrepancy,
        x: MatrixJson::from_f64(&run.x),
        singularity,
    };
    eprintln!(
        "{}: {:?} after {} iterations, eps_P {:.3e}{}",
        report.label,
        report.status,
        report.iterations,
        report.final_eps_p,
        report.final_eps_h.map_or(String::new(), |e| format!(", eps_H {e:.3e}")),
    );
    write_json(&report, a.out.as_deref())?;
    Ok(Outcome::from_status(run.status))
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let loaded = load(&a.source)?;
    let p = &loaded.float;
    let deviation = p.para_hermitian_deviation();
    let para_hermitian = p.is_para_hermitian(PARA_TOL);
    let psd = p.psd_on_circle(a.samples, PSD_TOL)?;
    let determinant = p.det_poly();
    let zeros = circle_zeros(&determinant, ZERO_CIRCLE_TOL, CLUSTER_TOL)?;
    let existence = NmeProblem::from_poly(p, &loaded.label).ok().and_then(|prob| existence_conditions(&prob).ok());
    let report = AnalyzeReport {
        label: loaded.label.clone(),
        r: loaded.r(),
        m: loaded.m(),
        para_hermitian,
        para_hermitian_deviation: deviation,
        psd,
        singular: zeros.is_singular,
        determinant,
        zeros,
        existence,
    };
    eprintln!(
        "{}: para-Hermitian {}, min eigenvalue on circle {:.3e}, {} zero cluster(s), singular {}",
        report.label,
        report.para_hermitian,
        report.psd.min_eig,
        report.zeros.zeros.len(),
        report.singular,
    );
    write_json(&report, a.out.as_deref())?;
    Ok(Outcome::Success)
}

/// Verification input: a polynomial plus an optional candidate solution.
#[derive(Debug, Deserialize)]
struct VerifyInput {
    #[serde(flatten)]
    poly: PolyJson,
    /// Embedded `X`.
    x: Option<MatrixJson>,
    /// `H0, …, Hm`.
    h: Option<Vec<MatrixJson>>,
}

fn one_by_one(v: &SurdElem) -> SurdMatrix {
    Matrix::from_fn(1, 1, |_, _| v.clone())
}

fn verify_input(path: &Path) -> Result<(String, VerifyReport, Option<ScalarSolutionText>), CliError> {
    let input: VerifyInput = serde_json::from_str(&read_text(path)?)?;
    let poly = input.poly.to_surd_poly()?;
    let label = label_of(path);
    match (&input.x, &input.h) {
        (Some(x), Some(h)) => {
            let d = poly.size() * poly.degree();
            let x = x.to_surd(d)?;
            let hs = h.iter().map(|m| m.to_surd(poly.size())).collect::<Result<Vec<_>, _>>()?;
            let (h0, h1) = block_embed_factors(&hs)?;
            Ok((label, exact_verify(&poly, &x, &h0, &h1)?, None))
        }
        (None, None) if poly.size() == 1 && poly.degree() == 1 => {
            let (p0, p1) = (poly.coeff(0)[(0, 0)].clone(), poly.coeff(1)[(0, 0)].clone());
            let sol = exact_scalar_solve(&p0, &p1)?;
            let flags = exact_verify(&poly, &one_by_one(&sol.x), &one_by_one(&sol.h0), &one_by_one(&sol.h1))?;
            let text = ScalarSolutionText { x: sol.x.to_string(), h0: sol.h0.to_string(), h1: sol.h1.to_string() };
            Ok((label, flags, Some(text)))
        }
        _ => Err(CliError::Usage("x and h are both required unless the input is scalar of degree one".into())),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let (label, flags, scalar_solution) = match (&a.source.example, &a.source.input) {
        (Some(id), _) => {
            let e = corpus::get(*id)?;
            (e.label.to_string(), e.verify()?, None)
        }
        (None, Some(path)) => verify_input(path)?,
        (None, None) => return Err(CliError::Usage("one of --input or --example is required".into())),
    };
    let failures: Vec<String> = flags.failures().into_iter().map(String::from).collect();
    let out = VerifyOutput { label, flags, failures: failures.clone(), scalar_solution };
    write_json(&out, a.out.as_deref())?;
    if failures.is_empty() {
        eprintln!("{}: all identities hold exactly", out.label);
        Ok(Outcome::Success)
    } else {
        Err(CliError::VerificationFailed(failures.join(", ")))
    }
}

pub fn rates(a: &RatesArgs) -> Result<Outcome, CliError> {
    let loaded = load_entry(a.example)?;
    let entry = loaded.entry.as_ref().expect("corpus entry");
    if entry.x.is_none() {
        return Err(corpus::CorpusError::NoSolution(a.example).into());
    }
    let run = solve(&loaded, a.method, a.precision, Some(0.0), Some(0.0), Some(a.iters))?;
    if let Some(path) = &a.trace {
        write_trace_csv(&run.trace, path)?;
    }
    let estimate = estimate_rate_points(&run.trace.eps_h_points(), a.burn_in);
    let measured_factor = match estimate {
        Ok(r) => match r.class {
            RateClass::Linear { factor } => Some(factor),
            _ => None,
        },
        Err(_) => None,
    };
    let expected_factor = match a.method {
        Method::Newton => entry.expected_newton_factor(),
        Method::Fpi => None,
    };
    let report = RatesReport {
        example: a.example,
        method: a.method.name().into(),
        precision: a.precision.name().into(),
        status: run.status,
        iterations: run.iterations,
        burn_in: a.burn_in,
        rate: estimate.as_ref().ok().copied(),
        rate_error: estimate.as_ref().err().map(ToString::to_string),
        measured_factor,
        expected_factor,
        stall_eps_h: stall_accuracy(&eps_h_values(&run.trace)),
    };
    match (&report.rate, &report.rate_error) {
        (Some(r), _) => eprintln!("{} {}: {:?} over {:?}", loaded.label, report.method, r.class, r.window),
        (None, Some(e)) => eprintln!("{} {}: no estimate ({e})", loaded.label, report.method),
        (None, None) => {}
    }
    write_json(&report, a.out.as_deref())?;
    Ok(if report.rate.is_some() { Outcome::Success } else { Outcome::Stalled })
}

pub fn pencil(a: &PencilArgs) -> Result<Outcome, CliError> {
    let entry = corpus::get(a.example)?;
    let x = entry.x.as_ref().ok_or(corpus::CorpusError::NoSolution(a.example))?.map(surd_to::<f64>);
    let prob = entry.problem_f64()?;
    let pair = gdare_pencil(&prob);
    let report = pencil_unit_circle_report(&prob, &x, CIRCLE_TOL)?;
    let out = PencilOutput {
        label: entry.label.to_string(),
        m: pair.m.to_rows(),
        n: pair.n.to_rows(),
        points: report.points,
        pattern: report.pattern,
    };
    eprintln!("{}: {} closed-loop eigenvalue(s), pattern {:?}", out.label, out.points.len(), out.pattern);
    write_json(&out, a.out.as_deref())?;
    Ok(Outcome::Success)
}
