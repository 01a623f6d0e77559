//! Machine-readable outputs of the subcommands.

use std::io::Write;
use std::path::Path;

use msf::diagnostics::{CirclePattern, PencilPoint, RateEstimate, SingularityReport};
use msf::matpoly::{CircleZeroReport, MatrixJson, PsdReport, ScalarLaurentPoly};
use msf::nme::{ExistenceReport, IterationTrace, Status};
use msf::surd::VerifyReport;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Closed-loop classification of the returned iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySummary {
    pub is_singular: bool,
    pub max_modulus: f64,
    pub derivative_radius: f64,
    pub unit_eigs: usize,
    pub p_estimate: usize,
}

impl From<&SingularityReport> for SingularitySummary {
    fn from(s: &SingularityReport) -> Self {
        Self {
            is_singular: s.is_singular,
            max_modulus: s.max_modulus,
            derivative_radius: s.derivative_radius,
            unit_eigs: s.unit_eigs,
            p_estimate: s.p_estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub method: String,
    pub precision: String,
    pub status: Status,
    pub iterations: usize,
    pub final_eps_p: f64,
    pub final_eps_h: Option<f64>,
    pub final_eps_x: Option<f64>,
    /// Error where convergence stopped decreasing, when a reference exists.
    pub stall_eps_h: Option<f64>,
    pub rate: Option<RateEstimate>,
    /// `H0, …, Hm`; empty when the factors are unavailable.
    pub factors: Vec<MatrixJson>,
    /// Largest disagreement between repeated blocks of the embedded factors.
    pub extraction_discrepancy: Option<f64>,
    pub x: MatrixJson,
    pub singularity: Option<SingularitySummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub label: String,
    pub r: usize,
    pub m: usize,
    pub para_hermitian: bool,
    pub para_hermitian_deviation: f64,
    pub psd: PsdReport,
    pub determinant: ScalarLaurentPoly,
    pub zeros: CircleZeroReport,
    pub existence: Option<ExistenceReport>,
    pub singular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSolutionText {
    pub x: String,
    pub h0: String,
    pub h1: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub label: String,
    pub flags: VerifyReport,
    pub failures: Vec<String>,
    pub scalar_solution: Option<ScalarSolutionText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub example: usize,
    pub method: String,
    pub precision: String,
    pub status: Status,
    pub iterations: usize,
    pub burn_in: usize,
    pub rate: Option<RateEstimate>,
    /// Why no rate could be estimated.
    pub rate_error: Option<String>,
    pub measured_factor: Option<f64>,
    /// `2^{-1/p}` for Newton on a singular example.
    pub expected_factor: Option<f64>,
    pub stall_eps_h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilOutput {
    pub label: String,
    pub m: Vec<Vec<f64>>,
    pub n: Vec<Vec<f64>>,
    pub points: Vec<PencilPoint>,
    pub pattern: CirclePattern,
}

/// JSON to `path`, or to standard output when absent.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// Shortest round-trip decimal form.
fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Trace as CSV with header `n,eps_P,eps_H,step_norm`; `eps_H` is left empty
/// without a reference.
pub fn write_trace_csv(trace: &IterationTrace, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Csv(path.display().to_string(), e))?;
    let wrap = |e| CliError::Csv(path.display().to_string(), e);
    w.write_record(["n", "eps_P", "eps_H", "step_norm"]).map_err(wrap)?;
    for r in &trace.records {
        let eps_h = r.eps_h.map(num).unwrap_or_default();
        w.write_record([r.n.to_string(), num(r.eps_p), eps_h, num(r.step_norm)]).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use msf::nme::TraceRecord;

    #[test]
    fn csv_layout() {
        let rec = |n, eps_h| TraceRecord { n, eps_p: 0.1, eps_h, eps_x: None, step_norm: 1e-300, min_pivot: 1.0 };
        let trace = IterationTrace { records: vec![rec(0, Some(0.5)), rec(3, None)] };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trace_csv(&trace, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "n,eps_P,eps_H,step_norm\n0,1e-1,5e-1,1e-300\n3,1e-1,,1e-300\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.220446049250313e-16, 6.02e23, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
