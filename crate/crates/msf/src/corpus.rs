//! Built-in test problems with exact coefficients, known solutions and the
//! expected singularity metadata.

use serde::{Deserialize, Serialize};

use crate::densecore::Matrix;
use crate::diagnostics::expected_newton_factor;
use crate::matpoly::{block_embed_factors, MatLaurentPoly, MatPolyError};
use crate::nme::{NmeError, NmeProblem};
use crate::surd::{exact_verify, parse_surd, SurdElem, SurdError, SurdMatrix, VerifyReport};

/// Number of built-in examples.
pub const CORPUS_SIZE: usize = 7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown corpus id {0} (expected 1..=7)")]
    UnknownId(usize),
    #[error("example {0} has no recorded solution")]
    NoSolution(usize),
    #[error(transparent)]
    Surd(#[from] SurdError),
    #[error(transparent)]
    MatPoly(#[from] MatPolyError),
    #[error(transparent)]
    Nme(#[from] NmeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: usize,
    pub label: &'static str,
    pub poly: MatLaurentPoly<SurdElem>,
    /// Maximal solution of the (embedded, when `m > 1`) equation.
    pub x: Option<SurdMatrix>,
    /// Spectral factor coefficients `H0, …, Hm`.
    pub h: Option<Vec<SurdMatrix>>,
    pub singular: bool,
    /// Multiplicity of each determinant zero on the unit circle.
    pub circle_zero_multiplicity: usize,
    /// Real locations of the determinant zeros on the unit circle.
    pub circle_zero_locations: Vec<f64>,
    /// Longest Jordan chain of the closed loop at `+1`.
    pub chain_length: Option<usize>,
    /// Order of magnitude of the best attainable `eps_H` in double precision.
    pub stall_accuracy: Option<f64>,
    /// Other normalizations of the same problem.
    pub variants: Vec<CorpusEntry>,
    pub notes: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub id: usize,
    pub label: String,
    pub r: usize,
    pub m: usize,
    pub singular: bool,
    pub circle_zero_multiplicity: usize,
    pub expected_newton_factor: Option<f64>,
}

impl CorpusEntry {
    pub fn expected_newton_factor(&self) -> Option<f64> {
        self.chain_length.map(expected_newton_factor)
    }

    /// Exact degree-one problem, block-embedded when `m > 1`.
    pub fn problem(&self) -> Result<NmeProblem<SurdElem>, CorpusError> {
        Ok(NmeProblem::from_poly(&self.poly, self.label)?)
    }

    pub fn problem_f64(&self) -> Result<NmeProblem<f64>, CorpusError> {
        Ok(self.problem()?.to_f64())
    }

    /// Embedded `(Ĥ0, Ĥ1)`; equal to `(H0, H1)` for degree one.
    pub fn embedded_factors(&self) -> Result<(SurdMatrix, SurdMatrix), CorpusError> {
        let h = self.h.as_ref().ok_or(CorpusError::NoSolution(self.id))?;
        Ok(block_embed_factors(h)?)
    }

    /// Exact check of the recorded solution.
    pub fn verify(&self) -> Result<VerifyReport, CorpusError> {
        let x = self.x.as_ref().ok_or(CorpusError::NoSolution(self.id))?;
        let (h0, h1) = self.embedded_factors()?;
        Ok(exact_verify(&self.poly, x, &h0, &h1)?)
    }

    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            id: self.id,
            label: self.label.to_string(),
            r: self.poly.size(),
            m: self.poly.degree(),
            singular: self.singular,
            circle_zero_multiplicity: self.circle_zero_multiplicity,
            expected_newton_factor: self.expected_newton_factor(),
        }
    }
}

/// Matrix of surd text entries scaled by a common surd factor.
fn sm(scale: &str, rows: &[&[&str]]) -> SurdMatrix {
    let s = parse_surd(scale).expect("corpus scale");
    Matrix::from_fn(rows.len(), rows[0].len(), |i, j| &s * &parse_surd(rows[i][j]).expect("corpus entry"))
}

#[allow(clippy::too_many_arguments)]
fn entry(
    id: usize,
    label: &'static str,
    p0: SurdMatrix,
    p1: SurdMatrix,
    x: SurdMatrix,
    h: Vec<SurdMatrix>,
    zeros: (usize, Vec<f64>),
    chain: usize,
    stall: f64,
    notes: &'static str,
) -> CorpusEntry {
    CorpusEntry {
        id,
        label,
        poly: MatLaurentPoly::from_one_sided(&p0, &p1).expect("corpus polynomial"),
        x: Some(x),
        h: Some(h),
        singular: true,
        circle_zero_multiplicity: zeros.0,
        circle_zero_locations: zeros.1,
        chain_length: Some(chain),
        stall_accuracy: Some(stall),
        variants: Vec::new(),
        notes,
    }
}

fn ex1() -> CorpusEntry {
    let half = [
        sm("1", &[&["1", "0"], &["0", "9"]]),
        sm("1", &[&["0", "0"], &["0", "-2"]]),
        sm("1", &[&["0", "0"], &["2", "0"]]),
    ];
    let x = sm(
        "1/17",
        &[&["8", "2", "-2", "0"], &["2", "145", "8", "-34"], &["-2", "8", "9", "0"], &["0", "-34", "0", "153"]],
    );
    let k = "s34/34";
    let h = vec![
        sm(k, &[&["4", "0"], &["1", "17"]]),
        sm(k, &[&["-1", "1"], &["0", "-4"]]),
        sm(k, &[&["0", "4"], &["0", "0"]]),
    ];
    CorpusEntry {
        id: 1,
        label: "kucera-2x2-degree2",
        poly: MatLaurentPoly::from_symmetric_half(&half).expect("corpus polynomial"),
        x: Some(x),
        h: Some(h),
        singular: false,
        circle_zero_multiplicity: 0,
        circle_zero_locations: Vec::new(),
        chain_length: None,
        stall_accuracy: None,
        variants: Vec::new(),
        notes: "degree two, 2x2; determinant zeros at 1/2 and 2; solution stored block-embedded (4x4)",
    }
}

fn ex2() -> CorpusEntry {
    let one = sm("1", &[&["1"]]);
    let mut e = entry(
        2,
        "haar",
        sm("1", &[&["2"]]),
        one.clone(),
        one.clone(),
        vec![one.clone(), one],
        (2, vec![-1.0]),
        1,
        1e-8,
        "scalar Haar product filter 1/z + 2 + z; double zero at -1",
    );
    let r = sm("s2/2", &[&["1"]]);
    e.variants.push(entry(
        2,
        "haar-normalized",
        sm("1", &[&["1"]]),
        sm("1/2", &[&["1"]]),
        sm("1/2", &[&["1"]]),
        vec![r.clone(), r],
        (2, vec![-1.0]),
        1,
        1e-8,
        "Haar product filter scaled to p0 = 1",
    ));
    e
}

fn ex3() -> CorpusEntry {
    entry(
        3,
        "integer-2x2",
        sm("1", &[&["6", "22"], &["22", "84"]]),
        sm("1", &[&["2", "7"], &["11", "38"]]),
        sm("1", &[&["1", "5"], &["5", "26"]]),
        vec![sm("1", &[&["1", "0"], &["5", "1"]]), sm("1", &[&["2", "1"], &["7", "3"]])],
        (2, vec![-1.0, 1.0]),
        1,
        1e-8,
        "integer coefficients; double zeros at -1 and +1",
    )
}

fn ex4() -> CorpusEntry {
    entry(
        4,
        "supercompact-dyadic-2x2",
        sm("1", &[&["1", "0"], &["0", "1"]]),
        sm("1/4", &[&["2", "s2"], &["-s2", "0"]]),
        sm("1/4", &[&["2", "-s2"], &["-s2", "2"]]),
        vec![sm("1/2", &[&["s2", "0"], &["-1", "1"]]), sm("1/2", &[&["s2", "0"], &["1", "1"]])],
        (4, vec![-1.0]),
        2,
        1e-4,
        "supercompact multiwavelet; left-multiplying by diag(s2, 1) gives dyadic coefficients",
    )
}

fn ex5() -> CorpusEntry {
    entry(
        5,
        "chui-lian-2x2",
        sm("1", &[&["1", "0"], &["0", "1"]]),
        sm("1/8", &[&["4", "-(1+s7)"], &["1+s7", "-s7"]]),
        sm("1/8", &[&["4", "s7+1"], &["s7+1", "4"]]),
        vec![
            sm("s2/8", &[&["4", "0"], &["s7+1", "s7-1"]]),
            sm("s2/8", &[&["4", "0"], &["-(s7+1)", "s7-1"]]),
        ],
        (4, vec![-1.0]),
        2,
        1e-4,
        "supercompact multiwavelet over Q(s2, s7)",
    )
}

fn ex6() -> CorpusEntry {
    entry(
        6,
        "supercompact-s3-2x2",
        sm("1", &[&["1", "0"], &["0", "1"]]),
        sm("1/4", &[&["2", "-s3"], &["s3", "-1"]]),
        sm("1/4", &[&["2", "s3"], &["s3", "2"]]),
        vec![sm("s2/4", &[&["2", "0"], &["s3", "1"]]), sm("s2/4", &[&["2", "0"], &["-s3", "1"]])],
        (4, vec![-1.0]),
        2,
        1e-4,
        "supercompact multiwavelet over Q(s2, s3)",
    )
}

fn ex7() -> CorpusEntry {
    let p1 = sm(
        "1/256",
        &[
            &["128", "64*s3", "0", "-16*s7", "0"],
            &["-64*s3", "-64", "16*s15", "16*s21", "-8*s3"],
            &["0", "-16*s15", "-112", "-8*s35", "24*s5"],
            &["16*s7", "16*s21", "8*s35", "-40", "-39*s7"],
            &["0", "8*s3", "24*s5", "39*s7", "53"],
        ],
    );
    let x = sm(
        "1/256",
        &[
            &["128", "-64*s3", "0", "16*s7", "0"],
            &["-64*s3", "128", "-16*s15", "0", "8*s3"],
            &["0", "-16*s15", "128", "-16*s35", "0"],
            &["16*s7", "0", "-16*s35", "128", "-21*s7"],
            &["0", "8*s3", "0", "-21*s7", "128"],
        ],
    );
    let h0 = sm(
        "s2/32",
        &[
            &["16", "0", "0", "0", "0"],
            &["-8*s3", "8", "0", "0", "0"],
            &["0", "-4*s15", "4", "0", "0"],
            &["2*s7", "2*s21", "-2*s35", "2", "0"],
            &["0", "2*s3", "6*s5", "3*s7", "1"],
        ],
    );
    let h1 = sm(
        "s2/32",
        &[
            &["16", "0", "0", "0", "0"],
            &["8*s3", "8", "0", "0", "0"],
            &["0", "4*s15", "4", "0", "0"],
            &["-2*s7", "2*s21", "2*s35", "2", "0"],
            &["0", "-2*s3", "6*s5", "-3*s7", "1"],
        ],
    );
    entry(
        7,
        "legendre-order5-5x5",
        Matrix::identity(5),
        p1,
        x,
        vec![h0, h1],
        (10, vec![-1.0]),
        5,
        1e-2,
        "Legendre-type multiscaling filter of order 5 over Q(s2, s3, s5, s7); tenfold zero at -1",
    )
}

/// Corpus entry `id ∈ 1..=7`.
pub fn get(id: usize) -> Result<CorpusEntry, CorpusError> {
    Ok(match id {
        1 => ex1(),
        2 => ex2(),
        3 => ex3(),
        4 => ex4(),
        5 => ex5(),
        6 => ex6(),
        7 => ex7(),
        _ => return Err(CorpusError::UnknownId(id)),
    })
}

pub fn list() -> Vec<CorpusSummary> {
    (1..=CORPUS_SIZE).map(|id| get(id).expect("built-in id").summary()).collect()
}

/// Complementary wavelet filters `(G0, G1)` completing the orthogonal filter
/// bank of examples 4 and 5.
pub fn wavelet_completion(id: usize) -> Result<(SurdMatrix, SurdMatrix), CorpusError> {
    match id {
        4 => Ok((sm("1/2", &[&["0", "s2"], &["1", "1"]]), sm("1/2", &[&["0", "-s2"], &["-1", "1"]]))),
        5 => Ok((
            sm("s2/8", &[&["0", "4"], &["s7-1", "-s7-1"]]),
            sm("s2/8", &[&["0", "-4"], &["-s7+1", "-s7-1"]]),
        )),
        _ => Err(CorpusError::UnknownId(id)),
    }
}

/// Flags of the polyphase orthogonality identities of a completed filter bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    /// `H0H0ᵀ + H1H1ᵀ = I`
    pub scaling: bool,
    /// `G0G0ᵀ + G1G1ᵀ = I`
    pub wavelet: bool,
    /// `H0G0ᵀ + H1G1ᵀ = 0`
    pub cross: bool,
}

impl OrthogonalityReport {
    pub fn all(&self) -> bool {
        self.scaling && self.wavelet && self.cross
    }
}

/// Exact orthogonality check of the completed filter bank of example 4 or 5.
pub fn completion_orthogonality(id: usize) -> Result<OrthogonalityReport, CorpusError> {
    let (g0, g1) = wavelet_completion(id)?;
    let h = get(id)?.h.ok_or(CorpusError::NoSolution(id))?;
    let (h0, h1) = (&h[0], &h[1]);
    let eye = Matrix::<SurdElem>::identity(h0.rows());
    let zero = Matrix::<SurdElem>::zeros(h0.rows(), h0.rows());
    Ok(OrthogonalityReport {
        scaling: &h0.mul_transpose(h0) + &h1.mul_transpose(h1) == eye,
        wavelet: &g0.mul_transpose(&g0) + &g1.mul_transpose(&g1) == eye,
        cross: &h0.mul_transpose(&g0) + &h1.mul_transpose(&g1) == zero,
    })
}

/// Example 4 factors left-multiplied by `diag(√2, 1)`, which have dyadic
/// rational coefficients.
pub fn dyadic_view() -> (SurdMatrix, SurdMatrix) {
    let h = ex4().h.expect("example 4 factors");
    let d = sm("1", &[&["s2", "0"], &["0", "1"]]);
    (&d * &h[0], &d * &h[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matpoly::{circle_zeros, PolyJson, CIRCLE_TOL, CLUSTER_TOL};
    use crate::surd::is_psd_exact;
    use crate::ComplexPair;

    #[test]
    fn lookup() {
        assert_eq!(get(8), Err(CorpusError::UnknownId(8)));
        assert_eq!(get(0), Err(CorpusError::UnknownId(0)));
        let e2 = get(2).unwrap();
        assert_eq!((e2.label, e2.circle_zero_multiplicity), ("haar", 2));
        assert_eq!(e2.variants.len(), 1);
        let e7 = get(7).unwrap();
        assert_eq!(e7.circle_zero_multiplicity, 10);
        assert!((e7.expected_newton_factor().unwrap() - 2f64.powf(-0.2)).abs() < 1e-15);
        let e5 = get(5).unwrap();
        assert_eq!(e5.h.unwrap()[0], sm("s2/8", &[&["4", "0"], &["s7+1", "s7-1"]]));
        let l = list();
        assert_eq!(l.len(), 7);
        assert_eq!(l.iter().filter(|s| s.singular).count(), 6);
        assert_eq!((l[0].r, l[0].m), (2, 2));
    }

    #[test]
    fn recorded_solutions_verify_exactly() {
        for id in 1..=CORPUS_SIZE {
            let e = get(id).unwrap();
            assert!(e.verify().unwrap().all(), "example {id}");
            for v in &e.variants {
                assert!(v.verify().unwrap().all(), "example {id} {}", v.label);
            }
            let prod = MatLaurentPoly::from_factors(e.h.as_ref().unwrap()).unwrap().factor_product();
            assert_eq!(prod, e.poly, "example {id}");
        }
    }

    #[test]
    fn polynomials_para_hermitian_and_psd_at_real_unit_points() {
        for id in 1..=CORPUS_SIZE {
            let p = get(id).unwrap().poly;
            assert!(p.is_para_hermitian(0.0));
            for sign in [1i64, -1] {
                let r = p.size();
                let at = p.coeffs().iter().fold(Matrix::<SurdElem>::zeros(r, r), |acc, (&k, c)| {
                    let s = SurdElem::int(if k.rem_euclid(2) == 1 { sign } else { 1 });
                    &acc + &c.scale(&s)
                });
                assert!(is_psd_exact(&at), "example {id} at {sign}");
            }
        }
    }

    #[test]
    fn multiplicities_match_determinant_zeros() {
        for id in 1..=CORPUS_SIZE {
            let e = get(id).unwrap();
            let rep = circle_zeros(&e.poly.to_f64().det_poly(), CIRCLE_TOL, CLUSTER_TOL).unwrap();
            assert_eq!(rep.is_singular, e.singular, "example {id}");
            for &z in &e.circle_zero_locations {
                assert_eq!(rep.multiplicity_at(ComplexPair::new(z, 0.0), 0.1), e.circle_zero_multiplicity, "example {id}");
            }
        }
    }

    #[test]
    fn completions_orthogonal() {
        for id in [4, 5] {
            assert!(completion_orthogonality(id).unwrap().all());
        }
        assert_eq!(wavelet_completion(3), Err(CorpusError::UnknownId(3)));
        assert_eq!(wavelet_completion(4).unwrap().0, sm("1/2", &[&["0", "s2"], &["1", "1"]]));
    }

    #[test]
    fn dyadic_example4() {
        let (a, b) = dyadic_view();
        assert_eq!(a, sm("1/2", &[&["2", "0"], &["-1", "1"]]));
        assert_eq!(b, sm("1/2", &[&["2", "0"], &["1", "1"]]));
    }

    #[test]
    fn json_round_trips() {
        for id in 1..=CORPUS_SIZE {
            let p = get(id).unwrap().poly;
            let text = serde_json::to_string(&PolyJson::from_surd_poly(&p)).unwrap();
            let back: PolyJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_surd_poly().unwrap(), p);
            let f = PolyJson::from_poly(&p.to_f64()).to_poly().unwrap();
            assert_eq!(f, p.to_f64());
        }
    }
}
