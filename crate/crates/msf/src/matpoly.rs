//! Matrix Laurent polynomials `P(z) = Σ P_k z^k`: para-Hermitian structure,
//! evaluation on the unit circle, degree reduction by block embedding,
//! determinants and their unit-circle zeros.
//!
//! A one-sided spectral factor `H(z) = Σ H_j z^{-j}` stores `H_j` at key `-j`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::densecore::{eigenvalues, symmetric_eigenvalues, LinalgError, Matrix, Scalar};
use crate::surd::{parse_surd, SurdElem, SurdError};
use crate::{ComplexPair, DenseMatrix};

/// Default on-circle classification tolerance.
pub const CIRCLE_TOL: f64 = 1e-6;
/// Default lower bound for the root clustering radius.
pub const CLUSTER_TOL: f64 = 1e-4;
/// Default relative truncation threshold for interpolated determinant coefficients.
pub const INTERP_TOL: f64 = 1e-10;
/// Relative coefficient noise assumed when sizing the clustering radius of a
/// `p`-fold root, which spreads like `noise^{1/p}`.
const ROOT_NOISE: f64 = 1e-12;
/// Safety factor on the `noise^{1/p}` spread.
const ROOT_SPREAD_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatPolyError {
    #[error("polynomial is not para-Hermitian (deviation {deviation:e})")]
    NotParaHermitian { deviation: f64 },
    #[error("evaluation at z = 0")]
    ZeroArgument,
    #[error("zero polynomial has no well-defined zeros")]
    DegenerateInput,
    #[error("embedded factor blocks disagree by {max_discrepancy:e}")]
    InconsistentBlocks { max_discrepancy: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid polynomial description: {0}")]
    Format(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Surd(#[from] SurdError),
}

/// Matrix Laurent polynomial with `r×r` coefficients; absent keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MatLaurentPoly<T> {
    r: usize,
    coeffs: BTreeMap<i64, Matrix<T>>,
}

impl<T: Scalar> MatLaurentPoly<T> {
    pub fn new(r: usize, coeffs: BTreeMap<i64, Matrix<T>>) -> Result<Self, MatPolyError> {
        for (k, c) in &coeffs {
            if c.shape() != (r, r) {
                return Err(MatPolyError::DimensionMismatch(format!(
                    "coefficient {k} is {}x{}, expected {r}x{r}",
                    c.rows(),
                    c.cols()
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !is_zero_matrix(c)).collect();
        Ok(Self { r, coeffs })
    }

    /// Degree-one para-Hermitian polynomial `P1ᵀz⁻¹ + P0 + P1z`.
    pub fn from_one_sided(p0: &Matrix<T>, p1: &Matrix<T>) -> Result<Self, MatPolyError> {
        Self::from_symmetric_half(&[p0.clone(), p1.clone()])
    }

    /// Para-Hermitian polynomial from `[P0, P1, …, Pm]`, mirroring `P_{-k} = P_kᵀ`.
    pub fn from_symmetric_half(half: &[Matrix<T>]) -> Result<Self, MatPolyError> {
        let r = half.first().map_or(0, |c| c.rows());
        let mut coeffs = BTreeMap::new();
        for (k, c) in half.iter().enumerate() {
            coeffs.insert(k as i64, c.clone());
            if k > 0 {
                coeffs.insert(-(k as i64), c.transpose());
            }
        }
        Self::new(r, coeffs)
    }

    /// One-sided factor `H(z) = Σ H_j z^{-j}` from `[H0, …, Hm]`.
    pub fn from_factors(hs: &[Matrix<T>]) -> Result<Self, MatPolyError> {
        let r = hs.first().map_or(0, |c| c.rows());
        let coeffs = hs.iter().enumerate().map(|(j, h)| (-(j as i64), h.clone())).collect();
        Self::new(r, coeffs)
    }

    pub fn size(&self) -> usize {
        self.r
    }

    /// Largest `|k|` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Matrix<T>> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Matrix<T> {
        self.coeffs.get(&k).cloned().unwrap_or_else(|| Matrix::zeros(self.r, self.r))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MatLaurentPoly<U> {
        MatLaurentPoly { r: self.r, coeffs: self.coeffs.iter().map(|(&k, c)| (k, c.map(&f))).collect() }
    }

    pub fn to_f64(&self) -> MatLaurentPoly<f64> {
        self.map(|v| v.to_f64())
    }

    /// `P*(z) = Σ P_kᵀ z^{-k}`.
    pub fn para_conjugate(&self) -> Self {
        Self { r: self.r, coeffs: self.coeffs.iter().map(|(&k, c)| (-k, c.transpose())).collect() }
    }

    /// `max_k ‖P_{-k} − P_kᵀ‖_F`.
    pub fn para_hermitian_deviation(&self) -> f64 {
        let keys: Vec<i64> = self.coeffs.keys().copied().collect();
        keys.iter()
            .map(|&k| (&self.coeff(-k) - &self.coeff(k).transpose()).norm_fro())
            .fold(0.0, f64::max)
    }

    /// Para-Hermitian test; exact scalar types compare exactly and ignore `tol`.
    pub fn is_para_hermitian(&self, tol: f64) -> bool {
        if T::is_exact() {
            self.coeffs.iter().all(|(&k, c)| self.coeff(-k) == c.transpose())
        } else {
            self.para_hermitian_deviation() <= tol
        }
    }

    fn require_para_hermitian(&self) -> Result<(), MatPolyError> {
        let scale = self.coeffs.values().map(|c| c.norm_fro()).fold(0.0, f64::max);
        if self.is_para_hermitian(1e-12 * scale.max(1.0)) {
            Ok(())
        } else {
            Err(MatPolyError::NotParaHermitian { deviation: self.para_hermitian_deviation() })
        }
    }

    /// `H(z)·H(z)*`, whose `z^{a−b}` coefficient collects `H_a·H_bᵀ`.
    pub fn factor_product(&self) -> Self {
        let mut out: BTreeMap<i64, Matrix<T>> = BTreeMap::new();
        for (&a, ca) in &self.coeffs {
            for (&b, cb) in &self.coeffs {
                let term = ca.mul_transpose(cb);
                let slot = out.entry(a - b).or_insert_with(|| Matrix::zeros(self.r, self.r));
                *slot = &*slot + &term;
            }
        }
        Self::new(self.r, out).expect("square coefficients")
    }

    /// Degree reduction to an `(mr)×(mr)` degree-one problem: `P̂0` has block
    /// `(i,j) = P_{j−i}`, `P̂1` has block `(i,j) = P_{m+j−i}` when that index
    /// is at most `m`, and zero otherwise. Degree one passes through.
    pub fn block_embed(&self) -> Result<(Matrix<T>, Matrix<T>), MatPolyError> {
        self.require_para_hermitian()?;
        let m = self.degree().max(1);
        let r = self.r;
        let mut p0 = Matrix::zeros(m * r, m * r);
        let mut p1 = Matrix::zeros(m * r, m * r);
        for i in 0..m {
            for j in 0..m {
                let k0 = j as i64 - i as i64;
                p0.set_block(i * r, j * r, &self.coeff(k0));
                let k1 = m as i64 + k0;
                if k1 <= m as i64 {
                    p1.set_block(i * r, j * r, &self.coeff(k1));
                }
            }
        }
        Ok((p0, p1))
    }
}

/// Recover `[H0, …, Hm]` from embedded factors: `Ĥ0` block `(i,j) = H_{i−j}`
/// for `i ≥ j`, `Ĥ1` block `(i,j) = H_{m+i−j}` for `i ≤ j`, zero elsewhere.
/// Repeated blocks are averaged; the largest deviation from the average (or
/// from zero for structurally zero blocks) is returned alongside.
pub fn block_extract<T: Scalar>(
    h0_hat: &Matrix<T>,
    h1_hat: &Matrix<T>,
    m: usize,
    r: usize,
    extract_tol: f64,
) -> Result<(Vec<Matrix<T>>, f64), MatPolyError> {
    let d = m * r;
    if h0_hat.shape() != (d, d) || h1_hat.shape() != (d, d) {
        return Err(MatPolyError::DimensionMismatch(format!("embedded factors must be {d}x{d}")));
    }
    let mut groups: Vec<Vec<Matrix<T>>> = vec![Vec::new(); m + 1];
    let mut zero_dev: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let b0 = h0_hat.block(i * r, j * r, r, r);
            let b1 = h1_hat.block(i * r, j * r, r, r);
            if i >= j {
                groups[i - j].push(b0);
            } else {
                zero_dev = zero_dev.max(b0.norm_fro());
            }
            if i <= j {
                groups[m + i - j].push(b1);
            } else {
                zero_dev = zero_dev.max(b1.norm_fro());
            }
        }
    }
    let mut hs = Vec::with_capacity(m + 1);
    let mut dev = zero_dev;
    for g in groups {
        let n = T::from_i64(g.len() as i64);
        let sum = g.iter().skip(1).fold(g[0].clone(), |acc, b| &acc + b);
        let avg = sum.map(|v| v.clone() / n.clone());
        for b in &g {
            dev = dev.max((b - &avg).norm_fro());
        }
        hs.push(avg);
    }
    if dev > extract_tol {
        return Err(MatPolyError::InconsistentBlocks { max_discrepancy: dev });
    }
    Ok((hs, dev))
}

/// Embedded factors `(Ĥ0, Ĥ1)` of `[H0, …, Hm]` in the layout read by
/// [`block_extract`]. Degree one passes through.
pub fn block_embed_factors<T: Scalar>(hs: &[Matrix<T>]) -> Result<(Matrix<T>, Matrix<T>), MatPolyError> {
    if hs.len() < 2 {
        return Err(MatPolyError::DimensionMismatch("need at least H0 and H1".into()));
    }
    let r = hs[0].rows();
    if hs.iter().any(|h| h.shape() != (r, r)) {
        return Err(MatPolyError::DimensionMismatch("factor blocks must be square and equal".into()));
    }
    let m = hs.len() - 1;
    let mut h0 = Matrix::zeros(m * r, m * r);
    let mut h1 = Matrix::zeros(m * r, m * r);
    for i in 0..m {
        for j in 0..m {
            if i >= j {
                h0.set_block(i * r, j * r, &hs[i - j]);
            }
            if i <= j {
                h1.set_block(i * r, j * r, &hs[m + i - j]);
            }
        }
    }
    Ok((h0, h1))
}

fn is_zero_matrix<T: Scalar>(a: &Matrix<T>) -> bool {
    a.as_slice().iter().all(Zero::is_zero)
}

/// Minimum eigenvalue of `P(e^{iθ})` over a sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub ok: bool,
    pub min_eig: f64,
    pub argmin_angle: f64,
}

impl MatLaurentPoly<f64> {
    /// `P(z)` as real and imaginary parts.
    pub fn eval(&self, z: ComplexPair) -> Result<(DenseMatrix, DenseMatrix), MatPolyError> {
        if z == Complex64::zero() {
            return Err(MatPolyError::ZeroArgument);
        }
        let vals = self.eval_complex(z);
        let re = Matrix::from_fn(self.r, self.r, |i, j| vals[i * self.r + j].re);
        let im = Matrix::from_fn(self.r, self.r, |i, j| vals[i * self.r + j].im);
        Ok((re, im))
    }

    fn eval_complex(&self, z: Complex64) -> Vec<Complex64> {
        let r = self.r;
        let mut out = vec![Complex64::zero(); r * r];
        for (&k, c) in &self.coeffs {
            let zk = z.powi(k as i32);
            for (o, &v) in out.iter_mut().zip(c.as_slice()) {
                *o += zk * v;
            }
        }
        out
    }

    /// Smallest eigenvalue of the Hermitian values `P(e^{iθ})`, sampled on
    /// `samples` equispaced angles, via the real symmetric `2r×2r` form
    /// `[[Re, −Im], [Im, Re]]`.
    pub fn psd_on_circle(&self, samples: usize, tol: f64) -> Result<PsdReport, MatPolyError> {
        self.require_para_hermitian()?;
        let samples = samples.max(4 * self.degree() + 1);
        let r = self.r;
        let mut best = (f64::INFINITY, 0.0);
        for s in 0..samples {
            let theta = 2.0 * PI * s as f64 / samples as f64;
            let vals = self.eval_complex(Complex64::from_polar(1.0, theta));
            let big = Matrix::from_fn(2 * r, 2 * r, |i, j| {
                let v = vals[(i % r) * r + (j % r)];
                match (i < r, j < r) {
                    (true, true) | (false, false) => v.re,
                    (true, false) => -v.im,
                    (false, true) => v.im,
                }
            });
            let eigs = symmetric_eigenvalues(&big.symmetrize())?;
            let lo = eigs.first().copied().unwrap_or(f64::INFINITY);
            if lo < best.0 {
                best = (lo, theta);
            }
        }
        Ok(PsdReport { ok: best.0 >= -tol, min_eig: best.0, argmin_angle: best.1 })
    }

    /// `|P(z)|` as a scalar Laurent polynomial, by interpolating
    /// `z^{rm}|P(z)|` at `2rm+1` roots of unity.
    pub fn det_poly(&self) -> ScalarLaurentPoly {
        let rm = (self.r * self.degree()) as i64;
        let n = (2 * rm + 1) as usize;
        let values: Vec<Complex64> = (0..n)
            .map(|k| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                complex_det(self.eval_complex(z), self.r) * z.powi(rm as i32)
            })
            .collect();
        let mut coeffs = BTreeMap::new();
        let mut raw = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = Complex64::zero();
            for (k, v) in values.iter().enumerate() {
                let w = Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64);
                acc += v * w;
            }
            raw.push(acc.re / n as f64);
        }
        let scale = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (j, v) in raw.into_iter().enumerate() {
            if v.abs() > INTERP_TOL * scale {
                coeffs.insert(j as i64 - rm, v);
            }
        }
        ScalarLaurentPoly { coeffs }
    }
}

fn complex_det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm())).unwrap();
        if a[p * n + k] == Complex64::zero() {
            return Complex64::zero();
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for i in k + 1..n {
            let f = a[i * n + k] / piv;
            for j in k..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
        }
    }
    det
}

/// Scalar Laurent polynomial `q(z) = Σ q_k z^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalarLaurentPoly {
    pub coeffs: BTreeMap<i64, f64>,
}

impl ScalarLaurentPoly {
    pub fn eval(&self, z: ComplexPair) -> ComplexPair {
        self.coeffs.iter().map(|(&k, &c)| z.powi(k as i32) * c).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0.0)
    }

    /// Coefficients of the ordinary polynomial `q(z)·z^{-k_min}` in ascending
    /// powers, with zero roots (vanishing low coefficients) removed.
    fn ordinary(&self) -> Vec<f64> {
        let Some((&lo, _)) = self.coeffs.iter().find(|(_, &c)| c != 0.0) else {
            return Vec::new();
        };
        let hi = *self.coeffs.iter().rev().find(|(_, &c)| c != 0.0).unwrap().0;
        (lo..=hi).map(|k| self.coeffs.get(&k).copied().unwrap_or(0.0)).collect()
    }
}

/// One cluster of roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleZero {
    pub location: ComplexPair,
    pub multiplicity: usize,
    pub on_circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleZeroReport {
    pub zeros: Vec<CircleZero>,
    pub is_singular: bool,
}

impl CircleZeroReport {
    /// Multiplicity of the cluster closest to `z`, if within `tol`.
    pub fn multiplicity_at(&self, z: ComplexPair, tol: f64) -> usize {
        self.zeros
            .iter()
            .filter(|c| (c.location - z).norm() <= tol)
            .map(|c| c.multiplicity)
            .sum()
    }
}

/// Clustering radius for a cluster of `p` roots.
fn spread_radius(p: usize, cluster_tol: f64) -> f64 {
    cluster_tol.max(ROOT_SPREAD_FACTOR * ROOT_NOISE.powf(1.0 / p as f64))
}

fn centroid(pts: &[Complex64]) -> Complex64 {
    pts.iter().sum::<Complex64>() / pts.len() as f64
}

/// Single-linkage components at the radius allowed for `p_max`-fold roots;
/// a component is accepted when its spread fits its own size, otherwise it
/// is re-clustered with a smaller multiplicity bound.
fn cluster(points: Vec<Complex64>, p_max: usize, cluster_tol: f64, out: &mut Vec<Vec<Complex64>>) {
    let tau = spread_radius(p_max, cluster_tol);
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() <= tau {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a] = b;
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut label, i);
        comps.entry(root).or_default().push(points[i]);
    }
    for comp in comps.into_values() {
        let k = comp.len();
        let c = centroid(&comp);
        let radius = comp.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
        if k == 1 || radius <= spread_radius(k, cluster_tol) || p_max <= 1 {
            out.push(comp);
        } else {
            cluster(comp, (k - 1).min(p_max - 1), cluster_tol, out);
        }
    }
}

/// Roots of `q` (nonzero roots of the associated ordinary polynomial) grouped
/// into clusters; the cluster size is the multiplicity and the centroid the
/// location. The clustering radius for a `p`-fold root is
/// `max(cluster_tol, 4·(1e-12)^{1/p})`.
pub fn circle_zeros(
    q: &ScalarLaurentPoly,
    circle_tol: f64,
    cluster_tol: f64,
) -> Result<CircleZeroReport, MatPolyError> {
    let c = q.ordinary();
    if c.is_empty() {
        return Err(MatPolyError::DegenerateInput);
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(CircleZeroReport { zeros: Vec::new(), is_singular: false });
    }
    let lead = c[deg];
    let companion = Matrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -c[deg - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let roots = eigenvalues(&companion)?;
    let mut groups = Vec::new();
    cluster(roots, deg, cluster_tol, &mut groups);
    let mut zeros: Vec<CircleZero> = groups
        .into_iter()
        .map(|g| {
            let location = centroid(&g);
            CircleZero {
                location,
                multiplicity: g.len(),
                on_circle: (location.norm() - 1.0).abs() <= circle_tol,
            }
        })
        .collect();
    zeros.sort_by(|a, b| {
        a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im))
    });
    let is_singular = zeros.iter().any(|z| z.on_circle);
    Ok(CircleZeroReport { zeros, is_singular })
}

/// Matrix entries in the JSON polynomial format: nested rows or a flat
/// row-major list, as numbers or surd text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
    NestedText(Vec<Vec<String>>),
    FlatText(Vec<String>),
}

impl MatrixJson {
    fn texts(&self) -> Vec<String> {
        match self {
            MatrixJson::Nested(rows) => rows.iter().flatten().map(|v| v.to_string()).collect(),
            MatrixJson::Flat(v) => v.iter().map(|v| v.to_string()).collect(),
            MatrixJson::NestedText(rows) => rows.iter().flatten().cloned().collect(),
            MatrixJson::FlatText(v) => v.clone(),
        }
    }

    fn check_len(&self, r: usize, len: usize) -> Result<(), MatPolyError> {
        if len != r * r {
            return Err(MatPolyError::Format(format!("expected {} entries, found {len}", r * r)));
        }
        if let MatrixJson::Nested(rows) = self {
            if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                return Err(MatPolyError::Format(format!("expected {r} rows of {r} entries")));
            }
        }
        if let MatrixJson::NestedText(rows) = self {
            if rows.len() != r || rows.iter().any(|row| row.len() != r) {
                return Err(MatPolyError::Format(format!("expected {r} rows of {r} entries")));
            }
        }
        Ok(())
    }

    pub fn to_f64(&self, r: usize) -> Result<DenseMatrix, MatPolyError> {
        let vals: Vec<f64> = match self {
            MatrixJson::Nested(rows) => rows.iter().flatten().copied().collect(),
            MatrixJson::Flat(v) => v.clone(),
            _ => self.to_surd(r)?.as_slice().iter().map(SurdElem::to_f64).collect(),
        };
        self.check_len(r, vals.len())?;
        Ok(Matrix::new(r, r, vals)?)
    }

    /// Exact entries; numeric entries must be written so that their decimal
    /// text parses as an integer or a quotient.
    pub fn to_surd(&self, r: usize) -> Result<Matrix<SurdElem>, MatPolyError> {
        let texts = self.texts();
        self.check_len(r, texts.len())?;
        let vals: Result<Vec<SurdElem>, SurdError> = texts.iter().map(|t| parse_surd(t)).collect();
        Ok(Matrix::new(r, r, vals?)?)
    }

    pub fn from_f64(a: &DenseMatrix) -> Self {
        MatrixJson::Nested(a.to_rows())
    }

    pub fn from_surd(a: &Matrix<SurdElem>) -> Self {
        MatrixJson::NestedText(
            a.to_rows().into_iter().map(|row| row.iter().map(|v| v.to_string()).collect()).collect(),
        )
    }
}

/// JSON polynomial description: `{r, m, coeffs: {"k": matrix}, mirror?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub r: usize,
    pub m: usize,
    pub coeffs: BTreeMap<String, MatrixJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mirror: bool,
}

impl PolyJson {
    fn parse_key(&self, key: &str) -> Result<i64, MatPolyError> {
        let k: i64 = key.trim().parse().map_err(|_| MatPolyError::Format(format!("bad key {key:?}")))?;
        if k.unsigned_abs() as usize > self.m {
            return Err(MatPolyError::Format(format!("key {k} outside [-{}, {}]", self.m, self.m)));
        }
        Ok(k)
    }

    fn build<T: Scalar>(
        &self,
        conv: impl Fn(&MatrixJson) -> Result<Matrix<T>, MatPolyError>,
    ) -> Result<MatLaurentPoly<T>, MatPolyError> {
        let mut coeffs = BTreeMap::new();
        for (key, mj) in &self.coeffs {
            coeffs.insert(self.parse_key(key)?, conv(mj)?);
        }
        if self.mirror {
            let positive: Vec<(i64, Matrix<T>)> =
                coeffs.iter().filter(|(&k, _)| k > 0).map(|(&k, c)| (k, c.clone())).collect();
            for (k, c) in positive {
                coeffs.entry(-k).or_insert_with(|| c.transpose());
            }
        }
        MatLaurentPoly::new(self.r, coeffs)
    }

    pub fn to_poly(&self) -> Result<MatLaurentPoly<f64>, MatPolyError> {
        self.build(|mj| mj.to_f64(self.r))
    }

    pub fn to_surd_poly(&self) -> Result<MatLaurentPoly<SurdElem>, MatPolyError> {
        self.build(|mj| mj.to_surd(self.r))
    }

    pub fn from_poly(p: &MatLaurentPoly<f64>) -> Self {
        Self {
            r: p.size(),
            m: p.degree(),
            coeffs: p.coeffs().iter().map(|(k, c)| (k.to_string(), MatrixJson::from_f64(c))).collect(),
            mirror: false,
        }
    }

    pub fn from_surd_poly(p: &MatLaurentPoly<SurdElem>) -> Self {
        Self {
            r: p.size(),
            m: p.degree(),
            coeffs: p.coeffs().iter().map(|(k, c)| (k.to_string(), MatrixJson::from_surd(c))).collect(),
            mirror: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dm(rows: &[&[f64]]) -> DenseMatrix {
        Matrix::from_f64_rows(rows).unwrap()
    }

    fn haar() -> MatLaurentPoly<f64> {
        MatLaurentPoly::from_one_sided(&dm(&[&[2.0]]), &dm(&[&[1.0]])).unwrap()
    }

    fn kucera() -> MatLaurentPoly<f64> {
        MatLaurentPoly::from_symmetric_half(&[
            dm(&[&[1.0, 0.0], &[0.0, 9.0]]),
            dm(&[&[0.0, 0.0], &[0.0, -2.0]]),
            dm(&[&[0.0, 0.0], &[2.0, 0.0]]),
        ])
        .unwrap()
    }

    fn ephremidze() -> MatLaurentPoly<f64> {
        MatLaurentPoly::from_one_sided(
            &dm(&[&[6.0, 22.0], &[22.0, 84.0]]),
            &dm(&[&[2.0, 7.0], &[11.0, 38.0]]),
        )
        .unwrap()
    }

    #[test]
    fn para_conjugate_and_structure() {
        let h = MatLaurentPoly::from_factors(&[dm(&[&[1.0, 0.0], &[5.0, 1.0]]), dm(&[&[2.0, 1.0], &[7.0, 3.0]])])
            .unwrap();
        let hc = h.para_conjugate();
        assert_eq!(hc.coeff(1), dm(&[&[2.0, 7.0], &[1.0, 3.0]]));
        assert_eq!(hc.coeff(0), dm(&[&[1.0, 5.0], &[0.0, 1.0]]));
        assert!(!h.is_para_hermitian(1e-9));
        assert_eq!(ephremidze().para_conjugate(), ephremidze());
        assert!(ephremidze().is_para_hermitian(0.0));

        let mut coeffs = ephremidze().coeffs().clone();
        coeffs.get_mut(&1).unwrap()[(0, 0)] += 1e-3;
        let bumped = MatLaurentPoly::new(2, coeffs).unwrap();
        assert!(!bumped.is_para_hermitian(1e-9));
        assert!(matches!(bumped.block_embed(), Err(MatPolyError::NotParaHermitian { .. })));
    }

    #[test]
    fn evaluation() {
        let (re, im) = haar().eval(Complex64::new(-1.0, 0.0)).unwrap();
        assert!(re[(0, 0)].abs() < 1e-15 && im[(0, 0)].abs() < 1e-15);
        let (re, _) = haar().eval(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(re[(0, 0)], 4.0);
        assert_eq!(haar().eval(Complex64::zero()), Err(MatPolyError::ZeroArgument));
    }

    #[test]
    fn positivity_on_circle() {
        let r = haar().psd_on_circle(64, 1e-12).unwrap();
        assert!(r.ok && r.min_eig.abs() < 1e-12);
        assert!((r.argmin_angle - PI).abs() < 1e-12);
        assert!(kucera().psd_on_circle(64, 1e-12).unwrap().min_eig > 0.1);
        let neg = MatLaurentPoly::new(1, BTreeMap::from([(0, dm(&[&[-1.0]]))])).unwrap();
        assert!(!neg.psd_on_circle(8, 1e-12).unwrap().ok);
    }

    #[test]
    fn embedding_of_degree_two() {
        let (p0, p1) = kucera().block_embed().unwrap();
        let expect0 = dm(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 9.0, 0.0, -2.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, -2.0, 0.0, 9.0],
        ]);
        let expect1 = dm(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, -2.0, 2.0, 0.0],
        ]);
        assert_eq!(p0, expect0);
        assert_eq!(p1, expect1);
        let (q0, q1) = haar().block_embed().unwrap();
        assert_eq!((q0, q1), (dm(&[&[2.0]]), dm(&[&[1.0]])));
    }

    #[test]
    fn degree_three_pattern() {
        // scalar coefficients tagged by index expose the block layout
        let half: Vec<DenseMatrix> = (0..4).map(|k| dm(&[&[10.0 + k as f64]])).collect();
        let p = MatLaurentPoly::from_symmetric_half(&half).unwrap();
        let (p0, p1) = p.block_embed().unwrap();
        assert_eq!(p0, dm(&[&[10.0, 11.0, 12.0], &[11.0, 10.0, 11.0], &[12.0, 11.0, 10.0]]));
        assert_eq!(p1, dm(&[&[13.0, 0.0, 0.0], &[12.0, 13.0, 0.0], &[11.0, 12.0, 13.0]]));
    }

    #[test]
    fn extract_roundtrip() {
        let s = 34f64.sqrt();
        let h = [
            dm(&[&[4.0 / s, 0.0], &[1.0 / s, 17.0 / s]]),
            dm(&[&[-1.0 / s, 1.0 / s], &[0.0, -4.0 / s]]),
            dm(&[&[0.0, 4.0 / s], &[0.0, 0.0]]),
        ];
        let mut h0h = Matrix::zeros(4, 4);
        h0h.set_block(0, 0, &h[0]);
        h0h.set_block(2, 0, &h[1]);
        h0h.set_block(2, 2, &h[0]);
        let mut h1h = Matrix::zeros(4, 4);
        h1h.set_block(0, 0, &h[2]);
        h1h.set_block(0, 2, &h[1]);
        h1h.set_block(2, 2, &h[2]);
        assert_eq!(block_embed_factors(&h).unwrap(), (h0h.clone(), h1h.clone()));
        let (got, dev) = block_extract(&h0h, &h1h, 2, 2, 1e-12).unwrap();
        assert_eq!(dev, 0.0);
        assert_eq!(got.to_vec(), h.to_vec());

        let prod = MatLaurentPoly::from_factors(&h).unwrap().factor_product();
        let diff: f64 = (-2..=2).map(|k| (&prod.coeff(k) - &kucera().coeff(k)).max_abs()).fold(0.0, f64::max);
        assert!(diff < 1e-14);

        let mut bad = h1h.clone();
        bad[(2, 3)] += 1e-3;
        assert!(matches!(
            block_extract(&h0h, &bad, 2, 2, 1e-9),
            Err(MatPolyError::InconsistentBlocks { .. })
        ));
    }

    #[test]
    fn factor_products() {
        let id = MatLaurentPoly::from_factors(&[Matrix::<f64>::identity(2)]).unwrap();
        assert_eq!(id.factor_product(), id);
        let h = MatLaurentPoly::from_factors(&[dm(&[&[1.0]]), dm(&[&[1.0]])]).unwrap();
        assert_eq!(h.factor_product(), haar());
    }

    #[test]
    fn determinants() {
        let q = haar().det_poly();
        assert_eq!(q.coeffs.len(), 3);
        for (k, v) in [(-1, 1.0), (0, 2.0), (1, 1.0)] {
            assert!((q.coeffs[&k] - v).abs() < 1e-14);
        }
        let q = ephremidze().det_poly();
        // −(z+1)²(z−1)²/z² = −z⁻² + 2 − z²
        for (k, v) in [(-2, -1.0), (0, 2.0), (2, -1.0)] {
            assert!((q.coeffs[&k] - v).abs() < 1e-10, "{k}: {:?}", q.coeffs);
        }
        assert_eq!(q.coeffs.len(), 3);
        let q = kucera().det_poly();
        // z⁻¹(2z−1)(2−z) = −2z + 5 − 2z⁻¹
        for (k, v) in [(-1, -2.0), (0, 5.0), (1, -2.0)] {
            assert!((q.coeffs[&k] - v).abs() < 1e-10, "{k}: {:?}", q.coeffs);
        }
    }

    #[test]
    fn circle_zero_reports() {
        let rep = circle_zeros(&haar().det_poly(), CIRCLE_TOL, CLUSTER_TOL).unwrap();
        assert_eq!(rep.zeros.len(), 1);
        assert_eq!(rep.zeros[0].multiplicity, 2);
        assert!(rep.zeros[0].on_circle && rep.is_singular);

        let rep = circle_zeros(&kucera().det_poly(), CIRCLE_TOL, CLUSTER_TOL).unwrap();
        assert!(!rep.is_singular);
        assert_eq!(rep.multiplicity_at(Complex64::new(0.5, 0.0), 1e-9), 1);
        assert_eq!(rep.multiplicity_at(Complex64::new(2.0, 0.0), 1e-9), 1);

        // (z+1)^10 with rounding noise in the coefficients
        let binom = [1.0, 10.0, 45.0, 120.0, 210.0, 252.0, 210.0, 120.0, 45.0, 10.0, 1.0];
        let q = ScalarLaurentPoly {
            coeffs: binom.iter().enumerate().map(|(k, &c)| (k as i64 - 5, c / 33554432.0)).collect(),
        };
        let rep = circle_zeros(&q, CIRCLE_TOL, CLUSTER_TOL).unwrap();
        assert_eq!(rep.zeros.len(), 1);
        assert_eq!(rep.zeros[0].multiplicity, 10);
        assert!(rep.zeros[0].on_circle);

        assert_eq!(
            circle_zeros(&ScalarLaurentPoly::default(), CIRCLE_TOL, CLUSTER_TOL),
            Err(MatPolyError::DegenerateInput)
        );
    }

    #[test]
    fn zero_roots_are_stripped() {
        let q = ScalarLaurentPoly { coeffs: BTreeMap::from([(2, 1.0), (3, 1.0)]) };
        let rep = circle_zeros(&q, CIRCLE_TOL, CLUSTER_TOL).unwrap();
        assert_eq!(rep.zeros.len(), 1);
        assert_eq!(rep.zeros[0].multiplicity, 1);
    }

    #[test]
    fn json_roundtrip_and_mirror() {
        let text = r#"{"r":2,"m":1,"mirror":true,"coeffs":{"0":[[6,22],[22,84]],"1":[[2,7],[11,38]]}}"#;
        let pj: PolyJson = serde_json::from_str(text).unwrap();
        let p = pj.to_poly().unwrap();
        assert_eq!(p, ephremidze());
        let back: PolyJson = serde_json::from_str(&serde_json::to_string(&PolyJson::from_poly(&p)).unwrap()).unwrap();
        assert_eq!(back.to_poly().unwrap(), p);

        let exact = r#"{"r":1,"m":1,"mirror":true,"coeffs":{"0":["1"],"1":["1/2"]}}"#;
        let pj: PolyJson = serde_json::from_str(exact).unwrap();
        let p = pj.to_surd_poly().unwrap();
        assert_eq!(p.coeff(-1)[(0, 0)], SurdElem::frac(1, 2));
        let bad = r#"{"r":2,"m":1,"coeffs":{"0":[[1,0]]}}"#;
        let pj: PolyJson = serde_json::from_str(bad).unwrap();
        assert!(matches!(pj.to_poly(), Err(MatPolyError::Format(_))));
        let far = r#"{"r":1,"m":1,"coeffs":{"2":[1]}}"#;
        let pj: PolyJson = serde_json::from_str(far).unwrap();
        assert!(matches!(pj.to_poly(), Err(MatPolyError::Format(_))));
    }

    fn small_poly() -> impl Strategy<Value = MatLaurentPoly<f64>> {
        (1usize..3, 1usize..3).prop_flat_map(|(r, m)| {
            proptest::collection::vec(-2.0f64..2.0, r * r * (m + 1)).prop_map(move |v| {
                let half: Vec<DenseMatrix> =
                    v.chunks(r * r).map(|c| Matrix::new(r, r, c.to_vec()).unwrap()).collect();
                MatLaurentPoly::from_symmetric_half(&half).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn para_conjugate_is_involution(p in small_poly()) {
            prop_assert_eq!(p.para_conjugate().para_conjugate(), p);
        }

        #[test]
        fn det_poly_matches_direct_evaluation(p in small_poly(), angles in proptest::collection::vec(0.0f64..6.283, 20)) {
            let q = p.det_poly();
            let r = p.size();
            let scale = q.coeffs.values().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
            for t in angles {
                let z = Complex64::from_polar(1.0, t);
                let direct = complex_det(p.eval_complex(z), r);
                let interp = q.eval(z);
                prop_assert!((direct - interp).norm() <= 1e-9 * scale.max(direct.norm()));
            }
        }

        #[test]
        fn multiplicities_sum_to_degree(roots in proptest::collection::vec(-3.0f64..3.0, 1..6)) {
            // distinct, well-separated nonzero real roots
            let mut rs: Vec<f64> = roots.iter().map(|r| (r * 4.0).round() / 4.0 + 0.125).collect();
            rs.sort_by(f64::total_cmp);
            rs.dedup();
            let mut c = vec![1.0];
            for &r in &rs {
                let mut next = vec![0.0; c.len() + 1];
                for (i, &v) in c.iter().enumerate() {
                    next[i + 1] += v;
                    next[i] -= r * v;
                }
                c = next;
            }
            let q = ScalarLaurentPoly { coeffs: c.iter().enumerate().map(|(k, &v)| (k as i64, v)).collect() };
            let rep = circle_zeros(&q, CIRCLE_TOL, CLUSTER_TOL).unwrap();
            prop_assert_eq!(rep.zeros.iter().map(|z| z.multiplicity).sum::<usize>(), rs.len());
        }
    }
}
