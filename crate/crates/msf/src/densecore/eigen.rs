//! Dense eigenvalue routines for floating-point matrices.

use num_complex::Complex;
use num_traits::Float;

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::LinalgError;

/// Largest dimension accepted by the eigenvalue routines.
pub const MAX_EIG_DIM: usize = 64;

const MAX_QR_ITS: usize = 60;

fn c<T: Float>(v: f64) -> T {
    T::from(v).expect("representable constant")
}

fn sign_of<T: Float>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Balance rows and columns by powers of two to improve eigenvalue accuracy.
fn balance<T: Float>(a: &mut [T], n: usize) {
    let radix: T = c(2.0);
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut cc = T::zero();
            for j in 0..n {
                if j != i {
                    cc = cc + a[j * n + i].abs();
                    r = r + a[i * n + j].abs();
                }
            }
            if cc != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = cc + r;
                while cc < g {
                    f = f * radix;
                    cc = cc * sqrdx;
                }
                g = r * radix;
                while cc > g {
                    f = f / radix;
                    cc = cc / sqrdx;
                }
                if (cc + r) / f < c::<T>(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[i * n + j] = a[i * n + j] * g;
                    }
                    for j in 0..n {
                        a[j * n + i] = a[j * n + i] * f;
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduce to upper Hessenberg form by stabilized elementary similarity transforms.
fn hessenberg<T: Float>(a: &mut [T], n: usize) {
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..n {
            if a[j * n + m - 1].abs() > x.abs() {
                x = a[j * n + m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                a.swap(piv * n + j, m * n + j);
            }
            for j in 0..n {
                a.swap(j * n + piv, j * n + m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..n {
                let mut y = a[i * n + m - 1];
                if y != T::zero() {
                    y = y / x;
                    a[i * n + m - 1] = y;
                    for j in m..n {
                        a[i * n + j] = a[i * n + j] - y * a[m * n + j];
                    }
                    for j in 0..n {
                        a[j * n + m] = a[j * n + m] + y * a[j * n + i];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[i * n + j] = T::zero();
        }
    }
}

/// Shifted double-step QR on an upper Hessenberg matrix (1-based indexing
/// internally to keep the deflation logic readable).
fn hessenberg_qr<T: Float>(h: &mut [T], n: usize) -> Result<Vec<Complex<T>>, LinalgError> {
    let idx = |i: isize, j: isize| ((i - 1) as usize) * n + (j - 1) as usize;
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n as isize {
        for j in (i - 1).max(1)..=n as isize {
            anorm = anorm + h[idx(i, j)].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = T::zero();
    let half: T = c(0.5);
    while nn >= 1 {
        let mut its = 0usize;
        let mut l: isize;
        loop {
            l = nn;
            while l >= 2 {
                let mut s = h[idx(l - 1, l - 1)].abs() + h[idx(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if h[idx(l, l - 1)].abs() + s == s {
                    h[idx(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = h[idx(nn, nn)];
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = T::zero();
                nn -= 1;
            } else {
                let mut y = h[idx(nn - 1, nn - 1)];
                let mut w = h[idx(nn, nn - 1)] * h[idx(nn - 1, nn)];
                if l == nn - 1 {
                    let p = half * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x = x + t;
                    if q >= T::zero() {
                        z = p + sign_of(z, p);
                        wr[(nn - 1) as usize] = x + z;
                        wr[nn as usize] = x + z;
                        if z != T::zero() {
                            wr[nn as usize] = x - w / z;
                        }
                        wi[(nn - 1) as usize] = T::zero();
                        wi[nn as usize] = T::zero();
                    } else {
                        wr[(nn - 1) as usize] = x + p;
                        wr[nn as usize] = x + p;
                        wi[(nn - 1) as usize] = -z;
                        wi[nn as usize] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITS {
                        return Err(LinalgError::NoConvergence { iterations: its });
                    }
                    if its > 0 && its % 10 == 0 {
                        // exceptional shift
                        t = t + x;
                        for i in 1..=nn {
                            h[idx(i, i)] = h[idx(i, i)] - x;
                        }
                        let s = h[idx(nn, nn - 1)].abs() + h[idx(nn - 1, nn - 2)].abs();
                        x = c::<T>(0.75) * s;
                        y = x;
                        w = c::<T>(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    let (mut p, mut q, mut r);
                    let mut z;
                    loop {
                        z = h[idx(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / h[idx(m + 1, m)] + h[idx(m, m + 1)];
                        q = h[idx(m + 1, m + 1)] - z - rr - ss;
                        r = h[idx(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = h[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (h[idx(m - 1, m - 1)].abs() + z.abs() + h[idx(m + 1, m + 1)].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        h[idx(i, i - 2)] = T::zero();
                        if i != m + 2 {
                            h[idx(i, i - 3)] = T::zero();
                        }
                    }
                    let mut k = m;
                    while k <= nn - 1 {
                        if k != m {
                            p = h[idx(k, k - 1)];
                            q = h[idx(k + 1, k - 1)];
                            r = T::zero();
                            if k != nn - 1 {
                                r = h[idx(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                                }
                            } else {
                                h[idx(k, k - 1)] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nn {
                                p = h[idx(k, j)] + q * h[idx(k + 1, j)];
                                if k != nn - 1 {
                                    p = p + r * h[idx(k + 2, j)];
                                    h[idx(k + 2, j)] = h[idx(k + 2, j)] - p * z;
                                }
                                h[idx(k + 1, j)] = h[idx(k + 1, j)] - p * y;
                                h[idx(k, j)] = h[idx(k, j)] - p * x;
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                p = x * h[idx(i, k)] + y * h[idx(i, k + 1)];
                                if k != nn - 1 {
                                    p = p + z * h[idx(i, k + 2)];
                                    h[idx(i, k + 2)] = h[idx(i, k + 2)] - p * r;
                                }
                                h[idx(i, k + 1)] = h[idx(i, k + 1)] - p * q;
                                h[idx(i, k)] = h[idx(i, k)] - p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if !(l < nn - 1) {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

/// All eigenvalues of a square matrix (balancing, Hessenberg reduction,
/// shifted QR).
pub fn eigenvalues<T: Scalar + Float>(a: &Matrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n > MAX_EIG_DIM {
        return Err(LinalgError::TooLarge { dim: n, max: MAX_EIG_DIM });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.as_slice().to_vec();
    balance(&mut h, n);
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar + Float>(a: &Matrix<T>) -> Result<Vec<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut m = a.symmetrize().into_vec();
    let eps = <T as Float>::epsilon();
    for _ in 0..100 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = m[i * n + j] * m[i * n + j];
                total = total + v;
                if i != j {
                    off = off + v;
                }
            }
        }
        if off <= eps * eps * total || off == T::zero() {
            let mut d: Vec<T> = (0..n).map(|i| m[i * n + i]).collect();
            d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
            return Ok(d);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (c::<T>(2.0) * apq);
                let t = sign_of(T::one(), theta) / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = cs * akp - sn * akq;
                    m[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = cs * apk - sn * aqk;
                    m[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence { iterations: 100 })
}

/// Largest singular value, from the eigenvalues of `AᵀA`.
pub fn norm_2<T: Scalar + Float>(a: &Matrix<T>) -> Result<T, LinalgError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(T::zero());
    }
    let ata = a.transpose_mul(a);
    let ev = symmetric_eigenvalues(&ata)?;
    let top = ev.last().copied().unwrap_or(T::zero());
    Ok(top.max(T::zero()).sqrt())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<T: Scalar + Float>(a: &Matrix<T>) -> Result<T, LinalgError> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    fn sorted_re(mut v: Vec<Complex<f64>>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn diagonal_and_rotation() {
        let d = eigenvalues(&Matrix::from_diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(sorted_re(d), vec![1.0, 2.0, 3.0]);
        let r = eigenvalues(&m(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
        let mut im: Vec<f64> = r.iter().map(|z| z.im).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(im, vec![-1.0, 1.0]);
        assert!(r.iter().all(|z| z.re.abs() < 1e-15));
    }

    #[test]
    fn trace_and_determinant_consistency() {
        let a = m(&[
            &[4.0, -2.0, 1.0, 0.5, 3.0],
            &[1.0, 3.0, -1.0, 2.0, 0.0],
            &[0.0, 2.0, 1.0, -3.0, 1.0],
            &[2.0, 0.0, 1.0, 1.0, -1.0],
            &[-1.0, 1.0, 0.5, 2.0, 2.0],
        ]);
        let ev = eigenvalues(&a).unwrap();
        let sum: Complex<f64> = ev.iter().sum();
        assert!((sum.re - a.trace()).abs() <= 1e-8 * a.norm_fro());
        assert!(sum.im.abs() <= 1e-8 * a.norm_fro());
        let prod: Complex<f64> = ev.iter().product();
        let det = crate::densecore::determinant(&a).unwrap();
        assert!((prod.re - det).abs() <= 1e-6 * det.abs());
    }

    #[test]
    fn companion_with_repeated_root() {
        // (z+1)^2 (z-2): z^3 - 3z - 2
        let a = m(&[&[0.0, 3.0, 2.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let re = sorted_re(eigenvalues(&a).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-7 && (re[1] + 1.0).abs() < 1e-7);
        assert!((re[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_norms() {
        let ev = symmetric_eigenvalues(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
        assert!((norm_2(&m(&[&[3.0, 0.0], &[0.0, 4.0]])).unwrap() - 4.0).abs() < 1e-15);
        let sr = spectral_radius(&Matrix::from_diag(&[0.5, -0.9])).unwrap();
        assert!((sr - 0.9).abs() < 1e-15);
        assert!((norm_2(&m(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap() - 1.618033988749895).abs() < 1e-14);
    }

    #[test]
    fn single_precision_works() {
        let a = Matrix::<f32>::from_f64_rows(&[[2.0, 0.0], [0.0, -3.0]]).unwrap();
        assert!((spectral_radius(&a).unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn too_large_is_rejected() {
        let a = Matrix::<f64>::identity(MAX_EIG_DIM + 1);
        assert!(matches!(eigenvalues(&a), Err(LinalgError::TooLarge { .. })));
    }
}
