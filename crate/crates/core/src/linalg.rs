//! Small dense symmetric matrices and Cholesky factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square or rectangular row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, v: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// Lower-triangular factor L with A = L Lᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    pub n: usize,
    pub l: Vec<f64>,
    /// Diagonal jitter that was added before factorizing.
    pub jitter: f64,
}

impl Cholesky {
    /// y = L z.
    #[inline]
    pub fn mul_into(&self, z: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let row = &self.l[i * self.n..i * self.n + i + 1];
            y[i] = row.iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
        }
    }
}

fn factor(a: &Matrix, jitter: f64) -> Option<Vec<f64>> {
    let n = a.rows;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j) + jitter;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// Cholesky with diagonal jitter escalated from 10⁻¹² to 10⁻⁸ times the mean
/// diagonal; fails beyond that.
pub fn cholesky_jittered(a: &Matrix) -> Result<Cholesky> {
    if a.rows != a.cols {
        return Err(Error::Dimension {
            expected: a.rows,
            got: a.cols,
        });
    }
    let n = a.rows;
    if let Some(l) = factor(a, 0.0) {
        return Ok(Cholesky { n, l, jitter: 0.0 });
    }
    let scale = (a.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    for e in [1e-12, 1e-11, 1e-10, 1e-9, 1e-8] {
        if let Some(l) = factor(a, e * scale) {
            return Ok(Cholesky { n, l, jitter: e * scale });
        }
    }
    Err(Error::Numerical(format!(
        "kernel matrix not positive semi-definite within jitter 1e-8 (trace {})",
        a.trace()
    )))
}

/// Cholesky of a positive semi-definite matrix: pivots below 1e-9 of the
/// largest diagonal are treated as exact zeros, so rank-deficient covariances
/// (e.g. identical coordinates) factor without jitter. A smaller cutoff lets
/// a near-zero pivot divide rounding noise into every later row.
pub fn cholesky_psd(a: &Matrix) -> Result<Cholesky> {
    let n = a.rows;
    let scale = a.max_diag().max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d < -1e-7 * scale {
            return Err(Error::Numerical(format!("covariance has negative pivot {d} (largest diagonal {scale})")));
        }
        if d <= tol {
            continue;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(Cholesky { n, l, jitter: 0.0 })
}

/// Square root F with A = F Fᵀ of a symmetric PSD matrix, from its
/// eigendecomposition. Stable for nearly collinear, rank-deficient
/// covariances where Cholesky pivots drown in rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdRoot {
    pub n: usize,
    /// Row-major n × n.
    pub f: Vec<f64>,
}

impl PsdRoot {
    /// y = F z.
    #[inline]
    pub fn mul_into(&self, z: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            y[i] = self.f[i * self.n..(i + 1) * self.n].iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }
}

/// Eigenvalues and column eigenvectors (row-major) by cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::Dimension { expected: n, got: a.cols });
    }
    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i * n + j].powi(2)).sum();
        if off.sqrt() <= 1e-15 * norm || norm == 0.0 {
            return Ok(((0..n).map(|i| m[i * n + i]).collect(), v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numerical("Jacobi eigenvalue iteration did not converge".into()))
}

/// Symmetric PSD square root; eigenvalues below 1e-12 of the largest are
/// zeroed and clearly negative ones are an error.
pub fn psd_root(a: &Matrix) -> Result<PsdRoot> {
    let n = a.rows;
    let (vals, vecs) = symmetric_eigen(a)?;
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let mut f = vec![0.0; n * n];
    for (k, &lam) in vals.iter().enumerate() {
        if lam < -1e-9 * top.max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!("covariance has negative eigenvalue {lam} (largest {top})")));
        }
        if lam <= 1e-12 * top {
            continue;
        }
        let r = lam.sqrt();
        for i in 0..n {
            f[i * n + k] = vecs[i * n + k] * r;
        }
    }
    Ok(PsdRoot { n, f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_reconstructs() {
        let a = Matrix {
            rows: 2,
            cols: 2,
            data: vec![4.0, 2.0, 2.0, 3.0],
        };
        let c = cholesky_jittered(&a).unwrap();
        assert_eq!(c.l, vec![2.0, 0.0, 1.0, 2f64.sqrt()]);
    }

    #[test]
    fn rank_one_psd() {
        let a = Matrix::filled(3, 3, 2.0);
        let c = cholesky_psd(&a).unwrap();
        let mut y = [0.0; 3];
        c.mul_into(&[1.0, 5.0, -3.0], &mut y);
        assert!(y.iter().all(|v| (v - 2f64.sqrt()).abs() < 1e-12));
        assert!(cholesky_jittered(&a).is_ok());
    }

    #[test]
    fn psd_root_of_collinear_gram() {
        // four nearly collinear vectors in R²: rank two
        let u = [[1.0, 0.0], [1.0, 1e-7], [1.0, 2e-7], [0.5, 0.5]];
        let mut a = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                a.set(i, j, u[i][0] * u[j][0] + u[i][1] * u[j][1]);
            }
        }
        let r = psd_root(&a).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ff: f64 = (0..4).map(|k| r.f[i * 4 + k] * r.f[j * 4 + k]).sum();
                assert!((ff - a.get(i, j)).abs() < 1e-13);
            }
        }
    }
}
