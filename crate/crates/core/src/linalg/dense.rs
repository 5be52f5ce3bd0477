//! Small dense symmetric kernels: cyclic Jacobi, Cholesky and the generalized pencil.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a symmetric matrix. Eigenvalues ascending; column `j` of the
/// returned matrix is the eigenvector of eigenvalue `j`.
pub fn symmetric_eigen<T: Real>(a: &DenseMatrix<T>) -> (Vec<T>, DenseMatrix<T>) {
    let n = a.n;
    let mut a = a.clone();
    for i in 0..n {
        for j in 0..i {
            let s = (a[(i, j)] + a[(j, i)]) * T::lit(0.5);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += a[(i, i)] * a[(i, i)];
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vecs = DenseMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        // deterministic sign: largest entry positive
        let mut imax = 0;
        for k in 0..n {
            if v[(k, src)].abs() > v[(imax, src)].abs() * T::lit(1.0 + 1e-10) {
                imax = k;
            }
        }
        let sign = if v[(imax, src)] < T::zero() { -T::one() } else { T::one() };
        for k in 0..n {
            vecs[(k, col)] = sign * v[(k, src)];
        }
    }
    (vals, vecs)
}

/// Lower Cholesky factor of a symmetric positive definite matrix. A pivot at or below
/// `rel_tol * max diag` is reported as rank deficiency.
pub fn cholesky<T: Real>(b: &DenseMatrix<T>, rel_tol: T) -> Result<DenseMatrix<T>> {
    let n = b.n;
    let dmax = (0..n).fold(T::zero(), |m, i| m.max(b[(i, i)].abs()));
    let mut l = DenseMatrix::zeros(n);
    for j in 0..n {
        let mut d = b[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > rel_tol * dmax) || dmax == T::zero() {
            return Err(Error::RankDeficient { pivot: j, value: d.to_f() });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Eigenvalues (ascending) and `B`-orthonormal eigenvectors of the pencil `A x = lambda B x`.
pub fn generalized_eigen<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let n = a.n;
    let l = cholesky(b, T::lit(1e-12))?;
    // C = L^{-1} A L^{-T}
    let mut y = a.clone();
    for col in 0..n {
        forward_sub(&l, &mut y, col);
    }
    let mut c = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            c[(j, i)] = y[(i, j)];
        }
    }
    for col in 0..n {
        forward_sub(&l, &mut c, col);
    }
    let (vals, z) = symmetric_eigen(&c);
    // x = L^{-T} z
    let mut x = z;
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = x[(i, col)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, col)];
            }
            x[(i, col)] = s / l[(i, i)];
        }
    }
    Ok((vals, x))
}

fn forward_sub<T: Real>(l: &DenseMatrix<T>, m: &mut DenseMatrix<T>, col: usize) {
    let n = l.n;
    for i in 0..n {
        let mut s = m[(i, col)];
        for k in 0..i {
            s -= l[(i, k)] * m[(k, col)];
        }
        m[(i, col)] = s / l[(i, i)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = DenseMatrix::from_fn(4, |i, j| if i == j { 2.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 });
        let (vals, vecs) = symmetric_eigen(&a);
        for k in 0..4 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / 5.0).cos();
            assert!((vals[k] - exact).abs() < 1e-14);
            for i in 0..4 {
                let av: f64 = (0..4).map(|j| a[(i, j)] * vecs[(j, k)]).sum();
                assert!((av - vals[k] * vecs[(i, k)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn generalized_pencil() {
        let a = DenseMatrix::from_fn(2, |i, j| [[2.0, 1.0], [1.0, 3.0]][i][j]);
        let b = DenseMatrix::from_fn(2, |i, j| [[2.0, 0.0], [0.0, 1.0]][i][j]);
        let (vals, x) = generalized_eigen(&a, &b).unwrap();
        // det(A - l B) = (2-2l)(3-l) - 1 = 2l^2 - 8l + 5
        let disc = (64.0f64 - 40.0).sqrt();
        assert!((vals[0] - (8.0 - disc) / 4.0).abs() < 1e-14);
        assert!((vals[1] - (8.0 + disc) / 4.0).abs() < 1e-14);
        let bnorm = 2.0 * x[(0, 0)].powi(2) + x[(1, 0)].powi(2);
        assert!((bnorm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_reports_rank_deficiency() {
        let b = DenseMatrix::from_fn(2, |_, _| 1.0);
        assert!(matches!(cholesky(&b, 1e-12), Err(Error::RankDeficient { pivot: 1, .. })));
    }
}
