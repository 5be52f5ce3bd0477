//! Locally optimal block preconditioned conjugate gradient for the smallest eigenpairs of
//! a symmetric operator given only through matrix-vector products.

use crate::error::{Error, Result};
use crate::linalg::dense::{symmetric_eigen, DenseMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct LobpcgOptions<T> {
    /// Converged when `||A x - lambda x|| <= tol * (1 + |lambda|)` for unit `x`.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for LobpcgOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-8), max_iter: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct LobpcgResult<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub iterations: usize,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Modified Gram-Schmidt, applied twice; columns that lose all but a `sqrt(eps)` fraction
/// of their norm are dropped.
fn orthonormalize<T: Real>(cols: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let drop_tol = T::epsilon().sqrt();
    let mut out: Vec<Vec<T>> = Vec::with_capacity(cols.len());
    for mut v in cols {
        let n0 = dot(&v, &v).sqrt();
        if !(n0 > T::zero()) || !n0.is_finite() {
            continue;
        }
        for _ in 0..2 {
            for q in &out {
                let d = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= d * *qi;
                }
            }
        }
        let n1 = dot(&v, &v).sqrt();
        if n1 <= drop_tol * n0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= n1;
        }
        out.push(v);
    }
    out
}

/// Smallest `k` eigenpairs of the symmetric operator `a`, with preconditioner `precond`
/// (an approximation of a positive definite inverse) and initial block `x0`
/// (`x0.len() >= k`; extra columns act as guard vectors).
pub fn lobpcg<T, A, P>(mut a: A, mut precond: P, x0: Vec<Vec<T>>, k: usize, opts: LobpcgOptions<T>) -> Result<LobpcgResult<T>>
where
    T: Real,
    A: FnMut(&[T], &mut [T]),
    P: FnMut(&[T], &mut [T]),
{
    let n = x0.first().map(|v| v.len()).unwrap_or(0);
    let x = orthonormalize(x0);
    let block = x.len();
    if block < k || n == 0 {
        return Err(Error::InvalidInput(format!("initial block has rank {block} < {k}")));
    }
    let apply = |a: &mut A, v: &[Vec<T>]| -> Vec<Vec<T>> {
        v.iter()
            .map(|c| {
                let mut y = vec![T::zero(); n];
                a(c, &mut y);
                y
            })
            .collect()
    };

    // Rayleigh-Ritz on the initial block.
    let ax = apply(&mut a, &x);
    let (mut lam, mut x, mut ax) = rayleigh_ritz(&x, &ax, block);
    let mut p: Vec<Vec<T>> = Vec::new();
    let mut residuals = vec![T::zero(); block];
    let mut iterations = 0;
    loop {
        let r: Vec<Vec<T>> = (0..block)
            .map(|i| ax[i].iter().zip(&x[i]).map(|(av, xv)| *av - lam[i] * *xv).collect())
            .collect();
        for i in 0..block {
            residuals[i] = dot(&r[i], &r[i]).sqrt();
        }
        let converged = (0..k).all(|i| residuals[i] <= opts.tol * (T::one() + lam[i].abs()));
        if converged {
            break;
        }
        if iterations >= opts.max_iter {
            let worst = (0..k).map(|i| residuals[i].to_f()).fold(0.0, f64::max);
            return Err(Error::NoConvergence { iterations, residual: worst });
        }
        iterations += 1;

        let mut w = Vec::new();
        for i in 0..block {
            if residuals[i] > opts.tol * (T::one() + lam[i].abs()) * T::lit(0.1) {
                let mut z = vec![T::zero(); n];
                precond(&r[i], &mut z);
                w.push(z);
            }
        }
        let mut cols = x.clone();
        cols.extend(w);
        cols.append(&mut p);
        let s = orthonormalize(cols);
        let mut as_ = Vec::with_capacity(s.len());
        as_.extend(apply(&mut a, &s));
        let m = s.len();
        let g = DenseMatrix::from_fn(m, |i, j| (dot(&s[i], &as_[j]) + dot(&s[j], &as_[i])) * T::lit(0.5));
        let (vals, c) = symmetric_eigen(&g);
        let nb = block.min(m);
        let mut new_x = vec![vec![T::zero(); n]; nb];
        let mut new_ax = vec![vec![T::zero(); n]; nb];
        let mut new_p = vec![vec![T::zero(); n]; nb];
        for col in 0..nb {
            for row in 0..m {
                let coef = c[(row, col)];
                if coef == T::zero() {
                    continue;
                }
                for (dst, src) in new_x[col].iter_mut().zip(&s[row]) {
                    *dst += coef * *src;
                }
                for (dst, src) in new_ax[col].iter_mut().zip(&as_[row]) {
                    *dst += coef * *src;
                }
                if row >= block {
                    for (dst, src) in new_p[col].iter_mut().zip(&s[row]) {
                        *dst += coef * *src;
                    }
                }
            }
        }
        lam = vals[..nb].to_vec();
        x = new_x;
        ax = new_ax;
        p = new_p;
        if x.len() < block {
            return Err(Error::NoConvergence { iterations, residual: f64::NAN });
        }
    }
    Ok(LobpcgResult {
        values: lam[..k].to_vec(),
        vectors: x.into_iter().take(k).collect(),
        residuals: residuals[..k].to_vec(),
        iterations,
    })
}

#[allow(clippy::type_complexity)]
fn rayleigh_ritz<T: Real>(x: &[Vec<T>], ax: &[Vec<T>], block: usize) -> (Vec<T>, Vec<Vec<T>>, Vec<Vec<T>>) {
    let n = x[0].len();
    let g = DenseMatrix::from_fn(block, |i, j| (dot(&x[i], &ax[j]) + dot(&x[j], &ax[i])) * T::lit(0.5));
    let (vals, c) = symmetric_eigen(&g);
    let mut nx = vec![vec![T::zero(); n]; block];
    let mut nax = vec![vec![T::zero(); n]; block];
    for col in 0..block {
        for row in 0..block {
            let coef = c[(row, col)];
            for (d, s) in nx[col].iter_mut().zip(&x[row]) {
                *d += coef * *s;
            }
            for (d, s) in nax[col].iter_mut().zip(&ax[row]) {
                *d += coef * *s;
            }
        }
    }
    (vals, nx, nax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_laplacian_smallest_eigenvalues() {
        let n = 200;
        let a = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = 2.0 * x[i];
                if i > 0 {
                    s -= x[i - 1];
                }
                if i + 1 < n {
                    s -= x[i + 1];
                }
                y[i] = s;
            }
        };
        let x0: Vec<Vec<f64>> = (0..6).map(|p| (0..n).map(|i| ((p + 1) as f64 * (i as f64 + 0.5) * 0.01).sin() + if p == 0 { 1.0 } else { 0.0 }).collect()).collect();
        let res = lobpcg(a, |r: &[f64], z: &mut [f64]| z.copy_from_slice(r), x0, 4, LobpcgOptions { tol: 1e-9, max_iter: 5000 }).unwrap();
        for k in 0..4 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((res.values[k] - exact).abs() < 1e-10, "{} vs {exact}", res.values[k]);
        }
    }
}
