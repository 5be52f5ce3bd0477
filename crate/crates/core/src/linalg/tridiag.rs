//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for eigenvalues and
//! inverse iteration for eigenvectors.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len());
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Maximum absolute row sum.
    pub fn norm1(&self) -> T {
        let n = self.dim();
        let mut best = T::zero();
        for i in 0..n {
            let mut s = self.diag[i].abs();
            if i > 0 {
                s += self.off[i - 1].abs();
            }
            if i + 1 < n {
                s += self.off[i].abs();
            }
            best = best.max(s);
        }
        best
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    fn gerschgorin(&self) -> (T, T) {
        let n = self.dim();
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> T {
        let emax = self.off.iter().fold(T::one(), |m, e| m.max(*e * *e));
        T::min_positive_value() * emax
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: T) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < T::zero() {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn smallest_eigenvalues(&self, k: usize) -> Vec<T> {
        let k = k.min(self.dim());
        let (glo, ghi) = self.gerschgorin();
        let norm = self.norm1().max(T::min_positive_value());
        let eps = T::epsilon();
        let abstol = eps * norm;
        let widen = eps * norm * T::lit(4.0) + self.pivmin();
        let (glo, ghi) = (glo - widen, ghi + widen);
        let mut out = Vec::with_capacity(k);
        let mut lo = glo;
        for i in 0..k {
            let mut a = lo;
            let mut b = ghi;
            for _ in 0..200 {
                let tol = abstol + eps * T::lit(2.0) * a.abs().max(b.abs());
                if b - a <= tol {
                    break;
                }
                let mid = (a + b) * T::lit(0.5);
                if mid <= a || mid >= b {
                    break;
                }
                if self.sturm_count(mid) > i {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let lam = (a + b) * T::lit(0.5);
            out.push(lam);
            lo = a;
        }
        out
    }

    /// The `k` smallest eigenpairs with orthonormal eigenvectors.
    pub fn smallest_eigenpairs(&self, k: usize) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let n = self.dim();
        let k = k.min(n);
        let mut values = self.smallest_eigenvalues(k);
        let norm = self.norm1().max(T::min_positive_value());
        let eps = T::epsilon();
        let cluster_gap = T::lit(1e-3) * norm;
        let mut vectors: Vec<Vec<T>> = Vec::with_capacity(k);
        let mut cluster_start = 0;
        for i in 0..k {
            if i > 0 {
                let sep = T::lit(10.0) * eps * values[i].abs().max(norm * eps);
                if values[i] - values[i - 1] < sep {
                    values[i] = values[i - 1] + sep;
                }
                if values[i] - values[i - 1] > cluster_gap {
                    cluster_start = i;
                }
            }
            let v = self.inverse_iteration(values[i], &vectors[cluster_start..i]);
            vectors.push(v);
        }
        // Final eigenvalues from Rayleigh quotients, checked against the residual bound.
        let mut tx = vec![T::zero(); n];
        let mut worst = T::zero();
        for (lam, v) in values.iter_mut().zip(&vectors) {
            self.matvec(v, &mut tx);
            let rq: T = v.iter().zip(&tx).map(|(a, b)| *a * *b).sum();
            *lam = rq;
            let res: T = v.iter().zip(&tx).map(|(a, b)| (*b - rq * *a).powi(2)).sum::<T>().sqrt();
            worst = worst.max(res);
        }
        let limit = T::lit(1e-12).max(T::lit(64.0) * eps) * norm;
        if worst > limit {
            return Err(Error::NoConvergence { iterations: 5, residual: (worst / norm).to_f() });
        }
        Ok((values, vectors))
    }

    fn inverse_iteration(&self, lambda: T, cluster: &[Vec<T>]) -> Vec<T> {
        let n = self.dim();
        let norm = self.norm1().max(T::min_positive_value());
        let lu = TridiagLu::factor(self, lambda, T::epsilon() * norm);
        let golden = T::lit(0.618_033_988_749_894_8);
        let mut x: Vec<T> = (0..n)
            .map(|i| {
                let t = T::of(i + 1) * golden;
                t - t.floor() - T::lit(0.5)
            })
            .collect();
        normalize(&mut x);
        for _ in 0..5 {
            lu.solve(&mut x);
            for _ in 0..2 {
                for q in cluster {
                    let d: T = x.iter().zip(q).map(|(a, b)| *a * *b).sum();
                    for (xi, qi) in x.iter_mut().zip(q) {
                        *xi -= d * *qi;
                    }
                }
            }
            normalize(&mut x);
        }
        // Deterministic sign: first component of largest magnitude positive.
        let mut imax = 0;
        for i in 0..n {
            if x[i].abs() > x[imax].abs() * T::lit(1.0 + 1e-8) {
                imax = i;
            }
        }
        if x[imax] < T::zero() {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
        x
    }
}

pub(crate) fn normalize<T: Real>(x: &mut [T]) -> T {
    let s: T = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if s > T::zero() {
        for v in x.iter_mut() {
            *v /= s;
        }
    }
    s
}

/// LU factorization with partial pivoting of `T - lambda I` (tridiagonal, so `U` has two
/// super-diagonals).
struct TridiagLu<T> {
    l: Vec<T>,
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagLu<T> {
    fn factor(t: &SymTridiagonal<T>, lambda: T, tiny: T) -> Self {
        let n = t.dim();
        let mut u0: Vec<T> = t.diag.iter().map(|d| *d - lambda).collect();
        let mut u1: Vec<T> = t.off.clone();
        u1.push(T::zero());
        let mut u2 = vec![T::zero(); n];
        let mut lower: Vec<T> = t.off.clone();
        let mut l = vec![T::zero(); n];
        let mut swapped = vec![false; n];
        for i in 0..n.saturating_sub(1) {
            // rows i and i+1; row i+1 holds (lower[i], u0[i+1], u1[i+1])
            if lower[i].abs() > u0[i].abs() {
                swapped[i] = true;
                let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
                u0[i] = lower[i];
                u1[i] = u0[i + 1];
                u2[i] = u1[i + 1];
                let m = a0 / u0[i];
                l[i] = m;
                u0[i + 1] = a1 - m * u1[i];
                u1[i + 1] = a2 - m * u2[i];
                lower[i] = T::zero();
            } else {
                if u0[i].abs() < tiny {
                    u0[i] = if u0[i] < T::zero() { -tiny } else { tiny };
                }
                let m = lower[i] / u0[i];
                l[i] = m;
                u0[i + 1] -= m * u1[i];
                u1[i + 1] -= m * u2[i];
            }
        }
        if u0[n - 1].abs() < tiny {
            u0[n - 1] = if u0[n - 1] < T::zero() { -tiny } else { tiny };
        }
        Self { l, u0, u1, u2, swapped }
    }

    fn solve(&self, b: &mut [T]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            let bi = b[i];
            b[i + 1] -= self.l[i] * bi;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal<f64> {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn dirichlet_laplacian_eigenvalues() {
        let n = 50;
        let t = laplacian(n);
        let (vals, vecs) = t.smallest_eigenpairs(5).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
        }
        for a in 0..5 {
            for b in 0..5 {
                let d: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two() {
        let t = SymTridiagonal::<f64>::new(vec![1.0, 1.0], vec![-1.0]);
        let (vals, _) = t.smallest_eigenpairs(2).unwrap();
        assert!(vals[0].abs() < 1e-15);
        assert!((vals[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let t = laplacian(20);
        let vals = t.smallest_eigenvalues(20);
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(t.sturm_count(*v - 1e-9), i);
        }
    }

    #[test]
    fn works_in_f32() {
        let t = SymTridiagonal::<f32>::new(vec![2.0; 10], vec![-1.0; 9]);
        let vals = t.smallest_eigenvalues(1);
        let exact = 2.0 - 2.0 * (std::f32::consts::PI / 11.0).cos();
        assert!((vals[0] - exact).abs() < 1e-5);
    }
}
