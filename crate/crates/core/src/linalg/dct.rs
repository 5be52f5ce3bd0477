//! Orthonormal DCT-II/III through a same-length complex FFT, and the fast solver for
//! the shifted cell-centered Neumann Laplacian on a rectangle that it enables.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

pub struct Dct<T: Real> {
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    twiddle: Vec<Complex<T>>,
    scale0: T,
    scale: T,
}

impl<T: Real> Dct<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let twiddle = (0..n)
            .map(|k| {
                let a = -T::PI() * T::of(k) / (T::lit(2.0) * T::of(n));
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        Self {
            n,
            fwd,
            inv,
            twiddle,
            scale0: (T::one() / T::of(n)).sqrt(),
            scale: (T::lit(2.0) / T::of(n)).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Orthonormal DCT-II: `X_k = c_k sum_j x_j cos(pi k (2j+1) / 2n)`.
    pub fn forward(&self, x: &mut [T], buf: &mut Vec<Complex<T>>) {
        let n = self.n;
        buf.clear();
        buf.resize(n, Complex::new(T::zero(), T::zero()));
        for k in 0..n.div_ceil(2) {
            buf[k].re = x[2 * k];
        }
        for k in 0..n / 2 {
            buf[n - 1 - k].re = x[2 * k + 1];
        }
        self.fwd.process(buf);
        for k in 0..n {
            let c = if k == 0 { self.scale0 } else { self.scale };
            x[k] = c * (self.twiddle[k] * buf[k]).re;
        }
    }

    /// Inverse of [`Dct::forward`] (orthonormal DCT-III).
    pub fn inverse(&self, x: &mut [T], buf: &mut Vec<Complex<T>>) {
        let n = self.n;
        buf.clear();
        buf.resize(n, Complex::new(T::zero(), T::zero()));
        let coef = |k: usize| -> T {
            if k == 0 {
                x[0] / self.scale0
            } else if k < n {
                x[k] / self.scale
            } else {
                T::zero()
            }
        };
        for k in 0..n {
            let ck = coef(k);
            let cnk = if k == 0 { T::zero() } else { coef(n - k) };
            buf[k] = self.twiddle[k].conj() * Complex::new(ck, -cnk);
        }
        self.inv.process(buf);
        let inv_n = T::one() / T::of(n);
        for k in 0..n.div_ceil(2) {
            x[2 * k] = buf[k].re * inv_n;
        }
        for k in 0..n / 2 {
            x[2 * k + 1] = buf[n - 1 - k].re * inv_n;
        }
    }
}

/// Solves `(D + tau) u = r` where `D` is the unweighted cell-centered Neumann Laplacian on
/// an `nx * ny` grid (row-major, `x` fastest).
pub struct NeumannDctSolver<T: Real> {
    nx: usize,
    ny: usize,
    dx: Dct<T>,
    dy: Dct<T>,
    inv_eig: Vec<T>,
}

impl<T: Real> NeumannDctSolver<T> {
    pub fn new(nx: usize, ny: usize, hx: T, hy: T, tau: T) -> Self {
        let two = T::lit(2.0);
        let ex: Vec<T> = (0..nx)
            .map(|p| (two / hx * (T::PI() * T::of(p) / (two * T::of(nx))).sin()).powi(2))
            .collect();
        let ey: Vec<T> = (0..ny)
            .map(|q| (two / hy * (T::PI() * T::of(q) / (two * T::of(ny))).sin()).powi(2))
            .collect();
        let mut inv_eig = Vec::with_capacity(nx * ny);
        for q in 0..ny {
            for p in 0..nx {
                inv_eig.push(T::one() / (ex[p] + ey[q] + tau));
            }
        }
        Self { nx, ny, dx: Dct::new(nx), dy: Dct::new(ny), inv_eig }
    }

    pub fn solve(&self, u: &mut [T]) {
        let (nx, ny) = (self.nx, self.ny);
        let mut buf = Vec::new();
        let mut col = vec![T::zero(); ny];
        for row in u.chunks_mut(nx) {
            self.dx.forward(row, &mut buf);
        }
        for i in 0..nx {
            for j in 0..ny {
                col[j] = u[j * nx + i];
            }
            self.dy.forward(&mut col, &mut buf);
            for j in 0..ny {
                col[j] *= self.inv_eig[j * nx + i];
            }
            self.dy.inverse(&mut col, &mut buf);
            for j in 0..ny {
                u[j * nx + i] = col[j];
            }
        }
        for row in u.chunks_mut(nx) {
            self.dx.inverse(row, &mut buf);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dct2(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let c = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
                c * x
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos())
                    .sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn fast_dct_matches_direct_sum() {
        for n in [1usize, 2, 5, 8, 13, 64] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 4.5).collect();
            let mut y = x.clone();
            let dct = Dct::new(n);
            let mut buf = Vec::new();
            dct.forward(&mut y, &mut buf);
            let z = direct_dct2(&x);
            for k in 0..n {
                assert!((y[k] - z[k]).abs() < 1e-12, "n={n} k={k}");
            }
            dct.inverse(&mut y, &mut buf);
            for k in 0..n {
                assert!((y[k] - x[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn neumann_solver_inverts_stencil() {
        let (nx, ny, hx, hy, tau) = (6usize, 5usize, 0.3, 0.7, 1.5);
        let solver = NeumannDctSolver::new(nx, ny, hx, hy, tau);
        let r: Vec<f64> = (0..nx * ny).map(|i| ((i * 5 + 1) % 7) as f64 - 3.0).collect();
        let mut u = r.clone();
        solver.solve(&mut u);
        for j in 0..ny {
            for i in 0..nx {
                let c = u[j * nx + i];
                let mut s = tau * c;
                if i > 0 {
                    s += (c - u[j * nx + i - 1]) / (hx * hx);
                }
                if i + 1 < nx {
                    s += (c - u[j * nx + i + 1]) / (hx * hx);
                }
                if j > 0 {
                    s += (c - u[(j - 1) * nx + i]) / (hy * hy);
                }
                if j + 1 < ny {
                    s += (c - u[(j + 1) * nx + i]) / (hy * hy);
                }
                assert!((s - r[j * nx + i]).abs() < 1e-11);
            }
        }
    }
}
