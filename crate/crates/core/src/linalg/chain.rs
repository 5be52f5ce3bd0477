//! Exact factorization of weighted path and cycle Laplacians with a non-negative
//! diagonal excess, carried out in positive arithmetic so that solves stay accurate
//! when the edge weights span many orders of magnitude.

use crate::scalar::Real;

/// `A = sum_k edges[k] (e_k - e_{k+1})(e_k - e_{k+1})^T
///    + closing (e_{n-1} - e_0)(e_{n-1} - e_0)^T + diag(excess)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLaplacian<T> {
    pub edges: Vec<T>,
    pub closing: T,
    pub excess: Vec<T>,
}

impl<T: Real> ChainLaplacian<T> {
    pub fn path(edges: Vec<T>, excess: Vec<T>) -> Self {
        assert_eq!(edges.len() + 1, excess.len());
        Self { edges, closing: T::zero(), excess }
    }

    pub fn cycle(edges: Vec<T>, closing: T, excess: Vec<T>) -> Self {
        assert_eq!(edges.len() + 1, excess.len());
        Self { edges, closing, excess }
    }

    pub fn dim(&self) -> usize {
        self.excess.len()
    }

    pub fn is_pure(&self) -> bool {
        self.excess.iter().all(|e| *e == T::zero())
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            y[i] = self.excess[i] * x[i];
        }
        for (k, a) in self.edges.iter().enumerate() {
            let d = *a * (x[k] - x[k + 1]);
            y[k] += d;
            y[k + 1] -= d;
        }
        if n > 1 && self.closing != T::zero() {
            let d = self.closing * (x[n - 1] - x[0]);
            y[n - 1] += d;
            y[0] -= d;
        }
    }

    /// Quadratic form `x^T A x` evaluated in difference form.
    pub fn energy(&self, x: &[T]) -> T {
        let n = self.dim();
        let mut s = T::zero();
        for (k, a) in self.edges.iter().enumerate() {
            s += *a * (x[k] - x[k + 1]).powi(2);
        }
        if n > 1 {
            s += self.closing * (x[n - 1] - x[0]).powi(2);
        }
        for (e, v) in self.excess.iter().zip(x) {
            s += *e * *v * *v;
        }
        s
    }

    /// Same chain with `shift * mass` added to the excess.
    pub fn shifted(&self, shift: T, mass: &[T]) -> Self {
        let excess = self.excess.iter().zip(mass).map(|(e, m)| *e + shift * *m).collect();
        Self { edges: self.edges.clone(), closing: self.closing, excess }
    }

    pub fn factor(&self) -> ChainFactor<T> {
        ChainFactor::new(self)
    }
}

/// `L D L^T` factor eliminating nodes `0..n-1` in order with the last node kept as ground.
#[derive(Debug, Clone)]
pub struct ChainFactor<T> {
    pivots: Vec<T>,
    next: Vec<T>,
    to_last: Vec<T>,
    grounded: bool,
}

impl<T: Real> ChainFactor<T> {
    fn new(a: &ChainLaplacian<T>) -> Self {
        let n = a.dim();
        let mut pivots = vec![T::zero(); n];
        let mut next = vec![T::zero(); n];
        let mut to_last = vec![T::zero(); n];
        if n == 1 {
            pivots[0] = a.excess[0];
            return Self { grounded: pivots[0] == T::zero(), pivots, next, to_last };
        }
        let mut c = vec![T::zero(); n];
        let mut e = a.excess.clone();
        c[0] = a.closing;
        let last = n - 1;
        for k in 0..last {
            let mut ak = a.edges[k];
            if k + 1 == last {
                c[k] += ak;
                ak = T::zero();
            }
            let p = ak + c[k] + e[k];
            pivots[k] = p;
            if p == T::zero() {
                continue;
            }
            next[k] = ak / p;
            to_last[k] = c[k] / p;
            let (ck, ek) = (c[k], e[k]);
            if k + 1 < last {
                c[k + 1] += ak * ck / p;
                e[k + 1] += ak * ek / p;
            }
            e[last] += ck * ek / p;
        }
        pivots[last] = e[last];
        let scale = pivots.iter().fold(T::zero(), |m, p| m.max(*p));
        let grounded = pivots[last] <= T::epsilon() * T::epsilon() * scale;
        Self { pivots, next, to_last, grounded }
    }

    /// True when the chain has no positive excess; solves then pin the last node to 0.
    pub fn is_grounded(&self) -> bool {
        self.grounded
    }

    /// Solves `A x = b` in place. For grounded factors the last row is dropped and
    /// `x_{n-1} = 0`, which solves the full system whenever `sum(b) = 0`, up to constants.
    pub fn solve(&self, b: &mut [T]) {
        let n = b.len();
        if n == 1 {
            b[0] = if self.grounded { T::zero() } else { b[0] / self.pivots[0] };
            return;
        }
        let last = n - 1;
        for k in 0..last {
            let z = b[k];
            if k + 1 < last {
                b[k + 1] += self.next[k] * z;
            }
            b[last] += self.to_last[k] * z;
        }
        b[last] = if self.grounded { T::zero() } else { b[last] / self.pivots[last] };
        let xl = b[last];
        for k in (0..last).rev() {
            let mut x = if self.pivots[k] == T::zero() { T::zero() } else { b[k] / self.pivots[k] };
            if k + 1 < last {
                x += self.next[k] * b[k + 1];
            }
            x += self.to_last[k] * xl;
            b[k] = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(a: &ChainLaplacian<f64>) -> Vec<Vec<f64>> {
        let n = a.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut y = vec![0.0; n];
            a.matvec(&e, &mut y);
            for j in 0..n {
                m[j][i] = y[j];
            }
        }
        m
    }

    #[test]
    fn solves_path_and_cycle_with_excess() {
        for closing in [0.0, 0.7] {
            let edges = vec![1.0, 2.0, 0.5, 3.0, 1.5];
            let excess = vec![0.1, 0.0, 0.3, 0.0, 0.2, 0.05];
            let a = ChainLaplacian::cycle(edges, closing, excess);
            let b = vec![1.0, -2.0, 0.5, 0.25, 3.0, -1.0];
            let mut x = b.clone();
            a.factor().solve(&mut x);
            let m = dense(&a);
            for i in 0..6 {
                let r: f64 = (0..6).map(|j| m[i][j] * x[j]).sum();
                assert!((r - b[i]).abs() < 1e-12, "row {i}: {r} vs {}", b[i]);
            }
        }
    }

    #[test]
    fn grounded_solve_for_pure_cycle() {
        let a = ChainLaplacian::<f64>::cycle(vec![1.0, 2.0, 3.0, 4.0], 5.0, vec![0.0; 5]);
        let f = a.factor();
        assert!(f.is_grounded());
        let b = vec![1.0, -1.0, 2.0, 0.5, -2.5];
        let mut x = b.clone();
        f.solve(&mut x);
        assert_eq!(x[4], 0.0);
        let mut y = vec![0.0; 5];
        a.matvec(&x, &mut y);
        for i in 0..5 {
            assert!((y[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_weights_keep_relative_accuracy() {
        // Two heavy blocks joined by a vanishingly weak link.
        let edges = vec![1.0, 1.0, 1e-40, 1.0, 1.0];
        let a = ChainLaplacian::<f64>::path(edges, vec![0.0; 6]);
        let b = vec![1.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let mut x = b.clone();
        a.factor().solve(&mut x);
        // potential drop across the weak link equals 1e40
        assert!(((x[2] - x[3]) / 1e40 - 1.0).abs() < 1e-14);
        assert!((x[0] - x[1] - 1.0).abs() / 1e40 < 1e-15);
    }
}
