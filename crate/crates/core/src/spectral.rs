//! Rayleigh quotients, restricted min-max pencils and the conjugation check between the
//! weighted Laplacian and its Schrodinger form.

use serde::Serialize;

use crate::cartesian::{assemble_cartesian, bindings, assemble_schrodinger, solve_cartesian, PlanarDensity, PlanarDomain, Shape, SparseSystem};
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::geometry::RevolutionProfile;
use crate::linalg::{generalized_eigen, DenseMatrix};
use crate::radial::{assemble_radial, assemble_schrodinger_radial, merge_modes, RadialGrid, RadialSystem};
use crate::scalar::Real;

/// Discrete energy `sum_e w_e (u_i - u_j)^2 + sum_i p_i u_i^2` and mass `sum_i m_i u_i^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormPair<T> {
    pub edges: Vec<(usize, usize, T)>,
    pub potential: Vec<T>,
    pub mass: Vec<T>,
}

impl<T: Real> QuadraticFormPair<T> {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Forms of a radial system without boundary term.
    pub fn from_radial(sys: &RadialSystem<T>) -> Result<Self> {
        if sys.robin != T::zero() {
            return Err(Error::InvalidInput("boundary terms are not representable as edge forms".into()));
        }
        let edges = sys.chain.edges.iter().enumerate().map(|(k, w)| (k, k + 1, *w)).collect();
        Ok(Self { edges, potential: sys.chain.excess.clone(), mass: sys.mass.clone() })
    }

    pub fn from_sparse(sys: &SparseSystem<T>) -> Self {
        Self { edges: sys.edges.clone(), potential: sys.excess.clone(), mass: sys.mass.clone() }
    }

    pub fn energy(&self, u: &[T]) -> T {
        self.bilinear_energy(u, u)
    }

    pub fn bilinear_energy(&self, u: &[T], v: &[T]) -> T {
        let mut s = T::zero();
        for &(i, j, w) in &self.edges {
            s += w * (u[i] - u[j]) * (v[i] - v[j]);
        }
        for ((p, a), b) in self.potential.iter().zip(u).zip(v) {
            s += *p * *a * *b;
        }
        s
    }

    pub fn mass_form(&self, u: &[T]) -> T {
        self.bilinear_mass(u, u)
    }

    pub fn bilinear_mass(&self, u: &[T], v: &[T]) -> T {
        self.mass.iter().zip(u).zip(v).map(|((m, a), b)| *m * *a * *b).sum()
    }

    /// The same forms with the energy weights multiplied by `c` (density `c sigma`, fixed `nu`).
    pub fn scale_energy(&self, c: T) -> Self {
        Self {
            edges: self.edges.iter().map(|&(i, j, w)| (i, j, w * c)).collect(),
            potential: self.potential.iter().map(|p| *p * c).collect(),
            mass: self.mass.clone(),
        }
    }
}

/// Smallest admissible mass in a Rayleigh quotient.
pub const MASS_FLOOR: f64 = 1e-300;

pub fn rayleigh_quotient<T: Real>(u: &[T], forms: &QuadraticFormPair<T>) -> Result<T> {
    if u.len() != forms.dim() {
        return Err(Error::InvalidInput(format!("vector of length {} for forms of size {}", u.len(), forms.dim())));
    }
    let m = forms.mass_form(u);
    if !(m.to_f() >= MASS_FLOOR) {
        return Err(Error::InvalidInput(format!("mass form {m} is below {MASS_FLOOR:e}")));
    }
    Ok(forms.energy(u) / m)
}

pub const MAX_SUBSPACE: usize = 64;

/// Largest Rayleigh quotient over the span of `subspace`: an upper bound for `mu_k`,
/// `k = subspace.len()`.
pub fn variational_mu_k<T: Real>(forms: &QuadraticFormPair<T>, subspace: &[Vec<T>]) -> Result<T> {
    let k = subspace.len();
    if k == 0 || k > MAX_SUBSPACE {
        return Err(Error::InvalidInput(format!("subspace dimension {k} must lie in 1..={MAX_SUBSPACE}")));
    }
    if subspace.iter().any(|u| u.len() != forms.dim()) {
        return Err(Error::InvalidInput("subspace vectors do not match the form size".into()));
    }
    let a = DenseMatrix::from_fn(k, |i, j| forms.bilinear_energy(&subspace[i], &subspace[j]));
    let b = DenseMatrix::from_fn(k, |i, j| forms.bilinear_mass(&subspace[i], &subspace[j]));
    let (vals, _) = generalized_eigen(&a, &b)?;
    Ok(vals[k - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport<T> {
    pub weighted: Vec<T>,
    pub schrodinger: Vec<T>,
    /// `max_k |lambda_k(L) - lambda_k(H)| / (1 + lambda_k(L))`.
    pub max_deviation: T,
}

fn report<T: Real>(weighted: Vec<T>, schrodinger: Vec<T>) -> EquivalenceReport<T> {
    let max_deviation = weighted
        .iter()
        .zip(&schrodinger)
        .map(|(a, b)| (*a - *b).abs() / (T::one() + *a))
        .fold(T::zero(), |m, v| m.max(v));
    EquivalenceReport { weighted, schrodinger, max_deviation }
}

/// Compares the first `k` eigenvalues (with multiplicity) of `L_sigma` and
/// `H_sigma = Delta + |f'|^2/4 + (Delta f)/2` on a revolution manifold.
pub fn schrodinger_equivalence_check<T: Real>(
    p: &RevolutionProfile<T>,
    d: &RadialDensity<T>,
    k: usize,
    l_max: usize,
    grid: &RadialGrid<T>,
) -> Result<EquivalenceReport<T>> {
    if !d.is_c2() {
        return Err(Error::InvalidDensity("the conjugation check needs a C^2 density".into()));
    }
    let weighted = (0..=l_max).map(|l| assemble_radial(p, d, l, grid)).collect::<Result<Vec<_>>>()?;
    let conj = (0..=l_max).map(|l| assemble_schrodinger_radial(p, d, l, grid)).collect::<Result<Vec<_>>>()?;
    let a = merge_modes(p, &weighted, k, grid, d.id())?.expanded();
    let b = merge_modes(p, &conj, k, grid, d.id())?.expanded();
    if a.len() < k || b.len() < k {
        return Err(Error::InvalidInput(format!("fewer than {k} eigenvalues available")));
    }
    Ok(report(a[..k].to_vec(), b[..k].to_vec()))
}

/// The same comparison on the circle of length `len` with `sigma = exp(-f(t))`.
pub fn circle_equivalence_check<T: Real>(len: T, f: &Expr, k: usize, cells: usize, tol: T) -> Result<EquivalenceReport<T>> {
    let dom = PlanarDomain::circle(len, cells, PlanarDensity::Log(f.clone()));
    let weighted = solve_cartesian(&assemble_cartesian(&dom)?, k, tol)?.values;
    let d1 = f.derivative(Var::T);
    let d2 = d1.derivative(Var::T);
    let potential = |pt: [T; 2]| {
        let b = bindings(pt);
        let (a1, a2) = (d1.eval(&b), d2.eval(&b));
        T::lit(0.25) * a1 * a1 - T::lit(0.5) * a2
    };
    let sys = assemble_schrodinger(Shape::Circle { len }, cells, 1, potential)?;
    let conj = solve_cartesian(&sys, k, tol)?.values;
    Ok(report(weighted, conj))
}
