//! Separated radial eigenproblems of the weighted Laplacian on revolution manifolds.
//!
//! For angular degree `l` the eigenfunctions `phi(r) Y_l` satisfy
//! `-(1/w)(w phi')' + mu_l phi / theta^2 = lambda phi` with `w = theta^{n-1} sigma`.
//! The discretization is a cell-centered finite-volume scheme in flux form.

use serde::Serialize;

use crate::density::{node_shift, schrodinger_potential, RadialDensity};
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::geometry::{ProfileKind, RevolutionProfile};
use crate::linalg::{ChainLaplacian, SymTridiagonal};
use crate::scalar::{angular_eigenvalue, harmonic_multiplicity, Real};

/// Cell-centered grid `r_i = (i + 1/2) h`, `h = R/m`, with cell masses `weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    pub m: usize,
    pub h: T,
    pub r_max: T,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    /// Grid with plain cell lengths `h` as weights.
    pub fn uniform(r_max: T, m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidInput(format!("radial grid needs at least 3 cells, got {m}")));
        }
        if !(r_max > T::zero()) {
            return Err(Error::InvalidInput(format!("grid radius {r_max} must be positive")));
        }
        let h = r_max / T::of(m);
        let nodes = (0..m).map(|i| (T::of(i) + T::lit(0.5)) * h).collect();
        Ok(Self { m, h, r_max, nodes, weights: vec![h; m] })
    }

    /// Grid whose weights are the `sigma`-weighted cell masses `theta^{n-1} sigma h`, with
    /// `sigma` normalized by its largest nodal value.
    pub fn weighted(p: &RevolutionProfile<T>, d: &RadialDensity<T>, m: usize) -> Result<Self> {
        let mut g = Self::uniform(p.radius(), m)?;
        let shift = node_shift(d, &g.nodes);
        g.weights = g.nodes.iter().map(|r| p.area_factor(*r) * (shift - d.f(*r)).exp() * g.h).collect();
        check_positive(&g.weights, "cell mass")?;
        Ok(g)
    }

    /// Position of the interface between cells `i` and `i + 1`.
    pub fn interface(&self, i: usize) -> T {
        T::of(i + 1) * self.h
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::uniform(self.r_max, self.m * factor)
    }
}

fn check_positive<T: Real>(v: &[T], what: &str) -> Result<()> {
    match v.iter().position(|x| !(*x > T::zero()) || !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("{what} {i} is {} (density range exceeds the scalar type)", v[i]))),
        None => Ok(()),
    }
}

/// Boundary behaviour of a separated mode at the two ends of `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RadialBc {
    /// `l = 0` on a manifold with boundary: regular pole, Neumann at `R`.
    RegularNeumann,
    /// `l >= 1` on a manifold with boundary: `phi(0) = 0`, Neumann at `R`.
    DirichletNeumann,
    /// `l = 0` on a closed manifold: regular at both poles.
    RegularBoth,
    /// `l >= 1` on a closed manifold: `phi(0) = phi(R) = 0`.
    DirichletBoth,
}

impl RadialBc {
    pub fn select(kind: ProfileKind, l: usize) -> Self {
        match (kind, l) {
            (ProfileKind::WithBoundary, 0) => Self::RegularNeumann,
            (ProfileKind::WithBoundary, _) => Self::DirichletNeumann,
            (ProfileKind::Closed, 0) => Self::RegularBoth,
            (ProfileKind::Closed, _) => Self::DirichletBoth,
        }
    }

    fn dirichlet_pole(self) -> bool {
        matches!(self, Self::DirichletNeumann | Self::DirichletBoth)
    }

    fn dirichlet_end(self) -> bool {
        self == Self::DirichletBoth
    }
}

/// Measure in the denominator of the Rayleigh quotient.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    /// `sigma dv`.
    Sigma,
    /// `dv`.
    Riemannian,
    /// `w(r) dv` for a positive radial weight `w`.
    Weight(Expr),
}

/// Discrete pencil `(S, M)` of one angular mode. `S` is the chain Laplacian `chain` plus a
/// rank-one boundary term `robin * (3 phi_{m-1} - phi_{m-2})^2 / 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSystem<T> {
    pub l: usize,
    pub mu_l: T,
    pub bc: RadialBc,
    pub chain: ChainLaplacian<T>,
    pub robin: T,
    pub mass: Vec<T>,
}

impl<T: Real> RadialSystem<T> {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness(&self) -> SymTridiagonal<T> {
        let m = self.dim();
        let mut diag = self.chain.excess.clone();
        let mut off = vec![T::zero(); m - 1];
        for (k, a) in self.chain.edges.iter().enumerate() {
            diag[k] += *a;
            diag[k + 1] += *a;
            off[k] = -*a;
        }
        if self.robin != T::zero() {
            let c = self.robin;
            diag[m - 1] += c * T::lit(2.25);
            diag[m - 2] += c * T::lit(0.25);
            off[m - 2] -= c * T::lit(0.75);
        }
        SymTridiagonal::new(diag, off)
    }

    /// `phi^T S phi`, with the chain part in difference form.
    pub fn energy(&self, phi: &[T]) -> T {
        let mut e = self.chain.energy(phi);
        if self.robin != T::zero() {
            let m = phi.len();
            let b = (T::lit(3.0) * phi[m - 1] - phi[m - 2]) * T::lit(0.5);
            e += self.robin * b * b;
        }
        e
    }

    pub fn mass_norm2(&self, phi: &[T]) -> T {
        phi.iter().zip(&self.mass).map(|(v, w)| *w * *v * *v).sum()
    }
}

fn interface_weight<T: Real>(p: &RevolutionProfile<T>, sigma: impl Fn(T) -> T, r: T) -> T {
    p.area_factor(r) * sigma(r)
}

fn mode_chain<T: Real>(p: &RevolutionProfile<T>, l: usize, grid: &RadialGrid<T>, sigma: impl Fn(T) -> T) -> Result<(ChainLaplacian<T>, RadialBc, T)> {
    let n = p.dim();
    let m = grid.m;
    let h = grid.h;
    let bc = RadialBc::select(p.kind(), l);
    let mu = angular_eigenvalue::<T>(n, l);
    let edges: Vec<T> = (0..m - 1).map(|i| interface_weight(p, &sigma, grid.interface(i)) / h).collect();
    let mut excess: Vec<T> = grid
        .nodes
        .iter()
        .map(|r| {
            if l == 0 {
                T::zero()
            } else {
                let t = p.theta(*r);
                mu * p.area_factor(*r) * sigma(*r) * h / (t * t)
            }
        })
        .collect();
    let two = T::lit(2.0);
    if bc.dirichlet_pole() {
        excess[0] += two * interface_weight(p, &sigma, T::zero()) / h;
    }
    if bc.dirichlet_end() {
        excess[m - 1] += two * interface_weight(p, &sigma, p.radius()) / h;
    }
    for (k, e) in edges.iter().enumerate() {
        if !(*e > T::zero()) || !e.is_finite() {
            return Err(Error::NonFinite(format!("interface weight {k} is {e}")));
        }
    }
    Ok((ChainLaplacian::path(edges, excess), bc, mu))
}

/// Flux-form pencil of `L_sigma` restricted to angular degree `l`, with mass `sigma dv`.
pub fn assemble_radial<T: Real>(p: &RevolutionProfile<T>, d: &RadialDensity<T>, l: usize, grid: &RadialGrid<T>) -> Result<RadialSystem<T>> {
    assemble_with_measure(p, d, l, grid, &Measure::Sigma)
}

/// As [`assemble_radial`] with an arbitrary mass measure.
pub fn assemble_with_measure<T: Real>(
    p: &RevolutionProfile<T>,
    d: &RadialDensity<T>,
    l: usize,
    grid: &RadialGrid<T>,
    measure: &Measure,
) -> Result<RadialSystem<T>> {
    check_grid(p, grid)?;
    let shift = node_shift(d, &grid.nodes);
    let sigma = |r: T| (shift - d.f(r)).exp();
    let (chain, bc, mu_l) = mode_chain(p, l, grid, sigma)?;
    let mass: Vec<T> = grid
        .nodes
        .iter()
        .map(|r| {
            let base = p.area_factor(*r) * grid.h;
            match measure {
                Measure::Sigma => base * sigma(*r),
                // the energy carries the factor exp(shift); so must the mass
                Measure::Riemannian => base * shift.exp(),
                Measure::Weight(w) => base * shift.exp() * w.eval1(Var::R, *r),
            }
        })
        .collect();
    check_positive(&mass, "mass")?;
    Ok(RadialSystem { l, mu_l, bc, chain, robin: T::zero(), mass })
}

/// Pencil of the conjugate operator `H = Delta + |f'|^2/4 + (Delta f)/2` with respect to `dv`.
/// On a boundary the Neumann condition of `L_sigma` becomes the Robin term
/// `f'(R) theta^{n-1}(R) v(R)^2 / 2`, with `v(R)` extrapolated from the last two cells.
pub fn assemble_schrodinger_radial<T: Real>(p: &RevolutionProfile<T>, d: &RadialDensity<T>, l: usize, grid: &RadialGrid<T>) -> Result<RadialSystem<T>> {
    check_grid(p, grid)?;
    let (mut chain, bc, mu_l) = mode_chain(p, l, grid, |_| T::one())?;
    let v = schrodinger_potential(d, p);
    let mut mass = Vec::with_capacity(grid.m);
    for (i, r) in grid.nodes.iter().enumerate() {
        let cell = p.area_factor(*r) * grid.h;
        chain.excess[i] += v(*r) * cell;
        mass.push(cell);
    }
    check_positive(&mass, "mass")?;
    let robin = match p.kind() {
        ProfileKind::WithBoundary => T::lit(0.5) * d.f_prime(p.radius()) * p.area_factor(p.radius()),
        ProfileKind::Closed => T::zero(),
    };
    Ok(RadialSystem { l, mu_l, bc, chain, robin, mass })
}

fn check_grid<T: Real>(p: &RevolutionProfile<T>, grid: &RadialGrid<T>) -> Result<()> {
    if (grid.r_max - p.radius()).abs() > T::lit(1e-12) * p.radius() {
        return Err(Error::InvalidInput(format!("grid radius {} does not match profile radius {}", grid.r_max, p.radius())));
    }
    if p.dim() < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub lambda: T,
    /// Mass-orthonormal nodal values.
    pub vector: Vec<T>,
}

/// The `k` smallest eigenpairs of `S phi = lambda M phi`, computed on the similar standard
/// form `M^{-1/2} S M^{-1/2}`. Returned eigenvalues are Rayleigh quotients.
pub fn solve_radial<T: Real>(sys: &RadialSystem<T>, k: usize) -> Result<Vec<EigenPair<T>>> {
    let m = sys.dim();
    if k == 0 || k > m {
        return Err(Error::InvalidInput(format!("requested {k} eigenpairs of a {m}-dimensional system")));
    }
    let s = sys.stiffness();
    let root: Vec<T> = sys.mass.iter().map(|w| w.sqrt()).collect();
    let diag = s.diag.iter().zip(&sys.mass).map(|(a, w)| *a / *w).collect();
    let off = s.off.iter().enumerate().map(|(i, a)| *a / (root[i] * root[i + 1])).collect();
    let (_, ys) = SymTridiagonal::new(diag, off).smallest_eigenpairs(k)?;
    let mut pairs: Vec<EigenPair<T>> = ys
        .into_iter()
        .map(|y| {
            let vector: Vec<T> = y.iter().zip(&root).map(|(v, r)| *v / *r).collect();
            let lambda = sys.energy(&vector) / sys.mass_norm2(&vector);
            EigenPair { lambda, vector }
        })
        .collect();
    pairs.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry<T> {
    pub lambda: T,
    pub l: Option<usize>,
    pub radial_index: Option<usize>,
    pub multiplicity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult<T> {
    pub entries: Vec<SpectrumEntry<T>>,
    pub grid_m: usize,
    pub geometry: String,
    pub density: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<T: Real> SpectrumResult<T> {
    /// Keeps the leading entries that cover the first `k` eigenvalues with multiplicity and
    /// re-evaluates the omitted-mode warning of a revolution spectrum with modes `0..=l_max`.
    pub fn truncated(mut self, k: usize, p: &RevolutionProfile<T>, l_max: usize, grid: &RadialGrid<T>) -> Self {
        let mut seen = 0;
        let keep = self
            .entries
            .iter()
            .take_while(|e| {
                let before = seen;
                seen += e.multiplicity.unwrap_or(1);
                before < k
            })
            .count();
        self.entries.truncate(keep);
        self.warnings = self.entries.last().and_then(|e| omitted_mode_warning(p, l_max, grid, e.lambda)).into_iter().collect();
        self
    }

    /// Eigenvalues repeated according to multiplicity, ascending.
    pub fn expanded(&self) -> Vec<T> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.multiplicity.unwrap_or(1) {
                out.push(e.lambda);
            }
        }
        out
    }
}

pub const DEFAULT_L_MAX: usize = 8;
pub const DEFAULT_K_PER_MODE: usize = 10;

/// Eigenvalues of all modes `l = 0..=l_max` (`k_per_mode` each), merged and sorted by
/// `(lambda, l, radial_index)`.
pub fn full_spectrum<T: Real>(
    p: &RevolutionProfile<T>,
    d: &RadialDensity<T>,
    l_max: usize,
    k_per_mode: usize,
    grid: &RadialGrid<T>,
) -> Result<SpectrumResult<T>> {
    spectrum_with_measure(p, d, l_max, k_per_mode, grid, &Measure::Sigma)
}

/// As [`full_spectrum`] for the pair `(sigma, nu)`: the values `mu_k(sigma, nu)`.
pub fn spectrum_with_measure<T: Real>(
    p: &RevolutionProfile<T>,
    d: &RadialDensity<T>,
    l_max: usize,
    k_per_mode: usize,
    grid: &RadialGrid<T>,
    measure: &Measure,
) -> Result<SpectrumResult<T>> {
    let modes = (0..=l_max).map(|l| assemble_with_measure(p, d, l, grid, measure)).collect::<Result<Vec<_>>>()?;
    merge_modes(p, &modes, k_per_mode, grid, d.id())
}

/// Warns when `lambda` exceeds the lower estimate `l(l+n-1) / max theta^2`, `l = l_max + 1`,
/// for eigenvalues of modes that were not computed.
fn omitted_mode_warning<T: Real>(p: &RevolutionProfile<T>, l_max: usize, grid: &RadialGrid<T>, lambda: T) -> Option<String> {
    let peak = grid.nodes.iter().fold(T::zero(), |m, r| m.max(p.theta(*r)));
    let omitted = angular_eigenvalue::<T>(p.dim(), l_max + 1) / (peak * peak);
    (lambda > omitted).then(|| {
        format!("largest reported eigenvalue {lambda} exceeds the lower estimate {omitted} for the omitted mode l = {}", l_max + 1)
    })
}

pub(crate) fn merge_modes<T: Real>(
    p: &RevolutionProfile<T>,
    modes: &[RadialSystem<T>],
    k_per_mode: usize,
    grid: &RadialGrid<T>,
    density_id: String,
) -> Result<SpectrumResult<T>> {
    if modes.len() < 2 {
        return Err(Error::InvalidInput("l_max must be at least 1".into()));
    }
    let n = p.dim();
    let mut entries = Vec::new();
    for sys in modes {
        for (i, pair) in solve_radial(sys, k_per_mode.min(sys.dim()))?.into_iter().enumerate() {
            entries.push(SpectrumEntry { lambda: pair.lambda, l: Some(sys.l), radial_index: Some(i), multiplicity: Some(harmonic_multiplicity(n, sys.l)) });
        }
    }
    entries.sort_by(|a, b| {
        a.lambda
            .partial_cmp(&b.lambda)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.l.cmp(&b.l))
            .then(a.radial_index.cmp(&b.radial_index))
    });
    let l_max = modes.len() - 1;
    let warnings = entries.last().and_then(|e| omitted_mode_warning(p, l_max, grid, e.lambda)).into_iter().collect();
    Ok(SpectrumResult { entries, grid_m: grid.m, geometry: p.id(), density: density_id, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    #[serde(rename = "radial")]
    Radial,
    #[serde(rename = "l1")]
    L1,
}

/// Relative gap below which the two branches count as tied; ties report `l1`.
pub const BRANCH_TIE: f64 = 1e-6;

/// First positive eigenvalue: the smaller of the first excited `l = 0` eigenvalue and the
/// lowest `l = 1` eigenvalue.
pub fn lambda2<T: Real>(p: &RevolutionProfile<T>, d: &RadialDensity<T>, grid: &RadialGrid<T>) -> Result<(T, Branch)> {
    let radial = solve_radial(&assemble_radial(p, d, 0, grid)?, 2)?[1].lambda;
    let l1 = solve_radial(&assemble_radial(p, d, 1, grid)?, 1)?[0].lambda;
    if l1 <= radial * (T::one() + T::lit(BRANCH_TIE)) {
        Ok((l1, Branch::L1))
    } else {
        Ok((radial, Branch::Radial))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refinement<T> {
    /// Eigenvalues on `m`, `2m` and `4m` cells.
    pub values: [T; 3],
    /// Second-order Richardson extrapolation from the two finest grids.
    pub extrapolated: T,
    /// `log2` of the ratio of successive differences; `None` once the differences fall
    /// below `1e-13`.
    pub order: Option<T>,
}

impl<T: Real> Refinement<T> {
    pub fn already_converged(&self) -> bool {
        self.order.is_none()
    }
}

/// Refinement study of eigenvalue number `index` of mode `l` on `m`, `2m`, `4m` cells.
pub fn refine_convergence<T: Real>(p: &RevolutionProfile<T>, d: &RadialDensity<T>, l: usize, index: usize, m: usize) -> Result<Refinement<T>> {
    let mut values = [T::zero(); 3];
    for (slot, factor) in [1usize, 2, 4].into_iter().enumerate() {
        let grid = RadialGrid::uniform(p.radius(), m * factor)?;
        values[slot] = solve_radial(&assemble_radial(p, d, l, &grid)?, index + 1)?[index].lambda;
    }
    Ok(richardson(values))
}

pub fn richardson<T: Real>(values: [T; 3]) -> Refinement<T> {
    let d1 = values[0] - values[1];
    let d2 = values[1] - values[2];
    let floor = T::lit(1e-13);
    let order = if d1.abs() < floor || d2.abs() < floor { None } else { Some((d1 / d2).abs().log2()) };
    let extrapolated = values[2] - d2 / T::lit(3.0);
    Refinement { values, extrapolated, order }
}
