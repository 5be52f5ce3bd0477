//! Weighted Neumann Laplacians on intervals, rectangles and circles by cell-centered
//! finite volumes.
//!
//! Intervals cover `[0, L]`, circles `[0, L)` with periodic ends, and rectangles
//! `[-a/2, a/2] x [-b/2, b/2]`. Nodes of two-dimensional grids are stored row-major with
//! `x` varying fastest.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::dct::NeumannDctSolver;
use crate::linalg::{lobpcg, ChainFactor, ChainLaplacian, CsrMatrix, LobpcgOptions};
use crate::radial::{SpectrumEntry, SpectrumResult};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Shape<T> {
    Rectangle { a: T, b: T },
    Interval { len: T },
    Circle { len: T },
}

impl<T: Real> Shape<T> {
    fn is_planar(&self) -> bool {
        matches!(self, Shape::Rectangle { .. })
    }

    pub fn id(&self) -> String {
        match self {
            Shape::Rectangle { a, b } => format!("rectangle(a={a},b={b})"),
            Shape::Interval { len } => format!("interval(L={len})"),
            Shape::Circle { len } => format!("circle(L={len})"),
        }
    }
}

/// Density `sigma = exp(-f)` on a Cartesian domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarDensity<T> {
    Constant,
    /// `f = j |x - center|^2`.
    Gaussian { j: T, center: [T; 2] },
    /// `f` as an expression in `x`, `y` (or `t` on one-dimensional domains).
    Log(Expr),
    /// `sigma` as an expression.
    Sigma(Expr),
}

impl<T: Real> PlanarDensity<T> {
    /// `f` at a point, or an error when `sigma` is not positive there.
    pub fn log_density(&self, pt: [T; 2]) -> Result<T> {
        let f = match self {
            PlanarDensity::Constant => T::zero(),
            PlanarDensity::Gaussian { j, center } => *j * ((pt[0] - center[0]).powi(2) + (pt[1] - center[1]).powi(2)),
            PlanarDensity::Log(e) => e.eval(&bindings(pt)),
            PlanarDensity::Sigma(e) => {
                let s = e.eval(&bindings(pt));
                if !(s > T::zero()) {
                    return Err(Error::InvalidDensity(format!("sigma = {s} is not positive at ({}, {})", pt[0], pt[1])));
                }
                -s.ln()
            }
        };
        if !f.is_finite() {
            return Err(Error::InvalidDensity(format!("density is not finite at ({}, {})", pt[0], pt[1])));
        }
        Ok(f)
    }

    pub fn id(&self) -> String {
        match self {
            PlanarDensity::Constant => "constant".into(),
            PlanarDensity::Gaussian { j, center } => format!("gaussian(j={j},center=({},{}))", center[0], center[1]),
            PlanarDensity::Log(e) => format!("exp(-({e}))"),
            PlanarDensity::Sigma(e) => format!("custom({e})"),
        }
    }
}

/// Expression bindings `[r, t, x, y]` at a point; `r` is the distance to the origin and
/// on one-dimensional domains `t = x`.
pub(crate) fn bindings<T: Real>(pt: [T; 2]) -> [T; 4] {
    let r = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
    [r, pt[0], pt[0], pt[1]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarDomain<T> {
    pub shape: Shape<T>,
    pub density: PlanarDensity<T>,
    /// Cells along `x` (the only direction for intervals and circles).
    pub nx: usize,
    /// Cells along `y` (1 for intervals and circles).
    pub ny: usize,
}

pub const DEFAULT_RECTANGLE_CELLS: usize = 256;

impl<T: Real> PlanarDomain<T> {
    pub fn interval(len: T, cells: usize, density: PlanarDensity<T>) -> Self {
        Self { shape: Shape::Interval { len }, density, nx: cells, ny: 1 }
    }

    pub fn circle(len: T, cells: usize, density: PlanarDensity<T>) -> Self {
        Self { shape: Shape::Circle { len }, density, nx: cells, ny: 1 }
    }

    pub fn rectangle(a: T, b: T, nx: usize, ny: usize, density: PlanarDensity<T>) -> Self {
        Self { shape: Shape::Rectangle { a, b }, density, nx, ny }
    }
}

/// Which operator a [`SparseSystem`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Operator<T> {
    /// `L_sigma` with mass `sigma dx`.
    Weighted,
    /// `Delta + V` with mass `dx`; `v_min` is the smallest nodal potential.
    Schrodinger { v_min: T },
}

/// Pencil `(S, M)` with `S = sum_e w_e (u_i - u_j)^2 + sum_i excess_i u_i^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem<T> {
    pub shape: Shape<T>,
    pub nx: usize,
    pub ny: usize,
    pub hx: T,
    pub hy: T,
    pub operator: Operator<T>,
    pub edges: Vec<(usize, usize, T)>,
    pub excess: Vec<T>,
    pub stiffness: CsrMatrix<T>,
    pub mass: Vec<T>,
    pub coords: Vec<[T; 2]>,
    pub density_id: String,
}

impl<T: Real> SparseSystem<T> {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// `u^T S u` in difference form.
    pub fn energy(&self, u: &[T]) -> T {
        let mut s = T::zero();
        for &(i, j, w) in &self.edges {
            s += w * (u[i] - u[j]).powi(2);
        }
        for (e, v) in self.excess.iter().zip(u) {
            s += *e * *v * *v;
        }
        s
    }

    pub fn mass_norm2(&self, u: &[T]) -> T {
        u.iter().zip(&self.mass).map(|(v, m)| *m * *v * *v).sum()
    }

    /// The chain form of one-dimensional systems.
    pub fn chain(&self) -> Option<ChainLaplacian<T>> {
        let n = self.dim();
        match self.shape {
            Shape::Rectangle { .. } => None,
            Shape::Interval { .. } => Some(ChainLaplacian::path(self.edges.iter().map(|e| e.2).collect(), self.excess.clone())),
            Shape::Circle { .. } => {
                let edges: Vec<T> = self.edges[..n - 1].iter().map(|e| e.2).collect();
                Some(ChainLaplacian::cycle(edges, self.edges[n - 1].2, self.excess.clone()))
            }
        }
    }

    fn is_pure(&self) -> bool {
        self.excess.iter().all(|e| *e == T::zero())
    }
}

fn geometry<T: Real>(shape: &Shape<T>, nx: usize, ny: usize) -> Result<(T, T, Vec<[T; 2]>)> {
    if nx < 8 || (shape.is_planar() && ny < 8) {
        return Err(Error::InvalidInput(format!("grid {nx}x{ny} needs at least 8 cells per dimension")));
    }
    let half = T::lit(0.5);
    match *shape {
        Shape::Interval { len } | Shape::Circle { len } => {
            if !(len > T::zero()) {
                return Err(Error::InvalidInput(format!("domain length {len} must be positive")));
            }
            let h = len / T::of(nx);
            let offset = if matches!(shape, Shape::Interval { .. }) { half } else { T::zero() };
            let coords = (0..nx).map(|i| [(T::of(i) + offset) * h, T::zero()]).collect();
            Ok((h, T::one(), coords))
        }
        Shape::Rectangle { a, b } => {
            if !(a > T::zero() && b > T::zero()) {
                return Err(Error::InvalidInput(format!("rectangle sides {a} x {b} must be positive")));
            }
            let (hx, hy) = (a / T::of(nx), b / T::of(ny));
            let mut coords = Vec::with_capacity(nx * ny);
            for iy in 0..ny {
                for ix in 0..nx {
                    coords.push([-a * half + (T::of(ix) + half) * hx, -b * half + (T::of(iy) + half) * hy]);
                }
            }
            Ok((hx, hy, coords))
        }
    }
}

/// Edges as `(i, j, midpoint, geometric factor)`.
fn edge_list<T: Real>(shape: &Shape<T>, nx: usize, ny: usize, hx: T, hy: T, coords: &[[T; 2]]) -> Vec<(usize, usize, [T; 2], T)> {
    let half = T::lit(0.5);
    let mid = |i: usize, j: usize| [(coords[i][0] + coords[j][0]) * half, (coords[i][1] + coords[j][1]) * half];
    let mut out = Vec::new();
    match *shape {
        Shape::Interval { .. } => {
            for i in 0..nx - 1 {
                out.push((i, i + 1, mid(i, i + 1), T::one() / hx));
            }
        }
        Shape::Circle { len } => {
            for i in 0..nx - 1 {
                out.push((i, i + 1, mid(i, i + 1), T::one() / hx));
            }
            let wrap = [coords[nx - 1][0] + hx * half, T::zero()];
            let wrap = if wrap[0] >= len { [wrap[0] - len, T::zero()] } else { wrap };
            out.push((nx - 1, 0, wrap, T::one() / hx));
        }
        Shape::Rectangle { .. } => {
            for iy in 0..ny {
                for ix in 0..nx - 1 {
                    let i = iy * nx + ix;
                    out.push((i, i + 1, mid(i, i + 1), hy / hx));
                }
            }
            for iy in 0..ny - 1 {
                for ix in 0..nx {
                    let i = iy * nx + ix;
                    out.push((i, i + nx, mid(i, i + nx), hx / hy));
                }
            }
        }
    }
    out
}

fn build_csr<T: Real>(n: usize, edges: &[(usize, usize, T)], excess: &[T]) -> CsrMatrix<T> {
    let mut diag = excess.to_vec();
    let mut trip = Vec::with_capacity(2 * edges.len() + n);
    for &(i, j, w) in edges {
        diag[i] += w;
        diag[j] += w;
        trip.push((i, j, -w));
        trip.push((j, i, -w));
    }
    for (i, d) in diag.into_iter().enumerate() {
        trip.push((i, i, d));
    }
    CsrMatrix::from_triplets(n, &trip)
}

/// Flux-form pencil of `L_sigma`: edge weights `sigma` at edge midpoints times the cell
/// geometry, masses `sigma` at the nodes times the cell area.
pub fn assemble_cartesian<T: Real>(dom: &PlanarDomain<T>) -> Result<SparseSystem<T>> {
    let (hx, hy, coords) = geometry(&dom.shape, dom.nx, dom.ny)?;
    let raw = edge_list(&dom.shape, dom.nx, dom.ny, hx, hy, &coords);
    let node_f = coords.iter().map(|p| dom.density.log_density(*p)).collect::<Result<Vec<T>>>()?;
    let edge_f = raw.iter().map(|e| dom.density.log_density(e.2)).collect::<Result<Vec<T>>>()?;
    let shift = node_f.iter().chain(&edge_f).fold(T::infinity(), |m, v| m.min(*v));
    let cell = if dom.shape.is_planar() { hx * hy } else { hx };
    let mass: Vec<T> = node_f.iter().map(|f| (shift - *f).exp() * cell).collect();
    if let Some(i) = mass.iter().position(|m| !(*m > T::zero())) {
        return Err(Error::NonFinite(format!("mass {i} underflows (density range too large for the scalar type)")));
    }
    let edges: Vec<(usize, usize, T)> = raw.iter().zip(&edge_f).map(|(e, f)| (e.0, e.1, (shift - *f).exp() * e.3)).collect();
    let n = coords.len();
    let excess = vec![T::zero(); n];
    let stiffness = build_csr(n, &edges, &excess);
    Ok(SparseSystem {
        shape: dom.shape,
        nx: dom.nx,
        ny: dom.ny,
        hx,
        hy,
        operator: Operator::Weighted,
        edges,
        excess,
        stiffness,
        mass,
        coords,
        density_id: dom.density.id(),
    })
}

/// Pencil of `Delta + V` with respect to `dx`: unweighted stiffness plus `V` times the mass.
pub fn assemble_schrodinger<T: Real>(shape: Shape<T>, nx: usize, ny: usize, potential: impl Fn([T; 2]) -> T) -> Result<SparseSystem<T>> {
    let ny = if shape.is_planar() { ny } else { 1 };
    let (hx, hy, coords) = geometry(&shape, nx, ny)?;
    let raw = edge_list(&shape, nx, ny, hx, hy, &coords);
    let cell = if shape.is_planar() { hx * hy } else { hx };
    let n = coords.len();
    let mass = vec![cell; n];
    let v: Vec<T> = coords.iter().map(|p| potential(*p)).collect();
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("potential is not finite at node {i}")));
    }
    let v_min = v.iter().fold(T::infinity(), |m, x| m.min(*x));
    let excess: Vec<T> = v.iter().map(|x| *x * cell).collect();
    let edges: Vec<(usize, usize, T)> = raw.iter().map(|e| (e.0, e.1, e.3)).collect();
    let stiffness = build_csr(n, &edges, &excess);
    Ok(SparseSystem {
        shape,
        nx,
        ny,
        hx,
        hy,
        operator: Operator::Schrodinger { v_min },
        edges,
        excess,
        stiffness,
        mass,
        coords,
        density_id: "schrodinger".into(),
    })
}

/// Weighted system of `L_{psi^2}` on the grid of `sys`, with edge weights
/// `psi_i psi_j` and masses `psi_i^2` (times the cell geometry).
pub fn ground_state_transform<T: Real>(sys: &SparseSystem<T>, psi: &[T]) -> Result<SparseSystem<T>> {
    if let Some(i) = psi.iter().position(|v| !(*v > T::zero())) {
        return Err(Error::InvalidInput(format!("ground state is not positive at node {i}")));
    }
    let cell = if sys.shape.is_planar() { sys.hx * sys.hy } else { sys.hx };
    let edges: Vec<(usize, usize, T)> = sys.edges.iter().map(|&(i, j, w)| (i, j, w * psi[i] * psi[j])).collect();
    let mass: Vec<T> = psi.iter().map(|p| *p * *p * cell).collect();
    let n = mass.len();
    let excess = vec![T::zero(); n];
    let stiffness = build_csr(n, &edges, &excess);
    Ok(SparseSystem {
        operator: Operator::Weighted,
        edges,
        excess,
        stiffness,
        mass,
        density_id: "ground_state_squared".into(),
        ..sys.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianEigen<T> {
    pub values: Vec<T>,
    /// Mass-normalized nodal values.
    pub vectors: Vec<Vec<T>>,
    /// `||S phi - lambda M phi|| / ||M phi||` per pair.
    pub residuals: Vec<T>,
    pub iterations: usize,
}

impl<T: Real> CartesianEigen<T> {
    pub fn to_spectrum(&self, sys: &SparseSystem<T>) -> SpectrumResult<T> {
        SpectrumResult {
            entries: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| SpectrumEntry { lambda: *v, l: None, radial_index: Some(i), multiplicity: None })
                .collect(),
            grid_m: sys.dim(),
            geometry: sys.shape.id(),
            density: sys.density_id.clone(),
            warnings: Vec::new(),
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;

fn low_modes<T: Real>(sys: &SparseSystem<T>, count: usize) -> Vec<Vec<T>> {
    let mut freqs: Vec<(T, usize, usize)> = Vec::new();
    match sys.shape {
        Shape::Interval { .. } | Shape::Circle { .. } => {
            for p in 0..count {
                freqs.push((T::of(p), p, 0));
            }
        }
        Shape::Rectangle { a, b } => {
            let side = (count as f64).sqrt().ceil() as usize + 2;
            for p in 0..side {
                for q in 0..side {
                    freqs.push(((T::of(p) / a).powi(2) + (T::of(q) / b).powi(2), p, q));
                }
            }
            freqs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
        }
    }
    let half = T::lit(0.5);
    freqs
        .into_iter()
        .take(count)
        .map(|(_, p, q)| {
            sys.coords
                .iter()
                .zip(&sys.mass)
                .map(|(c, m)| {
                    let v = match sys.shape {
                        Shape::Interval { len } => (T::PI() * T::of(p) * c[0] / len).cos(),
                        Shape::Circle { len } => {
                            // 1, cos t, sin t, cos 2t, sin 2t, ...
                            let arg = T::lit(2.0) * T::PI() * T::of(p.div_ceil(2)) * c[0] / len;
                            if p % 2 == 0 && p > 0 { arg.sin() } else { arg.cos() }
                        }
                        Shape::Rectangle { a, b } => {
                            (T::PI() * T::of(p) * (c[0] / a + half)).cos() * (T::PI() * T::of(q) * (c[1] / b + half)).cos()
                        }
                    };
                    v * m.sqrt()
                })
                .collect()
        })
        .collect()
}

/// The `k` smallest eigenpairs of `S phi = lambda M phi` by block preconditioned
/// iteration on the standard form `M^{-1/2} S M^{-1/2}`, with a fixed low-frequency start.
/// On one-dimensional pure Laplacians eigenvalues far below the operator scale are
/// recomputed by deflated inverse iteration, so that exponentially small values keep
/// their relative accuracy.
pub fn solve_cartesian<T: Real>(sys: &SparseSystem<T>, k: usize, tol: T) -> Result<CartesianEigen<T>> {
    let n = sys.dim();
    if k == 0 || 4 * k > n {
        return Err(Error::InvalidInput(format!("k = {k} is too large for {n} unknowns")));
    }
    let block = (k + 4).min(n);
    let root: Vec<T> = sys.mass.iter().map(|m| m.sqrt()).collect();
    let mut scratch_in = vec![T::zero(); n];
    let mut scratch_out = vec![T::zero(); n];
    let stiffness = &sys.stiffness;
    let apply = |x: &[T], y: &mut [T]| {
        for i in 0..n {
            scratch_in[i] = x[i] / root[i];
        }
        stiffness.matvec(&scratch_in, &mut scratch_out);
        for i in 0..n {
            y[i] = scratch_out[i] / root[i];
        }
    };
    let diag = sys.stiffness.diagonal();
    let opts = LobpcgOptions { tol, max_iter: 2000 };
    let x0 = low_modes(sys, block);
    let result = match sys.chain() {
        Some(chain) => {
            let tau = match sys.operator {
                Operator::Weighted => T::one(),
                Operator::Schrodinger { v_min } => T::one() + (-v_min).max(T::zero()),
            };
            let factor: ChainFactor<T> = chain.shifted(tau, &sys.mass).factor();
            let pre = |r: &[T], z: &mut [T]| {
                for i in 0..n {
                    z[i] = r[i] * root[i];
                }
                factor.solve(z);
                for i in 0..n {
                    z[i] *= root[i];
                }
            };
            lobpcg(apply, pre, x0, k, opts)?
        }
        None => {
            // The standard form behaves like `Delta + V`; the shift covers the most negative
            // diagonal deviation from the plain Laplacian.
            let lap_diag = unweighted_diagonal(sys);
            let tau = T::one()
                + diag
                    .iter()
                    .zip(&sys.mass)
                    .zip(&lap_diag)
                    .map(|((d, m), l)| *l - *d / *m)
                    .fold(T::zero(), |acc, v| acc.max(v));
            let solver = NeumannDctSolver::new(sys.nx, sys.ny, sys.hx, sys.hy, tau);
            let pre = |r: &[T], z: &mut [T]| {
                z.copy_from_slice(r);
                solver.solve(z);
            };
            lobpcg(apply, pre, x0, k, opts)?
        }
    };
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for y in &result.vectors {
        let mut phi: Vec<T> = y.iter().zip(&root).map(|(v, r)| *v / *r).collect();
        let norm = sys.mass_norm2(&phi).sqrt();
        for v in phi.iter_mut() {
            *v /= norm;
        }
        values.push(sys.energy(&phi));
        vectors.push(phi);
    }
    if sys.is_pure() {
        if let Some(chain) = sys.chain() {
            refine_small(sys, &chain, &mut values, &mut vectors);
        }
    }
    let residuals = vectors.iter().zip(&values).map(|(phi, lam)| generalized_residual(sys, phi, *lam)).collect();
    Ok(CartesianEigen { values, vectors, residuals, iterations: result.iterations })
}

fn unweighted_diagonal<T: Real>(sys: &SparseSystem<T>) -> Vec<T> {
    let (nx, ny) = (sys.nx, sys.ny);
    let (ax, ay) = (T::one() / (sys.hx * sys.hx), T::one() / (sys.hy * sys.hy));
    let mut out = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let cx = T::of(usize::from(ix > 0) + usize::from(ix + 1 < nx));
            let cy = T::of(usize::from(iy > 0) + usize::from(iy + 1 < ny));
            out.push(cx * ax + cy * ay);
        }
    }
    out
}

fn generalized_residual<T: Real>(sys: &SparseSystem<T>, phi: &[T], lambda: T) -> T {
    let n = phi.len();
    let mut s = vec![T::zero(); n];
    sys.stiffness.matvec(phi, &mut s);
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..n {
        let mp = sys.mass[i] * phi[i];
        num += (s[i] - lambda * mp).powi(2);
        den += mp * mp;
    }
    (num / den).sqrt()
}

/// Relative size below which an eigenvalue of a pure Laplacian is recomputed.
pub const SMALL_EIGENVALUE_RATIO: f64 = 1e-6;

fn refine_small<T: Real>(sys: &SparseSystem<T>, chain: &ChainLaplacian<T>, values: &mut [T], vectors: &mut [Vec<T>]) {
    let n = sys.dim();
    let scale = sys
        .stiffness
        .diagonal()
        .iter()
        .zip(&sys.mass)
        .fold(T::zero(), |m, (d, w)| m.max(T::lit(2.0) * *d / *w));
    let total_mass: T = sys.mass.iter().copied().sum();
    let constant = T::one() / total_mass.sqrt();
    values[0] = T::zero();
    vectors[0] = vec![constant; n];
    let factor = chain.factor();
    if !factor.is_grounded() {
        return;
    }
    let mdot = |a: &[T], b: &[T]| -> T { a.iter().zip(b).zip(&sys.mass).map(|((x, y), m)| *x * *y * *m).sum() };
    for idx in 1..values.len() {
        if !(values[idx] < T::lit(SMALL_EIGENVALUE_RATIO) * scale) {
            break;
        }
        let mut y = vectors[idx].clone();
        let mut lam = values[idx];
        let mut converged = false;
        for _ in 0..100 {
            let mut x: Vec<T> = y.iter().zip(&sys.mass).map(|(v, m)| *v * *m).collect();
            factor.solve(&mut x);
            for _ in 0..2 {
                for q in vectors[..idx].iter() {
                    let c = mdot(&x, q);
                    for (xi, qi) in x.iter_mut().zip(q) {
                        *xi -= c * *qi;
                    }
                }
            }
            let rq = mdot(&y, &x);
            let norm = mdot(&x, &x).sqrt();
            if !(rq > T::zero()) || !norm.is_finite() || !(norm > T::zero()) {
                break;
            }
            let next = T::one() / rq;
            y = x.into_iter().map(|v| v / norm).collect();
            let delta = (next - lam).abs();
            lam = next;
            if delta <= T::lit(1e-13) * lam {
                converged = true;
                break;
            }
        }
        if converged {
            values[idx] = lam;
            vectors[idx] = y;
        }
    }
}

/// Positive, mass-normalized ground state of a Schrodinger system.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState<T> {
    pub lambda: T,
    pub psi: Vec<T>,
}

/// Relative negative excursion tolerated before a computed ground state is declared
/// unconverged.
pub const SIGN_TOLERANCE: f64 = 1e-8;

pub fn ground_state_density<T: Real>(sys: &SparseSystem<T>) -> Result<GroundState<T>> {
    let eig = solve_cartesian(sys, 1, T::lit(1e-10))?;
    let mut psi = eig.vectors[0].clone();
    let total: T = psi.iter().copied().sum();
    if total < T::zero() {
        for v in psi.iter_mut() {
            *v = -*v;
        }
    }
    let peak = psi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let lowest = psi.iter().fold(T::infinity(), |m, v| m.min(*v));
    if lowest < -T::lit(SIGN_TOLERANCE) * peak {
        return Err(Error::NoConvergence { iterations: eig.iterations, residual: (lowest / peak).to_f() });
    }
    for v in psi.iter_mut() {
        *v = v.max(T::min_positive_value());
    }
    Ok(GroundState { lambda: eig.values[0], psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_spectrum() {
        let dom = PlanarDomain::interval(PI, 4000, PlanarDensity::Constant);
        let sys = assemble_cartesian(&dom).unwrap();
        let eig = solve_cartesian(&sys, 4, 1e-8).unwrap();
        for (k, v) in eig.values.iter().enumerate() {
            assert!((v - (k * k) as f64).abs() < 1e-4, "{k}: {v}");
        }
        let mut y = vec![0.0; 4000];
        sys.stiffness.matvec(&vec![1.0; 4000], &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-9));
        assert!(sys.stiffness.is_symmetric());
    }

    #[test]
    fn circle_spectrum() {
        let dom = PlanarDomain::circle(2.0 * PI, 4000, PlanarDensity::Constant);
        let sys = assemble_cartesian(&dom).unwrap();
        let eig = solve_cartesian(&sys, 5, 1e-8).unwrap();
        for (v, e) in eig.values.iter().zip([0.0, 1.0, 1.0, 4.0, 4.0]) {
            assert!((v - e).abs() < 1e-4, "{v} vs {e}");
        }
    }

    #[test]
    fn unit_square_and_rectangle() {
        let dom = PlanarDomain::rectangle(1.0, 1.0, 64, 64, PlanarDensity::Constant);
        let eig = solve_cartesian(&assemble_cartesian(&dom).unwrap(), 4, 1e-8).unwrap();
        let p2 = PI * PI;
        for (v, e) in eig.values.iter().zip([0.0, p2, p2, 2.0 * p2]) {
            assert!((v - e).abs() <= 1e-3 * e.max(1e-9) + 1e-9, "{v} vs {e}");
        }
        let dom = PlanarDomain::rectangle(1.0, 2.0, 32, 64, PlanarDensity::Constant);
        let eig = solve_cartesian(&assemble_cartesian(&dom).unwrap(), 2, 1e-8).unwrap();
        assert!((eig.values[1] - PI * PI / 4.0).abs() < 1e-3);
    }

    #[test]
    fn oscillator_ground_state() {
        let j = 2.0;
        let len = 12.0;
        let c = len / 2.0;
        let sys = assemble_schrodinger(Shape::Interval { len }, 3000, 1, |p: [f64; 2]| j * j * (p[0] - c).powi(2) - j).unwrap();
        let gs = ground_state_density(&sys).unwrap();
        assert!(gs.lambda.abs() < 1e-4);
        let i0 = 1500;
        let ref0 = gs.psi[i0] / (-j * (sys.coords[i0][0] - c).powi(2) / 2.0).exp();
        for i in (900..2100).step_by(50) {
            let x = sys.coords[i][0] - c;
            let exact = ref0 * (-j * x * x / 2.0).exp();
            assert!((gs.psi[i] - exact).abs() < 1e-4 * exact, "{i}");
        }
    }

    #[test]
    fn rejects_nonpositive_density() {
        let dom = PlanarDomain::interval(1.0, 100, PlanarDensity::Sigma(Expr::parse("x - 0.5").unwrap()));
        assert!(assemble_cartesian(&dom).is_err());
        assert!(assemble_cartesian(&PlanarDomain::<f64>::interval(1.0, 4, PlanarDensity::Constant)).is_err());
    }

    #[test]
    fn double_well_splitting_is_resolved() {
        let eps: f64 = 0.05;
        let f = Expr::parse(&format!("cos(2*t)/{eps}")).unwrap();
        let dom = PlanarDomain::circle(2.0 * PI, 2000, PlanarDensity::Log(f));
        let sys = assemble_cartesian(&dom).unwrap();
        let eig = solve_cartesian(&sys, 3, 1e-9).unwrap();
        assert_eq!(eig.values[0], 0.0);
        assert!(eig.values[1] > 0.0 && eig.values[1] < 1e-6);
        assert!(eig.values[2] > 1.0 / eps.sqrt());
        // the refined value is a Rayleigh-consistent eigenvalue
        let phi = &eig.vectors[1];
        let rq = sys.energy(phi) / sys.mass_norm2(phi);
        assert!((rq - eig.values[1]).abs() < 1e-6 * eig.values[1]);
    }
}
