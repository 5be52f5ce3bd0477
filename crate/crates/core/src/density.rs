//! Radial densities `sigma = exp(-f)` on revolution manifolds.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::geometry::{ProfileKind, RevolutionProfile};
use crate::radial::RadialGrid;
use crate::scalar::{sphere_area, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum DensityFamily<T> {
    /// `sigma = c`.
    Constant { c: T },
    /// `f = j r^2`.
    Gaussian { j: T },
    /// `f = j h_j(r)^2`, with `h_j` bent near the far pole so that `f'(R) = 0`.
    SmoothedGaussian { j: u32, alpha: T },
    /// `f = f0 / eps`.
    Semiclassical { f0: Expr, eps: T },
    /// `sigma` given directly as an expression in `r`.
    Custom { sigma: Expr },
}

#[derive(Debug, Clone)]
enum Derivs {
    None,
    /// `(f0', f0'')` for semiclassical families.
    Log(Expr, Expr),
    /// `(sigma', sigma'')` for custom families.
    Sigma(Expr, Expr),
}

#[derive(Debug, Clone)]
pub struct RadialDensity<T> {
    family: DensityFamily<T>,
    offset: T,
    r_max: T,
    derivs: Derivs,
}

/// Smallest integer `alpha >= 1` with `(n-1) alpha^2 / 16 - 2 alpha R >= 2`.
pub fn default_alpha(n: usize, r_max: f64) -> f64 {
    let mut alpha = 1.0;
    while !alpha_admissible(n, r_max, alpha) {
        alpha += 1.0;
    }
    alpha
}

fn alpha_admissible(n: usize, r_max: f64, alpha: f64) -> bool {
    (n as f64 - 1.0) * alpha * alpha / 16.0 - 2.0 * alpha * r_max >= 2.0
}

pub fn make_density<T: Real>(family: DensityFamily<T>, profile: &RevolutionProfile<T>) -> Result<RadialDensity<T>> {
    let r_max = profile.radius();
    let derivs = match &family {
        DensityFamily::Constant { c } => {
            if !(*c > T::zero()) || !c.is_finite() {
                return Err(Error::InvalidDensity(format!("constant density c = {c} must be positive")));
            }
            Derivs::None
        }
        DensityFamily::Gaussian { j } => {
            if !(*j > T::zero()) || !j.is_finite() {
                return Err(Error::InvalidDensity(format!("Gaussian parameter j = {j} must be positive")));
            }
            Derivs::None
        }
        DensityFamily::SmoothedGaussian { j, alpha } => {
            if *j < 1 {
                return Err(Error::InvalidDensity("smoothed Gaussian needs an integer j >= 1".into()));
            }
            if profile.kind() != ProfileKind::Closed {
                return Err(Error::InvalidDensity("smoothed Gaussian requires a closed profile".into()));
            }
            let n = profile.dim() as f64;
            let a = alpha.to_f();
            let slack = (n - 1.0) * a * a / 16.0 - 2.0 * a * r_max.to_f();
            if !(a >= 1.0) || slack < 2.0 {
                return Err(Error::InvalidDensity(format!(
                    "alpha = {a} violates (n-1) alpha^2/16 - 2 alpha R >= 2 (value {slack})"
                )));
            }
            Derivs::None
        }
        DensityFamily::Semiclassical { f0, eps } => {
            if !(*eps > T::zero()) {
                return Err(Error::InvalidDensity(format!("eps = {eps} must be positive")));
            }
            let d1 = f0.derivative(Var::R);
            let d2 = d1.derivative(Var::R);
            check_morse(&d1, &d2, r_max)?;
            Derivs::Log(d1, d2)
        }
        DensityFamily::Custom { sigma } => {
            let d1 = sigma.derivative(Var::R);
            let d2 = d1.derivative(Var::R);
            Derivs::Sigma(d1, d2)
        }
    };
    let d = RadialDensity { family, offset: T::zero(), r_max, derivs };
    let samples = 2000;
    for i in 0..=samples {
        let r = r_max * T::of(i) / T::of(samples);
        let f = d.f(r);
        if !f.is_finite() || f == T::infinity() {
            return Err(Error::InvalidDensity(format!("density is not positive and finite at r = {}", r.to_f())));
        }
    }
    Ok(d)
}

/// Sign changes of `f0'` on a fine sample must come with `|f0''|` bounded away from zero.
fn check_morse<T: Real>(d1: &Expr, d2: &Expr, r_max: T) -> Result<()> {
    let samples = 4000;
    let scale = (0..=samples)
        .map(|i| d2.eval1(Var::R, r_max * T::of(i) / T::of(samples)).abs())
        .fold(T::zero(), |m, v| m.max(v));
    if !(scale > T::zero()) {
        return Err(Error::InvalidDensity("f0 is not a Morse function (degenerate)".into()));
    }
    let mut prev = d1.eval1(Var::R, T::zero());
    for i in 1..=samples {
        let r = r_max * T::of(i) / T::of(samples);
        let cur = d1.eval1(Var::R, r);
        if (prev > T::zero()) != (cur > T::zero()) && d2.eval1(Var::R, r).abs() < T::lit(1e-6) * scale {
            return Err(Error::InvalidDensity(format!("degenerate critical point of f0 near r = {}", r.to_f())));
        }
        prev = cur;
    }
    Ok(())
}

impl<T: Real> RadialDensity<T> {
    pub fn family(&self) -> &DensityFamily<T> {
        &self.family
    }

    /// The same density multiplied by the constant `c > 0`.
    pub fn scaled(&self, c: T) -> Self {
        let mut d = self.clone();
        d.offset -= c.ln();
        d
    }

    /// Transition radius `r_j = R - 1/(alpha j)` of the smoothed Gaussian.
    pub fn transition_radius(&self) -> Option<T> {
        match &self.family {
            DensityFamily::SmoothedGaussian { j, alpha } => Some(self.r_max - T::one() / (*alpha * T::lit(*j as f64))),
            _ => None,
        }
    }

    /// Whether `f''` is continuous on `[0, R]`.
    pub fn is_c2(&self) -> bool {
        !matches!(self.family, DensityFamily::SmoothedGaussian { .. })
    }

    /// `[f, f', f'']` at `r`; for the smoothed Gaussian `f''` jumps at `r_j` and the
    /// right-hand value is returned there.
    pub fn eval(&self, r: T) -> [T; 3] {
        let two = T::lit(2.0);
        let [f, d1, d2] = match &self.family {
            DensityFamily::Constant { c } => [-c.ln(), T::zero(), T::zero()],
            DensityFamily::Gaussian { j } => [*j * r * r, two * *j * r, two * *j],
            DensityFamily::SmoothedGaussian { j, alpha } => {
                let j = T::lit(*j as f64);
                let aj = *alpha * j;
                let rj = self.r_max - T::one() / aj;
                let (h, h1, h2) = if r < rj {
                    (r, T::one(), T::zero())
                } else {
                    let s = r - rj;
                    (r - aj * s * s / two, T::one() - aj * s, -aj)
                };
                [j * h * h, two * j * h * h1, two * j * (h1 * h1 + h * h2)]
            }
            DensityFamily::Semiclassical { f0, eps } => {
                let (a, b) = match &self.derivs {
                    Derivs::Log(a, b) => (a, b),
                    _ => unreachable!("semiclassical derivatives are built at construction"),
                };
                [f0.eval1(Var::R, r) / *eps, a.eval1(Var::R, r) / *eps, b.eval1(Var::R, r) / *eps]
            }
            DensityFamily::Custom { sigma } => {
                let (a, b) = match &self.derivs {
                    Derivs::Sigma(a, b) => (a, b),
                    _ => unreachable!("custom derivatives are built at construction"),
                };
                let s = sigma.eval1(Var::R, r);
                if !(s > T::zero()) {
                    return [T::infinity(), T::nan(), T::nan()];
                }
                let q1 = a.eval1(Var::R, r) / s;
                let q2 = b.eval1(Var::R, r) / s;
                [-s.ln(), -q1, -q2 + q1 * q1]
            }
        };
        [f + self.offset, d1, d2]
    }

    pub fn f(&self, r: T) -> T {
        self.eval(r)[0]
    }

    pub fn f_prime(&self, r: T) -> T {
        self.eval(r)[1]
    }

    pub fn f_double_prime(&self, r: T) -> T {
        self.eval(r)[2]
    }

    pub fn sigma(&self, r: T) -> T {
        (-self.f(r)).exp()
    }

    pub fn id(&self) -> String {
        match &self.family {
            DensityFamily::Constant { c } => format!("constant(c={c})"),
            DensityFamily::Gaussian { j } => format!("gaussian(j={j})"),
            DensityFamily::SmoothedGaussian { j, alpha } => format!("smoothed_gaussian(j={j},alpha={alpha})"),
            DensityFamily::Semiclassical { f0, eps } => format!("semiclassical(f0={f0},eps={eps})"),
            DensityFamily::Custom { sigma } => format!("custom({sigma})"),
        }
    }

    pub fn to_spec(&self) -> DensitySpec {
        let mut params = Map::new();
        let family = match &self.family {
            DensityFamily::Constant { c } => {
                params.insert("c".into(), json!(c.to_f()));
                "constant"
            }
            DensityFamily::Gaussian { j } => {
                params.insert("j".into(), json!(j.to_f()));
                "gaussian"
            }
            DensityFamily::SmoothedGaussian { j, alpha } => {
                params.insert("j".into(), json!(j));
                params.insert("alpha".into(), json!(alpha.to_f()));
                "smoothed_gaussian"
            }
            DensityFamily::Semiclassical { f0, eps } => {
                params.insert("f0".into(), json!(f0.to_string()));
                params.insert("eps".into(), json!(eps.to_f()));
                "semiclassical"
            }
            DensityFamily::Custom { sigma } => {
                params.insert("sigma".into(), json!(sigma.to_string()));
                "custom"
            }
        };
        DensitySpec { family: family.into(), params }
    }
}

/// Serialized form `{"family": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl DensitySpec {
    fn number(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::InvalidDensity(format!("density '{}' needs numeric parameter '{key}'", self.family)))
    }

    fn text(&self, key: &str) -> Result<Expr> {
        let s = self
            .params
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidDensity(format!("density '{}' needs expression parameter '{key}'", self.family)))?;
        Expr::parse(s)
    }

    pub fn build<T: Real>(&self, profile: &RevolutionProfile<T>) -> Result<RadialDensity<T>> {
        let family = match self.family.as_str() {
            "constant" => DensityFamily::Constant { c: T::lit(self.number("c").unwrap_or(1.0)) },
            "gaussian" => DensityFamily::Gaussian { j: T::lit(self.number("j")?) },
            "smoothed_gaussian" => {
                let j = self.number("j")?;
                if j < 1.0 || j.fract() != 0.0 {
                    return Err(Error::InvalidDensity(format!("smoothed Gaussian needs an integer j >= 1, got {j}")));
                }
                let alpha = match self.params.get("alpha") {
                    Some(_) => self.number("alpha")?,
                    None => default_alpha(profile.dim(), profile.radius().to_f()),
                };
                DensityFamily::SmoothedGaussian { j: j as u32, alpha: T::lit(alpha) }
            }
            "semiclassical" => DensityFamily::Semiclassical { f0: self.text("f0")?, eps: T::lit(self.number("eps")?) },
            "custom" => DensityFamily::Custom { sigma: self.text("sigma")? },
            other => return Err(Error::InvalidDensity(format!("unknown density family '{other}'"))),
        };
        make_density(family, profile)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSummary<T> {
    pub p: Exponent<T>,
    pub value: T,
    pub ratio_to_l1: T,
}

/// Shift `min f` over the grid nodes, used to keep exponentials in range.
pub(crate) fn node_shift<T: Real>(d: &RadialDensity<T>, nodes: &[T]) -> T {
    nodes.iter().map(|r| d.f(*r)).fold(T::infinity(), |m, v| m.min(v))
}

/// `||sigma||_p` with respect to the Riemannian volume, by the midpoint rule on `grid`.
pub fn lp_norm<T: Real>(d: &RadialDensity<T>, p: &RevolutionProfile<T>, exponent: Exponent<T>, grid: &RadialGrid<T>) -> Result<NormSummary<T>> {
    let shift = node_shift(d, &grid.nodes);
    let area = sphere_area::<T>(p.dim() - 1);
    let cells: Vec<(T, T)> = grid.nodes.iter().map(|r| (p.area_factor(*r) * grid.h, (shift - d.f(*r)).exp())).collect();
    let l1 = area * cells.iter().map(|(v, s)| *v * *s).sum::<T>();
    let scaled = match exponent {
        Exponent::Finite(q) => {
            if !(q >= T::one()) {
                return Err(Error::InvalidInput(format!("norm exponent {q} must be at least 1")));
            }
            (area * cells.iter().map(|(v, s)| *v * s.powf(q)).sum::<T>()).powf(T::one() / q)
        }
        Exponent::Infinity => cells.iter().fold(T::zero(), |m, (_, s)| m.max(*s)),
    };
    let factor = (-shift).exp();
    Ok(NormSummary { p: exponent, value: scaled * factor, ratio_to_l1: scaled / l1 })
}

/// `||sigma||_{n/(n-2)} / ||sigma||_1`, with `||sigma||_inf` in place of the numerator for `n = 2`.
pub fn norm_ratio<T: Real>(d: &RadialDensity<T>, p: &RevolutionProfile<T>, grid: &RadialGrid<T>) -> Result<T> {
    let n = p.dim();
    let exponent = if n == 2 { Exponent::Infinity } else { Exponent::Finite(T::of(n) / T::of(n - 2)) };
    Ok(lp_norm(d, p, exponent, grid)?.ratio_to_l1)
}

/// Below this distance from a pole the drift term `(theta'/theta) f'` uses its series limit.
pub const POLE_LIMIT_RADIUS: f64 = 1e-6;

/// `V = |f'|^2/4 + (Delta f)/2` with `Delta f = -f'' - (n-1)(theta'/theta) f'`.
pub fn schrodinger_potential<'a, T: Real>(d: &'a RadialDensity<T>, p: &'a RevolutionProfile<T>) -> impl Fn(T) -> T + 'a {
    let nm1 = T::of(p.dim() - 1);
    let cut = T::lit(POLE_LIMIT_RADIUS);
    move |r: T| {
        let [_, f1, f2] = d.eval(r);
        let drift = if r < cut {
            d.f_double_prime(T::zero())
        } else if p.kind() == ProfileKind::Closed && p.radius() - r < cut {
            d.f_double_prime(p.radius())
        } else {
            let [t, t1, _] = p.eval(r);
            t1 / t * f1
        };
        T::lit(0.25) * f1 * f1 + T::lit(0.5) * (-f2 - nm1 * drift)
    }
}
