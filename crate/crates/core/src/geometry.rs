//! Revolution manifolds `dr^2 + theta(r)^2 g_{S^{n-1}}` over `[0, R]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{bisect, sampled_min, GaussRule};
use crate::radial::RadialGrid;
use crate::scalar::{sphere_area, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    WithBoundary,
    Closed,
}

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    m: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn natural(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let n = xs.len();
        if n < 4 || ys.len() != n {
            return Err(Error::InvalidProfile("spline needs at least 4 samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("sample abscissae must be strictly increasing".into()));
        }
        // Second derivatives with m_0 = m_{n-1} = 0 (Thomas algorithm).
        let mut m = vec![T::zero(); n];
        let k = n - 2;
        let mut sub = vec![T::zero(); k];
        let mut diag = vec![T::zero(); k];
        let mut sup = vec![T::zero(); k];
        let mut rhs = vec![T::zero(); k];
        let six = T::lit(6.0);
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i - 1] = h0;
            diag[i - 1] = T::lit(2.0) * (h0 + h1);
            sup[i - 1] = h1;
            rhs[i - 1] = six * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        for i in 1..k {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] = rhs[i] - w * rhs[i - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    fn segment(&self, x: T) -> usize {
        let i = self.xs.partition_point(|v| *v <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    /// Value and first three derivatives at `x`.
    pub fn eval_all(&self, x: T) -> [T; 4] {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = self.xs[i + 1] - x;
        let b = x - self.xs[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let six = T::lit(6.0);
        let two = T::lit(2.0);
        let v = (m0 * a * a * a + m1 * b * b * b) / (six * h) + (y0 / h - m0 * h / six) * a + (y1 / h - m1 * h / six) * b;
        let d1 = (-m0 * a * a + m1 * b * b) / (two * h) - (y0 / h - m0 * h / six) + (y1 / h - m1 * h / six);
        let d2 = (m0 * a + m1 * b) / h;
        let d3 = (m1 - m0) / h;
        [v, d1, d2, d3]
    }
}

/// Ellipse of revolution with equatorial radius `a` and polar semi-axis `b`, parametrized
/// by arclength from the north pole.
#[derive(Debug, Clone)]
pub struct SpheroidWarp<T> {
    a: T,
    b: T,
    dphi: T,
    table: Vec<T>,
    rule: GaussRule<T>,
}

const SPHEROID_PANELS: usize = 512;

impl<T: Real> SpheroidWarp<T> {
    fn speed(a: T, b: T, phi: T) -> T {
        ((a * phi.cos()).powi(2) + (b * phi.sin()).powi(2)).sqrt()
    }

    /// Spheroid whose pole-to-pole meridian has length `half_meridian`.
    fn new(a: T, half_meridian: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::InvalidProfile("spheroid parameter a must be positive".into()));
        }
        if !(half_meridian > T::lit(2.0) * a) {
            return Err(Error::InvalidProfile(format!(
                "spheroid meridian length {half_meridian} must exceed 2a = {}",
                T::lit(2.0) * a
            )));
        }
        let rule = GaussRule::<T>::new(10);
        let length = |b: T| rule.integrate_panels(|p| Self::speed(a, b, p), T::zero(), T::PI(), 64) - half_meridian;
        let b = bisect(length, T::lit(1e-14) * a, half_meridian, T::epsilon() * half_meridian)
            .ok_or_else(|| Error::InvalidProfile("could not match the spheroid meridian length".into()))?;
        let dphi = T::PI() / T::of(SPHEROID_PANELS);
        let mut table = Vec::with_capacity(SPHEROID_PANELS + 1);
        table.push(T::zero());
        let mut s = T::zero();
        for k in 0..SPHEROID_PANELS {
            let lo = dphi * T::of(k);
            s += rule.integrate(|p| Self::speed(a, b, p), lo, lo + dphi);
            table.push(s);
        }
        Ok(Self { a, b, dphi, table, rule })
    }

    pub fn semi_axes(&self) -> (T, T) {
        (self.a, self.b)
    }

    fn arclength(&self, phi: T) -> T {
        let k = (phi / self.dphi).floor().to_usize().unwrap_or(0).min(SPHEROID_PANELS - 1);
        let lo = self.dphi * T::of(k);
        self.table[k] + self.rule.integrate(|p| Self::speed(self.a, self.b, p), lo, phi)
    }

    fn phi_of(&self, r: T) -> T {
        let total = self.table[SPHEROID_PANELS];
        let r = r.max(T::zero()).min(total);
        let k = self.table.partition_point(|s| *s <= r).clamp(1, SPHEROID_PANELS) - 1;
        let frac = (r - self.table[k]) / (self.table[k + 1] - self.table[k]);
        let mut phi = self.dphi * (T::of(k) + frac);
        for _ in 0..50 {
            let step = (self.arclength(phi) - r) / Self::speed(self.a, self.b, phi);
            phi -= step;
            if step.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        phi
    }

    fn eval(&self, r: T) -> [T; 3] {
        let phi = self.phi_of(r);
        let g = Self::speed(self.a, self.b, phi);
        let (s, c) = phi.sin_cos();
        [self.a * s, self.a * c / g, -self.a * self.b * self.b * s / g.powi(4)]
    }
}

#[derive(Debug, Clone)]
pub enum Warp<T> {
    /// `theta(r) = r`.
    Flat,
    /// `theta(r) = sin r`.
    Sine,
    Spheroid(SpheroidWarp<T>),
    Spline(CubicSpline<T>),
}

/// A revolution profile: warp function on `[0, R]`, boundary classification and dimension.
#[derive(Debug, Clone)]
pub struct RevolutionProfile<T> {
    warp: Warp<T>,
    r_max: T,
    kind: ProfileKind,
    dim: usize,
}

/// Built-in geometry choices.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileChoice<T> {
    FlatBall,
    RoundSphere,
    Spheroid { a: T },
    Custom { samples: Vec<(T, T)> },
}

/// Tolerance used when accepting spline-interpolated custom profiles.
pub const CUSTOM_PROFILE_TOL: f64 = 1e-4;
/// Tolerance used when accepting analytic built-in profiles.
pub const BUILTIN_PROFILE_TOL: f64 = 1e-10;

pub fn make_profile<T: Real>(choice: ProfileChoice<T>, r_max: T, n: usize) -> Result<RevolutionProfile<T>> {
    if n < 2 {
        return Err(Error::InvalidProfile(format!("dimension n = {n} must be at least 2")));
    }
    if !(r_max > T::zero()) || !r_max.is_finite() {
        return Err(Error::InvalidProfile(format!("R = {r_max} must be positive")));
    }
    let (profile, tol) = match choice {
        ProfileChoice::FlatBall => (RevolutionProfile::from_warp(Warp::Flat, r_max, ProfileKind::WithBoundary, n), T::lit(BUILTIN_PROFILE_TOL)),
        ProfileChoice::RoundSphere => {
            if (r_max - T::PI()).abs() > T::lit(1e-12) * T::PI() {
                return Err(Error::InvalidProfile(format!("round_sphere requires R = pi, got {r_max}")));
            }
            (RevolutionProfile::from_warp(Warp::Sine, T::PI(), ProfileKind::Closed, n), T::lit(BUILTIN_PROFILE_TOL))
        }
        ProfileChoice::Spheroid { a } => {
            let w = SpheroidWarp::new(a, r_max)?;
            (RevolutionProfile::from_warp(Warp::Spheroid(w), r_max, ProfileKind::Closed, n), T::lit(BUILTIN_PROFILE_TOL))
        }
        ProfileChoice::Custom { samples } => {
            if samples.len() < 4 {
                return Err(Error::InvalidProfile("custom profile needs at least 4 samples".into()));
            }
            if samples[0].0 != T::zero() {
                return Err(Error::InvalidProfile("custom samples must start at r = 0".into()));
            }
            let last = samples[samples.len() - 1].0;
            if (last - r_max).abs() > T::lit(1e-12) * r_max {
                return Err(Error::InvalidProfile(format!("custom samples end at {last}, expected R = {r_max}")));
            }
            let peak = samples.iter().fold(T::zero(), |m, s| m.max(s.1.abs()));
            let closed = samples[samples.len() - 1].1.abs() <= T::lit(1e-8) * peak;
            let (xs, ys): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
            let spline = CubicSpline::natural(xs, ys)?;
            let kind = if closed { ProfileKind::Closed } else { ProfileKind::WithBoundary };
            (RevolutionProfile::from_warp(Warp::Spline(spline), r_max, kind, n), T::lit(CUSTOM_PROFILE_TOL))
        }
    };
    let diagnostics = validate_profile(&profile, tol);
    if !diagnostics.is_empty() {
        return Err(Error::InvalidProfile(diagnostics.join("; ")));
    }
    Ok(profile)
}

impl<T: Real> RevolutionProfile<T> {
    /// Assembles a profile without validation.
    pub fn from_warp(warp: Warp<T>, r_max: T, kind: ProfileKind, dim: usize) -> Self {
        Self { warp, r_max, kind, dim }
    }

    pub fn radius(&self) -> T {
        self.r_max
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn warp(&self) -> &Warp<T> {
        &self.warp
    }

    /// `[theta, theta', theta'']` at `r`.
    pub fn eval(&self, r: T) -> [T; 3] {
        match &self.warp {
            Warp::Flat => [r, T::one(), T::zero()],
            Warp::Sine => {
                let (s, c) = r.sin_cos();
                [s, c, -s]
            }
            Warp::Spheroid(w) => w.eval(r),
            Warp::Spline(s) => {
                let [v, d1, d2, _] = s.eval_all(r);
                [v, d1, d2]
            }
        }
    }

    pub fn theta(&self, r: T) -> T {
        match &self.warp {
            Warp::Flat => r,
            Warp::Sine => r.sin(),
            _ => self.eval(r)[0],
        }
    }

    /// `1 - theta'(r)^2`, evaluated without cancellation for the analytic warps.
    pub fn theta_prime_defect(&self, r: T) -> T {
        match &self.warp {
            Warp::Flat => T::zero(),
            Warp::Sine => r.sin().powi(2),
            Warp::Spheroid(w) => {
                let phi = w.phi_of(r);
                let g = SpheroidWarp::speed(w.a, w.b, phi);
                (w.b * phi.sin() / g).powi(2)
            }
            Warp::Spline(_) => T::one() - self.theta_prime(r).powi(2),
        }
    }

    pub fn theta_prime(&self, r: T) -> T {
        self.eval(r)[1]
    }

    pub fn theta_double_prime(&self, r: T) -> T {
        self.eval(r)[2]
    }

    /// `theta'''(0)`: analytic for built-ins, fourth-order odd-extension differences otherwise.
    pub fn theta_triple_at_pole(&self) -> T {
        match &self.warp {
            Warp::Flat => T::zero(),
            Warp::Sine => -T::one(),
            Warp::Spheroid(w) => -w.b * w.b / w.a.powi(4),
            Warp::Spline(s) => {
                let h = (self.r_max * T::lit(1e-3)).max(T::lit(2.0) * (s.xs[1] - s.xs[0]));
                let f = |k: usize| self.theta(h * T::of(k));
                (-f(3) + T::lit(8.0) * f(2) - T::lit(13.0) * f(1)) / (T::lit(4.0) * h.powi(3))
            }
        }
    }

    /// `theta(r)^{n-1}`.
    pub fn area_factor(&self, r: T) -> T {
        self.theta(r).powi(self.dim as i32 - 1)
    }

    /// Volume of the geodesic ball of radius `rho` around the north pole.
    pub fn pole_ball_volume(&self, rho: T) -> T {
        let rho = rho.min(self.r_max);
        let rule = GaussRule::<T>::new(8);
        let panels = 64;
        sphere_area::<T>(self.dim - 1) * rule.integrate_panels(|r| self.area_factor(r), T::zero(), rho, panels)
    }

    /// Short identifier used in report metadata.
    pub fn id(&self) -> String {
        let name = match &self.warp {
            Warp::Flat => "flat_ball".to_string(),
            Warp::Sine => "round_sphere".to_string(),
            Warp::Spheroid(w) => format!("spheroid(a={})", w.a),
            Warp::Spline(_) => "custom".to_string(),
        };
        format!("{name}(R={},n={})", self.r_max, self.dim)
    }

    pub fn to_spec(&self) -> ProfileSpec {
        let (kind, a, samples) = match &self.warp {
            Warp::Flat => ("flat_ball", None, None),
            Warp::Sine => ("round_sphere", None, None),
            Warp::Spheroid(w) => ("spheroid", Some(w.a.to_f()), None),
            Warp::Spline(s) => ("custom", None, Some(s.xs.iter().zip(&s.ys).map(|(x, y)| [x.to_f(), y.to_f()]).collect())),
        };
        ProfileSpec { kind: kind.to_string(), r: self.r_max.to_f(), n: self.dim, samples, a }
    }
}

/// Serialized form `{"kind", "R", "n", "samples", "a"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: String,
    #[serde(rename = "R")]
    pub r: f64,
    pub n: usize,
    #[serde(default)]
    pub samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

impl ProfileSpec {
    pub fn build<T: Real>(&self) -> Result<RevolutionProfile<T>> {
        let choice = match self.kind.as_str() {
            "flat_ball" => ProfileChoice::FlatBall,
            "round_sphere" => ProfileChoice::RoundSphere,
            "spheroid" => ProfileChoice::Spheroid {
                a: T::lit(self.a.ok_or_else(|| Error::InvalidProfile("spheroid needs parameter a".into()))?),
            },
            "custom" => ProfileChoice::Custom {
                samples: self
                    .samples
                    .as_ref()
                    .ok_or_else(|| Error::InvalidProfile("custom profile needs samples".into()))?
                    .iter()
                    .map(|s| (T::lit(s[0]), T::lit(s[1])))
                    .collect(),
            },
            other => return Err(Error::InvalidProfile(format!("unknown geometry '{other}'"))),
        };
        make_profile(choice, T::lit(self.r), self.n)
    }
}

fn short(v: f64) -> String {
    let rounded: f64 = format!("{v:.6e}").parse().unwrap_or(v);
    format!("{rounded}")
}

/// Named violations of the pole and boundary conditions, each with its residual.
pub fn validate_profile<T: Real>(p: &RevolutionProfile<T>, tol: T) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |name: &str, residual: T| {
        if !(residual.abs() <= tol) {
            out.push(format!("{name} residual {}", short(residual.abs().to_f())));
        }
    };
    let [t0, d0, dd0] = p.eval(T::zero());
    check("theta_at_0", t0);
    check("theta_prime_at_0", d0 - T::one());
    check("theta_double_prime_at_0", dd0);
    let r = p.radius();
    if p.kind() == ProfileKind::Closed {
        let [t1, d1, dd1] = p.eval(r);
        check("theta_at_R", t1);
        check("theta_prime_at_R", d1 + T::one());
        check("theta_double_prime_at_R", dd1);
    }
    let samples = 1000;
    let last = if p.kind() == ProfileKind::WithBoundary { samples + 1 } else { samples };
    for i in 1..=last {
        let x = r * T::of(i) / T::of(samples + 1);
        let th = p.theta(x);
        if !(th > T::zero()) {
            out.push(format!("theta_positive violated at r={} (theta={})", short(x.to_f()), short(th.to_f())));
            break;
        }
    }
    out
}

/// Curvature quantities entering the lower bounds for revolution manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureSummary<T> {
    pub ric_radial_min: T,
    pub ric_tangential_min: T,
    pub ric0: T,
    pub c1: T,
    pub c2: T,
}

/// Infima estimated from a uniform sample of `grid_points` interior points refined by
/// golden-section search.
pub fn curvature_summary<T: Real>(p: &RevolutionProfile<T>, grid_points: usize) -> Result<CurvatureSummary<T>> {
    if grid_points < 100 {
        return Err(Error::InvalidInput(format!("grid_points = {grid_points} must be at least 100")));
    }
    let tol = match p.warp() {
        Warp::Spline(_) => T::lit(CUSTOM_PROFILE_TOL),
        _ => T::lit(BUILTIN_PROFILE_TOL),
    };
    let diag = validate_profile(p, tol);
    if !diag.is_empty() {
        return Err(Error::InvalidProfile(diag.join("; ")));
    }
    let n = T::of(p.dim());
    let nm1 = n - T::one();
    let r_max = p.radius();
    let radial = |r: T| {
        let [t, _, dd] = p.eval(r);
        -nm1 * dd / t
    };
    let tangential = |r: T| {
        let [t, _, dd] = p.eval(r);
        -dd / t + (n - T::lit(2.0)) * p.theta_prime_defect(r) / (t * t)
    };
    let ric_radial_min = sampled_min(radial, T::zero(), r_max, grid_points).1;
    let ric_tangential_min = sampled_min(tangential, T::zero(), r_max, grid_points).1;
    let ric0 = ric_radial_min.min(ric_tangential_min);
    let c1_term = |r: T| {
        let [t, d, _] = p.eval(r);
        nm1 * (d / t).powi(2)
    };
    let c1 = sampled_min(c1_term, T::zero(), r_max, grid_points).1 + ric0;
    // Close to the pole the quotient loses all digits to cancellation; the series limit
    // covers that range.
    let start = match p.warp() {
        Warp::Spline(_) => r_max * T::lit(1e-2),
        _ => r_max * T::lit(1e-3),
    };
    let q = |r: T| {
        let [t, d, _] = p.eval(r);
        (r - d * t) / (r * t * t)
    };
    let pole = -T::lit(2.0 / 3.0) * p.theta_triple_at_pole();
    let c2 = nm1 * sampled_min(q, start, r_max, grid_points).1.min(pole);
    Ok(CurvatureSummary { ric_radial_min, ric_tangential_min, ric0, c1, c2 })
}

/// `|S^{n-1}| * int_0^R theta^{n-1} dr` by the midpoint rule on the grid nodes.
pub fn riemannian_volume<T: Real>(p: &RevolutionProfile<T>, grid: &RadialGrid<T>) -> T {
    let s: T = grid.nodes.iter().map(|r| p.area_factor(*r)).sum();
    sphere_area::<T>(p.dim() - 1) * s * grid.h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builtin_profiles() {
        let flat = make_profile::<f64>(ProfileChoice::FlatBall, 1.0, 2).unwrap();
        assert_eq!(flat.theta(0.5), 0.5);
        assert_eq!(flat.kind(), ProfileKind::WithBoundary);
        let sphere = make_profile::<f64>(ProfileChoice::RoundSphere, PI, 2).unwrap();
        assert!((sphere.theta(PI / 2.0) - 1.0).abs() < 1e-15);
        assert!(sphere.theta_prime(PI / 2.0).abs() < 1e-15);
        assert_eq!(sphere.kind(), ProfileKind::Closed);
        assert!(make_profile::<f64>(ProfileChoice::RoundSphere, 3.0, 2).is_err());
        assert!(make_profile::<f64>(ProfileChoice::FlatBall, 1.0, 1).is_err());
        for p in [flat, sphere] {
            assert!(validate_profile(&p, 1e-8).is_empty());
        }
    }

    #[test]
    fn spheroid_reduces_to_sphere_and_validates() {
        let p = make_profile::<f64>(ProfileChoice::Spheroid { a: 1.0 }, PI, 3).unwrap();
        let (a, b) = match p.warp() {
            Warp::Spheroid(w) => w.semi_axes(),
            _ => unreachable!(),
        };
        assert!((a - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-12);
        for r in [0.1, 1.0, 2.5] {
            let [t, d, dd] = p.eval(r);
            assert!((t - f64::sin(r)).abs() < 1e-11);
            assert!((d - f64::cos(r)).abs() < 1e-11);
            assert!((dd + f64::sin(r)).abs() < 1e-11);
        }
        let oblate = make_profile::<f64>(ProfileChoice::Spheroid { a: 1.2 }, 3.0, 2).unwrap();
        assert!(validate_profile(&oblate, 1e-8).is_empty());
        // derivative consistency of the arclength parametrization
        let h = 1e-5;
        for r in [0.4, 1.5, 2.6] {
            let fd = (oblate.theta(r + h) - oblate.theta(r - h)) / (2.0 * h);
            assert!((fd - oblate.theta_prime(r)).abs() < 1e-8);
            let fdd = (oblate.theta_prime(r + h) - oblate.theta_prime(r - h)) / (2.0 * h);
            assert!((fdd - oblate.theta_double_prime(r)).abs() < 1e-7);
        }
        assert!(make_profile::<f64>(ProfileChoice::Spheroid { a: 2.0 }, 3.0, 2).is_err());
    }

    #[test]
    fn custom_sinh_profile() {
        let samples: Vec<(f64, f64)> = (0..=400).map(|i| {
            let r = i as f64 / 400.0;
            (r, r.sinh())
        }).collect();
        let p = make_profile::<f64>(ProfileChoice::Custom { samples }, 1.0, 3).unwrap();
        assert_eq!(p.kind(), ProfileKind::WithBoundary);
        assert!((p.theta_prime(1.0) - 1f64.cosh()).abs() < 1e-3);
        assert!((p.theta(0.37) - 0.37f64.sinh()).abs() < 1e-8);
    }

    #[test]
    fn validation_names_violations() {
        let samples: Vec<(f64, f64)> = (0..=100).map(|i| {
            let r = i as f64 / 100.0;
            (r, 0.9 * r)
        }).collect();
        let spline = CubicSpline::natural(samples.iter().map(|s| s.0).collect(), samples.iter().map(|s| s.1).collect()).unwrap();
        let p = RevolutionProfile::from_warp(Warp::Spline(spline), 1.0, ProfileKind::WithBoundary, 2);
        assert_eq!(validate_profile(&p, 1e-8), vec!["theta_prime_at_0 residual 0.1".to_string()]);
        let sphere = RevolutionProfile::from_warp(Warp::<f64>::Sine, PI, ProfileKind::Closed, 2);
        assert!(validate_profile(&sphere, 1e-10).is_empty());
    }

    #[test]
    fn curvature_of_model_spaces() {
        let flat = make_profile::<f64>(ProfileChoice::FlatBall, 1.0, 2).unwrap();
        let c = curvature_summary(&flat, 10_000).unwrap();
        assert_eq!(c.ric0, 0.0);
        assert_eq!(c.c2, 0.0);
        let flat3 = make_profile::<f64>(ProfileChoice::FlatBall, 1.5, 3).unwrap();
        let c = curvature_summary(&flat3, 10_000).unwrap();
        assert!((c.c1 - 2.0 / 2.25).abs() < 1e-3);
        let sphere = make_profile::<f64>(ProfileChoice::RoundSphere, PI, 2).unwrap();
        let c = curvature_summary(&sphere, 10_000).unwrap();
        assert!((c.ric0 - 1.0).abs() < 1e-6);
        assert!(c.c2 > 0.0);
        let sphere4 = make_profile::<f64>(ProfileChoice::RoundSphere, PI, 4).unwrap();
        let c = curvature_summary(&sphere4, 10_000).unwrap();
        assert!((c.ric0 - 3.0).abs() < 1e-6);
        assert!(curvature_summary(&sphere4, 10).is_err());
    }

    #[test]
    fn pole_ball_volumes() {
        let sphere = make_profile::<f64>(ProfileChoice::RoundSphere, PI, 2).unwrap();
        assert!((sphere.pole_ball_volume(PI) - 4.0 * PI).abs() < 1e-12);
        let ball = make_profile::<f64>(ProfileChoice::FlatBall, 2.0, 3).unwrap();
        assert!((ball.pole_ball_volume(1.0) - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spec_roundtrip() {
        let p = make_profile::<f64>(ProfileChoice::FlatBall, 2.0, 3).unwrap();
        let json = serde_json::to_string(&p.to_spec()).unwrap();
        assert_eq!(json, r#"{"kind":"flat_ball","R":2.0,"n":3,"samples":null}"#);
        let spec: ProfileSpec = serde_json::from_str(&json).unwrap();
        let q: RevolutionProfile<f64> = spec.build().unwrap();
        assert_eq!(q.id(), p.id());
    }
}
