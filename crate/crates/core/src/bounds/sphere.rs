//! Upper bound for the first positive eigenvalue on round spheres, with the conformal
//! centring that produces it.

use serde::Serialize;

use super::BoundReport;
use crate::density::{lp_norm, Exponent, RadialDensity};
use crate::error::{Error, Result};
use crate::geometry::{RevolutionProfile, Warp};
use crate::quadrature::{bisect, GaussRule};
use crate::radial::{lambda2, RadialGrid};
use crate::scalar::sphere_area;

/// Margin, relative to the bound, below which the equality case is reported.
pub const EQUALITY_RTOL: f64 = 1e-4;

fn require_round(p: &RevolutionProfile<f64>) -> Result<()> {
    let unit = (p.radius() - std::f64::consts::PI).abs() < 1e-12;
    if !matches!(p.warp(), Warp::Sine) || !unit {
        return Err(Error::InvalidInput(format!("a round unit sphere is required, got {}", p.id())));
    }
    Ok(())
}

/// `lambda_2 <= n |S^n|^{2/n} ||sigma||_{n/(n-2)} / ||sigma||_1` (sup norm for `n = 2`).
pub fn hersch_bound_check(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, grid: &RadialGrid<f64>) -> Result<BoundReport> {
    require_round(p)?;
    let n = p.dim();
    let (lhs, branch) = lambda2(p, d, grid)?;
    let exponent = if n == 2 { Exponent::Infinity } else { Exponent::Finite(n as f64 / (n as f64 - 2.0)) };
    let norms = lp_norm(d, p, exponent, grid)?;
    let ratio = norms.ratio_to_l1;
    let p_value = match exponent {
        Exponent::Finite(q) => serde_json::Value::from(q),
        Exponent::Infinity => serde_json::Value::from("inf"),
    };
    let rhs = n as f64 * sphere_area::<f64>(n).powf(2.0 / n as f64) * ratio;
    let report = BoundReport::new("hersch", lhs, rhs);
    let equality = report.margin.abs() < EQUALITY_RTOL * rhs;
    Ok(report
        .param("n", n)
        .param("norm_ratio", ratio)
        .param("norms", serde_json::json!({ "p": p_value, "value": norms.value, "ratio": ratio }))
        .param("branch", serde_json::to_value(branch).unwrap_or_default())
        .param("equality", equality)
        .param("density", d.id())
        .param("grid_m", grid.m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusCentering {
    /// Boost parameter of `z -> (z + t) / (1 + t z)`.
    pub t: f64,
    /// Residual `int z' sigma dv / int sigma dv` at `t`.
    pub residual: f64,
    /// Quotients of the centred coordinates `x', y', z'`.
    pub quotients: [f64; 3],
}

impl MobiusCentering {
    pub fn min_quotient(&self) -> f64 {
        self.quotients.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

const PANELS: usize = 512;
const ORDER: usize = 8;

/// Finds the conformal boost of `S^2` that moves the `sigma`-centre of mass to the origin and
/// returns the Rayleigh quotients of the transported coordinate functions.
pub fn mobius_center_radial(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>) -> Result<MobiusCentering> {
    require_round(p)?;
    if p.dim() != 2 {
        return Err(Error::InvalidInput("conformal centring is implemented on S^2".into()));
    }
    let pi = std::f64::consts::PI;
    let rule = GaussRule::<f64>::new(ORDER);
    // exponent shift keeps the weights in range; quotients are homogeneous in sigma
    let shift = (0..=1000).map(|i| d.f(pi * i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
    let w = |r: f64| (shift - d.f(r)).exp() * r.sin();
    let integral = |g: &dyn Fn(f64) -> f64| rule.integrate_panels(|r| g(r) * w(r), 0.0, pi, PANELS);
    let mass = integral(&|_| 1.0);
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidDensity("the density has degenerate mass".into()));
    }
    let z = |t: f64, r: f64| (r.cos() + t) / (1.0 + t * r.cos());
    let centre = |t: f64| integral(&|r| z(t, r)) / mass;
    let lim = 1.0 - 1e-12;
    let t = bisect(centre, -lim, lim, 1e-15).ok_or_else(|| Error::NoConvergence { iterations: 0, residual: centre(0.0).abs() })?;
    let residual = centre(t);
    if residual.abs() >= 1e-10 {
        return Err(Error::NoConvergence { iterations: 0, residual: residual.abs() });
    }
    let s = (1.0 - t * t).sqrt();
    let g = |r: f64| s * r.sin() / (1.0 + t * r.cos());
    let dg = |r: f64| s * (r.cos() + t) / (1.0 + t * r.cos()).powi(2);
    let dz = |r: f64| -r.sin() * (1.0 - t * t) / (1.0 + t * r.cos()).powi(2);
    let horizontal = integral(&|r| {
        let sr = r.sin();
        let ratio = if sr > 1e-300 { g(r) / sr } else { s / (1.0 + t * r.cos()) };
        dg(r).powi(2) + ratio * ratio
    }) / integral(&|r| g(r).powi(2));
    let vertical = integral(&|r| dz(r).powi(2)) / integral(&|r| z(t, r).powi(2));
    Ok(MobiusCentering { t, residual, quotients: [horizontal, horizontal, vertical] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{make_density, DensityFamily};
    use crate::expr::Expr;
    use crate::geometry::{make_profile, ProfileChoice};
    use std::f64::consts::PI;

    fn sphere(n: usize) -> RevolutionProfile<f64> {
        make_profile(ProfileChoice::RoundSphere, PI, n).unwrap()
    }

    #[test]
    fn equality_for_constant_density() {
        for n in [2, 3] {
            let p = sphere(n);
            let d = make_density(DensityFamily::Constant { c: 1.0 }, &p).unwrap();
            let grid = RadialGrid::uniform(PI, 4000).unwrap();
            let r = hersch_bound_check(&p, &d, &grid).unwrap();
            assert!((r.lhs - n as f64).abs() < 1e-4 && (r.rhs - n as f64).abs() < 1e-4, "{r:?}");
            assert!(r.satisfied && r.params["equality"] == true);
        }
    }

    #[test]
    fn strict_for_tilted_density() {
        let p = sphere(2);
        let d = make_density(DensityFamily::Custom { sigma: Expr::parse("exp(-cos(r))").unwrap() }, &p).unwrap();
        let grid = RadialGrid::uniform(PI, 2000).unwrap();
        let r = hersch_bound_check(&p, &d, &grid).unwrap();
        assert!(r.satisfied && r.margin > 1e-3 * r.rhs);
        let c = mobius_center_radial(&p, &d).unwrap();
        assert!(c.min_quotient() >= r.lhs - 1e-6 && c.min_quotient() <= r.rhs * (1.0 + 1e-4), "{c:?} {r:?}");
    }

    #[test]
    fn centring_directions() {
        let p = sphere(2);
        let one = mobius_center_radial(&p, &make_density(DensityFamily::Constant { c: 1.0 }, &p).unwrap()).unwrap();
        assert!(one.t.abs() < 1e-12);
        for q in one.quotients {
            assert!((q - 2.0).abs() < 1e-10);
        }
        let north = make_density(DensityFamily::Custom { sigma: Expr::parse("exp(-r^2)").unwrap() }, &p).unwrap();
        assert!(mobius_center_radial(&p, &north).unwrap().t < 0.0);
    }
}
