//! Comparison of the computed spectrum with the leading Weyl asymptotics.

use super::{linear_fit, BoundReport};
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::geometry::RevolutionProfile;
use crate::quadrature::GaussRule;
use crate::radial::{full_spectrum, RadialGrid};
use crate::scalar::{angular_eigenvalue, ball_volume, sphere_area};

/// Accepted relative deviation of the fitted coefficient.
pub const WEYL_RTOL: f64 = 0.10;

/// `4 pi^2 omega_n^{-2/n} V^{-2/n}`, the coefficient of `k^{2/n}` in `lambda_k`.
pub fn weyl_coefficient(n: usize, volume: f64) -> f64 {
    let e = 2.0 / n as f64;
    4.0 * std::f64::consts::PI.powi(2) * ball_volume::<f64>(n).powf(-e) * volume.powf(-e)
}

fn volume(p: &RevolutionProfile<f64>) -> f64 {
    let rule = GaussRule::<f64>::new(8);
    sphere_area::<f64>(p.dim() - 1) * rule.integrate_panels(|r| p.area_factor(r), 0.0, p.radius(), 256)
}

/// The first `k_max` eigenvalues with multiplicity, enlarging the mode range until no
/// omitted mode or radial index can fall below `lambda_{k_max}`.
fn eigenvalues(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, k_max: usize, grid: &RadialGrid<f64>) -> Result<Vec<f64>> {
    let peak = grid.nodes.iter().fold(0.0f64, |m, r| m.max(p.theta(*r)));
    let (mut l_max, mut per_mode) = (8usize, 8usize);
    loop {
        let spec = full_spectrum(p, d, l_max, per_mode, grid)?;
        let values = spec.expanded();
        if values.len() >= k_max {
            let top = values[k_max - 1];
            let omitted = angular_eigenvalue::<f64>(p.dim(), l_max + 1) / (peak * peak);
            let cut = spec.entries.iter().any(|e| e.radial_index == Some(per_mode - 1) && e.lambda <= top);
            if omitted > top && !cut {
                return Ok(values[..k_max].to_vec());
            }
        }
        if l_max > 4 * k_max || per_mode > grid.m / 2 {
            return Err(Error::InvalidInput(format!("could not resolve {k_max} eigenvalues on {} cells", grid.m)));
        }
        l_max *= 2;
        per_mode *= 2;
    }
}

/// Fits `lambda_k = a k^{2/n} + b` over `k_max/2 <= k <= k_max` and compares `a` with the
/// Weyl coefficient: `lhs = |a - c_W| / c_W`, `rhs = 0.1`.
pub fn weyl_check(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, k_max: usize, grid: &RadialGrid<f64>) -> Result<BoundReport> {
    if k_max < 50 {
        return Err(Error::InvalidInput(format!("k_max = {k_max} must be at least 50")));
    }
    let n = p.dim();
    let values = eigenvalues(p, d, k_max, grid)?;
    let e = 2.0 / n as f64;
    let ks: Vec<usize> = (k_max / 2..=k_max).collect();
    let xs: Vec<f64> = ks.iter().map(|k| (*k as f64).powf(e)).collect();
    let ys: Vec<f64> = ks.iter().map(|k| values[k - 1]).collect();
    let (slope, intercept) = linear_fit(&xs, &ys)?;
    let vol = volume(p);
    let c_w = weyl_coefficient(n, vol);
    let coarse = eigenvalues(p, d, k_max, &RadialGrid::uniform(p.radius(), grid.m / 2)?)?[k_max - 1];
    let drift = (values[k_max - 1] - coarse).abs() / values[k_max - 1];
    let mut report = BoundReport::with_tolerance("weyl", (slope - c_w).abs() / c_w, WEYL_RTOL, 0.0)
        .param("coefficient", slope)
        .param("intercept", intercept)
        .param("weyl_coefficient", c_w)
        .param("volume", vol)
        .param("k_max", k_max)
        .param("lambda_k_max", values[k_max - 1])
        .param("density", d.id())
        .param("grid_m", grid.m);
    if drift > 0.01 {
        report = report.param("warning", format!("lambda_k_max moves by {:.2}% under halving the grid", 100.0 * drift));
    }
    Ok(report)
}
