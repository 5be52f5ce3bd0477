//! Lower bounds for Gaussian-type densities: convex domains, the two-sided estimate on
//! balls, and revolution manifolds.

use serde::Serialize;

use super::{linear_fit, BoundReport};
use crate::cartesian::{assemble_cartesian, solve_cartesian, PlanarDensity, PlanarDomain, DEFAULT_TOL};
use crate::density::{default_alpha, make_density, norm_ratio, DensityFamily};
use crate::error::{Error, Result};
use crate::geometry::{curvature_summary, make_profile, CurvatureSummary, ProfileChoice, ProfileKind, RevolutionProfile};
use crate::radial::{lambda2, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConvexDomain {
    /// Flat ball of radius `r_max` in dimension `n`, density centred at the origin.
    Ball { r_max: f64, n: usize },
    /// `[-a/2, a/2] x [-b/2, b/2]`.
    Rectangle { a: f64, b: f64 },
}

/// `lambda_2` on `cells` and on half as many, for the refinement tolerance.
fn convex_lambda2(domain: ConvexDomain, j: f64, center: [f64; 2], cells: usize) -> Result<(f64, f64)> {
    match domain {
        ConvexDomain::Ball { r_max, n } => {
            if center != [0.0, 0.0] {
                return Err(Error::InvalidInput("on a ball the density must be centred at the origin".into()));
            }
            let p = make_profile(ProfileChoice::FlatBall, r_max, n)?;
            let d = make_density(DensityFamily::Gaussian { j }, &p)?;
            let fine = lambda2(&p, &d, &RadialGrid::uniform(r_max, cells)?)?.0;
            let coarse = lambda2(&p, &d, &RadialGrid::uniform(r_max, cells / 2)?)?.0;
            Ok((fine, coarse))
        }
        ConvexDomain::Rectangle { a, b } => {
            if center[0].abs() >= a / 2.0 || center[1].abs() >= b / 2.0 {
                return Err(Error::InvalidInput(format!("centre ({}, {}) lies outside the rectangle", center[0], center[1])));
            }
            let solve = |c: usize| -> Result<f64> {
                let dom = PlanarDomain::rectangle(a, b, c, c, PlanarDensity::Gaussian { j, center });
                Ok(solve_cartesian(&assemble_cartesian(&dom)?, 2, DEFAULT_TOL)?.values[1])
            };
            Ok((solve(cells)?, solve(cells / 2)?))
        }
    }
}

/// `lambda_2 >= 2j` for `sigma = exp(-j |x - x0|^2)` on a convex domain. The tolerance is
/// ten times the change of `lambda_2` under halving the resolution.
pub fn convex_lower_check(domain: ConvexDomain, j: f64, center: [f64; 2], cells: usize) -> Result<BoundReport> {
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::InvalidDensity(format!("j = {j} must be positive")));
    }
    let (fine, coarse) = convex_lambda2(domain, j, center, cells)?;
    let tol_disc = 10.0 * (fine - coarse).abs();
    Ok(BoundReport::with_tolerance("convex", 2.0 * j, fine, tol_disc)
        .param("j", j)
        .param("domain", serde_json::to_value(domain).unwrap_or_default())
        .param("center", vec![center[0], center[1]])
        .param("cells", cells)
        .param("lambda2_coarse", coarse)
        .param("relative_excess", (fine - 2.0 * j) / (2.0 * j)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub reports: Vec<BoundReport>,
    /// Smallest swept `j` from which every lower inequality holds.
    pub threshold: Option<f64>,
    /// Estimate `max_j lambda_2 / ratio` of the upper constant.
    pub b_hat: f64,
    pub lambda2_over_j: Vec<f64>,
}

/// Smallest parameter from which all reports hold; `None` if the last one fails.
fn threshold(params: &[f64], reports: &[BoundReport]) -> Option<f64> {
    let mut out = None;
    for (p, r) in params.iter().zip(reports).rev() {
        if !r.satisfied {
            break;
        }
        out = Some(*p);
    }
    out
}

/// `||sigma||_{n/(n-2)} / ||sigma||_1 <= lambda_2` on a flat ball of dimension `n >= 3` for
/// each `j` in the sweep.
pub fn sandwich_check(r_max: f64, n: usize, js: &[f64], m: usize) -> Result<SandwichReport> {
    if n < 3 {
        return Err(Error::InvalidInput("the two-sided estimate needs dimension at least 3".into()));
    }
    if js.is_empty() {
        return Err(Error::InvalidInput("the j sweep is empty".into()));
    }
    let p = make_profile(ProfileChoice::FlatBall, r_max, n)?;
    let grid = RadialGrid::uniform(r_max, m)?;
    let mut reports = Vec::with_capacity(js.len());
    let mut b_hat = 0.0f64;
    let mut per_j = Vec::with_capacity(js.len());
    for &j in js {
        let d = make_density(DensityFamily::Gaussian { j }, &p)?;
        let ratio = norm_ratio(&d, &p, &grid)?;
        let (l2, _) = lambda2(&p, &d, &grid)?;
        b_hat = b_hat.max(l2 / ratio);
        per_j.push(l2 / j);
        reports.push(BoundReport::new("sandwich", ratio, l2).param("j", j).param("n", n).param("grid_m", m).param("lambda2_over_ratio", l2 / ratio));
    }
    Ok(SandwichReport { threshold: threshold(js, &reports), reports, b_hat, lambda2_over_j: per_j })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevolutionReport {
    pub reports: Vec<BoundReport>,
    pub curvature: CurvatureSummary<f64>,
    /// Constant added to `2j`: zero under non-negative Ricci curvature, else `min(c1, c2)`.
    pub constant: f64,
    /// Smallest swept `j` from which every report holds.
    pub j0: Option<f64>,
    /// Regression of `lambda_2` on `j` over the sweep from `j0` on (from the start when no
    /// `j0` exists).
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

/// `lambda_2 >= 2j + C` for Gaussian densities on revolution manifolds with boundary and
/// smoothed Gaussians on closed ones.
pub fn revolution_lower_check(p: &RevolutionProfile<f64>, js: &[f64], m: usize) -> Result<RevolutionReport> {
    if js.is_empty() {
        return Err(Error::InvalidInput("the j sweep is empty".into()));
    }
    let curvature = curvature_summary(p, 2000)?;
    let constant = if curvature.ric0 >= 0.0 { 0.0 } else { curvature.c1.min(curvature.c2) };
    let grid = RadialGrid::uniform(p.radius(), m)?;
    let mut reports = Vec::with_capacity(js.len());
    let mut values = Vec::with_capacity(js.len());
    for &j in js {
        let d = match p.kind() {
            ProfileKind::WithBoundary => make_density(DensityFamily::Gaussian { j }, p)?,
            ProfileKind::Closed => {
                if j < 1.0 || j.fract() != 0.0 {
                    return Err(Error::InvalidDensity(format!("smoothed Gaussians need a positive integer j, got {j}")));
                }
                let alpha = default_alpha(p.dim(), p.radius());
                make_density(DensityFamily::SmoothedGaussian { j: j as u32, alpha }, p)?
            }
        };
        let (l2, branch) = lambda2(p, &d, &grid)?;
        values.push(l2);
        reports.push(
            BoundReport::new("revolution", 2.0 * j + constant, l2)
                .param("j", j)
                .param("constant", constant)
                .param("geometry", p.id())
                .param("branch", serde_json::to_value(branch).unwrap_or_default())
                .param("grid_m", m),
        );
    }
    let j0 = threshold(js, &reports);
    let start = j0.and_then(|j| js.iter().position(|x| *x == j)).unwrap_or(0);
    let fit = if js.len() - start >= 2 { Some(linear_fit(&js[start..], &values[start..])?) } else { None };
    Ok(RevolutionReport {
        reports,
        curvature,
        constant,
        j0,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ornstein_uhlenbeck_sharpness() {
        let r = convex_lower_check(ConvexDomain::Ball { r_max: 3.0, n: 2 }, 4.0, [0.0, 0.0], 2000).unwrap();
        assert!(r.satisfied);
        assert!((r.rhs - 8.0).abs() < 0.01 * 8.0, "{r:?}");
        let small = convex_lower_check(ConvexDomain::Ball { r_max: 1.0, n: 2 }, 0.5, [0.0, 0.0], 2000).unwrap();
        assert!(small.satisfied && small.rhs > 1.0);
        assert!(convex_lower_check(ConvexDomain::Ball { r_max: 1.0, n: 2 }, 1.0, [0.1, 0.0], 100).is_err());
    }

    #[test]
    fn thresholds() {
        let ok = BoundReport::new("a", 1.0, 2.0);
        let bad = BoundReport::new("a", 2.0, 1.0);
        assert_eq!(threshold(&[1.0, 2.0, 3.0], &[bad.clone(), ok.clone(), ok.clone()]), Some(2.0));
        assert_eq!(threshold(&[1.0, 2.0], &[ok.clone(), bad]), None);
        assert_eq!(threshold(&[1.0], &[ok]), Some(1.0));
    }

    #[test]
    fn flat_ball_as_revolution_matches_convex() {
        let p = make_profile(ProfileChoice::FlatBall, 3.0, 2).unwrap();
        let rev = revolution_lower_check(&p, &[1.0, 4.0], 1000).unwrap();
        assert_eq!(rev.constant, 0.0);
        let conv = convex_lower_check(ConvexDomain::Ball { r_max: 3.0, n: 2 }, 4.0, [0.0, 0.0], 1000).unwrap();
        assert_eq!(rev.reports[1].rhs, conv.rhs);
        assert!(rev.reports.iter().all(|r| r.satisfied));
    }
}
