//! Checks on the circle `[0, 2 pi)`: the semiclassical lower bound and the spectral gap of
//! Schrodinger operators.

use serde::Serialize;

use super::BoundReport;
use crate::cartesian::{
    assemble_cartesian, assemble_schrodinger, bindings, ground_state_density, ground_state_transform, solve_cartesian, PlanarDensity,
    PlanarDomain, Shape, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const MORSE_SAMPLES: usize = 4096;

/// Largest density dynamic range `exp((max f0 - min f0) / eps)` accepted without a warning.
pub const DYNAMIC_RANGE_LIMIT: f64 = 1e12;

/// Number of strict local minima of a periodic function, found from sign changes of its
/// derivative. Rejects constants and degenerate critical points.
pub fn local_minima(f0: &Expr) -> Result<usize> {
    let d1 = f0.derivative(Var::T);
    let d2 = d1.derivative(Var::T);
    let h = TWO_PI / MORSE_SAMPLES as f64;
    let ts: Vec<f64> = (0..MORSE_SAMPLES).map(|i| i as f64 * h).collect();
    let values: Vec<f64> = ts.iter().map(|t| f0.eval1(Var::T, *t)).collect();
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if !(hi - lo > 1e-12) {
        return Err(Error::InvalidInput(format!("f0 = {f0} is constant and has no isolated minima")));
    }
    let slope: Vec<f64> = ts.iter().map(|t| d1.eval1(Var::T, *t)).collect();
    let mut minima = 0;
    for i in 0..MORSE_SAMPLES {
        let (a, b) = (slope[i], slope[(i + 1) % MORSE_SAMPLES]);
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            let curvature = d2.eval1(Var::T, ts[i] + h / 2.0);
            if curvature.abs() < 1e-8 {
                return Err(Error::InvalidInput(format!("f0 = {f0} has a degenerate critical point near t = {}", ts[i])));
            }
            if a < 0.0 {
                minima += 1;
            }
        }
    }
    if minima == 0 {
        return Err(Error::InvalidInput(format!("f0 = {f0} has no local minimum on the circle")));
    }
    Ok(minima)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiclassicalReport {
    pub minima: usize,
    pub reports: Vec<BoundReport>,
    pub warnings: Vec<String>,
}

/// `lambda_{m0+1} >= 1/sqrt(eps)` for `sigma = exp(-f0/eps)`, `m0` the number of minima.
pub fn semiclassical_check(f0: &Expr, eps: &[f64], cells: usize) -> Result<SemiclassicalReport> {
    let m0 = local_minima(f0)?;
    let (lo, hi) = (0..MORSE_SAMPLES).map(|i| f0.eval1(Var::T, TWO_PI * i as f64 / MORSE_SAMPLES as f64)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let mut reports = Vec::with_capacity(eps.len());
    let mut warnings = Vec::new();
    for &e in eps {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidInput(format!("eps = {e} must be positive")));
        }
        let range = (hi - lo) / e;
        if range > DYNAMIC_RANGE_LIMIT.ln() {
            warnings.push(format!("eps = {e}: density range exp({range:.1}) exceeds {DYNAMIC_RANGE_LIMIT:e}"));
        }
        let log = Expr::Div(Box::new(f0.clone()), Box::new(Expr::Num(e)));
        let sys = assemble_cartesian(&PlanarDomain::circle(TWO_PI, cells, PlanarDensity::Log(log)))?;
        let values = solve_cartesian(&sys, m0 + 1, DEFAULT_TOL)?.values;
        reports.push(
            BoundReport::new("semiclassical", 1.0 / e.sqrt(), values[m0])
                .param("eps", e)
                .param("minima", m0)
                .param("lambda_m0", values[m0 - 1])
                .param("lambda2", values[1])
                .param("cells", cells),
        );
    }
    Ok(SemiclassicalReport { minima: m0, reports, warnings })
}

pub const MAX_GAP_INDEX: usize = 20;

/// Relative deviation under which the gap bound counts as an equality.
pub const GAP_EQUALITY_RTOL: f64 = 1e-3;

/// `lambda_k(H) - lambda_1(H) <= mu_k(psi^2, psi^2 dv)` for `H = Delta + V` on the circle.
pub fn gap_bound_check(v: &Expr, k: usize, cells: usize) -> Result<BoundReport> {
    if k == 0 || k > MAX_GAP_INDEX {
        return Err(Error::InvalidInput(format!("k = {k} must lie in 1..={MAX_GAP_INDEX}")));
    }
    let h = assemble_schrodinger(Shape::Circle { len: TWO_PI }, cells, 1, |pt| v.eval(&bindings(pt)))?;
    let spec = solve_cartesian(&h, k, DEFAULT_TOL)?.values;
    let ground = ground_state_density(&h)?;
    let conj = ground_state_transform(&h, &ground.psi)?;
    let mu = solve_cartesian(&conj, k, DEFAULT_TOL)?.values;
    let lhs = spec[k - 1] - spec[0];
    let rhs = mu[k - 1];
    let scale = lhs.abs().max(rhs.abs());
    let deviation = if scale < 1e-12 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(BoundReport::with_tolerance("gap", lhs, rhs, 1e-9 * (1.0 + scale))
        .param("k", k)
        .param("potential", v.to_string())
        .param("lambda1", spec[0])
        .param("relative_deviation", deviation)
        .param("near_equality", deviation < GAP_EQUALITY_RTOL)
        .param("cells", cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_minima() {
        assert_eq!(local_minima(&Expr::parse("cos(2*t)").unwrap()).unwrap(), 2);
        assert_eq!(local_minima(&Expr::parse("sin(3*t)").unwrap()).unwrap(), 3);
        assert!(local_minima(&Expr::parse("3").unwrap()).is_err());
    }

    #[test]
    fn semiclassical_growth() {
        let f0 = Expr::parse("cos(2*t)").unwrap();
        let r = semiclassical_check(&f0, &[0.05], 2000).unwrap();
        assert_eq!(r.minima, 2);
        assert!(r.reports[0].satisfied && r.reports[0].rhs >= 4.472, "{:?}", r.reports[0]);
    }

    #[test]
    fn gap_identity() {
        for v in ["0", "3*cos(t)"] {
            let r = gap_bound_check(&Expr::parse(v).unwrap(), 5, 1000).unwrap();
            assert!(r.satisfied && r.params["near_equality"] == true, "{r:?}");
        }
        let a = gap_bound_check(&Expr::parse("3*cos(t)").unwrap(), 4, 800).unwrap();
        let b = gap_bound_check(&Expr::parse("3*cos(t) + 7").unwrap(), 4, 800).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-8 && (a.rhs - b.rhs).abs() < 1e-8);
    }
}
