//! Numerical checks of eigenvalue inequalities for weighted Laplacians.
//!
//! Every check produces [`BoundReport`]s arranged so that the asserted inequality reads
//! `lhs <= rhs`; `margin = rhs - lhs`.

pub mod annulus;
pub mod circle;
pub mod lower;
pub mod sphere;
pub mod weyl;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub use annulus::{
    default_family, energy_bound_check, gamma_constant, minmax_upper_bound, optimize_family, test_function, Annulus, Pole,
};
pub use circle::{gap_bound_check, local_minima, semiclassical_check, SemiclassicalReport};
pub use lower::{convex_lower_check, revolution_lower_check, sandwich_check, ConvexDomain, RevolutionReport, SandwichReport};
pub use sphere::{hersch_bound_check, mobius_center_radial, MobiusCentering};
pub use weyl::{weyl_check, weyl_coefficient};

/// Relative slack of the default report tolerance.
pub const REPORT_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub margin: f64,
    pub params: BTreeMap<String, Value>,
}

impl BoundReport {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self::with_tolerance(name, lhs, rhs, 0.0)
    }

    /// `satisfied` holds when `rhs - lhs >= -max(tol, 1e-6 (|lhs| + |rhs|))`.
    pub fn with_tolerance(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        let tol = tol.max(REPORT_RTOL * (lhs.abs() + rhs.abs()));
        let mut params = BTreeMap::new();
        params.insert("tolerance".to_string(), Value::from(tol));
        Self { name: name.to_string(), lhs, rhs, satisfied: margin >= -tol, margin, params }
    }

    /// Placeholder for a check whose hypotheses do not apply.
    pub fn skipped(name: &str, reason: &str) -> Self {
        let mut r = Self::new(name, 0.0, 0.0);
        r.params.insert("skipped".into(), Value::from(reason));
        r
    }

    pub fn is_skipped(&self) -> bool {
        self.params.contains_key("skipped")
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.params.get("tolerance").and_then(Value::as_f64).unwrap_or(0.0)
    }

    /// Rejects reports holding NaN or infinite numbers anywhere.
    pub fn check_finite(&self) -> Result<()> {
        if !(self.lhs.is_finite() && self.rhs.is_finite() && self.margin.is_finite()) {
            return Err(Error::NonFinite(format!("report '{}' has lhs {} and rhs {}", self.name, self.lhs, self.rhs)));
        }
        for (k, v) in &self.params {
            if !value_is_finite(v) {
                return Err(Error::NonFinite(format!("report '{}' parameter '{k}'", self.name)));
            }
        }
        Ok(())
    }
}

fn value_is_finite(v: &Value) -> bool {
    match v {
        Value::Null => false,
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(value_is_finite),
        Value::Object(o) => o.values().all(value_is_finite),
        _ => true,
    }
}

/// Least-squares line `y = slope x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("a line fit needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("a line fit needs two distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
