//! Builds geometries, densities and measures from options.

use std::f64::consts::PI;

use serde_json::{Map, Value};
use spectra_core::density::DensitySpec;
use spectra_core::geometry::ProfileSpec;
use spectra_core::{Density, Expr, Measure, PlanarDensity, Profile};

use crate::failure::Failure;
use crate::options::Options;

pub const RADIAL_FAMILIES: [&str; 5] = ["constant", "gaussian", "smoothed_gaussian", "semiclassical", "custom"];

pub fn is_planar(geometry: &str) -> bool {
    matches!(geometry, "rectangle" | "interval" | "circle")
}

pub fn parse_expr(field: &str, text: &str) -> Result<Expr, Failure> {
    Expr::parse(text).map_err(|e| Failure::Config(format!("{field}: cannot parse '{text}': {e}")))
}

pub fn required<T: Clone>(field: &str, value: &Option<T>) -> Result<T, Failure> {
    value.clone().ok_or_else(|| Failure::Config(format!("{field}: required")))
}

pub fn positive(field: &str, value: f64) -> Result<f64, Failure> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Failure::Config(format!("{field}: must be positive, got {value}")))
    }
}

pub fn count(field: &str, value: usize, min: usize) -> Result<usize, Failure> {
    if value >= min {
        Ok(value)
    } else {
        Err(Failure::Config(format!("{field}: must be at least {min}, got {value}")))
    }
}

/// Revolution profile; `geometry`, `n` and `R` fall back to the given defaults.
pub fn profile(o: &Options, geometry: &str, n: usize) -> Result<Profile, Failure> {
    let kind = o.geometry.clone().unwrap_or_else(|| geometry.to_string());
    if is_planar(&kind) {
        return Err(Failure::Config(format!("geometry: '{kind}' is not a revolution manifold")));
    }
    let r = o.r.unwrap_or(if kind == "round_sphere" { PI } else { 1.0 });
    let spec = ProfileSpec { kind, r, n: o.n.unwrap_or(n), samples: o.samples.clone(), a: o.a };
    spec.build().map_err(|e| Failure::from_core("geometry", e))
}

fn insert(params: &mut Map<String, Value>, key: &str, value: Option<Value>) {
    if let Some(v) = value {
        params.insert(key.to_string(), v);
    }
}

/// Radial density from a family name, or from an expression for `sigma` in `r`.
pub fn radial_density(o: &Options, p: &Profile) -> Result<Density, Failure> {
    let name = o.density.clone().unwrap_or_else(|| "constant".to_string());
    let mut params = Map::new();
    let family = if RADIAL_FAMILIES.contains(&name.as_str()) {
        insert(&mut params, "c", o.c.map(Value::from));
        insert(&mut params, "j", o.j.map(Value::from));
        insert(&mut params, "alpha", o.alpha.map(Value::from));
        insert(&mut params, "eps", o.eps.map(Value::from));
        insert(&mut params, "f0", o.f0.clone().map(Value::from));
        insert(&mut params, "sigma", o.sigma.clone().map(Value::from));
        name
    } else {
        parse_expr("density", &name)?;
        params.insert("sigma".into(), Value::from(name));
        "custom".to_string()
    };
    DensitySpec { family, params }.build(p).map_err(|e| Failure::from_core("density", e))
}

/// Density on an interval, circle or rectangle. Expressions give `sigma` in `t` (or `x`, `y`).
pub fn planar_density(o: &Options, center: [f64; 2]) -> Result<PlanarDensity<f64>, Failure> {
    let name = o.density.clone().unwrap_or_else(|| "constant".to_string());
    Ok(match name.as_str() {
        "constant" => PlanarDensity::Constant,
        "gaussian" => {
            let j = positive("j", required("j", &o.j)?)?;
            PlanarDensity::Gaussian { j, center: [o.x0.unwrap_or(center[0]), o.y0.unwrap_or(center[1])] }
        }
        "semiclassical" => {
            let f0 = parse_expr("f0", &required("f0", &o.f0)?)?;
            let eps = positive("eps", required("eps", &o.eps)?)?;
            PlanarDensity::Log(Expr::Div(Box::new(f0), Box::new(Expr::Num(eps))))
        }
        "custom" => PlanarDensity::Sigma(parse_expr("sigma", &required("sigma", &o.sigma)?)?),
        "smoothed_gaussian" => return Err(Failure::Config("density: smoothed_gaussian needs a revolution geometry".into())),
        expr => PlanarDensity::Sigma(parse_expr("density", expr)?),
    })
}

pub fn measure(o: &Options) -> Result<Measure, Failure> {
    Ok(match o.measure.as_deref().unwrap_or("sigma") {
        "sigma" => Measure::Sigma,
        "riemannian" => Measure::Riemannian,
        expr => Measure::Weight(parse_expr("measure", expr)?),
    })
}
