//! Parameter sweeps: one CSV row per value plus a fitted line in a summary file.

use rayon::prelude::*;
use serde_json::json;
use spectra_core::bounds::{linear_fit, revolution_lower_check, semiclassical_check};
use spectra_core::density::{default_alpha, norm_ratio};
use spectra_core::{lambda2, make_density, BoundReport, Density, DensityFamily, Expr, Grid, Profile, ProfileKind};

use crate::commands::DEFAULT_GRID;
use crate::failure::Failure;
use crate::options::Options;
use crate::output::{csv_text, emit, json as pretty, number};
use crate::setup::{count, parse_expr, profile, radial_density};

pub const HEADER: [&str; 8] = ["param", "lambda2", "norm_ratio", "lhs", "rhs", "margin", "satisfied", "status"];

/// Observed order is accepted within this distance of the nominal second order.
pub const ORDER_TOL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variable {
    J,
    Eps,
    Grid,
}

#[derive(Debug, Clone, Default)]
struct Row {
    param: f64,
    lambda2: Option<f64>,
    norm_ratio: Option<f64>,
    report: Option<BoundReport>,
    error: Option<String>,
    config_error: bool,
}

impl Row {
    fn failed(param: f64, f: Failure) -> Self {
        let config_error = matches!(f, Failure::Config(_));
        Row { param, error: Some(f.message()), config_error, ..Row::default() }
    }

    fn ok(&self) -> bool {
        self.error.is_none()
    }

    fn fields(&self, variable: Variable) -> Vec<String> {
        let num = |v: Option<f64>| v.map(number).unwrap_or_default();
        let param = if variable == Variable::Grid { format!("{}", self.param as usize) } else { number(self.param) };
        let r = self.report.as_ref();
        vec![
            param,
            num(self.lambda2),
            num(self.norm_ratio),
            num(r.map(|r| r.lhs)),
            num(r.map(|r| r.rhs)),
            num(r.map(|r| r.margin)),
            r.map(|r| r.satisfied.to_string()).unwrap_or_default(),
            self.error.clone().unwrap_or_else(|| "ok".to_string()),
        ]
    }

    fn check_finite(mut self) -> Self {
        let values = [self.lambda2, self.norm_ratio];
        let bad = values.iter().flatten().any(|v| !v.is_finite()) || self.report.as_ref().is_some_and(|r| r.check_finite().is_err());
        if bad {
            self = Row { param: self.param, error: Some("solver failure: non-finite value".into()), ..Row::default() };
        }
        self
    }
}

fn threads() -> Result<usize, Failure> {
    match std::env::var("SPECTRA_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::Config(format!("SPECTRA_THREADS: expected a positive integer, got '{s}'"))),
        },
    }
}

fn core<T>(field: &str, r: spectra_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from_core(field, e))
}

fn sweep_density(p: &Profile, j: f64) -> Result<Density, Failure> {
    let family = match p.kind() {
        ProfileKind::WithBoundary => DensityFamily::Gaussian { j },
        ProfileKind::Closed => {
            if j < 1.0 || j.fract() != 0.0 {
                return Err(Failure::Config(format!("j: smoothed Gaussians need a positive integer, got {j}")));
            }
            DensityFamily::SmoothedGaussian { j: j as u32, alpha: default_alpha(p.dim(), p.radius()) }
        }
    };
    core("j", make_density(family, p))
}

fn j_row(p: &Profile, j: f64, m: usize) -> Result<Row, Failure> {
    let d = sweep_density(p, j)?;
    let g = core("grid", Grid::uniform(p.radius(), m))?;
    let ratio = core("norm_ratio", norm_ratio(&d, p, &g))?;
    let report = core("revolution", revolution_lower_check(p, &[j], m))?.reports.remove(0);
    Ok(Row { param: j, lambda2: Some(report.rhs), norm_ratio: Some(ratio), report: Some(report), ..Row::default() })
}

fn eps_row(f0: &Expr, eps: f64, cells: usize) -> Result<Row, Failure> {
    let r = core("eps", semiclassical_check(f0, &[eps], cells))?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let report = r.reports.into_iter().next().ok_or_else(|| Failure::Solver("empty semiclassical report".into()))?;
    let l2 = report.params.get("lambda2").and_then(|v| v.as_f64());
    Ok(Row { param: eps, lambda2: l2, report: Some(report), ..Row::default() })
}

fn grid_row(p: &Profile, d: &Density, m: f64) -> Result<Row, Failure> {
    if !(m >= 2.0 && m.fract() == 0.0) {
        return Err(Failure::Config(format!("grid: sweep values must be integers of at least 2, got {m}")));
    }
    let g = core("grid", Grid::uniform(p.radius(), m as usize))?;
    let (l2, _) = core("lambda2", lambda2(p, d, &g))?;
    let ratio = core("norm_ratio", norm_ratio(d, p, &g))?;
    Ok(Row { param: m, lambda2: Some(l2), norm_ratio: Some(ratio), ..Row::default() })
}

/// Observed convergence order from three consecutive rows: `ln(d1/d2) / ln(m3/m2)`.
fn attach_orders(rows: &mut [Row]) {
    for i in 2..rows.len() {
        let window = &rows[i - 2..=i];
        let (Some(a), Some(b), Some(c)) = (window[0].lambda2, window[1].lambda2, window[2].lambda2) else { continue };
        let (d1, d2) = (b - a, c - b);
        let ratio = window[2].param / window[1].param;
        if d2 == 0.0 || d1 == 0.0 || ratio <= 1.0 {
            continue;
        }
        let order = (d1 / d2).abs().ln() / ratio.ln();
        rows[i].report = Some(BoundReport::with_tolerance("order", order, 2.0, ORDER_TOL).param("m", window[2].param));
    }
}

fn fit(variable: Variable, rows: &[Row]) -> serde_json::Value {
    let (x_name, y_name, points): (&str, &str, Vec<(f64, f64)>) = match variable {
        Variable::J => ("j", "lambda2", rows.iter().filter_map(|r| r.lambda2.map(|y| (r.param, y))).collect()),
        Variable::Eps => ("1/eps", "rhs", rows.iter().filter_map(|r| r.report.as_ref().map(|rep| (1.0 / r.param, rep.rhs))).collect()),
        Variable::Grid => ("1/m^2", "lambda2", rows.iter().filter_map(|r| r.lambda2.map(|y| (1.0 / (r.param * r.param), y))).collect()),
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let line = linear_fit(&xs, &ys).ok().filter(|(s, i)| s.is_finite() && i.is_finite());
    json!({
        "x": x_name,
        "y": y_name,
        "points": xs.len(),
        "slope": line.map(|l| l.0),
        "intercept": line.map(|l| l.1),
    })
}

pub fn run_sweep(o: &Options) -> Result<(), Failure> {
    let variable = match o.variable.as_deref().unwrap_or("j") {
        "j" => Variable::J,
        "eps" => Variable::Eps,
        "grid" => Variable::Grid,
        other => return Err(Failure::Config(format!("variable: expected j, eps or grid, got '{other}'"))),
    };
    let default: &[f64] = match variable {
        Variable::J => &[10.0, 20.0, 40.0, 80.0],
        Variable::Eps => &[0.1, 0.05, 0.02],
        Variable::Grid => &[1000.0, 2000.0, 4000.0],
    };
    let values = o.sweep_values()?.unwrap_or_else(|| default.to_vec());
    if values.is_empty() {
        return Err(Failure::Config("values: the sweep is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads()?).build().map_err(|e| Failure::Config(format!("SPECTRA_THREADS: {e}")))?;

    let compute: Box<dyn Fn(f64) -> Result<Row, Failure> + Sync> = match variable {
        Variable::J => {
            let p = profile(o, "flat_ball", 3)?;
            let m = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 2)?;
            Box::new(move |j| j_row(&p, j, m))
        }
        Variable::Eps => {
            let f0 = parse_expr("f0", o.f0.as_deref().unwrap_or("cos(2*t)"))?;
            let cells = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 3)?;
            Box::new(move |eps| eps_row(&f0, eps, cells))
        }
        Variable::Grid => {
            let p = profile(o, "flat_ball", 3)?;
            let d = radial_density(o, &p)?;
            Box::new(move |m| grid_row(&p, &d, m))
        }
    };
    let mut rows: Vec<Row> = pool.install(|| values.par_iter().map(|v| compute(*v).unwrap_or_else(|f| Row::failed(*v, f))).collect());
    if variable == Variable::Grid {
        attach_orders(&mut rows);
    }
    let rows: Vec<Row> = rows.into_iter().map(Row::check_finite).collect();

    let table: Vec<Vec<String>> = rows.iter().map(|r| r.fields(variable)).collect();
    emit(o.out.as_deref(), &csv_text(&HEADER, &table)?)?;

    let failed = rows.iter().filter(|r| !r.ok()).count();
    let summary = json!({
        "variable": o.variable.as_deref().unwrap_or("j"),
        "rows": rows.len(),
        "failed": failed,
        "fit": fit(variable, &rows),
    });
    let text = pretty(&summary)?;
    match (&o.summary, &o.out) {
        (Some(path), _) => emit(Some(path), &text)?,
        (None, Some(out)) => emit(Some(&out.with_extension("summary.json")), &text)?,
        (None, None) => eprint!("{text}"),
    }

    if failed == 0 {
        Ok(())
    } else if rows.iter().any(|r| r.config_error) {
        Err(Failure::Config(format!("{failed} sweep row(s) failed")))
    } else {
        Err(Failure::Solver(format!("{failed} sweep row(s) failed")))
    }
}
