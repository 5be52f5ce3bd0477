use std::f64::consts::PI;

use clap::ValueEnum;
use serde_json::Value;
use spectra_core::bounds::{
    convex_lower_check, default_family, energy_bound_check, gap_bound_check, hersch_bound_check, mobius_center_radial, optimize_family,
    minmax_upper_bound, revolution_lower_check, sandwich_check, semiclassical_check, weyl_check, Annulus, ConvexDomain, Pole,
};
use spectra_core::cartesian::{DEFAULT_RECTANGLE_CELLS, DEFAULT_TOL};
use spectra_core::radial::DEFAULT_L_MAX;
use spectra_core::spectral::{circle_equivalence_check, schrodinger_equivalence_check};
use spectra_core::spectral::EquivalenceReport;
use spectra_core::{assemble_cartesian, full_spectrum, solve_cartesian, BoundReport, Domain, Expr, Grid, PlanarDensity, Shape, Spectrum};

use crate::failure::Failure;
use crate::options::Options;
use crate::output::{bounds_csv, emit, json};
use crate::setup::{count, is_planar, measure, parse_expr, planar_density, positive, profile, radial_density, required};

pub const DEFAULT_GRID: usize = 4000;
pub const DEFAULT_K: usize = 10;
const OPTIMIZE_SWEEPS: usize = 20;

fn core<T>(field: &str, r: spectra_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from_core(field, e))
}

pub fn grid(o: &Options, r_max: f64, default: usize) -> Result<Grid, Failure> {
    let m = count("grid", o.grid.unwrap_or(default), 2)?;
    core("grid", Grid::uniform(r_max, m))
}

fn finite_spectrum(s: &Spectrum) -> Result<(), Failure> {
    if s.entries.iter().all(|e| e.lambda.is_finite()) {
        Ok(())
    } else {
        Err(Failure::Solver("non-finite eigenvalue".into()))
    }
}

pub fn run_spectrum(o: &Options) -> Result<(), Failure> {
    let k = count("k", o.k.unwrap_or(DEFAULT_K), 1)?;
    let geometry = o.geometry.clone().unwrap_or_else(|| "round_sphere".to_string());
    let equivalence = o.equivalence.unwrap_or(false);
    let (spectrum, check) = if is_planar(&geometry) {
        planar_spectrum(o, &geometry, k, equivalence)?
    } else {
        let p = profile(o, &geometry, 2)?;
        let d = radial_density(o, &p)?;
        let g = grid(o, p.radius(), DEFAULT_GRID)?;
        let l_max = count("l_max", o.l_max.unwrap_or(DEFAULT_L_MAX), 1)?;
        let s = core("spectrum", full_spectrum(&p, &d, l_max, k, &g))?.truncated(k, &p, l_max, &g);
        let check = if equivalence { Some(core("equivalence", schrodinger_equivalence_check(&p, &d, k, l_max, &g))?) } else { None };
        (s, check)
    };
    finite_spectrum(&spectrum)?;
    let mut value = serde_json::to_value(&spectrum).map_err(|e| Failure::Solver(e.to_string()))?;
    if let Some(c) = check {
        if !c.max_deviation.is_finite() {
            return Err(Failure::Solver("non-finite equivalence deviation".into()));
        }
        value["equivalence_check"] = serde_json::to_value(c).map_err(|e| Failure::Solver(e.to_string()))?;
    }
    emit(o.out.as_deref(), &json(&value)?)
}

fn planar_spectrum(o: &Options, geometry: &str, k: usize, equivalence: bool) -> Result<(Spectrum, Option<EquivalenceReport<f64>>), Failure> {
    let tol = positive("tol", o.tol.unwrap_or(DEFAULT_TOL))?;
    let dom = match geometry {
        "rectangle" => {
            let (a, b) = (positive("a", o.a.unwrap_or(2.0))?, positive("b", o.b.unwrap_or(2.0))?);
            let cells = count("grid", o.grid.unwrap_or(DEFAULT_RECTANGLE_CELLS), 2)?;
            Domain::rectangle(a, b, cells, cells, planar_density(o, [0.0, 0.0])?)
        }
        "interval" => {
            let len = positive("length", o.length.unwrap_or(1.0))?;
            Domain::interval(len, count("grid", o.grid.unwrap_or(DEFAULT_GRID), 2)?, planar_density(o, [len / 2.0, 0.0])?)
        }
        _ => {
            let len = positive("length", o.length.unwrap_or(2.0 * PI))?;
            Domain::circle(len, count("grid", o.grid.unwrap_or(DEFAULT_GRID), 3)?, planar_density(o, [len / 2.0, 0.0])?)
        }
    };
    let sys = core("spectrum", assemble_cartesian(&dom))?;
    let spectrum = core("spectrum", solve_cartesian(&sys, k, tol))?.to_spectrum(&sys);
    if !equivalence {
        return Ok((spectrum, None));
    }
    let (len, f) = match (&dom.shape, &dom.density) {
        (Shape::Circle { len }, PlanarDensity::Constant) => (*len, Expr::Num(0.0)),
        (Shape::Circle { len }, PlanarDensity::Log(f)) => (*len, f.clone()),
        _ => return Err(Failure::Config("equivalence: on planar geometries only circles with constant or semiclassical densities are supported".into())),
    };
    let check = core("equivalence", circle_equivalence_check(len, &f, k, dom.nx, tol))?;
    Ok((spectrum, Some(check)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundName {
    Hersch,
    Convex,
    Sandwich,
    Revolution,
    Semiclassical,
    Gap,
    Energy,
    Minmax,
    Weyl,
}

fn sweep_or(o: &Options, default: &[f64]) -> Result<Vec<f64>, Failure> {
    Ok(o.sweep_values()?.unwrap_or_else(|| default.to_vec()))
}

fn pole(o: &Options) -> Result<Pole, Failure> {
    match o.pole.as_deref().unwrap_or("N") {
        "N" | "n" | "north" => Ok(Pole::North),
        "S" | "s" | "south" => Ok(Pole::South),
        other => Err(Failure::Config(format!("pole: expected N or S, got '{other}'"))),
    }
}

fn bound_reports(name: BoundName, o: &Options) -> Result<Vec<BoundReport>, Failure> {
    Ok(match name {
        BoundName::Hersch => {
            let p = profile(o, "round_sphere", 2)?;
            let d = radial_density(o, &p)?;
            let g = grid(o, p.radius(), DEFAULT_GRID)?;
            let report = core("hersch", hersch_bound_check(&p, &d, &g))?;
            let mut out = vec![report];
            if p.dim() == 2 {
                let c = core("mobius", mobius_center_radial(&p, &d))?;
                let l2 = out[0].lhs;
                out.push(
                    BoundReport::new("mobius", l2, c.min_quotient())
                        .param("t", c.t)
                        .param("residual", c.residual)
                        .param("quotients", c.quotients.to_vec()),
                );
            }
            out
        }
        BoundName::Convex => {
            let j = positive("j", required("j", &o.j)?)?;
            let center = [o.x0.unwrap_or(0.0), o.y0.unwrap_or(0.0)];
            let (domain, cells) = match o.shape.as_deref().unwrap_or("rectangle") {
                "rectangle" => (ConvexDomain::Rectangle { a: positive("a", o.a.unwrap_or(2.0))?, b: positive("b", o.b.unwrap_or(2.0))? }, 128),
                "ball" => (ConvexDomain::Ball { r_max: positive("R", o.r.unwrap_or(1.0))?, n: count("n", o.n.unwrap_or(2), 1)? }, DEFAULT_GRID),
                other => return Err(Failure::Config(format!("shape: expected ball or rectangle, got '{other}'"))),
            };
            let cells = count("grid", o.grid.unwrap_or(cells), 4)?;
            vec![core("convex", convex_lower_check(domain, j, center, cells))?]
        }
        BoundName::Sandwich => {
            let js = sweep_or(o, &[10.0, 20.0, 40.0, 80.0])?;
            let r_max = positive("R", o.r.unwrap_or(1.0))?;
            let m = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 2)?;
            let s = core("sandwich", sandwich_check(r_max, o.n.unwrap_or(3), &js, m))?;
            let threshold = s.threshold.map(Value::from).unwrap_or(Value::from("none"));
            s.reports.into_iter().map(|r| r.param("threshold", threshold.clone()).param("b_hat", s.b_hat)).collect()
        }
        BoundName::Revolution => {
            let js = sweep_or(o, &[5.0, 10.0, 20.0, 40.0])?;
            let p = profile(o, "round_sphere", 2)?;
            let m = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 2)?;
            let r = core("revolution", revolution_lower_check(&p, &js, m))?;
            let j0 = r.j0.map(Value::from).unwrap_or(Value::from("none"));
            let mut reports: Vec<BoundReport> = r.reports.into_iter().map(|x| x.param("j0", j0.clone())).collect();
            if let (Some(slope), Some(intercept)) = (r.slope, r.intercept) {
                reports = reports.into_iter().map(|x| x.param("slope", slope).param("intercept", intercept)).collect();
            }
            reports
        }
        BoundName::Semiclassical => {
            let f0 = parse_expr("f0", o.f0.as_deref().unwrap_or("cos(2*t)"))?;
            let eps = sweep_or(o, &[0.1, 0.05, 0.02])?;
            let cells = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 3)?;
            let r = core("semiclassical", semiclassical_check(&f0, &eps, cells))?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            r.reports
        }
        BoundName::Gap => {
            let v = parse_expr("potential", &required("potential", &o.potential)?)?;
            let k = o.k.unwrap_or(5);
            let cells = count("grid", o.grid.unwrap_or(DEFAULT_GRID), 3)?;
            vec![core("k", gap_bound_check(&v, k, cells))?]
        }
        BoundName::Energy => {
            let p = profile(o, "flat_ball", 3)?;
            let d = radial_density(o, &p)?;
            let g = grid(o, p.radius(), DEFAULT_GRID)?;
            let outer = o.r_outer.unwrap_or(0.25 * p.radius());
            let a = core("r_outer", Annulus::new(pole(o)?, o.r_inner.unwrap_or(0.0), outer))?;
            vec![core("energy", energy_bound_check(&p, &d, &a, &g))?]
        }
        BoundName::Minmax => {
            let p = profile(o, "flat_ball", 2)?;
            let d = radial_density(o, &p)?;
            let g = grid(o, p.radius(), DEFAULT_GRID)?;
            let nu = measure(o)?;
            let k = count("k", o.k.unwrap_or(3), 1)?;
            let family = core("k", default_family(&p, k))?;
            let mut out = vec![core("minmax", minmax_upper_bound(&p, &d, &family, &g, &nu))?.param("family", "default")];
            if o.optimize.unwrap_or(false) {
                let (_, r) = core("minmax", optimize_family(&p, &d, &family, &g, &nu, OPTIMIZE_SWEEPS))?;
                out.push(r.param("family", "optimized"));
            }
            out
        }
        BoundName::Weyl => {
            let p = profile(o, "flat_ball", 2)?;
            let d = radial_density(o, &p)?;
            let g = grid(o, p.radius(), 2000)?;
            vec![core("k", weyl_check(&p, &d, o.k.unwrap_or(200), &g))?]
        }
    })
}

pub fn run_bounds(name: BoundName, o: &Options) -> Result<(), Failure> {
    let reports = bound_reports(name, o)?;
    for r in &reports {
        core("report", r.check_finite())?;
    }
    let value = serde_json::to_value(&reports).map_err(|e| Failure::Solver(e.to_string()))?;
    emit(o.out.as_deref(), &json(&value)?)?;
    if let Some(path) = &o.csv {
        emit(Some(path), &bounds_csv(&reports)?)?;
    }
    let violated = reports.iter().filter(|r| !r.satisfied).count();
    if violated > 0 {
        return Err(Failure::Violated(violated));
    }
    Ok(())
}
