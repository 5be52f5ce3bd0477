//! Annulus test functions: the energy estimate and min-max upper bounds.

use serde::Serialize;
use serde_json::json;

use super::BoundReport;
use crate::density::{node_shift, RadialDensity};
use crate::error::{Error, Result};
use crate::geometry::{ProfileKind, RevolutionProfile};
use crate::quadrature::GaussRule;
use crate::radial::{assemble_radial, assemble_with_measure, spectrum_with_measure, Measure, RadialGrid};
use crate::scalar::{ball_volume, sphere_area};
use crate::spectral::{variational_mu_k, QuadraticFormPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pole {
    #[serde(rename = "N")]
    North,
    #[serde(rename = "S")]
    South,
}

/// `{x : r_inner <= d(x, pole) <= r_outer}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Annulus {
    pub center: Pole,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Annulus {
    pub fn new(center: Pole, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner >= 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidInput(format!("annulus radii ({r_inner}, {r_outer}) need 0 <= r_inner < r_outer")));
        }
        Ok(Self { center, r_inner, r_outer })
    }

    /// Distance range of the doubled annulus `2A`.
    pub fn doubled(&self) -> (f64, f64) {
        (self.r_inner / 2.0, 2.0 * self.r_outer)
    }

    pub fn distance(&self, r: f64, r_max: f64) -> f64 {
        match self.center {
            Pole::North => r,
            Pole::South => r_max - r,
        }
    }

    /// `2A` as an interval of the radial coordinate.
    pub fn doubled_radial(&self, r_max: f64) -> (f64, f64) {
        let (lo, hi) = self.doubled();
        match self.center {
            Pole::North => (lo, hi),
            Pole::South => (r_max - hi, r_max - lo),
        }
    }

    /// Plateau function of the distance: ramps on `(r/2, r)` and `(R, 2R)`, one on `[r, R]`.
    pub fn value(&self, dist: f64) -> f64 {
        let (r, big) = (self.r_inner, self.r_outer);
        if dist < r / 2.0 || dist > 2.0 * big {
            0.0
        } else if dist < r {
            2.0 * dist / r - 1.0
        } else if dist <= big {
            1.0
        } else {
            2.0 - dist / big
        }
    }

    /// `|d u / d dist|`.
    pub fn slope(&self, dist: f64) -> f64 {
        let (r, big) = (self.r_inner, self.r_outer);
        if r > 0.0 && dist > r / 2.0 && dist < r {
            2.0 / r
        } else if dist > big && dist < 2.0 * big {
            1.0 / big
        } else {
            0.0
        }
    }

    pub fn validate(&self, p: &RevolutionProfile<f64>) -> Result<()> {
        if self.center == Pole::South && p.kind() != ProfileKind::Closed {
            return Err(Error::InvalidInput("south-centered annuli need a closed profile".into()));
        }
        if self.doubled().1 > p.radius() * (1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!(
                "doubled annulus reaches distance {} beyond the radius {}",
                self.doubled().1,
                p.radius()
            )));
        }
        Ok(())
    }

    fn id(&self) -> serde_json::Value {
        json!({ "center": self.center, "r_inner": self.r_inner, "r_outer": self.r_outer })
    }
}

/// Nodal values of the annulus test function.
pub fn test_function(a: &Annulus, grid: &RadialGrid<f64>) -> Vec<f64> {
    grid.nodes.iter().map(|r| a.value(a.distance(*r, grid.r_max))).collect()
}

/// Estimate of `sup V(B(x, rho)) / rho^n` from pole-centred balls at `sample_count` radii.
/// Small balls contribute the Euclidean value `omega_n`.
pub fn gamma_constant(p: &RevolutionProfile<f64>, sample_count: usize) -> Result<f64> {
    if sample_count < 2 {
        return Err(Error::InvalidInput("gamma_constant needs at least two samples".into()));
    }
    let n = p.dim() as i32;
    let r_max = p.radius();
    let mut best = ball_volume::<f64>(p.dim());
    for i in 1..=sample_count {
        let rho = r_max * i as f64 / sample_count as f64;
        best = best.max(p.pole_ball_volume(rho) / rho.powi(n));
    }
    Ok(best)
}

const GAMMA_SAMPLES: usize = 400;

/// Discrete `int |grad u|^2 sigma dv` of a radial vector, undoing the exponent shift.
fn radial_energy(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, grid: &RadialGrid<f64>, u: &[f64]) -> Result<f64> {
    let sys = assemble_radial(p, d, 0, grid)?;
    let shift = node_shift(d, &grid.nodes);
    Ok(sys.chain.energy(u) * (-shift).exp() * sphere_area::<f64>(p.dim() - 1))
}

/// Energy estimate for the annulus test function on a manifold of dimension `n >= 3`:
/// `int |grad u_A|^2 sigma <= 8 Gamma^{2/n} (int_{2A} sigma^{n/(n-2)})^{1-2/n}`.
pub fn energy_bound_check(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, a: &Annulus, grid: &RadialGrid<f64>) -> Result<BoundReport> {
    let n = p.dim();
    if n < 3 {
        return Ok(BoundReport::skipped("energy", "the estimate needs dimension at least 3"));
    }
    a.validate(p)?;
    let u = test_function(a, grid);
    let lhs = radial_energy(p, d, grid, &u)?;
    let gamma = gamma_constant(p, GAMMA_SAMPLES)?;
    let q = n as f64 / (n as f64 - 2.0);
    let (lo, hi) = a.doubled_radial(p.radius());
    let (lo, hi) = (lo.max(0.0), hi.min(p.radius()));
    let rule = GaussRule::<f64>::new(8);
    let integral = sphere_area::<f64>(n - 1) * rule.integrate_panels(|r| p.area_factor(r) * d.sigma(r).powf(q), lo, hi, 256);
    let exponent = 1.0 - 2.0 / n as f64;
    let rhs = 8.0 * gamma.powf(2.0 / n as f64) * integral.powf(exponent);
    Ok(BoundReport::new("energy", lhs, rhs)
        .param("annulus", a.id())
        .param("gamma", gamma)
        .param("gamma_samples", GAMMA_SAMPLES)
        .param("n", n)
        .param("grid_m", grid.m))
}

fn check_disjoint(p: &RevolutionProfile<f64>, family: &[Annulus]) -> Result<()> {
    for a in family {
        a.validate(p)?;
    }
    let mut spans: Vec<(f64, f64)> = family.iter().map(|a| a.doubled_radial(p.radius())).collect();
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in spans.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::InvalidInput(format!("doubled annuli ({}, {}) and ({}, {}) overlap", w[0].0, w[0].1, w[1].0, w[1].1)));
        }
    }
    Ok(())
}

/// Largest quotient over the span of the family's test functions, and the largest single
/// quotient.
fn family_bound(forms: &QuadraticFormPair<f64>, family: &[Annulus], grid: &RadialGrid<f64>) -> Result<(f64, f64)> {
    let vectors: Vec<Vec<f64>> = family.iter().map(|a| test_function(a, grid)).collect();
    let mut single = 0.0f64;
    for u in &vectors {
        single = single.max(crate::spectral::rayleigh_quotient(u, forms)?);
    }
    Ok((variational_mu_k(forms, &vectors)?, single))
}

fn radial_forms(p: &RevolutionProfile<f64>, d: &RadialDensity<f64>, grid: &RadialGrid<f64>, nu: &Measure) -> Result<QuadraticFormPair<f64>> {
    QuadraticFormPair::from_radial(&assemble_with_measure(p, d, 0, grid, nu)?)
}

/// Computed `mu_k(sigma, nu)` against the min-max bound furnished by `k` disjointly
/// supported annulus functions.
pub fn minmax_upper_bound(
    p: &RevolutionProfile<f64>,
    d: &RadialDensity<f64>,
    family: &[Annulus],
    grid: &RadialGrid<f64>,
    nu: &Measure,
) -> Result<BoundReport> {
    let k = family.len();
    if k == 0 {
        return Err(Error::InvalidInput("the annulus family is empty".into()));
    }
    check_disjoint(p, family)?;
    let spectrum = spectrum_with_measure(p, d, k.max(2), k, grid, nu)?;
    let lhs = spectrum.expanded()[k - 1];
    let (rhs, single) = family_bound(&radial_forms(p, d, grid, nu)?, family, grid)?;
    Ok(BoundReport::with_tolerance("minmax", lhs, rhs, 1e-9)
        .param("k", k)
        .param("max_single_quotient", single)
        .param("annuli", family.iter().map(Annulus::id).collect::<Vec<_>>())
        .param("grid_m", grid.m))
}

/// A feasible family of `k` annuli whose doublings tile the radial range: pole-centred
/// caps growing by a factor of five, split between both poles on closed profiles.
pub fn default_family(p: &RevolutionProfile<f64>, k: usize) -> Result<Vec<Annulus>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let r_max = p.radius();
    let chain = |pole: Pole, count: usize, reach: f64| -> Result<Vec<Annulus>> {
        let mut out = Vec::with_capacity(count);
        let cut = |i: usize| reach * 5f64.powi(i as i32 - count as i32);
        for i in 1..=count {
            let lo = if i == 1 { 0.0 } else { cut(i - 1) };
            out.push(Annulus::new(pole, 2.0 * lo, cut(i) / 2.0)?);
        }
        Ok(out)
    };
    let family = match p.kind() {
        ProfileKind::WithBoundary => chain(Pole::North, k, r_max)?,
        ProfileKind::Closed => {
            let mut f = chain(Pole::North, k.div_ceil(2), r_max / 2.0)?;
            f.extend(chain(Pole::South, k / 2, r_max / 2.0)?);
            f
        }
    };
    check_disjoint(p, &family)?;
    Ok(family)
}

/// Coordinate search over the `2k` radii of a feasible family, minimising the min-max bound.
/// Returns the improved family and its report.
pub fn optimize_family(
    p: &RevolutionProfile<f64>,
    d: &RadialDensity<f64>,
    start: &[Annulus],
    grid: &RadialGrid<f64>,
    nu: &Measure,
    sweeps: usize,
) -> Result<(Vec<Annulus>, BoundReport)> {
    check_disjoint(p, start)?;
    let forms = radial_forms(p, d, grid, nu)?;
    let score = |f: &[Annulus]| -> Option<f64> {
        if check_disjoint(p, f).is_err() {
            return None;
        }
        family_bound(&forms, f, grid).ok().map(|v| v.0).filter(|v| v.is_finite())
    };
    let mut family = start.to_vec();
    let mut best = score(&family).ok_or_else(|| Error::InvalidInput("the starting family is degenerate".into()))?;
    let mut step = 0.25;
    for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..family.len() {
            for outer in [false, true] {
                for factor in [1.0 + step, 1.0 / (1.0 + step)] {
                    let mut trial = family.clone();
                    let a = &mut trial[i];
                    if outer {
                        a.r_outer *= factor;
                    } else {
                        a.r_inner *= factor;
                    }
                    if a.r_inner >= a.r_outer {
                        continue;
                    }
                    if let Some(v) = score(&trial) {
                        if v < best {
                            best = v;
                            family = trial;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
            if step < 1e-3 {
                break;
            }
        }
    }
    let report = minmax_upper_bound(p, d, &family, grid, nu)?.param("optimized", true);
    Ok((family, report))
}
