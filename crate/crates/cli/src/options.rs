//! Command-line options, optionally read from a JSON config file. Flags win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// JSON file holding any of the options below (snake_case keys).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// flat_ball, round_sphere, spheroid, custom, rectangle, interval or circle.
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Radial extent of a revolution profile.
    #[arg(long = "R", allow_negative_numbers = true)]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Spheroid semi-axis, or rectangle width.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Rectangle height.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Interval or circle length.
    #[arg(long, allow_negative_numbers = true)]
    pub length: Option<f64>,
    /// `[[r, theta], ...]` for custom profiles; config file only.
    #[arg(skip)]
    pub samples: Option<Vec<[f64; 2]>>,
    /// Domain of the convex check: ball or rectangle.
    #[arg(long)]
    pub shape: Option<String>,

    /// constant, gaussian, smoothed_gaussian, semiclassical, custom, or an expression for sigma.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub j: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Expression for `f0` in semiclassical densities.
    #[arg(long)]
    pub f0: Option<String>,
    /// Expression for sigma in custom densities.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Expression in `t` for the potential of the gap check.
    #[arg(long)]
    pub potential: Option<String>,
    /// Centre of planar Gaussian densities.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,

    #[arg(long)]
    pub k: Option<usize>,
    /// Cells: radial grid size, cells per side on rectangles.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "l-max")]
    pub l_max: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,

    /// Comma-separated parameter values for sweeps.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    /// Geometric range `start:stop:count` for sweeps.
    #[arg(long)]
    pub range: Option<String>,
    /// Sweep variable: j, eps or grid.
    #[arg(long)]
    pub variable: Option<String>,

    #[arg(long = "r-inner", allow_negative_numbers = true)]
    pub r_inner: Option<f64>,
    #[arg(long = "r-outer", allow_negative_numbers = true)]
    pub r_outer: Option<f64>,
    /// N or S.
    #[arg(long)]
    pub pole: Option<String>,
    /// sigma, riemannian, or an expression for a radial weight.
    #[arg(long)]
    pub measure: Option<String>,
    /// Run the coordinate search over annulus radii.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub optimize: Option<bool>,
    /// Add the comparison with the Schrodinger form to spectrum output.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub equivalence: Option<bool>,

    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV file for multi-report bound checks.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON of a sweep.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

macro_rules! prefer {
    ($flags:ident, $file:ident, $($field:ident),* $(,)?) => {
        Options { config: $flags.config, $($field: $flags.$field.or($file.$field)),* }
    };
}

impl Options {
    /// Fills unset flags from the config file, if one was given.
    pub fn resolve(self) -> Result<Self, Failure> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        let flags = self;
        Ok(prefer!(
            flags, file, geometry, n, r, a, b, length, samples, shape, density, c, j, alpha, eps, f0, sigma, potential, x0, y0, k, grid,
            l_max, tol, values, range, variable, r_inner, r_outer, pole, measure, optimize, equivalence, out, csv, summary,
        ))
    }

    /// Values of a sweep from `values` or `range`.
    pub fn sweep_values(&self) -> Result<Option<Vec<f64>>, Failure> {
        match (&self.values, &self.range) {
            (Some(v), _) => Ok(Some(v.clone())),
            (None, Some(r)) => parse_range(r).map(Some),
            (None, None) => Ok(None),
        }
    }
}

fn read_config(path: &Path) -> Result<Options, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("config: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("config: {}: {e}", path.display())))
}

/// `start:stop:count` with geometrically spaced values.
fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("range: expected start:stop:count with positive start and stop, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(start > 0.0 && stop > 0.0) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let ratio = (stop / start).powf(1.0 / (count - 1) as f64);
    Ok((0..count).map(|i| if i + 1 == count { stop } else { start * ratio.powi(i as i32) }).collect())
}
