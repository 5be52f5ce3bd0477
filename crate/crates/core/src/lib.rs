//! Eigenvalues of weighted Laplacians `L_sigma = Delta - grad f . grad`, `sigma = exp(-f)`,
//! on revolution manifolds, flat balls, rectangles and circles, together with numerical
//! checks of upper and lower eigenvalue bounds.
//!
//! Solvers are generic over the scalar type ([`Real`] is implemented for `f32` and `f64`);
//! the bound checks work in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod cartesian;
pub mod density;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod spectral;

pub use bounds::BoundReport;
pub use cartesian::{assemble_cartesian, solve_cartesian, PlanarDensity, PlanarDomain, Shape};
pub use density::{make_density, DensityFamily, RadialDensity};
pub use error::{Error, Result};
pub use expr::Expr;
pub use geometry::{make_profile, ProfileChoice, ProfileKind, RevolutionProfile};
pub use radial::{full_spectrum, lambda2, Measure, RadialGrid, SpectrumResult};
pub use scalar::Real;
pub use spectral::{rayleigh_quotient, variational_mu_k, QuadraticFormPair};

pub type Profile = RevolutionProfile<f64>;
pub type Density = RadialDensity<f64>;
pub type Grid = RadialGrid<f64>;
pub type Spectrum = SpectrumResult<f64>;
pub type Domain = PlanarDomain<f64>;
pub type Forms = QuadraticFormPair<f64>;
