//! Linear-algebra kernels used by the solvers.

pub mod chain;
pub mod dct;
pub mod dense;
pub mod lobpcg;
pub mod sparse;
pub mod tridiag;

pub use chain::{ChainFactor, ChainLaplacian};
pub use dense::{generalized_eigen, symmetric_eigen, DenseMatrix};
pub use lobpcg::{lobpcg, LobpcgOptions, LobpcgResult};
pub use sparse::CsrMatrix;
pub use tridiag::SymTridiagonal;
