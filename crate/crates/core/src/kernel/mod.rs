//! Numerical foundations shared by every other module.

pub mod context;
pub mod fft;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use context::PrecisionContext;
pub use linalg::{leading_svd, lowrank_svd, nullspace_solve, solve_pivoted, svd, CMatrix, Svd};
pub use poly::Poly;
pub use quadrature::{jacobi_quadrature, legendre_quadrature, GaussRule};
pub use roots::poly_roots;
pub use scalar::{Cplx, Real};
