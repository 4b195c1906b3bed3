//! Complex dense linear algebra: storage, LU solves, orthonormal bases.

mod lu;
mod matrix;
mod orth;

pub use lu::{lu_factor, solve, LuFactorization};
pub use matrix::{dotc, dotu, norm2, CMatrix, C64, ONE, ZERO};
pub use orth::{orthonormalize_append, Basis, BasisRole, DEFAULT_DEFLATION_TOL};
