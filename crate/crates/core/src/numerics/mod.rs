//! Quadrature, symmetric solvers and adaptive integration.
//!
//! Everything here is deterministic: identical inputs give bitwise
//! identical outputs on one platform. No routine keeps global state.

mod integrate;
mod linalg;
mod quadrature;

pub use integrate::adaptive_integrate;
pub use linalg::{solve_spd, BandedCholesky, BandedSpd, Cholesky, SymmetricSystem};
pub use quadrature::{gauss_legendre, QuadratureRule, MAX_NODES, MIN_NODES};
