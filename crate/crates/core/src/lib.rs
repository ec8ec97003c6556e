//! Capacities, separation checks and Bergman-tree computations for
//! interpolating sequences in the Dirichlet space of the disc.

// `!(x > 0.0)` is the NaN-rejecting range check used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod config;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod report;
pub mod sequence;
pub mod tree;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/tree.md")]
    mod tree {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
