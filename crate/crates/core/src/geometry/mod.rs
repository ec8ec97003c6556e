//! Geometry of the unit disc: points, automorphisms, the Dirichlet kernel,
//! boundary arcs, Carleson boxes and harmonic measure.

mod arc;
mod harmonic;
mod point;
mod region;
mod turn;

pub use arc::{arc_transform, boundary_arc, ensure_disjoint, merge_arcs, Arc};
pub use harmonic::{harmonic_measure, image_arc, mobius_boundary};
pub use point::{
    dirichlet_metric, hyperbolic_distance, kernel, kernel_norm_sq, mobius, one_minus_conj_mul, pseudo_hyperbolic,
    DiscPoint,
};
pub use region::{CarlesonBox, HyperbolicDisc};
pub use turn::Turn;

pub(crate) use turn::ldexp;
