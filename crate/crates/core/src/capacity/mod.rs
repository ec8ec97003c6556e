//! Logarithmic and condenser capacity.
//!
//! Two independent routes: a fast one through the discrete equilibrium
//! measure of the Möbius-image arcs, and a finite-volume Dirichlet solver
//! on a graded polar grid that serves as the oracle.

mod condenser;
mod equilibrium;
mod grid;

pub use equilibrium::{equilibrium_measure, single_arc_energy, union_energy, EquilibriumMeasure, MIN_QUAD_NODES};
pub use grid::{
    capacity_upper_bound, energy, energy_pairing, solve_grid, GridBoundary, GridPotential, GridResolution, GridSystem,
    PolarGrid,
};
pub use condenser::{
    condenser_capacity, disc_capacity, grid_condenser_capacity, log_capacity, CondenserEstimate, CondenserSpec, Plates,
    MIN_PLATE_CELLS,
};
