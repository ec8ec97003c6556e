//! Discrete potential theory on the Bergman tree.
//!
//! Nodes `(n, k)` sit at `(1 - 2^-n) e^{2πik/2^n}`; the tree capacity of a
//! condenser is the reciprocal effective resistance between the source
//! and the grounded targets when every edge is a unit resistor.

mod capacity;
mod comb;
mod node;
mod scenario;

pub use capacity::{series, tree_capacity_exact, tree_capacity_recursive, TreeCondenser, DENSE_LIMIT};
pub use comb::{
    comb_capacity_closed_form, comb_capacity_recursion, comb_capacity_tree, comb_limit, comb_lower_bound_check,
    comb_sweep, exact_sqrt, tree_disc_distance_check, CombRow, CombSpec,
};
pub use node::{tree_structure, TreeNode, TreeStructure};
pub use scenario::{counterexample_scenario, CombRecord, ScenarioParams, ScenarioReport};
