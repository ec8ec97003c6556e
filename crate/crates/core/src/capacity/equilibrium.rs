use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{merge_arcs, Arc, Turn};
use crate::numerics::{gauss_legendre, Cholesky};

/// Smallest accepted number of nodes per arc.
pub const MIN_QUAD_NODES: usize = 8;

/// Discrete equilibrium measure of a finite union of arcs for the kernel
/// `log(2 / |ζ - ξ|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumMeasure {
    /// Node positions as exact turns.
    #[serde(skip)]
    pub turns: Vec<Turn>,
    /// Node angles in radians, `[0, 2π)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `Σ Σ w_i w_j log(2/|ζ_i - ζ_j|)`, near-diagonal terms cell-averaged.
    pub energy: f64,
    pub condition: f64,
}

/// A node of the discretization: its arc, offset from the arc center in
/// turns, and the cell `[lo, hi]` of boundary it represents.
struct Node {
    arc: usize,
    offset: f64,
    lo: f64,
    hi: f64,
}

/// Nodes `t = -L/2 + L sin²φ` at Gauss–Legendre points in `φ ∈ [0, π/2]`.
/// The substitution clusters nodes at the endpoints, where the density
/// blows up like an inverse square root. Cell edges come from the
/// cumulative weights, which interlace the nodes.
fn arc_nodes(arcs: &[Arc], per_arc: usize) -> Result<Vec<Node>> {
    let rule: Vec<(f64, f64)> = gauss_legendre(per_arc)?.mapped(0.0, FRAC_PI_2).collect();
    let mut edges = Vec::with_capacity(per_arc + 1);
    let mut acc = 0.0;
    edges.push(0.0);
    for &(_, w) in &rule {
        acc += w;
        edges.push(acc.min(FRAC_PI_2));
    }
    let mut out = Vec::with_capacity(arcs.len() * per_arc);
    for (a, arc) in arcs.iter().enumerate() {
        let len = arc.length();
        let at = |phi: f64| {
            let s = phi.sin();
            -0.5 * len + len * s * s
        };
        for (i, &(phi, _)) in rule.iter().enumerate() {
            out.push(Node {
                arc: a,
                offset: at(phi),
                lo: at(edges[i]),
                hi: at(edges[i + 1]),
            });
        }
    }
    Ok(out)
}

/// `∫ log|u| du`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.abs().ln() - x
    }
}

/// `-log|sin(πx)| + log(π|x|)`, smooth near 0.
fn sine_correction(x: f64) -> f64 {
    let px = PI * x;
    if px.abs() < 1e-4 {
        px * px / 6.0
    } else {
        -(px.sin() / px).abs().ln()
    }
}

/// Kernel `-log|sin(πδ)|` between node `i` and the cell of node `j`.
/// Within one arc the logarithmic part is averaged exactly over the cell;
/// across arcs the kernel is smooth and taken at the node.
fn kernel_entry(centers: &[Vec<f64>], a: &Node, b: &Node) -> f64 {
    if a.arc == b.arc {
        let avg = (xlogx(a.offset - b.lo) - xlogx(a.offset - b.hi)) / (b.hi - b.lo);
        -PI.ln() - avg + sine_correction(a.offset - b.offset)
    } else {
        let d = centers[a.arc][b.arc] + a.offset - b.offset;
        -(PI * d).sin().abs().ln()
    }
}

/// Equilibrium measure of disjoint arcs with total length below 1.
///
/// Minimizes the discrete energy under unit mass and nonnegativity: the
/// system `K y = 1` is solved (ridge `1e-10 · trace`), normalized to unit
/// mass, and nodes that come out negative are dropped and the system
/// re-solved until all weights are nonnegative.
pub fn equilibrium_measure(arcs: &[Arc], quad_nodes_per_arc: usize) -> Result<EquilibriumMeasure> {
    equilibrium_with(arcs, quad_nodes_per_arc, |_| 0.0)
}

/// Equilibrium measure for the kernel `log(2/|ζ - ξ|) + h(δ)` where `h` is
/// a smooth even function of the turn difference `δ`.
pub(crate) fn equilibrium_with(
    arcs: &[Arc],
    quad_nodes_per_arc: usize,
    smooth: impl Fn(f64) -> f64,
) -> Result<EquilibriumMeasure> {
    if quad_nodes_per_arc < MIN_QUAD_NODES {
        return Err(Error::QuadratureSize {
            n: quad_nodes_per_arc,
            min: MIN_QUAD_NODES,
            max: crate::numerics::MAX_NODES,
        });
    }
    if arcs.is_empty() {
        return Err(Error::Input("equilibrium measure of an empty set".into()));
    }
    crate::geometry::ensure_disjoint(arcs)?;
    let total: f64 = arcs.iter().map(Arc::length).sum();
    if total >= 1.0 {
        return Err(Error::Input(format!("arcs cover total length {total} ≥ 1")));
    }
    let nodes = arc_nodes(arcs, quad_nodes_per_arc)?;
    let centers: Vec<Vec<f64>> = arcs
        .iter()
        .map(|a| arcs.iter().map(|b| a.center().diff(b.center())).collect())
        .collect();
    let n = nodes.len();
    let delta = |a: &Node, b: &Node| {
        if a.arc == b.arc {
            a.offset - b.offset
        } else {
            centers[a.arc][b.arc] + a.offset - b.offset
        }
    };
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (kernel_entry(&centers, &nodes[i], &nodes[j]) + kernel_entry(&centers, &nodes[j], &nodes[i]))
                + smooth(delta(&nodes[i], &nodes[j]));
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
        k[i * n + i] = kernel_entry(&centers, &nodes[i], &nodes[i]) + smooth(0.0);
    }
    let mut active: Vec<usize> = (0..n).collect();
    loop {
        let m = active.len();
        let mut sub = vec![0.0; m * m];
        let mut trace = 0.0;
        for (a, &i) in active.iter().enumerate() {
            for (b, &j) in active.iter().enumerate() {
                sub[a * m + b] = k[i * n + j];
            }
            trace += k[i * n + i];
        }
        let ridge = 1e-10 * trace;
        for a in 0..m {
            sub[a * m + a] += ridge;
        }
        let chol = Cholesky::factor(m, &sub).map_err(|_| Error::Numerical {
            message: "equilibrium system is not positive definite".into(),
            condition: f64::INFINITY,
        })?;
        let condition = chol.condition_estimate();
        let y = chol.solve(&vec![1.0; m]);
        let mass: f64 = y.iter().sum();
        if !(mass > 0.0) || !mass.is_finite() || condition > 1e14 {
            return Err(Error::Numerical {
                message: "equilibrium system is ill-conditioned".into(),
                condition,
            });
        }
        if y.iter().all(|&v| v >= 0.0) {
            let mut weights = vec![0.0; n];
            for (a, &i) in active.iter().enumerate() {
                weights[i] = y[a] / mass;
            }
            let mut energy = 0.0;
            for i in 0..n {
                if weights[i] == 0.0 {
                    continue;
                }
                let row: f64 = (0..n).map(|j| k[i * n + j] * weights[j]).sum();
                energy += weights[i] * row;
            }
            let turns: Vec<Turn> = nodes
                .iter()
                .map(|nd| arcs[nd.arc].center().add_turns(nd.offset))
                .collect();
            return Ok(EquilibriumMeasure {
                nodes: turns.iter().map(Turn::radians).collect(),
                turns,
                weights,
                energy,
                condition,
            });
        }
        active = active.iter().zip(&y).filter(|(_, &v)| v >= 0.0).map(|(&i, _)| i).collect();
        if active.is_empty() {
            return Err(Error::Numerical {
                message: "no nonnegative equilibrium weights".into(),
                condition,
            });
        }
    }
}

/// Equilibrium energy of an arbitrary arc union: arcs are merged first;
/// the full circle has energy `log 2` and the empty set `+∞`.
pub fn union_energy(arcs: &[Arc], quad_nodes_per_arc: usize) -> Result<f64> {
    let merged = merge_arcs(arcs);
    if merged.is_empty() {
        return Ok(f64::INFINITY);
    }
    if merged[0].is_full() {
        return Ok(std::f64::consts::LN_2);
    }
    Ok(equilibrium_measure(&merged, quad_nodes_per_arc)?.energy)
}

/// Energy of a single arc of length `L` (turns): `log(2 / sin(πL/2))`,
/// from the logarithmic capacity `sin(θ/4)` of an arc of angle `θ`.
pub fn single_arc_energy(length: f64) -> f64 {
    (2.0 / (FRAC_PI_4 * 2.0 * length).sin()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn single_arc_matches_closed_form() {
        for &len in &[0.5, 0.1, 1.0 / 256.0, 2f64.powi(-12), 2f64.powi(-100)] {
            let m = equilibrium_measure(&[Arc::new(1.0, len).unwrap()], 32).unwrap();
            let exact = single_arc_energy(len);
            assert!((m.energy - exact).abs() <= 2e-3 * exact, "L={len}: {} vs {exact}", m.energy);
        }
    }

    #[test]
    fn energy_converges_under_refinement() {
        let arc = [Arc::new(0.3, 0.2).unwrap()];
        let exact = single_arc_energy(0.2);
        let e16 = (equilibrium_measure(&arc, 16).unwrap().energy - exact).abs();
        let e64 = (equilibrium_measure(&arc, 64).unwrap().energy - exact).abs();
        assert!(e64 < e16);
        assert!(e64 < 5e-4);
    }

    #[test]
    fn weights_are_symmetric_about_the_center() {
        let m = equilibrium_measure(&[Arc::new(2.0, 0.3).unwrap()], 24).unwrap();
        let n = m.weights.len();
        for i in 0..n / 2 {
            assert_abs_diff_eq!(m.weights[i], m.weights[n - 1 - i], epsilon = 1e-10);
        }
        assert_abs_diff_eq!(m.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn antipodal_arcs_share_mass_and_match_the_squaring_map() {
        let len = 0.1;
        let arcs = [Arc::new(0.4, len).unwrap(), Arc::new(0.4 + TAU / 2.0, len).unwrap()];
        let m = equilibrium_measure(&arcs, 24).unwrap();
        let first: f64 = m.weights[..24].iter().sum();
        assert_abs_diff_eq!(first, 0.5, epsilon = 1e-6);
        // z ↦ z² maps the pair onto one arc of length 2L: cap = sin(πL)^{1/2}
        let exact = std::f64::consts::LN_2 - 0.5 * (PI * len).sin().ln();
        assert!((m.energy - exact).abs() < 2e-3 * exact);
    }

    #[test]
    fn rejects_bad_input() {
        let a = Arc::new(0.0, 0.1).unwrap();
        assert!(matches!(equilibrium_measure(std::slice::from_ref(&a), 4), Err(Error::QuadratureSize { .. })));
        assert!(equilibrium_measure(&[], 16).is_err());
        assert!(equilibrium_measure(&[a.clone(), a], 16).is_err());
    }

    #[test]
    fn union_energy_edge_cases() {
        assert_eq!(union_energy(&[], 16).unwrap(), f64::INFINITY);
        assert_eq!(union_energy(&[Arc::full_circle()], 16).unwrap(), std::f64::consts::LN_2);
        let halves = [Arc::new(0.0, 0.6).unwrap(), Arc::new(PI, 0.6).unwrap()];
        assert_eq!(union_energy(&halves, 16).unwrap(), std::f64::consts::LN_2);
    }
}
