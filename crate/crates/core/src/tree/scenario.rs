use serde::{Deserialize, Serialize};

use super::capacity::tree_capacity_recursive;
use super::comb::CombSpec;
use super::node::TreeNode;
use crate::error::{Error, Result};
use crate::geometry::{Arc, CarlesonBox};
use crate::sequence::{check_capacitary_condition, check_weak_separation, generate, Generator, Sequence, DEFAULT_GAMMA};

/// Truncation of the counterexample: combs of side `m` at level `m²`,
/// anchored at evenly spread angles, plus a random lattice of points with
/// pairwise disjoint `S^η` boxes kept off the anchors' boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub comb_sides: Vec<u32>,
    /// Angle (turns) of the first anchor; the others follow at equal spacing.
    pub first_anchor: f64,
    pub lattice_points: usize,
    pub lattice_min_depth: f64,
    pub lattice_max_depth: f64,
    pub eta: f64,
    pub gamma: f64,
    pub quad: usize,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            comb_sides: vec![10, 14, 20],
            first_anchor: 0.1,
            lattice_points: 24,
            lattice_min_depth: 1e-6,
            lattice_max_depth: 1e-2,
            eta: crate::sequence::DEFAULT_ETA,
            gamma: DEFAULT_GAMMA,
            quad: 32,
            seed: 0,
        }
    }
}

/// Per-comb figures of the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombRecord {
    pub side: u32,
    pub level: u32,
    pub anchor: TreeNode,
    /// `cap_τ(ω, comb(ω))`.
    pub capacity: f64,
    /// `cap_τ · level`, the quantity the tree capacitary condition bounds.
    pub tree_ratio: f64,
    /// `0.1 √level`.
    pub tree_bound: f64,
    /// `Σ_teeth 1/d(z)`.
    pub mass: f64,
    /// `mass · √d(ω)`, at most 64 when the mass obeys `1/√d(ω)`.
    pub mass_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub params: ScenarioParams,
    pub sequence: Sequence,
    /// Minimal `d_D` over pairs of the union.
    pub min_metric: f64,
    pub separated: bool,
    pub combs: Vec<CombRecord>,
    pub masses_bounded: bool,
    pub tree_condition_violated: bool,
    /// `Σ 1/√d(ω_i)` over the anchors.
    pub anchor_series: f64,
    /// `sup_ratio` of the capacitary check on the lattice alone.
    pub lattice_cc_sup: f64,
    pub pass: bool,
}

/// Builds the union and reports (a) weak separation, (b) comb masses
/// against `1/√d(ω)` and (c) `cap_τ(ω, comb(ω)) · level ≥ 0.1 √level`.
pub fn counterexample_scenario(params: &ScenarioParams) -> Result<ScenarioReport> {
    if params.comb_sides.is_empty() {
        return Err(Error::Input("scenario needs at least one comb".into()));
    }
    let count = params.comb_sides.len() as f64;
    let mut anchors = Vec::new();
    let mut comb_seqs = Vec::new();
    for (i, &m) in params.comb_sides.iter().enumerate() {
        let level = m.checked_mul(m).ok_or_else(|| Error::Input(format!("comb side {m} too large")))?;
        let turn = (params.first_anchor + i as f64 / count).rem_euclid(1.0);
        let seq = generate(&Generator::Comb { level, turn }, 0)?;
        anchors.push(TreeNode::at_turn(level, turn)?);
        comb_seqs.push(seq);
    }
    let anchor_arcs: Vec<Arc> = comb_seqs.iter().map(|s| CarlesonBox::expanded(s.point(0), params.eta).base().clone()).collect();
    for i in 0..anchor_arcs.len() {
        for j in i + 1..anchor_arcs.len() {
            if anchor_arcs[i].intersects(&anchor_arcs[j]) {
                return Err(Error::Infeasible {
                    index: j,
                    reason: format!("anchor boxes {i} and {j} overlap"),
                });
            }
        }
    }
    let lattice = generate(
        &Generator::DisjointBoxes {
            n: params.lattice_points,
            eta: params.eta,
            min_depth: params.lattice_min_depth,
            max_depth: params.lattice_max_depth,
            avoid: anchor_arcs,
            attempts: 10_000,
        },
        params.seed,
    )?;

    let mut combs = Vec::new();
    for ((&m, anchor), seq) in params.comb_sides.iter().zip(&anchors).zip(&comb_seqs) {
        let level = m * m;
        let capacity = tree_capacity_recursive(&CombSpec::new(level, anchor.clone())?.condenser())?;
        let mass: f64 = (1..seq.len()).map(|i| 1.0 / seq.d(i)).sum();
        combs.push(CombRecord {
            side: m,
            level,
            anchor: anchor.clone(),
            capacity,
            tree_ratio: capacity * level as f64,
            tree_bound: 0.1 * (level as f64).sqrt(),
            mass,
            mass_ratio: mass * seq.d(0).sqrt(),
        });
    }
    let anchor_series = comb_seqs.iter().map(|s| 1.0 / s.d(0).sqrt()).sum();

    let mut sequence = lattice.clone();
    for s in &comb_seqs {
        sequence = sequence.union(s);
    }
    sequence.label = format!("counterexample(combs={:?}, lattice={})", params.comb_sides, params.lattice_points);
    let min_metric = check_weak_separation(&sequence, 0.0).summary["min_metric"];
    let lattice_cc_sup = check_capacitary_condition(&lattice, params.gamma, params.quad, f64::INFINITY)?.sup_ratio;

    let separated = min_metric > 0.0;
    let masses_bounded = combs.iter().all(|c| c.mass_ratio <= 64.0);
    let tree_condition_violated = combs.iter().all(|c| c.tree_ratio >= c.tree_bound);
    Ok(ScenarioReport {
        params: params.clone(),
        sequence,
        min_metric,
        separated,
        combs,
        masses_bounded,
        tree_condition_violated,
        anchor_series,
        lattice_cc_sup,
        pass: separated && masses_bounded && tree_condition_violated && lattice_cc_sup.is_finite(),
    })
}
