use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::capacity::{tree_capacity_exact, tree_capacity_recursive, TreeCondenser};
use super::node::TreeNode;
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, DiscPoint};
use crate::report::{CheckParams, CheckReport, PointRecord};

/// `lim c₀(N) √N = (e² - 1)/(e² + 1) = tanh 1`.
pub fn comb_limit() -> f64 {
    1f64.tanh()
}

/// `√N` when `N` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r * r == n).then_some(r)
}

fn comb_side(n: u64) -> Result<u32> {
    match exact_sqrt(n) {
        Some(m) if n >= 1 => Ok(m as u32),
        _ => Err(Error::Domain(format!("comb size N = {n} is not a positive perfect square"))),
    }
}

/// A comb hanging from `anchor = w₀` at level `N`: spine `w_i = σ₊^i w₀`
/// and teeth `z_i = σ₋^N w_i` for `i = 1..√N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombSpec {
    pub root_level: u32,
    pub anchor: TreeNode,
}

impl CombSpec {
    pub fn new(root_level: u32, anchor: TreeNode) -> Result<Self> {
        comb_side(root_level as u64)?;
        if anchor.level() != root_level {
            return Err(Error::Input(format!(
                "comb anchor {anchor:?} is not at level {root_level}"
            )));
        }
        Ok(CombSpec { root_level, anchor })
    }

    /// The comb at level `N` anchored at angle 0, node `(N, 2^N)`.
    pub fn at_angle_zero(root_level: u32) -> Result<Self> {
        Self::new(root_level, TreeNode::new(root_level, BigUint::one() << root_level)?)
    }

    pub fn side(&self) -> u32 {
        comb_side(self.root_level as u64).expect("validated")
    }

    pub fn spine(&self) -> Vec<TreeNode> {
        (0..=self.side()).map(|i| self.anchor.plus_pow(i)).collect()
    }

    pub fn teeth(&self) -> Vec<TreeNode> {
        (1..=self.side())
            .map(|i| self.anchor.plus_pow(i).minus_pow(self.root_level))
            .collect()
    }

    pub fn condenser(&self) -> TreeCondenser {
        TreeCondenser {
            source: self.anchor.clone(),
            targets: self.teeth(),
        }
    }
}

/// The comb recursion `c_{i-1} = (1/N + c_i) / (1 + 1/N + c_i)`,
/// `c_{√N} = 0`, returning `c₀ = cap_τ(w₀, comb(w₀))`.
pub fn comb_capacity_recursion(n: u64) -> Result<f64> {
    let m = comb_side(n)?;
    let inv = 1.0 / n as f64;
    let mut c = 0.0;
    for _ in 0..m {
        c = (inv + c) / (1.0 + inv + c);
    }
    Ok(c)
}

/// Diagonalized form: `c₀ = δ₁(1 - q) / (1 - (δ₁/δ₂) q)` with
/// `δ_{1,2} = (-1/N ± √(1/N² + 4/N)) / 2` and `q = ((1-δ₁)/(1-δ₂))^{√N}`.
pub fn comb_capacity_closed_form(n: u64) -> Result<f64> {
    let m = comb_side(n)?;
    if n < 4 {
        return Err(Error::Domain(format!("closed form needs N ≥ 4, got {n}")));
    }
    let inv = 1.0 / n as f64;
    let root = (inv * inv + 4.0 * inv).sqrt();
    let d1 = 0.5 * (-inv + root);
    let d2 = 0.5 * (-inv - root);
    let q = ((1.0 - d1) / (1.0 - d2)).powi(m as i32);
    Ok(d1 * (1.0 - q) / (1.0 - d1 / d2 * q))
}

/// `c₀ √N ≥ 0.1` for each `N`; records `ratio = 0.1 / (c₀ √N)`.
pub fn comb_lower_bound_check(ns: &[u64]) -> Result<CheckReport> {
    let mut records = Vec::with_capacity(ns.len());
    let mut min_scaled = f64::INFINITY;
    for (i, &n) in ns.iter().enumerate() {
        if n < 16 {
            return Err(Error::Domain(format!("lower-bound check needs N ≥ 16, got {n}")));
        }
        let scaled = comb_capacity_recursion(n)? * (n as f64).sqrt();
        min_scaled = min_scaled.min(scaled);
        let mut r = PointRecord::new(i, scaled, 0.1, 0.1 / scaled);
        r.note = Some(format!("N={n}"));
        records.push(r);
    }
    let params = CheckParams {
        k: 1.0,
        ..Default::default()
    };
    Ok(CheckReport::from_records("comb_lower_bound", records, params).with_summary("min_c0_sqrt_n", min_scaled))
}

/// One row of the comb sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub c0: f64,
    #[serde(rename = "c0_sqrtN")]
    pub c0_sqrt_n: f64,
    pub closed_form: f64,
    /// Empty when the sweep skips the linear solve.
    pub exact_solver: Option<f64>,
    pub limit_gap: f64,
}

/// Sweep over `m = √N`.
pub fn comb_sweep(ms: &[u64], with_exact: bool) -> Result<Vec<CombRow>> {
    ms.iter()
        .map(|&m| {
            let n = m * m;
            let c0 = comb_capacity_recursion(n)?;
            let closed_form = comb_capacity_closed_form(n)?;
            let exact_solver = if with_exact {
                Some(tree_capacity_exact(&CombSpec::at_angle_zero(n as u32)?.condenser())?)
            } else {
                None
            };
            Ok(CombRow {
                n,
                c0,
                c0_sqrt_n: c0 * m as f64,
                closed_form,
                exact_solver,
                limit_gap: comb_limit() - c0 * m as f64,
            })
        })
        .collect()
}

/// Cross-check of the comb by the generic tree reduction.
pub fn comb_capacity_tree(spec: &CombSpec) -> Result<f64> {
    tree_capacity_recursive(&spec.condenser())
}

/// `(log 2 / 2) n ≤ d(0, z(n, k)) ≤ 2n` for `n = 1..=n_max`, at `k = 1`,
/// `k = 2^n` and a middle index. `ratio = max(lower/d, d/upper)`.
pub fn tree_disc_distance_check(n_max: u32) -> Result<CheckReport> {
    if !(1..=60).contains(&n_max) {
        return Err(Error::Domain(format!("n_max = {n_max} outside 1..=60")));
    }
    let origin = DiscPoint::origin();
    let mut records = Vec::new();
    for n in 1..=n_max {
        let full = 1u64 << n;
        let mut worst = 0.0f64;
        let mut dist = 0.0;
        for k in [1, full / 2 + 1, full] {
            let d = hyperbolic_distance(&origin, &TreeNode::from_u64(n, k)?.point());
            let lower = std::f64::consts::LN_2 / 2.0 * n as f64;
            let upper = 2.0 * n as f64;
            worst = worst.max(lower / d).max(d / upper);
            dist = d;
        }
        let mut r = PointRecord::new(n as usize, dist, n as f64, worst);
        r.note = Some(format!("n={n}"));
        records.push(r);
    }
    let params = CheckParams {
        k: 1.0,
        ..Default::default()
    };
    Ok(CheckReport::from_records("tree_disc_distance", records, params))
}
