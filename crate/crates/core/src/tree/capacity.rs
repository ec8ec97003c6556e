use serde::{Deserialize, Serialize};

use super::node::TreeNode;
use crate::error::{Error, Result};
use crate::numerics::{solve_spd, SymmetricSystem};

/// Source `α` held at 1, targets grounded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeCondenser {
    pub source: TreeNode,
    pub targets: Vec<TreeNode>,
}

impl TreeCondenser {
    pub fn new(source: TreeNode, targets: Vec<TreeNode>) -> Result<Self> {
        let c = TreeCondenser { source, targets };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Input("tree condenser needs at least one target".into()));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !t.is_below(&self.source) {
                return Err(Error::Input(format!("target {i} {t:?} is not below the source {:?}", self.source)));
            }
        }
        Ok(())
    }
}

const NONE: usize = usize::MAX;

/// The union of source-to-target paths, stored parents-first so that a
/// reverse sweep visits every child before its parent.
pub(crate) struct PathUnion {
    parent: Vec<usize>,
    children: Vec<[usize; 2]>,
    target: Vec<bool>,
}

impl PathUnion {
    pub(crate) fn build(c: &TreeCondenser) -> Result<Self> {
        c.validate()?;
        let mut u = PathUnion {
            parent: vec![NONE],
            children: vec![[NONE; 2]],
            target: vec![false],
        };
        for t in &c.targets {
            let depth = (t.level() - c.source.level()) as u64;
            let rel = t.relative_index(&c.source);
            let mut at = 0;
            for j in (0..depth).rev() {
                let slot = rel.bit(j) as usize;
                if u.children[at][slot] == NONE {
                    u.parent.push(at);
                    u.children.push([NONE; 2]);
                    u.target.push(false);
                    u.children[at][slot] = u.parent.len() - 1;
                }
                at = u.children[at][slot];
            }
            u.target[at] = true;
        }
        Ok(u)
    }

    pub(crate) fn len(&self) -> usize {
        self.parent.len()
    }

    fn kids(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[v].iter().copied().filter(|&c| c != NONE)
    }

    fn is_free(&self, v: usize) -> bool {
        v != 0 && !self.target[v]
    }

    fn degree(&self, v: usize) -> usize {
        self.kids(v).count() + usize::from(self.parent[v] != NONE)
    }

    fn free_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_free(v)).count()
    }

    /// Flux out of the source for the potential `f`.
    fn source_flux(&self, f: &[f64]) -> f64 {
        self.kids(0).map(|c| 1.0 - f[c]).sum()
    }
}

/// Largest free-node count handed to the dense solver.
pub const DENSE_LIMIT: usize = 1024;

/// `cap_τ(α, targets) = inf Σ |∇f|²` over `f(α) = 1`, `f = 0` on targets,
/// by solving the graph Laplace equation on the path union.
///
/// Up to [`DENSE_LIMIT`] free nodes the system is assembled and factored
/// densely; larger unions (long combs) are eliminated leaf-first, which
/// on a tree is a Cholesky factorization without fill.
pub fn tree_capacity_exact(c: &TreeCondenser) -> Result<f64> {
    let u = PathUnion::build(c)?;
    if u.free_count() <= DENSE_LIMIT {
        dense_solve(&u)
    } else {
        eliminate(&u)
    }
}

#[cfg(test)]
pub(crate) fn tree_capacity_dense(c: &TreeCondenser) -> Result<f64> {
    dense_solve(&PathUnion::build(c)?)
}

#[cfg(test)]
pub(crate) fn tree_capacity_eliminated(c: &TreeCondenser) -> Result<f64> {
    eliminate(&PathUnion::build(c)?)
}

fn dense_solve(u: &PathUnion) -> Result<f64> {
    let free: Vec<usize> = (0..u.len()).filter(|&v| u.is_free(v)).collect();
    let mut slot = vec![NONE; u.len()];
    for (i, &v) in free.iter().enumerate() {
        slot[v] = i;
    }
    let m = free.len();
    let mut f = vec![0.0; u.len()];
    f[0] = 1.0;
    if m > 0 {
        let mut a = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for (i, &v) in free.iter().enumerate() {
            a[i * m + i] = u.degree(v) as f64;
            for w in u.kids(v).chain(std::iter::once(u.parent[v])) {
                if slot[w] != NONE {
                    a[i * m + slot[w]] = -1.0;
                } else if w == 0 {
                    b[i] += 1.0;
                }
            }
        }
        let x = solve_spd(&SymmetricSystem::new(m, a, b)?)?;
        for (i, &v) in free.iter().enumerate() {
            f[v] = x[i];
        }
    }
    Ok(u.source_flux(&f))
}

fn eliminate(u: &PathUnion) -> Result<f64> {
    let n = u.len();
    let mut diag: Vec<f64> = (0..n).map(|v| u.degree(v) as f64).collect();
    let mut rhs = vec![0.0; n];
    for (v, r) in rhs.iter_mut().enumerate() {
        if u.is_free(v) && u.parent[v] == 0 {
            *r = 1.0;
        }
    }
    for v in (1..n).rev() {
        if !u.is_free(v) {
            continue;
        }
        if !(diag[v] > 0.0) {
            return Err(Error::NotPositiveDefinite { index: v, pivot: diag[v] });
        }
        let p = u.parent[v];
        if u.is_free(p) {
            diag[p] -= 1.0 / diag[v];
            rhs[p] += rhs[v] / diag[v];
        }
    }
    let mut f = vec![0.0; n];
    f[0] = 1.0;
    for v in 1..n {
        if u.is_free(v) {
            let p = u.parent[v];
            // the source's contribution already sits in rhs; targets are 0
            let fp = if u.is_free(p) { f[p] } else { 0.0 };
            f[v] = (rhs[v] + fp) / diag[v];
        }
    }
    Ok(u.source_flux(&f))
}

/// Conductance seen through a path of `d` unit edges from a subtree of
/// conductance `c`: the series law `c / (1 + d c)`; `c = ∞` is a ground.
pub fn series(c: f64, d: f64) -> f64 {
    if c.is_infinite() {
        1.0 / d
    } else {
        c / (1.0 + d * c)
    }
}

/// The same capacity by series–parallel reduction: every edge folds the
/// conductance below it by [`series`] with `d = 1`, siblings add. Linear
/// in the size of the path union.
pub fn tree_capacity_recursive(c: &TreeCondenser) -> Result<f64> {
    let u = PathUnion::build(c)?;
    let n = u.len();
    // conductance from each node down to the grounded targets
    let mut cond = vec![0.0; n];
    for v in (0..n).rev() {
        cond[v] = if u.target[v] {
            f64::INFINITY
        } else {
            u.kids(v).map(|k| series(cond[k], 1.0)).sum()
        };
    }
    Ok(cond[0])
}
