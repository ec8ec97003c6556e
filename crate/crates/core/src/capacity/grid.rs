use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DiscPoint, Turn};
use crate::numerics::{BandedCholesky, BandedSpd};

/// Grid size: radial cells by angular cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridResolution {
    pub n_r: usize,
    pub n_theta: usize,
}

impl GridResolution {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 || n_theta < 8 {
            return Err(Error::Input(format!("grid {n_r}x{n_theta} too coarse (need at least 4x8)")));
        }
        Ok(GridResolution { n_r, n_theta })
    }

    pub fn refined(&self) -> Self {
        GridResolution {
            n_r: 2 * self.n_r,
            n_theta: 2 * self.n_theta,
        }
    }
}

impl Default for GridResolution {
    fn default() -> Self {
        GridResolution { n_r: 128, n_theta: 256 }
    }
}

/// Polar tensor grid on an annulus `r_in ≤ |ζ| ≤ 1`, uniform in angle and
/// geometrically graded in depth `1 - |ζ|` toward the circle.
///
/// Depths are stored directly so that cells near the circle keep their
/// relative precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    /// Depth of ring edges, strictly decreasing from `1 - r_in` to `0`.
    depth_edges: Vec<f64>,
    n_theta: usize,
}

impl PolarGrid {
    /// `n_r` rings whose outermost has height at most `min_height`.
    pub fn graded(inner_radius: f64, res: GridResolution, min_height: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&inner_radius) {
            return Err(Error::Domain(format!("inner radius {inner_radius} outside [0, 1)")));
        }
        Self::graded_depth(1.0 - inner_radius, res, min_height)
    }

    /// As [`PolarGrid::graded`], with the annulus given by its width `1 - r_in`.
    pub fn graded_depth(width: f64, res: GridResolution, min_height: f64) -> Result<Self> {
        if !(width > 0.0 && width <= 1.0) {
            return Err(Error::Domain(format!("annulus width {width} outside (0, 1]")));
        }
        if !(min_height > 0.0) {
            return Err(Error::Input(format!("minimal cell height {min_height} must be positive")));
        }
        let n = res.n_r;
        let h = min_height.min(width / n as f64);
        // geometric edges w q^k, k < n, with the last ring [0, w q^{n-1}] of height ≤ h
        let q = (h / width).powf(1.0 / (n - 1) as f64);
        let mut depth_edges: Vec<f64> = (0..n).map(|k| width * q.powi(k as i32)).collect();
        depth_edges.push(0.0);
        Ok(PolarGrid {
            depth_edges,
            n_theta: res.n_theta,
        })
    }

    pub fn n_r(&self) -> usize {
        self.depth_edges.len() - 1
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.n_r() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 - self.depth_edges[0]
    }

    /// Height of the outermost ring.
    pub fn min_height(&self) -> f64 {
        self.depth_edges[self.n_r() - 1]
    }

    pub fn ring_height(&self, i: usize) -> f64 {
        self.depth_edges[i] - self.depth_edges[i + 1]
    }

    pub fn center_depth(&self, i: usize) -> f64 {
        0.5 * (self.depth_edges[i] + self.depth_edges[i + 1])
    }

    pub fn center_radius(&self, i: usize) -> f64 {
        1.0 - self.center_depth(i)
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Column center as an exact turn.
    pub fn column_turn(&self, j: usize) -> Turn {
        Turn::from_turns((j as f64 + 0.5) / self.n_theta as f64)
    }

    pub fn column_angle(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dtheta()
    }

    pub fn cell_point(&self, i: usize, j: usize) -> DiscPoint {
        DiscPoint::from_depth(self.column_turn(j), self.center_depth(i)).expect("cell centers lie in the disc")
    }

    /// Conductance between ring `i` and ring `i + 1` in one column.
    fn radial_conductance(&self, i: usize) -> f64 {
        let face = 1.0 - self.depth_edges[i + 1];
        face * self.dtheta() / (self.center_depth(i) - self.center_depth(i + 1))
    }

    /// Conductance between neighboring columns in ring `i`.
    fn angular_conductance(&self, i: usize) -> f64 {
        self.ring_height(i) / (self.center_radius(i) * self.dtheta())
    }

    /// Conductance from ring 0 to the inner circle.
    fn inner_conductance(&self) -> f64 {
        self.inner_radius() * self.dtheta() / (self.depth_edges[0] - self.center_depth(0))
    }

    /// Conductance from the outermost ring to the unit circle.
    fn outer_conductance(&self) -> f64 {
        self.dtheta() / self.center_depth(self.n_r() - 1)
    }

    /// Visits every edge once as `(cell, other side, conductance)`.
    fn for_each_edge(&self, mut f: impl FnMut(usize, Edge, f64)) {
        let (nr, nt) = (self.n_r(), self.n_theta);
        for i in 0..nr {
            let ca = self.angular_conductance(i);
            let cr = if i + 1 < nr { self.radial_conductance(i) } else { 0.0 };
            for j in 0..nt {
                let a = self.index(i, j);
                f(a, Edge::Cell(self.index(i, (j + 1) % nt)), ca);
                if i + 1 < nr {
                    f(a, Edge::Cell(self.index(i + 1, j)), cr);
                }
            }
        }
        let ci = self.inner_conductance();
        let co = self.outer_conductance();
        for j in 0..nt {
            if ci > 0.0 {
                f(self.index(0, j), Edge::Inner, ci);
            }
            f(self.index(nr - 1, j), Edge::Outer(j), co);
        }
    }
}

#[derive(Clone, Copy)]
enum Edge {
    Cell(usize),
    Inner,
    Outer(usize),
}

/// Boundary data of a grid problem. `None` means a free cell or an
/// insulated (Neumann) boundary edge.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBoundary {
    /// Value on the inner circle.
    pub inner: Option<f64>,
    /// Value on the unit circle, per column.
    pub outer: Vec<Option<f64>>,
    /// Fixed cell values.
    pub fixed: Vec<Option<f64>>,
}

impl GridBoundary {
    pub fn free(grid: &PolarGrid) -> Self {
        GridBoundary {
            inner: None,
            outer: vec![None; grid.n_theta()],
            fixed: vec![None; grid.len()],
        }
    }

    fn has_dirichlet(&self) -> bool {
        self.inner.is_some() || self.outer.iter().any(Option::is_some) || self.fixed.iter().any(Option::is_some)
    }
}

/// A scalar field on a polar grid together with its boundary data, and its
/// Dirichlet energy `Σ c_e (Δu)²` over all edges including boundary edges.
#[derive(Clone, Debug)]
pub struct GridPotential {
    pub grid: PolarGrid,
    /// Center `z` of the Möbius frame: cell `ζ` stands for the point
    /// `φ_z(ζ)`. `None` for the physical disc.
    pub frame: Option<DiscPoint>,
    pub boundary: GridBoundary,
    /// Ring-major cell values.
    pub values: Vec<f64>,
    pub energy: f64,
    /// Diagonal condition estimate of the factored system.
    pub condition: f64,
}

impl GridPotential {
    pub fn resolution(&self) -> GridResolution {
        GridResolution {
            n_r: self.grid.n_r(),
            n_theta: self.grid.n_theta(),
        }
    }

    /// The point of the disc a cell stands for.
    pub fn physical_point(&self, i: usize, j: usize) -> DiscPoint {
        let p = self.grid.cell_point(i, j);
        match &self.frame {
            Some(z) => crate::geometry::mobius(z, &p),
            None => p,
        }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Dirichlet energy of arbitrary values with this potential's boundary data.
    pub fn energy_of(&self, values: &[f64]) -> f64 {
        energy(&self.grid, &self.boundary, values)
    }

    /// Clips values and boundary data to `[a, b]` and rescales them to
    /// `[0, 1]`; the energy is recomputed.
    pub fn rescaled(&self, a: f64, b: f64) -> Result<GridPotential> {
        if !(a < b) {
            return Err(Error::Domain(format!("rescaling needs a < b, got a = {a}, b = {b}")));
        }
        let f = |v: f64| (v.clamp(a, b) - a) / (b - a);
        let boundary = GridBoundary {
            inner: self.boundary.inner.map(f),
            outer: self.boundary.outer.iter().map(|v| v.map(f)).collect(),
            fixed: self.boundary.fixed.iter().map(|v| v.map(f)).collect(),
        };
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let energy = energy(&self.grid, &boundary, &values);
        Ok(GridPotential {
            grid: self.grid.clone(),
            frame: self.frame.clone(),
            boundary,
            values,
            energy,
            condition: self.condition,
        })
    }

    /// Writes `r,theta,value` rows, one per cell, in frame coordinates.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        let io = |e: std::io::Error| Error::Input(format!("csv write failed: {e}"));
        writeln!(out, "r,theta,value").map_err(io)?;
        for i in 0..self.grid.n_r() {
            let r = self.grid.center_radius(i);
            for j in 0..self.grid.n_theta() {
                writeln!(out, "{r},{},{}", self.grid.column_angle(j), self.value(i, j)).map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }
}

/// Dirichlet energy of `values` on `grid` with boundary data `bc`.
pub fn energy(grid: &PolarGrid, bc: &GridBoundary, values: &[f64]) -> f64 {
    let mut e = 0.0;
    grid.for_each_edge(|a, edge, c| {
        let other = match edge {
            Edge::Cell(b) => Some(values[b]),
            Edge::Inner => bc.inner,
            Edge::Outer(j) => bc.outer[j],
        };
        if let Some(v) = other {
            let d = values[a] - v;
            e += c * d * d;
        }
    });
    e
}

/// Factored grid Laplacian for one Dirichlet pattern. Solves for any
/// boundary values on that pattern reuse the factorization.
pub struct GridSystem {
    grid: PolarGrid,
    pattern: GridBoundary,
    chol: BandedCholesky,
    pub condition: f64,
}

impl GridSystem {
    /// Factors the system whose Dirichlet cells and edges are those set in
    /// `pattern`; its values are ignored.
    pub fn new(grid: &PolarGrid, pattern: &GridBoundary) -> Result<Self> {
        if !pattern.has_dirichlet() {
            return Err(Error::Input("grid problem has no Dirichlet data".into()));
        }
        let n = grid.len();
        let fixed = |k: usize| pattern.fixed[k].is_some();
        let mut a = BandedSpd::zeros(n, grid.n_theta());
        for k in (0..n).filter(|&k| fixed(k)) {
            a.add(k, k, 1.0);
        }
        grid.for_each_edge(|p, edge, c| match edge {
            Edge::Cell(q) => match (fixed(p), fixed(q)) {
                (false, false) => {
                    a.add(p, p, c);
                    a.add(q, q, c);
                    a.add(p, q, -c);
                }
                (false, true) => a.add(p, p, c),
                (true, false) => a.add(q, q, c),
                (true, true) => {}
            },
            Edge::Inner if !fixed(p) && pattern.inner.is_some() => a.add(p, p, c),
            Edge::Outer(j) if !fixed(p) && pattern.outer[j].is_some() => a.add(p, p, c),
            _ => {}
        });
        // free cells with no path to Dirichlet data make the system singular
        let chol = a.factor().map_err(|e| Error::Numerical {
            message: format!("grid system is singular ({e}); a region of free cells sees no Dirichlet data"),
            condition: f64::INFINITY,
        })?;
        let condition = chol.condition_estimate();
        Ok(GridSystem {
            grid: grid.clone(),
            pattern: pattern.clone(),
            chol,
            condition,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn same_pattern(&self, bc: &GridBoundary) -> bool {
        let same = |a: &[Option<f64>], b: &[Option<f64>]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.is_some() == y.is_some());
        self.pattern.inner.is_some() == bc.inner.is_some() && same(&self.pattern.outer, &bc.outer) && same(&self.pattern.fixed, &bc.fixed)
    }

    /// Cell values of the discrete harmonic function with boundary data `bc`.
    pub fn solve_values(&self, bc: &GridBoundary) -> Result<Vec<f64>> {
        if !self.same_pattern(bc) {
            return Err(Error::Input("boundary data does not match the factored pattern".into()));
        }
        let grid = &self.grid;
        let mut rhs = vec![0.0; grid.len()];
        for (k, v) in bc.fixed.iter().enumerate() {
            if let Some(v) = v {
                rhs[k] = *v;
            }
        }
        let mut to_value = |p: usize, value: Option<f64>, c: f64| {
            if let (None, Some(v)) = (bc.fixed[p], value) {
                rhs[p] += c * v;
            }
        };
        grid.for_each_edge(|p, edge, c| match edge {
            Edge::Cell(q) => match (bc.fixed[p], bc.fixed[q]) {
                (None, v @ Some(_)) => to_value(p, v, c),
                (v @ Some(_), None) => to_value(q, v, c),
                _ => {}
            },
            Edge::Inner => to_value(p, bc.inner, c),
            Edge::Outer(j) => to_value(p, bc.outer[j], c),
        });
        let mut values = self.chol.solve(&rhs);
        for (v, f) in values.iter_mut().zip(&bc.fixed) {
            if let Some(f) = f {
                *v = *f;
            }
        }
        Ok(values)
    }

    pub fn solve(&self, bc: &GridBoundary, frame: Option<DiscPoint>) -> Result<GridPotential> {
        let values = self.solve_values(bc)?;
        let energy = energy(&self.grid, bc, &values);
        Ok(GridPotential {
            grid: self.grid.clone(),
            frame,
            boundary: bc.clone(),
            values,
            energy,
            condition: self.condition,
        })
    }
}

/// Discrete harmonic function with the given boundary data: fixed cells
/// and Dirichlet circle edges keep their values, other circle edges are
/// insulated. Solved by banded Cholesky in ring-major order.
pub fn solve_grid(grid: &PolarGrid, bc: &GridBoundary, frame: Option<DiscPoint>) -> Result<GridPotential> {
    GridSystem::new(grid, bc)?.solve(bc, frame)
}

/// `Σ c_e (u_a - u_b)(v_a - v_b)` over edges between cells: the energy
/// pairing of two fields with insulated circles.
pub fn energy_pairing(grid: &PolarGrid, u: &[f64], v: &[f64]) -> f64 {
    let mut e = 0.0;
    grid.for_each_edge(|a, edge, c| {
        if let Edge::Cell(b) = edge {
            e += c * (u[a] - u[b]) * (v[a] - v[b]);
        }
    });
    e
}

/// Admissibility bound: if `u ≤ a` on the first plate and
/// `u ≥ b` on the second, the capacity is at most `energy(u) / (b - a)²`.
pub fn capacity_upper_bound(u: &GridPotential, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Domain(format!("upper bound needs a < b, got a = {a}, b = {b}")));
    }
    Ok(u.energy / ((b - a) * (b - a)))
}
