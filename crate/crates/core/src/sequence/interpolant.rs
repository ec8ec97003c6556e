use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_weak_separation, Sequence, DEFAULT_DELTA};
use crate::capacity::{energy, energy_pairing, GridBoundary, GridPotential, GridResolution, GridSystem, PolarGrid, MIN_PLATE_CELLS};
use crate::error::{Error, Result};
use crate::geometry::{CarlesonBox, HyperbolicDisc};

/// The blocks of the grid interpolant for one sequence, `γ` and resolution.
///
/// Block `i` is the discrete harmonic function on the physical grid that is
/// `1` on the cells of `Δ_1(z_i)`, `0` on the other discs and on every cell
/// outside `∪_j S^γ(z_j)`; the circle is insulated. An interpolant is
/// `F = Σ a_i √d(z_i) u_i` and its energy is `aᵀ M a` for the Gram matrix
/// `M_ij = √(d_i d_j) ⟨u_i, u_j⟩`, so `C = λ_max(M)` bounds every data vector.
#[derive(Clone, Debug)]
pub struct SobolevBlocks {
    pub grid: PolarGrid,
    pub boundary: GridBoundary,
    /// Per point, the cell values of `√d(z_i) u_i`.
    pub basis: Vec<Vec<f64>>,
    /// Row-major `n × n` Gram matrix of the scaled blocks.
    pub gram: Vec<f64>,
    pub constant: f64,
    pub warnings: Vec<String>,
}

/// An assembled interpolant with its energy and the blocks' constant.
#[derive(Clone, Debug)]
pub struct SobolevInterpolant {
    pub potential: GridPotential,
    pub energy: f64,
    pub constant: f64,
}

impl SobolevBlocks {
    pub fn new(seq: &Sequence, gamma: f64, res: GridResolution) -> Result<Self> {
        super::check_exponent("gamma", gamma)?;
        let n = seq.len();
        if n == 0 {
            return Err(Error::Input("empty sequence".into()));
        }
        if let Some((i, j)) = seq.duplicate() {
            return Err(Error::Input(format!("points {i} and {j} coincide")));
        }
        let discs: Vec<HyperbolicDisc> = seq.points().iter().cloned().map(HyperbolicDisc::unit).collect();
        for i in 0..n {
            for j in i + 1..n {
                if discs[i].intersects(&discs[j]) {
                    return Err(Error::Input(format!("unit discs around points {i} and {j} intersect")));
                }
            }
        }
        let boxes: Vec<CarlesonBox> = seq.points().iter().map(|p| CarlesonBox::expanded(p, gamma)).collect();
        // rings finer than any disc near the circle
        let min_depth = seq.points().iter().map(|p| p.depth()).fold(f64::INFINITY, f64::min);
        let grid = PolarGrid::graded(0.0, res, min_depth / 8.0)?;

        let mut owner: Vec<Option<usize>> = vec![None; grid.len()];
        let mut boundary = GridBoundary::free(&grid);
        let mut cells = vec![0usize; n];
        for i in 0..grid.n_r() {
            for j in 0..grid.n_theta() {
                let k = grid.index(i, j);
                let p = grid.cell_point(i, j);
                if let Some(m) = discs.iter().position(|d| d.contains(&p)) {
                    owner[k] = Some(m);
                    cells[m] += 1;
                    boundary.fixed[k] = Some(0.0);
                } else if !boxes.iter().any(|b| b.contains(&p)) {
                    boundary.fixed[k] = Some(0.0);
                }
            }
        }
        if let Some(m) = cells.iter().position(|&c| c < MIN_PLATE_CELLS) {
            return Err(Error::Resolution {
                plate: format!("disc {m}"),
                cells: cells[m],
                required: MIN_PLATE_CELLS,
            });
        }

        let system = GridSystem::new(&grid, &boundary)?;
        let mut basis = Vec::with_capacity(n);
        for m in 0..n {
            let scale = seq.d(m).sqrt();
            let mut bc = boundary.clone();
            for (f, o) in bc.fixed.iter_mut().zip(&owner) {
                if *o == Some(m) {
                    *f = Some(scale);
                }
            }
            basis.push(system.solve_values(&bc)?);
        }
        let mut gram = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let g = energy_pairing(&grid, &basis[a], &basis[b]);
                gram[a * n + b] = g;
                gram[b * n + a] = g;
            }
        }
        let eigen = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &gram));
        let constant = eigen.eigenvalues.iter().copied().fold(0.0, f64::max);

        let mut warnings = Vec::new();
        let ws = check_weak_separation(seq, DEFAULT_DELTA);
        if !ws.pass {
            warnings.push(format!("sequence is not weakly separated at delta = {DEFAULT_DELTA}"));
        }
        if system.condition > 1e12 {
            warnings.push(format!("grid system condition estimate {:e}", system.condition));
        }
        Ok(SobolevBlocks {
            grid,
            boundary,
            basis,
            gram,
            constant,
            warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `F = Σ a_i √d(z_i) u_i`; linear in `data`.
    pub fn assemble(&self, data: &[f64]) -> Result<SobolevInterpolant> {
        if data.len() != self.len() {
            return Err(Error::Input(format!("{} data values for {} points", data.len(), self.len())));
        }
        if let Some(i) = data.iter().position(|a| !a.is_finite()) {
            return Err(Error::Input(format!("data value {i} is not finite")));
        }
        let mut values = vec![0.0; self.grid.len()];
        for (a, u) in data.iter().zip(&self.basis) {
            for (v, x) in values.iter_mut().zip(u) {
                *v += a * x;
            }
        }
        let mut boundary = self.boundary.clone();
        for (f, v) in boundary.fixed.iter_mut().zip(&values) {
            if f.is_some() {
                *f = Some(*v);
            }
        }
        let e = energy(&self.grid, &boundary, &values);
        Ok(SobolevInterpolant {
            potential: GridPotential {
                grid: self.grid.clone(),
                frame: None,
                boundary,
                values,
                energy: e,
                condition: f64::NAN,
            },
            energy: e,
            constant: self.constant,
        })
    }
}

/// Builds the blocks for `seq` and assembles the interpolant of `data`.
/// The interpolant equals `a_i √d(z_i)` on the cells of `Δ_1(z_i)` and its
/// energy is at most `constant · Σ a_i²`.
pub fn assemble_sobolev_interpolant(seq: &Sequence, data: &[f64], gamma: f64, res: GridResolution) -> Result<SobolevInterpolant> {
    SobolevBlocks::new(seq, gamma, res)?.assemble(data)
}
