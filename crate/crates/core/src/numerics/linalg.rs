//! Dense and banded symmetric positive-definite solvers.

use crate::error::{Error, Result};

/// A dense symmetric system `A x = b`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSystem {
    pub dim: usize,
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl SymmetricSystem {
    pub fn new(dim: usize, matrix: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        if matrix.len() != dim * dim || rhs.len() != dim {
            return Err(Error::Input(format!(
                "system of dimension {dim} needs {} matrix entries and {dim} rhs entries",
                dim * dim
            )));
        }
        let sys = SymmetricSystem { dim, matrix, rhs };
        let scale = sys.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..dim {
            for j in 0..i {
                if (sys.at(i, j) - sys.at(j, i)).abs() > 1e-13 * scale {
                    return Err(Error::Input(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(sys)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm of the matrix.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.matrix[i * self.dim..(i + 1) * self.dim].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `A x - b` in the infinity norm.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|i| {
                let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
                (row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.rhs[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Lower Cholesky factor of a dense SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(dim: usize, matrix: &[f64]) -> Result<Self> {
        let mut l = vec![0.0; dim * dim];
        for j in 0..dim {
            let d = matrix[j * dim + j] - dot(&l[j * dim..j * dim + j], &l[j * dim..j * dim + j]);
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let d = d.sqrt();
            l[j * dim + j] = d;
            for i in j + 1..dim {
                let s = matrix[i * dim + j] - dot(&l[i * dim..i * dim + j], &l[j * dim..j * dim + j]);
                l[i * dim + j] = s / d;
            }
        }
        Ok(Cholesky { dim, lower: l })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }

    /// Ratio of largest to smallest squared pivot; a cheap lower bound on
    /// the 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim;
        let (lo, hi) = (0..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let d = self.lower[i * n + i];
            (lo.min(d * d), hi.max(d * d))
        });
        hi / lo
    }
}

/// Solves an SPD system with a dense Cholesky factorization.
pub fn solve_spd(system: &SymmetricSystem) -> Result<Vec<f64>> {
    let chol = Cholesky::factor(system.dim, &system.matrix)?;
    Ok(chol.solve(&system.rhs))
}

/// Symmetric positive-definite band matrix, lower band stored row-wise:
/// `band[i * (bw + 1) + (bw - (i - j))]` holds `A[i][j]` for `i - bw <= j <= i`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    dim: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        BandedSpd {
            dim,
            bw: bandwidth,
            band: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (self.bw - (i - j))
    }

    /// Adds `v` to `A[i][j]` (and implicitly `A[j][i]`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside bandwidth {}", self.bw);
        let k = self.idx(i, j);
        self.band[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.band[self.idx(i, j)]
        }
    }

    /// `A x`.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.band[self.idx(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place banded Cholesky factorization.
    pub fn factor(mut self) -> Result<BandedCholesky> {
        let n = self.dim;
        let bw = self.bw;
        let w = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                // s = A[i][j] - sum_k L[i][k] L[j][k], k in max(lo_i, lo_j)..j
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = self.band[i * w + (bw - (i - j))];
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                s -= dot(&self.band[ri + klo..ri + j], &self.band[rj + klo..rj + j]);
                if j == i {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                    }
                    self.band[ri + i] = s.sqrt();
                } else {
                    self.band[ri + j] = s / self.band[rj + j];
                }
            }
        }
        Ok(BandedCholesky { inner: self })
    }
}

/// Four-way unrolled dot product; lets the compiler keep independent
/// accumulators in vector registers.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..n {
        s += a[k] * b[k];
    }
    s
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    inner: BandedSpd,
}

impl BandedCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let a = &self.inner;
        let n = a.dim;
        let bw = a.bw;
        let w = bw + 1;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let ri = i * w + bw - i;
            let s = y[i] - dot(&a.band[ri + lo..ri + i], &y[lo..i]);
            y[i] = s / a.band[ri + i];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().take(hi + 1).skip(i + 1) {
                s -= a.band[k * w + bw - k + i] * yk;
            }
            y[i] = s / a.band[i * w + bw];
        }
        y
    }

    pub fn condition_estimate(&self) -> f64 {
        let a = &self.inner;
        let w = a.bw + 1;
        let (lo, hi) = (0..a.dim).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let d = a.band[i * w + a.bw];
            (lo.min(d * d), hi.max(d * d))
        });
        hi / lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += n as f64 * 0.1;
        }
        a
    }

    #[test]
    fn identity_returns_rhs() {
        let n = 5;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        let rhs = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        let sys = SymmetricSystem::new(n, m, rhs.clone()).unwrap();
        assert_eq!(solve_spd(&sys).unwrap(), rhs);
    }

    #[test]
    fn two_by_two() {
        let sys = SymmetricSystem::new(2, vec![2.0, 1.0, 1.0, 2.0], vec![3.0, 3.0]).unwrap();
        let x = solve_spd(&sys).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_spd_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = if trial == 0 { 200 } else { rng.gen_range(2..40) };
            let a = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sys = SymmetricSystem::new(n, a, b).unwrap();
            let x = solve_spd(&sys).unwrap();
            let xnorm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bnorm = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(sys.residual(&x) <= 1e-10 * (sys.norm_inf() * xnorm + bnorm));
        }
    }

    #[test]
    fn indefinite_reports_pivot_index() {
        let sys = SymmetricSystem::new(2, vec![1.0, 2.0, 2.0, 1.0], vec![0.0, 0.0]).unwrap();
        match solve_spd(&sys) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected definiteness error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        assert!(SymmetricSystem::new(2, vec![1.0, 0.5, 0.4, 1.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn banded_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 60;
        let bw = 7;
        let mut band = BandedSpd::zeros(n, bw);
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for j in i.saturating_sub(bw)..i {
                let v = rng.gen_range(-1.0..1.0);
                band.add(i, j, v);
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
            band.add(i, i, 2.0 * bw as f64 + 1.0);
            dense[i * n + i] = 2.0 * bw as f64 + 1.0;
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ax = band.mul(&b);
        let ax_dense: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i * n + j] * b[j]).sum()).collect();
        for (u, v) in ax.iter().zip(&ax_dense) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-12);
        }
        let x_band = band.clone().factor().unwrap().solve(&b);
        let x_dense = solve_spd(&SymmetricSystem::new(n, dense, b).unwrap()).unwrap();
        for (u, v) in x_band.iter().zip(&x_dense) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-12);
        }
    }
}
