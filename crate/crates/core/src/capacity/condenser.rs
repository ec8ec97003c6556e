use std::f64::consts::{LN_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::equilibrium::equilibrium_with;
use super::grid::{solve_grid, GridBoundary, GridPotential, GridResolution, PolarGrid};
use crate::error::{Error, Result};
use crate::geometry::{
    boundary_arc, hyperbolic_distance, image_arc, merge_arcs, mobius, Arc, CarlesonBox, DiscPoint, HyperbolicDisc,
};

/// Fewest grid cells (or boundary columns) a plate must cover.
pub const MIN_PLATE_CELLS: usize = 4;

/// Outer plate of a condenser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plates {
    Arcs(Vec<Arc>),
    Boxes(Vec<CarlesonBox>),
    Discs(Vec<HyperbolicDisc>),
}

impl Plates {
    pub fn len(&self) -> usize {
        match self {
            Plates::Arcs(v) => v.len(),
            Plates::Boxes(v) => v.len(),
            Plates::Discs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `I_w`, `S(w)` or `Δ_1(w)` for each point.
    pub fn arcs_of(points: &[DiscPoint]) -> Result<Self> {
        Ok(Plates::Arcs(points.iter().map(boundary_arc).collect::<Result<_>>()?))
    }

    pub fn boxes_of(points: &[DiscPoint]) -> Self {
        Plates::Boxes(points.iter().map(CarlesonBox::of).collect())
    }

    pub fn discs_of(points: &[DiscPoint]) -> Self {
        Plates::Discs(points.iter().cloned().map(HyperbolicDisc::unit).collect())
    }

    /// Whether some plate meets the disc `b`.
    pub fn meets(&self, b: &HyperbolicDisc) -> bool {
        match self {
            Plates::Arcs(_) => false,
            Plates::Boxes(v) => v.iter().any(|s| b.intersects_box(s)),
            Plates::Discs(v) => v.iter().any(|d| b.intersects(d)),
        }
    }

    /// Representative point of each plate: the top of a box, the center
    /// of a disc, and the point `w` with `I_w` equal to an arc.
    fn anchors(&self) -> Vec<DiscPoint> {
        match self {
            Plates::Arcs(v) => v
                .iter()
                .map(|a| DiscPoint::from_depth(a.center().clone(), a.length()).expect("arc length in (0, 1]"))
                .collect(),
            Plates::Boxes(v) => v
                .iter()
                .map(|b| DiscPoint::from_depth(b.base().center().clone(), b.depth()).expect("box depth in (0, 1]"))
                .collect(),
            Plates::Discs(v) => v.iter().map(|d| d.center.clone()).collect(),
        }
    }
}

/// A condenser `(D, Δ_r(z), F)` in the unit disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondenserSpec {
    pub plate_inner: HyperbolicDisc,
    pub plate_outer: Plates,
}

impl CondenserSpec {
    pub fn new(plate_inner: HyperbolicDisc, plate_outer: Plates) -> Self {
        CondenserSpec {
            plate_inner,
            plate_outer,
        }
    }

    /// Plates that touch make the capacity zero by convention.
    pub fn plates_intersect(&self) -> bool {
        self.plate_outer.meets(&self.plate_inner)
    }
}

/// Smooth part `R(δ) = -Σ_{n≥1} cos(2πnδ) (1 - tanh(na)) / n` of the
/// boundary kernel of the annulus `e^{-a} < |ζ| < 1`, grounded inside and
/// insulated on the circle. Coefficients decay like `e^{-2na}`.
struct AnnulusKernel {
    coeffs: Vec<f64>,
}

impl AnnulusKernel {
    fn new(a: f64) -> Result<Self> {
        let mut coeffs = Vec::new();
        for n in 1.. {
            let c = 2.0 / ((2.0 * n as f64 * a).exp() + 1.0) / n as f64;
            if c < 1e-18 {
                break;
            }
            if n > 200_000 {
                return Err(Error::Input(format!("inner plate too large (log ratio {a:e})")));
            }
            coeffs.push(-c);
        }
        Ok(AnnulusKernel { coeffs })
    }

    /// Clenshaw summation of the cosine series at `δ` turns.
    fn eval(&self, delta: f64) -> f64 {
        let c = (TAU * delta).cos();
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            let b0 = a + 2.0 * c * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        // Σ a_n cos(nθ) = b1 cos θ - b2 with the loop run down to n = 1
        b1 * c - b2
    }
}

/// `log(1 / tanh r)`, the log-ratio of the annulus left after moving the
/// inner disc to the origin.
fn log_ratio(radius: f64) -> f64 {
    // 1 / tanh r = 1 + 2 / (e^{2r} - 1)
    (2.0 / (2.0 * radius).exp_m1()).ln_1p()
}

/// `cap(Δ_r(0), E)` for a finite union of closed arcs `E`: the Dirichlet
/// energy of the potential that is 0 on the disc, 1 on `E`, and insulated
/// on the rest of the circle.
///
/// Computed from the equilibrium measure of `E` for the exact boundary
/// kernel of the annulus, `(1/π)(log(2/|ζ-ξ|) + a/2 - log 2 + R)` with
/// `a = log(1/tanh r)`, so the full circle gives the annulus value `2π/a`.
pub fn disc_capacity(radius: f64, arcs: &[Arc], quad_nodes_per_arc: usize) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("inner radius {radius} must be positive")));
    }
    let merged = merge_arcs(arcs);
    if merged.is_empty() {
        return Ok(0.0);
    }
    let a = log_ratio(radius);
    if merged[0].is_full() {
        return Ok(TAU / a);
    }
    let kernel = AnnulusKernel::new(a)?;
    let m = equilibrium_with(&merged, quad_nodes_per_arc, |d| kernel.eval(d))?;
    let inverse = (m.energy + 0.5 * a - LN_2) / PI;
    if !(inverse > 0.0) {
        return Err(Error::Numerical {
            message: format!("nonpositive condenser energy {inverse:e}"),
            condition: m.condition,
        });
    }
    Ok(1.0 / inverse)
}

/// `C(E) = cap(Δ_1(0), E)`. Zero for the empty set, monotone in `E`.
pub fn log_capacity(arcs: &[Arc], quad_nodes_per_arc: usize) -> Result<f64> {
    disc_capacity(1.0, arcs, quad_nodes_per_arc)
}

/// Result of the fast condenser route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondenserEstimate {
    pub capacity: f64,
    /// Arcs whose capacity was taken, in the frame centered at `z`.
    pub arcs: Vec<Arc>,
    pub plates_intersect: bool,
    /// Set when a target violates `1 - |w| ≤ (1 - |z|)/2`, outside which
    /// boxes and discs are not comparable to their arcs.
    pub warning: Option<String>,
}

/// `cap(Δ_1(z), F)` by conformal transfer: arcs go to `φ_z(I)` (exact);
/// boxes `S(w)` and discs `Δ(w)` go to the arc `I_{φ_z(w)}`, which is
/// comparable with absolute constants.
pub fn condenser_capacity(z: &DiscPoint, targets: &Plates, quad_nodes_per_arc: usize) -> Result<CondenserEstimate> {
    if targets.is_empty() {
        return Err(Error::Input("condenser needs at least one target".into()));
    }
    let inner = HyperbolicDisc::unit(z.clone());
    if targets.meets(&inner) {
        return Ok(CondenserEstimate {
            capacity: 0.0,
            arcs: Vec::new(),
            plates_intersect: true,
            warning: None,
        });
    }
    let mut warning = None;
    let arcs: Vec<Arc> = match targets {
        Plates::Arcs(v) => v.iter().map(|a| image_arc(z, a)).collect(),
        _ => {
            let anchors = targets.anchors();
            if let Some(k) = anchors.iter().position(|w| w.depth() > 0.5 * z.depth()) {
                warning = Some(format!(
                    "target {k} is not deep enough (1-|w| = {:e} > (1-|z|)/2 = {:e}); comparability constants not guaranteed",
                    anchors[k].depth(),
                    0.5 * z.depth()
                ));
            }
            anchors
                .iter()
                .map(|w| boundary_arc(&mobius(z, w)))
                .collect::<Result<_>>()?
        }
    };
    let capacity = log_capacity(&arcs, quad_nodes_per_arc)?;
    Ok(CondenserEstimate {
        capacity,
        arcs: merge_arcs(&arcs),
        plates_intersect: false,
        warning,
    })
}

/// Size of a plate in the frame of `z`, used to grade the grid.
fn frame_size(z: &DiscPoint, plates: &Plates) -> f64 {
    let sizes: Vec<f64> = match plates {
        Plates::Arcs(v) => v.iter().map(|a| TAU * image_arc(z, a).length()).collect(),
        Plates::Boxes(v) => v
            .iter()
            .map(|b| {
                let top = DiscPoint::from_depth(b.base().center().clone(), b.depth()).expect("box depth in (0, 1]");
                (TAU * image_arc(z, b.base()).length()).min(mobius(z, &top).depth())
            })
            .collect(),
        Plates::Discs(v) => v
            .iter()
            .map(|d| HyperbolicDisc::new(mobius(z, &d.center), d.radius).map_or(1.0, |d| d.euclidean().1))
            .collect(),
    };
    sizes.into_iter().fold(1.0, f64::min)
}

/// Grid oracle for `cap(Δ_r(z), F)`: a finite-volume solve in the Möbius
/// frame of `z`, where the inner plate is the centered disc of radius
/// `tanh r` and the domain is an annulus. Arc plates are Dirichlet edges on
/// the circle; boxes and discs fix the cells whose centers they contain.
///
/// Touching plates give the zero potential with energy 0.
pub fn grid_condenser_capacity(spec: &CondenserSpec, res: GridResolution) -> Result<GridPotential> {
    let z = &spec.plate_inner.center;
    let width = 2.0 / ((2.0 * spec.plate_inner.radius).exp() + 1.0);
    if spec.plates_intersect() {
        let grid = PolarGrid::graded_depth(width, res, 1.0)?;
        let n = grid.len();
        return Ok(GridPotential {
            boundary: GridBoundary::free(&grid),
            grid,
            frame: Some(z.clone()),
            values: vec![0.0; n],
            energy: 0.0,
            condition: 1.0,
        });
    }
    if spec.plate_outer.is_empty() {
        return Err(Error::Input("condenser needs at least one outer plate".into()));
    }
    let dtheta = TAU / res.n_theta as f64;
    let h = (frame_size(z, &spec.plate_outer) / 8.0).min(dtheta);
    let grid = PolarGrid::graded_depth(width, res, h)?;
    let mut bc = GridBoundary::free(&grid);
    bc.inner = Some(0.0);
    let (nr, nt) = (grid.n_r(), grid.n_theta());
    let short = |k: usize, kind: &str, cells: usize| -> Result<()> {
        if cells < MIN_PLATE_CELLS {
            return Err(Error::Resolution {
                plate: format!("{kind} {k}"),
                cells,
                required: MIN_PLATE_CELLS,
            });
        }
        Ok(())
    };
    match &spec.plate_outer {
        Plates::Arcs(v) => {
            for (k, arc) in v.iter().enumerate() {
                let img = image_arc(z, arc);
                let mut cells = 0;
                for j in 0..nt {
                    if img.contains_turn(&grid.column_turn(j)) {
                        bc.outer[j] = Some(1.0);
                        cells += 1;
                    }
                }
                short(k, "arc", cells)?;
            }
        }
        Plates::Boxes(v) => {
            let points: Vec<DiscPoint> = (0..nr)
                .flat_map(|i| (0..nt).map(move |j| (i, j)))
                .map(|(i, j)| mobius(z, &grid.cell_point(i, j)))
                .collect();
            for (k, b) in v.iter().enumerate() {
                let mut cells = 0;
                for (idx, p) in points.iter().enumerate() {
                    if b.contains(p) {
                        bc.fixed[idx] = Some(1.0);
                        cells += 1;
                    }
                }
                short(k, "box", cells)?;
            }
        }
        Plates::Discs(v) => {
            for (k, d) in v.iter().enumerate() {
                let c = mobius(z, &d.center);
                let mut cells = 0;
                for i in 0..nr {
                    for j in 0..nt {
                        if hyperbolic_distance(&c, &grid.cell_point(i, j)) <= d.radius {
                            bc.fixed[grid.index(i, j)] = Some(1.0);
                            cells += 1;
                        }
                    }
                }
                short(k, "disc", cells)?;
            }
        }
    }
    solve_grid(&grid, &bc, Some(z.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::single_arc_energy;
    use crate::geometry::Turn;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_series_matches_image_sum() {
        // R(θ) = Σ_m (-1)^{m+1} log(1 - 2 q^m cos θ + q^{2m}), q = e^{-2a}
        let a = log_ratio(1.0);
        let k = AnnulusKernel::new(a).unwrap();
        let q = (-2.0 * a).exp();
        for &d in &[0.0, 0.1, 0.25, 0.4, 0.5] {
            let c = (TAU * d).cos();
            let images: f64 = (1..2000)
                .map(|m| {
                    let qm = q.powi(m);
                    let s = if m % 2 == 1 { 1.0 } else { -1.0 };
                    s * (1.0 - 2.0 * qm * c + qm * qm).ln()
                })
                .sum();
            assert_abs_diff_eq!(k.eval(d), images, epsilon = 1e-10);
        }
    }

    #[test]
    fn full_circle_is_the_annulus() {
        let c = log_capacity(&[Arc::full_circle()], 16).unwrap();
        assert_abs_diff_eq!(c, TAU / (1.0f64.tanh().recip()).ln(), epsilon = 1e-12);
        assert_eq!(log_capacity(&[], 16).unwrap(), 0.0);
    }

    #[test]
    fn near_full_arc_approaches_the_annulus() {
        let full = log_capacity(&[Arc::full_circle()], 16).unwrap();
        let almost = log_capacity(&[Arc::new(0.0, 0.999).unwrap()], 64).unwrap();
        assert!(almost < full && almost > 0.9 * full, "{almost} vs {full}");
    }

    #[test]
    fn small_arcs_scale_like_inverse_log() {
        let l = 2f64.powi(-8);
        let c = log_capacity(&[Arc::new(0.0, l).unwrap()], 32).unwrap();
        // on a short arc the smooth part of the kernel is frozen at R(0)
        let a = log_ratio(1.0);
        let asymptotic = PI / (single_arc_energy(l) + 0.5 * a - LN_2 + AnnulusKernel::new(a).unwrap().eval(0.0));
        assert!((c / asymptotic - 1.0).abs() < 1e-3, "{c} vs {asymptotic}");
        let ratio = log_capacity(&[Arc::new(0.0, 2f64.powi(-4)).unwrap()], 32).unwrap()
            / log_capacity(&[Arc::new(0.0, 2f64.powi(-12)).unwrap()], 32).unwrap();
        assert!((1.0..=10.0).contains(&ratio));
    }

    #[test]
    fn monotone_under_adding_arcs() {
        let a = Arc::new(0.5, 0.05).unwrap();
        let b = Arc::new(2.5, 0.1).unwrap();
        let big = Arc::new(0.5, 0.08).unwrap();
        let ca = log_capacity(std::slice::from_ref(&a), 32).unwrap();
        assert!(log_capacity(&[a.clone(), b], 32).unwrap() >= ca);
        assert!(log_capacity(&[big], 32).unwrap() >= ca);
    }

    #[test]
    fn grid_oracle_agrees_with_kernel_route_on_arcs() {
        for &(len, r) in &[(0.25, 1.0), (0.1, 1.0), (0.3, 0.5)] {
            let arc = Arc::new(1.0, len).unwrap();
            let fast = disc_capacity(r, std::slice::from_ref(&arc), 32).unwrap();
            let spec = CondenserSpec::new(
                HyperbolicDisc::new(DiscPoint::origin(), r).unwrap(),
                Plates::Arcs(vec![arc]),
            );
            let grid = grid_condenser_capacity(&spec, GridResolution::new(64, 256).unwrap()).unwrap();
            assert!((grid.energy / fast - 1.0).abs() < 0.05, "L={len}: grid {} fast {fast}", grid.energy);
        }
    }

    #[test]
    fn conformal_transfer_is_exact_for_arcs() {
        let z = DiscPoint::from_polar(0.8, 1.0).unwrap();
        let arc = Arc::new(1.2, 0.05).unwrap();
        let fast = condenser_capacity(&z, &Plates::Arcs(vec![arc.clone()]), 32).unwrap();
        let spec = CondenserSpec::new(HyperbolicDisc::unit(z.clone()), Plates::Arcs(vec![arc]));
        let grid = grid_condenser_capacity(&spec, GridResolution::new(64, 256).unwrap()).unwrap();
        assert!((grid.energy / fast.capacity - 1.0).abs() < 0.08);
        assert!(fast.warning.is_none());
    }

    #[test]
    fn touching_plates_have_zero_capacity() {
        let z = DiscPoint::from_polar(0.5, 0.0).unwrap();
        let plates = Plates::discs_of(std::slice::from_ref(&z));
        let est = condenser_capacity(&z, &plates, 16).unwrap();
        assert!(est.plates_intersect);
        assert_eq!(est.capacity, 0.0);
        let spec = CondenserSpec::new(HyperbolicDisc::unit(z), plates);
        assert_eq!(grid_condenser_capacity(&spec, GridResolution::new(8, 16).unwrap()).unwrap().energy, 0.0);
    }

    #[test]
    fn shallow_targets_raise_a_warning() {
        let z = DiscPoint::from_polar(0.9, 0.0).unwrap();
        let w = DiscPoint::from_polar(0.5, 3.0).unwrap();
        let est = condenser_capacity(&z, &Plates::discs_of(&[w]), 16).unwrap();
        assert!(est.warning.is_some());
        assert!(est.capacity > 0.0);
    }

    #[test]
    fn tiny_plate_is_a_resolution_error() {
        let w = DiscPoint::from_depth(Turn::from_turns(0.3), 1e-6).unwrap();
        let spec = CondenserSpec::new(HyperbolicDisc::unit(DiscPoint::origin()), Plates::arcs_of(&[w]).unwrap());
        let err = grid_condenser_capacity(&spec, GridResolution::new(16, 64).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Resolution { ref plate, .. } if plate == "arc 0"));
    }

    #[test]
    fn annulus_benchmark() {
        // inner Δ_r(0) of pseudo-radius a against the band |ζ| ≥ b
        let (r, b) = (1.0f64, 0.95);
        let a = r.tanh();
        let band = CarlesonBox::new(Arc::full_circle(), 1.0 - b).unwrap();
        let spec = CondenserSpec::new(HyperbolicDisc::new(DiscPoint::origin(), r).unwrap(), Plates::Boxes(vec![band]));
        let u = grid_condenser_capacity(&spec, GridResolution::new(64, 32).unwrap()).unwrap();
        let exact = TAU / (b / a).ln();
        assert!((u.energy / exact - 1.0).abs() < 0.15, "{} vs {exact}", u.energy);
    }
}
