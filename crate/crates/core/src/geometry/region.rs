use serde::{Deserialize, Serialize};

use super::arc::Arc;
use super::point::{hyperbolic_distance, DiscPoint};
use super::turn::Turn;
use crate::error::{Error, Result};

/// `{ r e^{it} : 1 - depth ≤ r < 1, e^{it} ∈ base }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    base: Arc,
    depth: f64,
}

impl CarlesonBox {
    pub fn new(base: Arc, depth: f64) -> Result<Self> {
        if !(depth > 0.0 && depth <= 1.0) {
            return Err(Error::Input(format!("box depth {depth} outside (0, 1]")));
        }
        Ok(CarlesonBox { base, depth })
    }

    /// `S(z)`: the box over `I_z` reaching down to `|z|`. `S(0)` is the disc.
    pub fn of(z: &DiscPoint) -> Self {
        Self::expanded(z, 1.0)
    }

    /// `S^η(z)`: depth and arc length `(1 - |z|)^η`.
    pub fn expanded(z: &DiscPoint, eta: f64) -> Self {
        if z.is_origin() {
            return CarlesonBox {
                base: Arc::full_circle(),
                depth: 1.0,
            };
        }
        let size = z.depth().powf(eta).min(1.0);
        CarlesonBox {
            base: Arc::from_turn(z.turn().clone(), size).expect("size in (0, 1]"),
            depth: size,
        }
    }

    /// The box over an arc `I` with depth `|I|`.
    pub fn over(arc: &Arc) -> Self {
        CarlesonBox {
            base: arc.clone(),
            depth: arc.length(),
        }
    }

    pub fn base(&self) -> &Arc {
        &self.base
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 - self.depth
    }

    pub fn contains(&self, p: &DiscPoint) -> bool {
        if self.depth >= 1.0 && self.base.is_full() {
            return true;
        }
        !p.is_origin() && p.depth() <= self.depth && self.base.contains_turn(p.turn())
    }

    pub fn intersects(&self, other: &CarlesonBox) -> bool {
        self.base.intersects(&other.base)
    }

    pub fn contains_box(&self, other: &CarlesonBox) -> bool {
        other.depth <= self.depth && self.base.contains_arc(&other.base)
    }

    /// Hyperbolic distance from `p` to the part of the box boundary inside
    /// the disc (inner arc and radial sides).
    pub fn boundary_distance(&self, p: &DiscPoint) -> f64 {
        if self.depth >= 1.0 && self.base.is_full() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        if self.depth < 1.0 {
            // nearest point of the inner arc shares p's angle when it can
            let turn = if self.base.contains_turn(p.turn()) {
                p.turn().clone()
            } else {
                self.nearer_side(p.turn())
            };
            let q = DiscPoint::from_depth(turn, self.depth).expect("depth in (0, 1)");
            best = hyperbolic_distance(p, &q);
        }
        if !self.base.is_full() {
            for side in [self.base.start(), self.base.end()] {
                best = best.min(radial_segment_distance(p, &side, self.depth));
            }
        }
        best
    }

    /// Zero inside the box, else the hyperbolic distance to it.
    pub fn distance_to(&self, p: &DiscPoint) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    fn nearer_side(&self, t: &Turn) -> Turn {
        let (s, e) = (self.base.start(), self.base.end());
        if t.diff(&s).abs() <= t.diff(&e).abs() {
            s
        } else {
            e
        }
    }
}

/// Distance from `p` to the radius `{ (1 - t) e^{2πi·side} : 0 < t ≤ depth }`.
/// Radii are geodesics, so the distance is unimodal along the segment and a
/// golden-section search in `log t` finds the minimum.
fn radial_segment_distance(p: &DiscPoint, side: &Turn, depth: f64) -> f64 {
    let at = |log_t: f64| {
        let t = log_t.exp().min(depth);
        hyperbolic_distance(p, &DiscPoint::from_depth(side.clone(), t).expect("t in (0, 1)"))
    };
    let hi = depth.min(1.0 - 1e-16).ln();
    let lo = (p.depth().min(depth) * 1e-6).max(f64::MIN_POSITIVE).ln().min(hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..120 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    fc.min(fd).min(at(lo)).min(at(hi))
}

/// `Δ_r(z)`: the hyperbolic disc of radius `r` centered at `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicDisc {
    pub center: DiscPoint,
    pub radius: f64,
}

impl HyperbolicDisc {
    pub fn new(center: DiscPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("hyperbolic radius {radius} must be positive")));
        }
        Ok(HyperbolicDisc { center, radius })
    }

    /// `Δ_1(z)`.
    pub fn unit(center: DiscPoint) -> Self {
        HyperbolicDisc { center, radius: 1.0 }
    }

    /// Pseudo-hyperbolic radius `tanh r`.
    pub fn pseudo_radius(&self) -> f64 {
        self.radius.tanh()
    }

    pub fn contains(&self, p: &DiscPoint) -> bool {
        hyperbolic_distance(&self.center, p) <= self.radius
    }

    pub fn intersects(&self, other: &HyperbolicDisc) -> bool {
        hyperbolic_distance(&self.center, &other.center) <= self.radius + other.radius
    }

    pub fn intersects_box(&self, b: &CarlesonBox) -> bool {
        b.distance_to(&self.center) <= self.radius
    }

    pub fn inside_box(&self, b: &CarlesonBox) -> bool {
        b.contains(&self.center) && b.boundary_distance(&self.center) >= self.radius
    }

    /// Euclidean center (as a radius along `arg z`) and Euclidean radius.
    pub fn euclidean(&self) -> (f64, f64) {
        let t = self.pseudo_radius();
        let r = self.center.abs();
        let om = self.center.one_minus_abs_sq();
        let den = 1.0 - t * t + t * t * om;
        (r * (1.0 - t * t) / den, t * om / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pt(r: f64, th: f64) -> DiscPoint {
        DiscPoint::from_polar(r, th).unwrap()
    }

    #[test]
    fn box_conventions() {
        let z = pt(0.75, 0.0);
        let s = CarlesonBox::of(&z);
        assert_abs_diff_eq!(s.inner_radius(), 0.75);
        assert_abs_diff_eq!(s.base().length(), 0.25);
        let se = CarlesonBox::expanded(&z, 0.5);
        assert_abs_diff_eq!(se.depth(), 0.5);
        assert!(se.contains_box(&s));
        assert!(s.contains(&z));
        assert!(!s.contains(&pt(0.7, 0.0)));
        assert!(CarlesonBox::of(&DiscPoint::origin()).contains(&DiscPoint::origin()));
    }

    #[test]
    fn box_distance_matches_radial_closed_form() {
        // straight above the box: the nearest point is radially outward
        let b = CarlesonBox::of(&pt(0.9, 1.0));
        let p = pt(0.5, 1.0);
        let q = pt(0.9, 1.0);
        assert_abs_diff_eq!(b.distance_to(&p), hyperbolic_distance(&p, &q), epsilon = 1e-12);
        assert_eq!(b.distance_to(&pt(0.95, 1.0)), 0.0);
    }

    #[test]
    fn box_distance_is_a_minimum_over_samples() {
        let b = CarlesonBox::of(&pt(0.8, 0.0));
        for p in [pt(0.9, 1.0), pt(0.99, -0.8), pt(0.3, 2.0), pt(0.95, 0.4)] {
            let d = b.distance_to(&p);
            let mut sampled = f64::INFINITY;
            for i in 0..=400 {
                let ang = -0.1 + 0.2 * i as f64 / 400.0;
                for j in 1..=400 {
                    let depth = 0.2 * j as f64 / 400.0;
                    let q = DiscPoint::from_depth(Turn::from_turns(ang), depth).unwrap();
                    sampled = sampled.min(hyperbolic_distance(&p, &q));
                }
            }
            assert!(d <= sampled + 1e-9, "{d} > {sampled}");
            assert!(d >= sampled - 0.05, "{d} << {sampled}");
        }
    }

    #[test]
    fn euclidean_disc_of_origin() {
        let (c, r) = HyperbolicDisc::unit(DiscPoint::origin()).euclidean();
        assert_abs_diff_eq!(c, 0.0);
        assert_abs_diff_eq!(r, 1f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn euclidean_disc_boundary_is_at_distance_r() {
        let d = HyperbolicDisc::new(pt(0.7, 0.0), 0.8).unwrap();
        let (c, r) = d.euclidean();
        for p in [pt(c + r, 0.0), pt(c - r, 0.0)] {
            assert_abs_diff_eq!(hyperbolic_distance(&d.center, &p), 0.8, epsilon = 1e-10);
        }
    }

    #[test]
    fn disc_box_relations() {
        let z = pt(0.999, 0.0);
        let disc = HyperbolicDisc::unit(z.clone());
        assert!(disc.inside_box(&CarlesonBox::expanded(&z, 0.5)));
        assert!(!disc.inside_box(&CarlesonBox::of(&z)));
        assert!(disc.intersects_box(&CarlesonBox::of(&z)));
        assert!(!disc.intersects_box(&CarlesonBox::of(&pt(0.999, 3.0))));
    }
}
