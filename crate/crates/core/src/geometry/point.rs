use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::turn::Turn;
use crate::error::{Error, Result};

/// Below this modulus of `w z̄` the kernel is evaluated from its power series.
const KERNEL_SERIES_CUTOFF: f64 = 1e-4;

/// A point of the open unit disc.
///
/// Stored as an exact angle and the *depth* `1 - |z|`, so that points a
/// few hundred dyadic levels from the circle keep their geometry. All disc
/// formulas below are written in terms of depths and angle differences to
/// avoid cancellation near the boundary.
#[derive(Clone, PartialEq)]
pub struct DiscPoint {
    turn: Turn,
    depth: f64,
}

impl DiscPoint {
    pub fn origin() -> Self {
        DiscPoint {
            turn: Turn::zero(),
            depth: 1.0,
        }
    }

    pub fn new(re: f64, im: f64) -> Result<Self> {
        let r = re.hypot(im);
        if !(r < 1.0) {
            return Err(Error::Domain(format!("({re}, {im}) is not inside the unit disc")));
        }
        if r == 0.0 {
            return Ok(DiscPoint::origin());
        }
        Ok(DiscPoint {
            turn: Turn::from_radians(im.atan2(re)),
            depth: 1.0 - r,
        })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) || !theta.is_finite() {
            return Err(Error::Domain(format!("polar point (r={r}, theta={theta}) is not inside the unit disc")));
        }
        Self::from_depth(Turn::from_radians(theta), 1.0 - r)
    }

    /// The point at angle `turn` with `1 - |z| = depth`.
    pub fn from_depth(turn: Turn, depth: f64) -> Result<Self> {
        if !(depth > 0.0 && depth <= 1.0) {
            return Err(Error::Domain(format!("depth {depth} outside (0, 1]")));
        }
        let turn = if depth == 1.0 { Turn::zero() } else { turn };
        Ok(DiscPoint { turn, depth })
    }

    pub fn turn(&self) -> &Turn {
        &self.turn
    }

    /// `1 - |z|`.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn abs(&self) -> f64 {
        1.0 - self.depth
    }

    pub fn theta(&self) -> f64 {
        self.turn.radians()
    }

    pub fn re(&self) -> f64 {
        self.abs() * self.theta().cos()
    }

    pub fn im(&self) -> f64 {
        self.abs() * self.theta().sin()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.abs(), self.theta())
    }

    pub fn is_origin(&self) -> bool {
        self.depth == 1.0
    }

    /// `1 - |z|^2`, computed without cancellation.
    pub fn one_minus_abs_sq(&self) -> f64 {
        self.depth * (2.0 - self.depth)
    }

    /// Rotation by `offset` radians.
    pub fn rotated(&self, offset: f64) -> DiscPoint {
        if self.is_origin() {
            return self.clone();
        }
        DiscPoint {
            turn: self.turn.add_radians(offset),
            depth: self.depth,
        }
    }

    /// Signed angle `arg(self) - arg(other)` in `[-π, π)`.
    pub fn angle_from(&self, other: &DiscPoint) -> f64 {
        self.turn.diff_radians(&other.turn)
    }
}

impl std::fmt::Debug for DiscPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DiscPoint {{ depth: {:e}, turn: {:?} }}", self.depth, self.turn)
    }
}

/// `1 - ρ₁ρ₂ e^{iδ}` for `ρ₁ = 1 - a`, `ρ₂ = 1 - b`, written so no term
/// cancels: `(a + b - ab) + 2ρ₁ρ₂ sin²(δ/2) - i ρ₁ρ₂ sin δ`.
fn one_minus_product(a: f64, b: f64, delta: f64) -> Complex64 {
    let rr = (1.0 - a) * (1.0 - b);
    let s = (0.5 * delta).sin();
    Complex64::new((a + b - a * b) + 2.0 * rr * s * s, -rr * delta.sin())
}

/// `1 - z̄ w`.
pub fn one_minus_conj_mul(z: &DiscPoint, w: &DiscPoint) -> Complex64 {
    one_minus_product(z.depth, w.depth, w.angle_from(z))
}

/// `|φ_z(w)|` together with `1 - |φ_z(w)|`, both accurate near the circle.
pub fn pseudo_hyperbolic(z: &DiscPoint, w: &DiscPoint) -> (f64, f64) {
    let den = one_minus_conj_mul(z, w).norm();
    let s = (z.one_minus_abs_sq() / den) * (w.one_minus_abs_sq() / den);
    let s = s.clamp(0.0, 1.0);
    let rho = (1.0 - s).sqrt();
    let depth = if s < 0.5 { s / (1.0 + rho) } else { 1.0 - rho };
    (rho, depth)
}

/// The disc automorphism `φ_z(w) = (z - w) / (1 - z̄ w)`, an involution
/// exchanging `z` and `0`.
pub fn mobius(z: &DiscPoint, w: &DiscPoint) -> DiscPoint {
    let (a, b) = (z.depth, w.depth);
    let delta = w.angle_from(z);
    let rw = 1.0 - b;
    let s = (0.5 * delta).sin();
    // e^{-iθz}(z - w) = ρz - ρw e^{iδ}
    let num = Complex64::new((b - a) + 2.0 * rw * s * s, -rw * delta.sin());
    let den = one_minus_product(a, b, delta);
    let (_, depth) = pseudo_hyperbolic(z, w);
    if num.norm() == 0.0 || depth >= 1.0 {
        return DiscPoint::origin();
    }
    // arg(num · conj(den)); its imaginary part collapses to the exact
    // product -a(2 - a) ρw sin δ, which keeps tiny offsets accurate
    let im = -a * (2.0 - a) * rw * delta.sin();
    let re = num.re * den.re + num.im * den.im;
    let offset = im.atan2(re);
    DiscPoint {
        turn: z.turn.add_radians(offset),
        depth,
    }
}

/// The Dirichlet-space reproducing kernel
/// `k(w, z) = (1 / (w z̄)) log(1 / (1 - w z̄))`.
pub fn kernel(w: &DiscPoint, z: &DiscPoint) -> Complex64 {
    let delta = w.angle_from(z);
    let modulus = w.abs() * z.abs();
    if modulus < KERNEL_SERIES_CUTOFF {
        let q = Complex64::from_polar(modulus, delta);
        // Σ q^n / (n + 1); |q| < 1e-4 so eight terms reach 1e-32.
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..8 {
            sum += term / (n as f64 + 1.0);
            term *= q;
        }
        return sum;
    }
    // 1 - w z̄ = 1 - ρwρz e^{iδ}
    let om = one_minus_product(w.depth, z.depth, delta);
    let log = Complex64::new(-om.norm().ln(), -om.arg());
    log / Complex64::from_polar(modulus, delta)
}

/// `d(z) = ‖k_z‖² = (1/|z|²) log(1/(1 - |z|²))`.
pub fn kernel_norm_sq(z: &DiscPoint) -> f64 {
    let r = z.abs();
    let r2 = r * r;
    if r2 < KERNEL_SERIES_CUTOFF {
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..8 {
            sum += term / (n as f64 + 1.0);
            term *= r2;
        }
        return sum;
    }
    // log(1/(1-r²)) with 1 - r² = a(2 - a)
    let a = z.depth;
    -(a.ln() + (2.0 - a).ln()) / r2
}

/// `d_D(z, w) = sqrt(1 - |k(z,w)|² / (d(z) d(w)))`.
pub fn dirichlet_metric(z: &DiscPoint, w: &DiscPoint) -> f64 {
    if z == w {
        return 0.0;
    }
    let k = kernel(z, w).norm();
    let ratio = (k / kernel_norm_sq(z)) * (k / kernel_norm_sq(w));
    (1.0 - ratio).max(0.0).sqrt()
}

/// Hyperbolic distance normalized as `½ log((1 + ρ)/(1 - ρ))`, `ρ = |φ_z(w)|`.
pub fn hyperbolic_distance(z: &DiscPoint, w: &DiscPoint) -> f64 {
    if z == w {
        return 0.0;
    }
    let (rho, depth) = pseudo_hyperbolic(z, w);
    0.5 * ((1.0 + rho).ln() - depth.ln())
}

#[derive(Serialize, Deserialize, Default)]
struct PointRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    turn: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
}

impl Serialize for DiscPoint {
    /// `{"r", "theta"}`, plus `"depth"` and an exact `"turn"` when the
    /// polar pair alone would not read back to the same point.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut repr = PointRepr {
            r: Some(self.abs()),
            theta: Some(self.theta()),
            ..Default::default()
        };
        if 1.0 - self.abs() != self.depth {
            repr.depth = Some(self.depth);
        }
        if Turn::from_radians(self.theta()) != self.turn {
            repr.turn = Some(self.turn.to_string());
        }
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscPoint {
    /// Accepts `{"re","im"}`, `{"r","theta"}` (optionally refined by
    /// `"depth"` / `"turn"`), or a Bergman-tree node `{"n","k"}`.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PointRepr::deserialize(deserializer)?;
        let point = if let (Some(n), Some(k)) = (repr.n, repr.k) {
            DiscPoint::from_depth(Turn::dyadic(k, n), super::ldexp(1.0, -(n as i64)))
        } else {
            let turn = match (&repr.turn, repr.theta, repr.re, repr.im) {
                (Some(t), _, _, _) => t.parse::<Turn>().map_err(D::Error::custom)?,
                (None, Some(theta), _, _) => Turn::from_radians(theta),
                (None, None, Some(re), Some(im)) => Turn::from_radians(im.atan2(re)),
                (None, None, _, _) if repr.depth.is_some() || repr.r.is_some() => Turn::zero(),
                _ => return Err(D::Error::custom("point needs re/im, r/theta, depth/turn or n/k")),
            };
            let depth = match (repr.depth, repr.r, repr.re, repr.im) {
                (Some(d), _, _, _) => d,
                (None, Some(r), _, _) => 1.0 - r,
                (None, None, Some(re), Some(im)) => 1.0 - re.hypot(im),
                _ => return Err(D::Error::custom("point needs a modulus: re/im, r or depth")),
            };
            if depth == 1.0 {
                Ok(DiscPoint::origin())
            } else {
                DiscPoint::from_depth(turn, depth)
            }
        };
        point.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(re, im).unwrap()
    }

    pub(crate) fn random_point(rng: &mut ChaCha8Rng) -> DiscPoint {
        let r = rng.gen_range(0.0f64..1.0).sqrt() * 0.999;
        DiscPoint::from_polar(r, rng.gen_range(0.0..TAU)).unwrap()
    }

    /// Σ x^n/(n+1), the power series of (1/x) log(1/(1-x)).
    fn series_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 0..200_000 {
            sum += term / (n as f64 + 1.0);
            term *= x;
            if term < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn rejects_points_outside() {
        assert!(DiscPoint::new(1.0, 0.0).is_err());
        assert!(DiscPoint::new(0.8, 0.7).is_err());
        assert!(DiscPoint::from_polar(1.2, 0.0).is_err());
        assert!(DiscPoint::from_depth(Turn::zero(), 0.0).is_err());
    }

    #[test]
    fn mobius_examples() {
        let z = p(0.3, -0.4);
        assert!(mobius(&z, &z).is_origin());
        let back = mobius(&z, &DiscPoint::origin());
        assert_abs_diff_eq!(back.re(), z.re(), epsilon = 1e-15);
        assert_abs_diff_eq!(back.im(), z.im(), epsilon = 1e-15);
        let m = mobius(&p(0.5, 0.0), &p(0.25, 0.0));
        assert_abs_diff_eq!(m.re(), 0.25 / (1.0 - 0.125), epsilon = 1e-15);
        assert_abs_diff_eq!(m.im(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mobius_matches_complex_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let (zc, wc) = (z.to_complex(), w.to_complex());
            let expect = (zc - wc) / (1.0 - zc.conj() * wc);
            let got = mobius(&z, &w).to_complex();
            assert!((got - expect).norm() < 1e-12, "{got} vs {expect}");
        }
    }

    #[test]
    fn mobius_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let back = mobius(&z, &mobius(&z, &w));
            assert!((back.to_complex() - w.to_complex()).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_examples() {
        let z = p(0.2, 0.6);
        assert_abs_diff_eq!(kernel(&DiscPoint::origin(), &z).re, 1.0, epsilon = 1e-15);
        let kzz = kernel(&z, &z);
        assert_abs_diff_eq!(kzz.im, 0.0, epsilon = 1e-14);
        assert!(kzz.re >= 1.0);
        let half = p(0.5, 0.0);
        let v = kernel(&half, &half).re;
        assert_abs_diff_eq!(v, 4.0 * (4.0f64 / 3.0).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, series_oracle(0.25), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 1.150728, epsilon = 1e-6);
    }

    #[test]
    fn kernel_is_hermitian_and_continuous_at_series_switch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let (a, b) = (kernel(&z, &w), kernel(&w, &z).conj());
            assert!((a - b).norm() < 1e-13);
        }
        let lo = DiscPoint::from_polar((KERNEL_SERIES_CUTOFF * 0.999).sqrt(), 0.3).unwrap();
        let hi = DiscPoint::from_polar((KERNEL_SERIES_CUTOFF * 1.001).sqrt(), 0.3).unwrap();
        let (x_lo, x_hi) = (lo.abs().powi(2), hi.abs().powi(2));
        assert_abs_diff_eq!(kernel(&lo, &lo).re, series_oracle(x_lo), epsilon = 1e-13);
        assert_abs_diff_eq!(kernel(&hi, &hi).re, series_oracle(x_hi), epsilon = 1e-12);
    }

    #[test]
    fn kernel_gram_matrix_is_positive_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let pts: Vec<_> = (0..8).map(|_| random_point(&mut rng)).collect();
            // Hermitian 8x8 -> real symmetric 16x16 [[A, -B], [B, A]].
            let n = pts.len();
            let mut m = vec![0.0; 4 * n * n];
            for i in 0..n {
                for j in 0..n {
                    let k = kernel(&pts[i], &pts[j]);
                    m[i * 2 * n + j] = k.re;
                    m[(i + n) * 2 * n + j + n] = k.re;
                    m[i * 2 * n + j + n] = -k.im;
                    m[(i + n) * 2 * n + j] = k.im;
                }
            }
            for i in 0..2 * n {
                m[i * 2 * n + i] += 1e-9;
            }
            assert!(crate::numerics::Cholesky::factor(2 * n, &m).is_ok());
        }
    }

    #[test]
    fn kernel_norm_examples() {
        assert_eq!(kernel_norm_sq(&DiscPoint::origin()), 1.0);
        let z = DiscPoint::from_polar(1.0 - 2f64.powi(-5), 0.0).unwrap();
        let x = z.abs().powi(2);
        assert_abs_diff_eq!(kernel_norm_sq(&z), series_oracle(x), epsilon = 1e-9);
        assert_abs_diff_eq!(kernel_norm_sq(&z), 2.9708, epsilon = 1e-3);
        let a = DiscPoint::from_polar(0.9, 1.0).unwrap();
        let b = DiscPoint::from_polar(0.99, 1.0).unwrap();
        assert!(kernel_norm_sq(&a) < kernel_norm_sq(&b));
    }

    #[test]
    fn dirichlet_metric_examples() {
        let z = p(0.1, 0.7);
        assert_eq!(dirichlet_metric(&z, &z), 0.0);
        let deep = DiscPoint::from_polar(1.0 - 2f64.powi(-5), 0.0).unwrap();
        let expect = (1.0 - 1.0 / series_oracle(deep.abs().powi(2))).sqrt();
        let got = dirichlet_metric(&DiscPoint::origin(), &deep);
        assert_abs_diff_eq!(got, expect, epsilon = 1e-9);
        assert_abs_diff_eq!(got, 0.8145, epsilon = 1e-3);
    }

    #[test]
    fn dirichlet_metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
            let (dxy, dyz, dxz) = (dirichlet_metric(&x, &y), dirichlet_metric(&y, &z), dirichlet_metric(&x, &z));
            assert!((0.0..1.0).contains(&dxy));
            assert!((dxy - dirichlet_metric(&y, &x)).abs() < 1e-12);
            assert!(dxz <= dxy + dyz + 1e-12);
        }
    }

    #[test]
    fn hyperbolic_distance_examples() {
        let z = p(-0.3, 0.2);
        assert_eq!(hyperbolic_distance(&z, &z), 0.0);
        let deep = DiscPoint::from_polar(1.0 - 2f64.powi(-5), 0.0).unwrap();
        let d = hyperbolic_distance(&DiscPoint::origin(), &deep);
        assert_abs_diff_eq!(d, 0.5 * 63f64.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(d, 2.0716, epsilon = 1e-4);
    }

    #[test]
    fn hyperbolic_distance_is_mobius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let a = hyperbolic_distance(&z, &w);
            let b = hyperbolic_distance(&DiscPoint::origin(), &mobius(&z, &w));
            assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn deep_points_keep_their_geometry() {
        // Two points 2^-300 deep, 2^-301 turns apart: separation is of the
        // same order as the depth.
        let a = DiscPoint::from_depth(Turn::dyadic(1, 3), 2f64.powi(-300)).unwrap();
        let b = DiscPoint::from_depth(Turn::dyadic(1, 3).add(&Turn::dyadic(1, 301)), 2f64.powi(-300)).unwrap();
        let d = hyperbolic_distance(&a, &b);
        assert!(d.is_finite() && d > 0.5 && d < 5.0, "d = {d}");
        let m = mobius(&a, &b);
        assert!(m.depth() > 1e-3, "image depth {}", m.depth());
        let back = mobius(&a, &m);
        assert!(hyperbolic_distance(&back, &b) < 1e-6);
        assert!(kernel_norm_sq(&a) > 200.0);
        let dd = dirichlet_metric(&a, &b);
        assert!(dd > 0.0 && dd < 1.0);
    }

    #[test]
    fn serde_forms() {
        let a: DiscPoint = serde_json::from_str(r#"{"re": 0.3, "im": 0.4}"#).unwrap();
        assert_abs_diff_eq!(a.abs(), 0.5, epsilon = 1e-15);
        let b: DiscPoint = serde_json::from_str(r#"{"r": 0.5, "theta": 1.0}"#).unwrap();
        assert_abs_diff_eq!(b.theta(), 1.0, epsilon = 1e-15);
        let c: DiscPoint = serde_json::from_str(r#"{"n": 400, "k": 3}"#).unwrap();
        assert_eq!(c.depth(), 2f64.powi(-400));
        let text = serde_json::to_string(&c).unwrap();
        let back: DiscPoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<DiscPoint>(r#"{"r": 1.5, "theta": 0}"#).is_err());
        assert!(serde_json::from_str::<DiscPoint>(r#"{"foo": 1}"#).is_err());
    }
}
