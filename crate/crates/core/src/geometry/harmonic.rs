use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::arc::{ensure_disjoint, Arc};
use super::point::DiscPoint;
use super::turn::Turn;
use crate::error::Result;

/// Harmonic measure `ω(z, ∪ I_k, D)` of disjoint closed arcs.
///
/// With `u` the angle measured from `arg z`, the Poisson integral has the
/// antiderivative `G(u) = (1/π) atan2((1+ρ) sin(u/2), (1-ρ) cos(u/2))`.
/// Rather than subtracting two values of `G`, the difference over an arc is
/// taken as the angle between the two vectors, whose cross product is
/// exactly `(1 - ρ²) sin(Δ/2)`; this keeps full relative accuracy for the
/// tiny measures of far-away arcs and needs no branch tracking.
pub fn harmonic_measure(z: &DiscPoint, arcs: &[Arc]) -> Result<f64> {
    ensure_disjoint(arcs)?;
    let total: f64 = arcs.iter().map(|a| arc_measure(z, a)).sum();
    Ok(total.clamp(0.0, 1.0))
}

fn arc_measure(z: &DiscPoint, arc: &Arc) -> f64 {
    if arc.is_full() {
        return 1.0;
    }
    let a = z.depth();
    let (one_minus, one_plus) = (a, 2.0 - a);
    let u1 = arc.start().diff_radians(z.turn());
    let half_span = 0.5 * arc.length() * TAU;
    let u2 = u1 + 2.0 * half_span;
    let (s1, c1) = (0.5 * u1).sin_cos();
    let (s2, c2) = (0.5 * u2).sin_cos();
    let cross = one_minus * one_plus * half_span.sin();
    let dot = one_minus * one_minus * c1 * c2 + one_plus * one_plus * s1 * s2;
    cross.atan2(dot) / PI
}

/// Image of the boundary point `e^{2πi t}` under `φ_z`, exactly anchored at `arg z`.
pub fn mobius_boundary(z: &DiscPoint, t: &Turn) -> Turn {
    let a = z.depth();
    let delta = t.diff_radians(z.turn());
    let s = (0.5 * delta).sin();
    // e^{-iθz}(z - ζ) and 1 - z̄ζ with |ζ| = 1
    let num = Complex64::new(-a + 2.0 * s * s, -delta.sin());
    let den = Complex64::new(a + 2.0 * (1.0 - a) * s * s, -(1.0 - a) * delta.sin());
    let im = -a * (2.0 - a) * delta.sin();
    z.turn().add_radians(im.atan2(num.re * den.re + num.im * den.im))
}

/// `φ_z(I)`. Automorphisms preserve boundary orientation, so the image runs
/// from the image of the start to the image of the end.
pub fn image_arc(z: &DiscPoint, arc: &Arc) -> Arc {
    if arc.is_full() {
        return Arc::full_circle();
    }
    let (s, e) = (mobius_boundary(z, &arc.start()), mobius_boundary(z, &arc.end()));
    let mut len = e.diff(&s);
    if len <= 0.0 {
        len += 1.0;
    }
    Arc::from_start(&s, len).expect("image length is positive")
}
