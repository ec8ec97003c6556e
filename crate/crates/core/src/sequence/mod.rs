//! Finite sequences in the disc: vicinities, normalization, the interpolation
//! conditions, generators, and the grid-assembled Sobolev interpolant.

mod checks;
mod generate;
mod interpolant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kernel_norm_sq, CarlesonBox, DiscPoint};

pub use checks::{
    check_capacitary_condition, check_carleson, check_finite_measure, check_theorem_d, check_weak_separation,
    dyadic_arc_families,
};
pub use generate::{generate, Generator};
pub use interpolant::{assemble_sobolev_interpolant, SobolevBlocks, SobolevInterpolant};

pub const DEFAULT_GAMMA: f64 = 0.75;
pub const DEFAULT_ETA: f64 = 0.9;
pub const DEFAULT_BETA: f64 = 0.5;
pub const DEFAULT_DELTA: f64 = 0.1;
/// Lower bound on `d(z_i)` for a normalized sequence.
pub const NORMALIZED_MIN_D: f64 = 100.0;

/// An ordered finite list of points with cached kernel norms `d(z_i)`.
///
/// Duplicates are allowed so that the separation checker can report them.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    pub label: String,
    points: Vec<DiscPoint>,
    d: Vec<f64>,
    /// Bound on `Σ 1/d` over the points a truncation left out, when known.
    pub tail_bound: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    label: String,
    points: Vec<DiscPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_bound: Option<f64>,
}

impl Serialize for Sequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SequenceRepr {
            label: self.label.clone(),
            points: self.points.clone(),
            tail_bound: self.tail_bound,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SequenceRepr::deserialize(d)?;
        let mut seq = Sequence::new(repr.label, repr.points);
        seq.tail_bound = repr.tail_bound;
        Ok(seq)
    }
}

impl Sequence {
    pub fn new(label: impl Into<String>, points: Vec<DiscPoint>) -> Self {
        let d = points.iter().map(kernel_norm_sq).collect();
        Sequence {
            label: label.into(),
            points,
            d,
            tail_bound: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("sequence JSON, line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequences serialize")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &DiscPoint {
        &self.points[i]
    }

    /// `d(z_i) = ‖k_{z_i}‖²`.
    pub fn d(&self, i: usize) -> f64 {
        self.d[i]
    }

    pub fn kernel_norms(&self) -> &[f64] {
        &self.d
    }

    /// Keeps the points at the given indices, in order.
    pub fn subsequence(&self, keep: impl IntoIterator<Item = usize>) -> Sequence {
        let points = keep.into_iter().map(|i| self.points[i].clone()).collect();
        Sequence::new(self.label.clone(), points)
    }

    /// Concatenation; the label joins both labels.
    pub fn union(&self, other: &Sequence) -> Sequence {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        let mut seq = Sequence::new(format!("{}+{}", self.label, other.label), points);
        seq.tail_bound = match (self.tail_bound, other.tail_bound) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        seq
    }

    /// Indices of the first pair of equal points, if any.
    pub fn duplicate(&self) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.points[i] == self.points[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Input(format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(())
}

/// Whether `z_j` is at least as deep as `z_i`; equal moduli are broken by
/// index so that the relation is antisymmetric.
fn deeper(seq: &Sequence, i: usize, j: usize) -> bool {
    let (a, b) = (seq.points[i].depth(), seq.points[j].depth());
    b < a || (b == a && j > i)
}

/// `V_γ(z_i)`: points `z_j ≠ z_i` with `|z_j| ≥ |z_i|` whose boxes
/// `S^γ(z_j)` meet `S^γ(z_i)`.
pub fn vicinity(seq: &Sequence, i: usize, gamma: f64) -> Result<Vec<usize>> {
    check_exponent("gamma", gamma)?;
    let bi = CarlesonBox::expanded(&seq.points[i], gamma);
    Ok((0..seq.len())
        .filter(|&j| j != i && deeper(seq, i, j))
        .filter(|&j| bi.intersects(&CarlesonBox::expanded(&seq.points[j], gamma)))
        .collect())
}

/// Members `z_j` of `V_γ(z_i)` not covered by another member's box:
/// no `z_k ∈ V_γ(z_i)`, `k ≠ j`, with `S^γ(z_k) ⊇ S(z_j)`.
pub fn restricted_vicinity(seq: &Sequence, i: usize, gamma: f64) -> Result<Vec<usize>> {
    let v = vicinity(seq, i, gamma)?;
    let expanded: Vec<CarlesonBox> = v.iter().map(|&k| CarlesonBox::expanded(&seq.points[k], gamma)).collect();
    Ok(v.iter()
        .copied()
        .filter(|&j| {
            let own = CarlesonBox::of(&seq.points[j]);
            !v.iter().zip(&expanded).any(|(&k, b)| k != j && b.contains_box(&own))
        })
        .collect())
}

/// Largest index that has to be dropped because of point `i`: the point
/// itself when `d(z_i)` is too small, else the earlier point of each bad pair.
fn normalization_violation(seq: &Sequence, i: usize, eta: f64, beta: f64, min_d: f64) -> Result<Option<usize>> {
    if !(seq.d[i] > min_d) {
        return Ok(Some(i));
    }
    let gamma = 0.5 * (1.0 + beta);
    let mut cut: Option<usize> = None;
    let zi = &seq.points[i];
    for j in vicinity(seq, i, eta)? {
        let zj = &seq.points[j];
        let depth_ok = zj.depth().powf(beta) <= zi.depth();
        let outside = !CarlesonBox::expanded(zj, eta).contains(zi);
        if !(depth_ok && outside) {
            cut = cut.max(Some(i.min(j)));
        }
    }
    for j in vicinity(seq, i, gamma)? {
        if seq.points[j].depth() > 0.5 * zi.depth() {
            cut = cut.max(Some(i.min(j)));
        }
    }
    Ok(cut)
}

/// Drops the shortest prefix after which the sequence is
/// `(η, β)`-normalized: every `d(z_i) > 100`; members of `V_η(z_i)` satisfy
/// `(1-|z_j|)^β ≤ 1-|z_i|` and `z_i ∉ S^η(z_j)`; members of `V_γ(z_i)`,
/// `γ = (1+β)/2`, satisfy `1-|z_j| ≤ (1-|z_i|)/2`.
///
/// Every condition is pairwise, so removing a prefix never creates new
/// violations and the result is idempotent.
pub fn normalize(seq: &Sequence, eta: f64, beta: f64) -> Result<(Sequence, Vec<String>)> {
    normalize_with(seq, eta, beta, NORMALIZED_MIN_D)
}

/// [`normalize`] with a custom lower bound on `d(z_i)`.
pub fn normalize_with(seq: &Sequence, eta: f64, beta: f64, min_d: f64) -> Result<(Sequence, Vec<String>)> {
    check_exponent("eta", eta)?;
    check_exponent("beta", beta)?;
    if beta >= eta {
        return Err(Error::Input(format!("beta = {beta} must be below eta = {eta}")));
    }
    let mut cut: Option<usize> = None;
    for i in 0..seq.len() {
        cut = cut.max(normalization_violation(seq, i, eta, beta, min_d)?);
    }
    let start = cut.map_or(0, |c| c + 1);
    let mut out = seq.subsequence(start..seq.len());
    out.label = seq.label.clone();
    out.tail_bound = seq.tail_bound;
    let mut warnings = Vec::new();
    if start > 0 {
        warnings.push(format!("dropped the first {start} points"));
    }
    if out.is_empty() && !seq.is_empty() {
        warnings.push("normalization removed every point".into());
    }
    Ok((out, warnings))
}
