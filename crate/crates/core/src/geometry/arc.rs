use serde::{Deserialize, Serialize};

use super::point::DiscPoint;
use super::turn::Turn;
use crate::error::{Error, Result};

/// A closed boundary arc. Lengths are fractions of the circle, `|T| = 1`.
#[derive(Clone, PartialEq)]
pub struct Arc {
    center: Turn,
    length: f64,
}

impl std::fmt::Debug for Arc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Arc {{ center: {:?}, length: {:e} }}", self.center, self.length)
    }
}

impl Arc {
    /// Arc centered at `center_angle` radians.
    pub fn new(center_angle: f64, length: f64) -> Result<Self> {
        if !center_angle.is_finite() {
            return Err(Error::Input(format!("arc center {center_angle} is not finite")));
        }
        Self::from_turn(Turn::from_radians(center_angle), length)
    }

    pub fn from_turn(center: Turn, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) {
            return Err(Error::Input(format!("arc length {length} outside (0, 1]")));
        }
        Ok(Arc { center, length })
    }

    /// The arc starting at `start` and running counterclockwise for `length`.
    pub fn from_start(start: &Turn, length: f64) -> Result<Self> {
        Self::from_turn(start.add_turns(0.5 * length.min(1.0)), length.min(1.0))
    }

    pub fn full_circle() -> Self {
        Arc {
            center: Turn::zero(),
            length: 1.0,
        }
    }

    pub fn center(&self) -> &Turn {
        &self.center
    }

    /// Center angle in radians, `[0, 2π)`.
    pub fn center_angle(&self) -> f64 {
        self.center.radians()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= 1.0
    }

    pub fn start(&self) -> Turn {
        self.center.add_turns(-0.5 * self.length)
    }

    pub fn end(&self) -> Turn {
        self.center.add_turns(0.5 * self.length)
    }

    /// Signed offset of `t` from the center, in turns.
    pub fn offset_of(&self, t: &Turn) -> f64 {
        t.diff(&self.center)
    }

    pub fn contains_turn(&self, t: &Turn) -> bool {
        self.is_full() || self.offset_of(t).abs() <= 0.5 * self.length
    }

    pub fn contains_arc(&self, other: &Arc) -> bool {
        if self.is_full() {
            return true;
        }
        if other.is_full() {
            return false;
        }
        self.offset_of(&other.center).abs() + 0.5 * other.length <= 0.5 * self.length
    }

    /// Closed arcs meet (possibly in a single point).
    pub fn intersects(&self, other: &Arc) -> bool {
        if self.is_full() || other.is_full() {
            return true;
        }
        self.center.diff(&other.center).abs() <= 0.5 * (self.length + other.length)
    }

    /// The arcs share more than endpoints.
    pub fn overlaps(&self, other: &Arc) -> bool {
        if self.is_full() || other.is_full() {
            return true;
        }
        self.center.diff(&other.center).abs() < 0.5 * (self.length + other.length)
    }

    /// Same center, length `min(1, k |I|^η)`.
    pub fn transform(&self, eta: f64, k: f64) -> Result<Arc> {
        if !(eta > 0.0 && eta <= 1.0) || !(k >= 1.0) {
            return Err(Error::Input(format!("arc transform needs 0 < η ≤ 1 and K ≥ 1, got η={eta}, K={k}")));
        }
        Ok(Arc {
            center: self.center.clone(),
            length: (k * self.length.powf(eta)).min(1.0),
        })
    }
}

/// `I_z`: the arc centered at `z / |z|` of length `1 - |z|`.
pub fn boundary_arc(z: &DiscPoint) -> Result<Arc> {
    if z.is_origin() {
        return Err(Error::Domain("the origin has no radial projection".into()));
    }
    Arc::from_turn(z.turn().clone(), z.depth())
}

/// `K · I^η`.
pub fn arc_transform(arc: &Arc, eta: f64, k: f64) -> Result<Arc> {
    arc.transform(eta, k)
}

/// Rejects arc lists with overlapping members.
pub fn ensure_disjoint(arcs: &[Arc]) -> Result<()> {
    for (i, a) in arcs.iter().enumerate() {
        for (j, b) in arcs.iter().enumerate().skip(i + 1) {
            if a.overlaps(b) {
                return Err(Error::Input(format!("arcs {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

/// Union of closed arcs as a sorted list of disjoint arcs. Arcs that
/// touch or overlap are merged; a union covering the circle becomes the
/// full circle.
pub fn merge_arcs(arcs: &[Arc]) -> Vec<Arc> {
    if arcs.iter().any(Arc::is_full) {
        return vec![Arc::full_circle()];
    }
    let mut spans: Vec<(Turn, f64)> = arcs.iter().map(|a| (a.start(), a.length)).collect();
    spans.sort_by(|a, b| a.0.cmp_position(&b.0));
    let forward = |from: &Turn, to: &Turn| {
        let d = to.diff(from);
        if d < 0.0 {
            d + 1.0
        } else {
            d
        }
    };
    let mut merged: Vec<(Turn, f64)> = Vec::new();
    for (start, len) in spans {
        if let Some(last) = merged.last_mut() {
            let d = forward(&last.0, &start);
            if d <= last.1 {
                last.1 = last.1.max(d + len);
                continue;
            }
        }
        merged.push((start, len));
    }
    // wrap-around: the last span may reach past the first start
    while merged.len() > 1 {
        let last = merged.last().unwrap().clone();
        let d = forward(&last.0, &merged[0].0);
        if d <= last.1 {
            let first = merged.remove(0);
            let end = last.1.max(d + first.1);
            merged.last_mut().unwrap().1 = end;
        } else {
            break;
        }
    }
    if merged.len() == 1 && merged[0].1 >= 1.0 {
        return vec![Arc::full_circle()];
    }
    merged
        .into_iter()
        .map(|(s, l)| Arc::from_start(&s, l).expect("merged length is positive"))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ArcRepr {
    center_angle: f64,
    length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center_turn: Option<String>,
}

impl Serialize for Arc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let exact = Turn::from_radians(self.center_angle()) == self.center;
        ArcRepr {
            center_angle: self.center_angle(),
            length: self.length,
            center_turn: (!exact).then(|| self.center.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Arc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ArcRepr::deserialize(d)?;
        let center = match repr.center_turn {
            Some(t) => t.parse::<Turn>().map_err(D::Error::custom)?,
            None => Turn::from_radians(repr.center_angle),
        };
        Arc::from_turn(center, repr.length).map_err(D::Error::custom)
    }
}
