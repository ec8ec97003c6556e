use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Sequence;
use crate::error::{Error, Result};
use crate::geometry::{Arc, CarlesonBox, DiscPoint, Turn};
use crate::tree::{CombSpec, TreeNode};

fn one() -> f64 {
    1.0
}

fn default_attempts() -> usize {
    10_000
}

/// Recipe for a test sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `z_k = (1 - λ^{k^p}) e^{iθ}`, `k = 1..n`.
    Radial {
        lambda: f64,
        n: usize,
        #[serde(default = "one")]
        power: f64,
        #[serde(default)]
        theta: f64,
    },
    /// `n` points with log-uniform depths in `[min_depth, max_depth]` and
    /// pairwise disjoint boxes `S^η`, placed greedily at random angles and
    /// kept off the `avoid` arcs.
    DisjointBoxes {
        n: usize,
        eta: f64,
        min_depth: f64,
        max_depth: f64,
        #[serde(default)]
        avoid: Vec<Arc>,
        #[serde(default = "default_attempts")]
        attempts: usize,
    },
    /// A comb at level `N` (a perfect square) whose anchor's box contains
    /// the angle `turn`: the anchor followed by its `√N` teeth.
    Comb { level: u32, turn: f64 },
    /// Concatenation; part `i` is generated with seed `seed + i`.
    Union { parts: Vec<Generator> },
}

/// Deterministic for a fixed seed.
pub fn generate(generator: &Generator, seed: u64) -> Result<Sequence> {
    match generator {
        Generator::Radial { lambda, n, power, theta } => radial(*lambda, *n, *power, *theta),
        Generator::DisjointBoxes {
            n,
            eta,
            min_depth,
            max_depth,
            avoid,
            attempts,
        } => disjoint_boxes(*n, *eta, *min_depth, *max_depth, avoid, *attempts, seed),
        Generator::Comb { level, turn } => comb(*level, *turn),
        Generator::Union { parts } => {
            let mut out: Option<Sequence> = None;
            for (i, part) in parts.iter().enumerate() {
                let seq = generate(part, seed.wrapping_add(i as u64))?;
                out = Some(match out {
                    None => seq,
                    Some(acc) => acc.union(&seq),
                });
            }
            out.ok_or_else(|| Error::Input("union of no sequences".into()))
        }
    }
}

fn radial(lambda: f64, n: usize, power: f64, theta: f64) -> Result<Sequence> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Input(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    if !(power >= 1.0) {
        return Err(Error::Input(format!("power = {power} must be at least 1")));
    }
    let log_lambda = lambda.ln();
    let turn = Turn::from_radians(theta);
    let points = (1..=n)
        .map(|k| {
            let depth = ((k as f64).powf(power) * log_lambda).exp();
            DiscPoint::from_depth(turn.clone(), depth)
                .map_err(|_| Error::Domain(format!("radial point {k} underflows (depth {depth:e})")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seq = Sequence::new(format!("radial(lambda={lambda}, n={n}, power={power})"), points);
    // d(z) ≥ log(1/(2(1-|z|))) = k^p L - log 2 with L = log(1/λ), so the
    // tail is at most Σ_{k>n} k^{-p} / L' ≤ n^{1-p} / ((p-1) L'),
    // L' = L - log 2 / n^p
    let l = -log_lambda;
    let lp = l - std::f64::consts::LN_2 / (n.max(1) as f64).powf(power);
    seq.tail_bound = (power > 1.0 && lp > 0.0).then(|| (n.max(1) as f64).powf(1.0 - power) / ((power - 1.0) * lp));
    Ok(seq)
}

fn disjoint_boxes(
    n: usize,
    eta: f64,
    min_depth: f64,
    max_depth: f64,
    avoid: &[Arc],
    attempts: usize,
    seed: u64,
) -> Result<Sequence> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Input(format!("eta = {eta} must lie in (0, 1]")));
    }
    if !(min_depth > 0.0 && min_depth <= max_depth && max_depth < 1.0) {
        return Err(Error::Input(format!("depth range [{min_depth}, {max_depth}] invalid")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taken: Vec<Arc> = avoid.to_vec();
    let mut points = Vec::with_capacity(n);
    let (lo, hi) = (min_depth.ln(), max_depth.ln());
    for index in 0..n {
        let depth = if hi > lo { rng.gen_range(lo..hi).exp() } else { min_depth };
        let mut placed = false;
        for _ in 0..attempts {
            let p = DiscPoint::from_depth(Turn::from_turns(rng.gen_range(0.0..1.0)), depth)?;
            let arc = CarlesonBox::expanded(&p, eta).base().clone();
            if taken.iter().all(|t| !t.intersects(&arc)) {
                taken.push(arc);
                points.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Infeasible {
                index,
                reason: format!("no free angle for a box of depth {depth:e} after {attempts} attempts"),
            });
        }
    }
    let arcs = &taken[avoid.len()..];
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            assert!(!arcs[i].intersects(&arcs[j]), "generated boxes {i} and {j} overlap");
        }
    }
    Ok(Sequence::new(format!("disjoint_boxes(n={n}, eta={eta})"), points))
}

/// Deepest tree level whose point depth `2^-n` is a normal `f64`.
const MAX_POINT_LEVEL: u64 = 1022;

fn comb(level: u32, turn: f64) -> Result<Sequence> {
    let anchor = TreeNode::at_turn(level, turn)?;
    let spec = CombSpec::new(level, anchor.clone())?;
    // the deepest tooth sits at level 2N + sqrt(N); keep its depth a normal f64
    let deepest = 2 * level as u64 + spec.side() as u64;
    if deepest > MAX_POINT_LEVEL {
        return Err(Error::Domain(format!(
            "comb at level {level} puts teeth at level {deepest}, below f64 depth range (max {MAX_POINT_LEVEL})"
        )));
    }
    let mut points = vec![anchor.point()];
    points.extend(spec.teeth().iter().map(TreeNode::point));
    Ok(Sequence::new(format!("comb(N={level})"), points))
}
