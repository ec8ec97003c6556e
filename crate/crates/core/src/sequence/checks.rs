use super::{restricted_vicinity, vicinity, Sequence};
use crate::capacity::log_capacity;
use crate::error::Result;
use crate::geometry::{boundary_arc, dirichlet_metric, hyperbolic_distance, merge_arcs, mobius, Arc, CarlesonBox, DiscPoint, Turn};
use crate::report::{CheckParams, CheckReport, PointRecord};

/// Weak separation. Per point, `lhs` is the distance `d_D` to the nearest
/// other point and `ratio = δ / lhs`; the check passes iff the minimum
/// distance exceeds `δ`. The summary also records the hyperbolic form
/// `min d(z_i, z_j) / (d(z_i, 0) + 1)`.
pub fn check_weak_separation(seq: &Sequence, delta: f64) -> CheckReport {
    let n = seq.len();
    let mut nearest = vec![f64::INFINITY; n];
    let mut hyperbolic = f64::INFINITY;
    for i in 0..n {
        let zi = seq.point(i);
        let di0 = hyperbolic_distance(&DiscPoint::origin(), zi);
        for j in 0..n {
            if i == j {
                continue;
            }
            let zj = seq.point(j);
            if j > i {
                let m = dirichlet_metric(zi, zj);
                nearest[i] = nearest[i].min(m);
                nearest[j] = nearest[j].min(m);
            }
            hyperbolic = hyperbolic.min(hyperbolic_distance(zi, zj) / (di0 + 1.0));
        }
    }
    let records = nearest
        .iter()
        .enumerate()
        .map(|(i, &m)| PointRecord::new(i, m, delta, if m > 0.0 { delta / m } else { f64::INFINITY }))
        .collect();
    let params = CheckParams {
        delta: Some(delta),
        k: 1.0,
        ..CheckParams::default()
    };
    let min_metric = nearest.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = CheckReport::from_records("weak_separation", records, params)
        .with_summary("min_metric", min_metric)
        .with_summary("min_hyperbolic_ratio", hyperbolic);
    report.pass = n < 2 || min_metric > delta;
    if n < 2 {
        report.warn("fewer than two points; separation is vacuous");
    }
    if let Some((i, j)) = seq.duplicate() {
        report.warn(format!("points {i} and {j} coincide"));
    }
    report
}

/// Capacitary condition: per point `lhs = C(∪_{z_j ∈ V_γ(z_i)} I_{φ_{z_i}(z_j)})`,
/// `rhs = 1/d(z_i)` and `ratio = lhs · d(z_i)`. Solver failures are recorded
/// on the point (ratio NaN, which fails the report).
pub fn check_capacitary_condition(seq: &Sequence, gamma: f64, quad: usize, k: f64) -> Result<CheckReport> {
    let mut records = Vec::with_capacity(seq.len());
    for i in 0..seq.len() {
        let zi = seq.point(i);
        let members = vicinity(seq, i, gamma)?;
        let arcs: Result<Vec<Arc>> = members.iter().map(|&j| boundary_arc(&mobius(zi, seq.point(j)))).collect();
        let d = seq.d(i);
        let record = match arcs.and_then(|a| log_capacity(&a, quad)) {
            Ok(c) => PointRecord::new(i, c, 1.0 / d, c * d),
            Err(e) => PointRecord::new(i, f64::NAN, 1.0 / d, f64::NAN).with_note(e.to_string()),
        };
        records.push(record);
    }
    let params = CheckParams {
        gamma: Some(gamma),
        k,
        ..CheckParams::default()
    };
    let mut report = CheckReport::from_records("capacitary_condition", records, params);
    let ws = check_weak_separation(seq, super::DEFAULT_DELTA);
    if !ws.pass {
        report.warn(format!(
            "sequence is not weakly separated at delta = {} (min d_D = {:e})",
            super::DEFAULT_DELTA,
            ws.summary["min_metric"]
        ));
    }
    Ok(report)
}

/// Carleson-measure sampler over the supplied test sets only: for each
/// family `E`, `lhs = Σ_{z_i ∈ S(E)} 1/d(z_i)`, `rhs = C(E)` and
/// `ratio = lhs / rhs`. Not exhaustive; a pass means no listed set fails.
pub fn check_carleson(seq: &Sequence, families: &[Vec<Arc>], quad: usize, k: f64) -> Result<CheckReport> {
    let mut records = Vec::with_capacity(families.len());
    for (f, family) in families.iter().enumerate() {
        let e = merge_arcs(family);
        let boxes: Vec<CarlesonBox> = e.iter().map(CarlesonBox::over).collect();
        let mass: f64 = (0..seq.len())
            .filter(|&i| boxes.iter().any(|b| b.contains(seq.point(i))))
            .map(|i| 1.0 / seq.d(i))
            .sum();
        let c = log_capacity(&e, quad)?;
        let ratio = if mass == 0.0 { 0.0 } else { mass / c };
        records.push(PointRecord::new(f, mass, c, ratio));
    }
    let params = CheckParams {
        k,
        ..CheckParams::default()
    };
    let mut report = CheckReport::from_records("carleson_measure", records, params);
    report.warn("sampled over the supplied arc families only");
    Ok(report)
}

/// All dyadic arcs of levels `1..=max_level`, one single-arc family each,
/// plus the full circle.
pub fn dyadic_arc_families(max_level: u32) -> Vec<Vec<Arc>> {
    let mut out = vec![vec![Arc::full_circle()]];
    for n in 1..=max_level {
        let len = (-(n as f64)).exp2();
        for k in 0..1u64 << n {
            let start = Turn::dyadic(k as i64, n);
            out.push(vec![Arc::from_start(&start, len).expect("dyadic arc")]);
        }
    }
    out
}

/// `Σ 1/d(z_i)`, the total mass of the associated measure.
pub fn check_finite_measure(seq: &Sequence) -> f64 {
    seq.kernel_norms().iter().map(|d| 1.0 / d).sum()
}

/// The sufficient condition through restricted vicinities: per point
/// `ratio = d(z_i) Σ_{z_j ∈ Ṽ_γ(z_i)} 1/d(z_j)`.
pub fn check_theorem_d(seq: &Sequence, gamma: f64, k: f64) -> Result<CheckReport> {
    let mut records = Vec::with_capacity(seq.len());
    for i in 0..seq.len() {
        let mass: f64 = restricted_vicinity(seq, i, gamma)?.iter().map(|&j| 1.0 / seq.d(j)).sum();
        let d = seq.d(i);
        records.push(PointRecord::new(i, mass, 1.0 / d, mass * d));
    }
    let params = CheckParams {
        gamma: Some(gamma),
        k,
        ..CheckParams::default()
    };
    let mut report = CheckReport::from_records("theorem_d", records, params);
    report.warn("sufficient condition only; the required size of gamma is not quantified");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Turn;
    use approx::assert_abs_diff_eq;

    fn at(depth: f64, turn: f64) -> DiscPoint {
        DiscPoint::from_depth(Turn::from_turns(turn), depth).unwrap()
    }

    #[test]
    fn duplicate_points_fail_separation() {
        let seq = Sequence::new("dup", vec![at(0.1, 0.2), at(0.1, 0.2), at(0.01, 0.7)]);
        let r = check_weak_separation(&seq, 0.1);
        assert_eq!(r.summary["min_metric"], 0.0);
        assert!(!r.pass);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn antipodal_points_are_far() {
        let seq = Sequence::new("a", vec![DiscPoint::from_polar(0.9, 0.0).unwrap(), DiscPoint::from_polar(0.9, std::f64::consts::PI).unwrap()]);
        let r = check_weak_separation(&seq, 0.1);
        assert!(r.summary["min_metric"] > 0.9);
    }

    #[test]
    fn squared_radial_sequence_is_separated() {
        let pts = (1..=8).map(|n: i32| at((-(n * n) as f64).exp2(), 0.0)).collect();
        let r = check_weak_separation(&Sequence::new("r", pts), 0.1);
        assert!(r.pass, "{}", r.summary["min_metric"]);
    }

    #[test]
    fn separation_is_rotation_invariant() {
        let pts: Vec<DiscPoint> = vec![at(0.1, 0.1), at(0.03, 0.13), at(0.2, 0.6), at(0.001, 0.95)];
        let rotated: Vec<DiscPoint> = pts.iter().map(|p| p.rotated(1.234)).collect();
        let a = check_weak_separation(&Sequence::new("a", pts), 0.1).summary["min_metric"];
        let b = check_weak_separation(&Sequence::new("b", rotated), 0.1).summary["min_metric"];
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn empty_vicinities_give_zero_ratio() {
        let seq = Sequence::new("d", vec![at(0.01, 0.1), at(0.02, 0.4), at(0.005, 0.8)]);
        let r = check_capacitary_condition(&seq, 0.75, 16, 1e-9).unwrap();
        assert_eq!(r.sup_ratio, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn single_neighbor_ratio_tracks_distance() {
        let zi = at(1e-3, 0.3);
        let zj = at(1e-5, 0.3).rotated(1e-4);
        let seq = Sequence::new("p", vec![zi.clone(), zj.clone()]);
        let r = check_capacitary_condition(&seq, 0.75, 32, 1.0).unwrap();
        let ratio = r.records[0].ratio;
        let expected = seq.d(0) / hyperbolic_distance(&zi, &zj);
        assert!(ratio / expected > 1.0 / 64.0 && ratio / expected < 64.0, "{ratio} vs {expected}");
    }

    #[test]
    fn carleson_sampler_edge_cases() {
        let seq = Sequence::new("r", vec![at(0.5, 0.5), at(0.25, 0.5)]);
        let none = check_carleson(&seq, &[vec![Arc::new(0.1, 0.01).unwrap()]], 16, 1.0).unwrap();
        assert_eq!(none.sup_ratio, 0.0);
        let full = check_carleson(&seq, &[vec![Arc::full_circle()]], 16, 1.0).unwrap();
        let expected = check_finite_measure(&seq) / log_capacity(&[Arc::full_circle()], 16).unwrap();
        assert_abs_diff_eq!(full.records[0].ratio, expected, epsilon = 1e-14);
    }

    #[test]
    fn dyadic_sweep_over_radial_sequence_is_finite() {
        let pts = (1..=12).map(|n| at((-(n as f64)).exp2(), 0.3)).collect();
        let r = check_carleson(&Sequence::new("r", pts), &dyadic_arc_families(6), 16, 1e3).unwrap();
        assert!(r.sup_ratio.is_finite() && r.sup_ratio > 0.0);
        assert_eq!(dyadic_arc_families(2).len(), 1 + 2 + 4);
    }

    #[test]
    fn finite_measure_examples() {
        assert_eq!(check_finite_measure(&Sequence::new("e", vec![])), 0.0);
        assert_abs_diff_eq!(check_finite_measure(&Sequence::new("o", vec![DiscPoint::origin()])), 1.0);
    }

    #[test]
    fn theorem_d_one_neighbor_at_double_depth() {
        // d(z) ≈ log(1/(2(1-|z|))), so squaring the depth doubles d up to O(1)
        let zi = at(1e-40, 0.3);
        let zj = at(1e-80, 0.3);
        let seq = Sequence::new("t", vec![zi, zj]);
        let r = check_theorem_d(&seq, 0.75, 1.0).unwrap();
        assert!((r.records[0].ratio - 0.5).abs() < 0.01, "{}", r.records[0].ratio);
        assert_eq!(r.records[1].ratio, 0.0);
    }
}
