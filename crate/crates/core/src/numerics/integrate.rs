use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;
const INITIAL_PANELS: usize = 16;
/// Bisections allowed in total, so integrand noise cannot trigger an
/// exponential search.
const MAX_SPLITS: usize = 4_000_000;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson integration with Richardson extrapolation.
///
/// `[a, b]` is first cut into 16 panels so that narrow peaks are not
/// stepped over; each panel is bisected until the two-level Simpson
/// estimates agree to `15 * tol_panel`. The tolerance is shared
/// proportionally to panel width. Refinement stops with an accuracy error
/// at depth 48 or after four million bisections.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let width = b - a;
    let mut total = 0.0;
    let mut worst = 0.0f64;
    let mut failed = false;
    let mut budget = MAX_SPLITS;
    for p in 0..INITIAL_PANELS {
        let lo = a + width * p as f64 / INITIAL_PANELS as f64;
        let hi = a + width * (p + 1) as f64 / INITIAL_PANELS as f64;
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(fa, fm, fb, hi - lo);
        let panel_tol = tol / INITIAL_PANELS as f64;
        let mut err = 0.0;
        total += refine(
            &mut f,
            (lo, hi),
            (fa, fm, fb),
            whole,
            panel_tol,
            MAX_DEPTH,
            &mut budget,
            &mut err,
            &mut failed,
        );
        worst = worst.max(err);
    }
    if failed {
        return Err(Error::Accuracy {
            estimate: total,
            error: worst,
        });
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    (a, b): (f64, f64),
    (fa, fm, fb): (f64, f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
    err: &mut f64,
    failed: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // once the two estimates agree to rounding, halving `tol` further
    // would only chase noise
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= (15.0 * tol).max(noise) {
        return left + right + delta / 15.0;
    }
    if depth == 0 || *budget == 0 {
        *failed = true;
        *err = err.max(delta.abs() / 15.0);
        return left + right + delta / 15.0;
    }
    *budget -= 1;
    refine(f, (a, m), (fa, flm, fm), left, 0.5 * tol, depth - 1, budget, err, failed)
        + refine(f, (m, b), (fm, frm, fb), right, 0.5 * tol, depth - 1, budget, err, failed)
}
