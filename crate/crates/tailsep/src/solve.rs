//! Root finding and 1-D minimization used for quantile inversion and MLE.
//!
//! ## Purpose
//! Several distributions have no closed-form quantile and two of the MLE
//! fitters optimize a profile likelihood. Both needs reduce to bracketed
//! one-dimensional solves, implemented once here.
//!
//! ## Key behaviors
//! - `expand_bracket_upward` grows an upper bound geometrically until the
//!   function changes sign (for strictly increasing objectives).
//! - `bisect_newton` is a safeguarded hybrid: Newton steps accelerate
//!   convergence but any step leaving the bracket falls back to bisection,
//!   so convergence is guaranteed for continuous monotone objectives.
//! - `golden_section_min` minimizes a unimodal function on an interval.
//!
//! ## Invariants & assumptions
//! - `f` must be continuous with `f(lo) ≤ 0 ≤ f(hi)` for the root finders.
//! - Non-convergence within the iteration budget is an error carrying the
//!   final bracket, never a silent wrong answer.

use crate::error::{Error, Result};

/// Maximum iterations for bracketed solves; 200 bisections alone would
/// resolve any double-precision bracket, so hitting this means a bad input.
const MAX_ITER: usize = 200;

/// Grow `hi` geometrically (factor 4) from `lo` until `f(hi) >= 0`.
///
/// Returns the expanded upper bound. Errors if the sign never changes
/// within `max_grow` expansions (reporting the bracket reached).
pub fn expand_bracket_upward(
    f: impl Fn(f64) -> f64,
    lo: f64,
    initial_hi: f64,
    max_grow: usize,
) -> Result<f64> {
    let mut hi = initial_hi.max(lo * (1.0 + 1e-12) + 1e-300);
    for _ in 0..max_grow {
        if f(hi) >= 0.0 {
            return Ok(hi);
        }
        hi = if hi.abs() < 1.0 { hi * 4.0 + 1.0 } else { hi * 4.0 };
    }
    Err(Error::no_conv(format!(
        "bracket expansion exhausted: f still negative at hi={hi:e} (lo={lo:e})"
    )))
}

/// Find the root of an increasing continuous `f` on `[lo, hi]` with
/// `f(lo) ≤ 0 ≤ f(hi)`, by bisection with Newton acceleration.
///
/// `df` may return `None` where a derivative is unavailable; the solver then
/// bisects. Converges when the bracket or the residual passes `x_tol` /
/// `f_tol` (absolute).
pub fn bisect_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> Option<f64>,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    f_tol: f64,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::no_conv(format!(
            "root not bracketed: f({lo:e})={flo:e}, f({hi:e})={fhi:e}"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= x_tol * (1.0 + x.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        // Newton proposal; keep it only if it stays inside the bracket.
        let newton = df(x).and_then(|d| {
            if d > 0.0 {
                let cand = x - fx / d;
                (cand > lo && cand < hi).then_some(cand)
            } else {
                None
            }
        });
        x = newton.unwrap_or_else(|| 0.5 * (lo + hi));
    }
    Err(Error::no_conv(format!(
        "bisect_newton exceeded {MAX_ITER} iterations; bracket [{lo:e},{hi:e}]"
    )))
}

/// Minimize a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns the abscissa of the minimum to absolute tolerance `x_tol`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, x_tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > x_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
