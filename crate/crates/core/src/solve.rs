//! Scalar root finding: bracketed bisection refined with guarded Newton steps.
//!
//! The bracket guarantees convergence; Newton accelerates it whenever the
//! step stays inside the bracket and shrinks the residual. Used by the
//! efficiency module for the optimal-SIR equation and for curve inversion.

/// Find a root of `f` inside `[a, b]`, where `f(a)` and `f(b)` have opposite
/// signs. `df` is the derivative of `f` (an approximation is fine; it only
/// affects speed, never correctness).
///
/// Stops when `|f(x)| <= tol_residual` or the bracket collapses to adjacent
/// floats, whichever happens first, and returns the iterate with the smallest
/// residual seen. Returns `None` if the endpoints do not bracket a sign
/// change.
pub(crate) fn bisect_newton<F, D>(
    f: F,
    df: D,
    a: f64,
    b: f64,
    tol_residual: f64,
    max_iters: usize,
) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let fa = f(a);
    if fa == 0.0 {
        return Some(a);
    }
    let fb = f(b);
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }

    // lo always holds f < 0, hi holds f > 0.
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };

    let mut x = 0.5 * (lo + hi);
    let mut best = x;
    let mut best_res = f64::INFINITY;

    for _ in 0..max_iters {
        let fx = f(x);
        let res = fx.abs();
        if res < best_res {
            best_res = res;
            best = x;
        }
        if res <= tol_residual {
            return Some(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }

        // Try a Newton step from the current iterate; fall back to bisection
        // when the step leaves the bracket or is not finite.
        let slope = df(x);
        let newton = x - fx / slope;
        let inside = {
            let (l, h) = if lo < hi { (lo, hi) } else { (hi, lo) };
            newton.is_finite() && newton > l && newton < h
        };
        let next = if inside { newton } else { 0.5 * (lo + hi) };

        if next == x || next == lo || next == hi {
            // Bracket exhausted at float resolution.
            let mid = 0.5 * (lo + hi);
            if mid == x {
                break;
            }
            x = mid;
            if x == lo || x == hi {
                break;
            }
        } else {
            x = next;
        }
    }
    Some(best)
}

/// Scan a log-spaced grid over `[lo, hi]` and return the first interval on
/// which `f` changes sign from strictly negative to strictly positive.
///
/// Plateaus where `f` evaluates to exactly zero (e.g. underflow of both terms
/// of a residual) are skipped rather than mistaken for roots.
pub(crate) fn bracket_sign_change<F>(f: F, lo: f64, hi: f64, points: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo > 0.0 && hi > lo && points >= 2);
    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / (points - 1) as f64;
    let mut prev: Option<(f64, f64)> = None; // last strictly-negative sample
    for i in 0..points {
        let x = (log_lo + step * i as f64).exp();
        let y = f(x);
        if !y.is_finite() {
            continue;
        }
        if y < 0.0 {
            prev = Some((x, y));
        } else if y > 0.0 {
            if let Some((xn, _)) = prev {
                return Some((xn, x));
            }
        }
    }
    None
}
