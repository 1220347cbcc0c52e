//! Bracketing scalar root finder: secant steps guarded by bisection.

use crate::scalar::Real;

/// Finds a root of `f` in `[a, b]` given `f(a)` and `f(b)` of opposite sign
/// (or one of them zero).
///
/// Each step tries the secant point of the current bracket; it falls back to
/// bisection when the secant point leaves the interior of the bracket or when
/// two consecutive steps failed to halve the bracket width. Stops once the
/// bracket is narrower than `xtol` or `f` vanishes exactly.
pub fn bracketed_root<F: Real>(
    mut f: impl FnMut(F) -> F,
    mut a: F,
    mut b: F,
    mut fa: F,
    mut fb: F,
    xtol: F,
    max_iter: usize,
) -> F {
    if fa == F::zero() {
        return a;
    }
    if fb == F::zero() {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum(), "root is not bracketed");
    let half = F::lit(0.5);
    let mut slow_steps = 0usize;
    for _ in 0..max_iter {
        let width = (b - a).abs();
        if width <= xtol {
            break;
        }
        let mid = a + (b - a) * half;
        let secant = b - fb * (b - a) / (fb - fa);
        let guard = width * F::lit(1e-3);
        let lo = a.min(b) + guard;
        let hi = a.max(b) - guard;
        let use_secant = slow_steps < 2 && secant.is_finite() && secant > lo && secant < hi;
        let x = if use_secant { secant } else { mid };
        let fx = f(x);
        if fx == F::zero() {
            return x;
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a).abs() > width * half {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
    }
    // Return the endpoint with the smaller residual.
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}
