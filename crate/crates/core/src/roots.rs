//! Scalar bracketing used by the orbit and pre-image solvers.

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (a zero endpoint is returned as is). Stops when the bracket is narrower
/// than `width` or after 200 halvings.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || (f_lo > 0.0) == (f_hi > 0.0) {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton polish from `x0`, keeping only steps that stay inside `[lo, hi]`
/// and reduce `|f|`.
pub(crate) fn newton_polish(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    x0: f64,
    lo: f64,
    hi: f64,
    max_steps: usize,
) -> f64 {
    let mut x = x0;
    let mut fx = f(x);
    for _ in 0..max_steps {
        if fx == 0.0 {
            break;
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let cand = x - fx / d;
        if !(cand >= lo && cand <= hi) {
            break;
        }
        let f_cand = f(cand);
        if !(libm::fabs(f_cand) < libm::fabs(fx)) {
            break;
        }
        x = cand;
        fx = f_cand;
    }
    x
}
