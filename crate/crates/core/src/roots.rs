//! Bracketed bisection shared by the prototype and microstrip inversions.

/// Result of a bisection run.
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, assuming `f(lo)` and `f(hi)`
/// have opposite signs (checked by the caller).
///
/// Stops when the residual drops below `f_tol`, when the bracket has
/// collapsed to adjacent floats, or after `max_iter` halvings.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, f_tol: f64, max_iter: usize) -> Bisection
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut best = if f_lo.abs() <= f(hi).abs() {
        (lo, f_lo)
    } else {
        (hi, f(hi))
    };
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let f_mid = f(mid);
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid.abs() <= f_tol {
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Bisection {
        x: best.0,
        residual: best.1,
        iterations,
    }
}
