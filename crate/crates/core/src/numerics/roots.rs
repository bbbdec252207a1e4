use crate::error::{invalid, FtnError, Result};

/// Bisection for a root of `f` on `[lo, hi]`.
///
/// Stops when the bracket width is at most `tol * max(1, |x|)` or `f` hits
/// zero exactly.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(invalid("bracket", format!("[{lo}, {hi}]"), "lo <= hi"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", tol, "> 0"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !fa.is_finite() || !fb.is_finite() || fa.signum() == fb.signum() {
        return Err(FtnError::SameSignBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if b - a <= tol * m.abs().max(1.0) || m <= a || m >= b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
