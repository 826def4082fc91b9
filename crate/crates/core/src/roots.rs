//! Scalar root finding: bracketed bisection with a secant polish.

use crate::error::{Error, Result};

/// Finds a root of `f` in `[a, b]`. The bracket must straddle a sign change;
/// bisection narrows it to ~1e-6 relative width, then secant iterations
/// polish to `tol` in the abscissa.
pub fn bracketed_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{a}, {b}]: f = {flo:e}, {fhi:e}"
        )));
    }

    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-6 * (1.0 + mid.abs()) {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }

    // Secant polish from the bracket endpoints, falling back to bisection
    // whenever an iterate leaves the bracket.
    let (mut x0, mut x1) = (lo, hi);
    let (mut f0, mut f1) = (flo, fhi);
    for _ in 0..60 {
        if (x1 - x0).abs() <= tol {
            // Converged in the abscissa; return the iterate with the smaller
            // residual rather than the (possibly one-sided) bracket midpoint.
            return Ok(if f1.abs() <= f0.abs() { x1 } else { x0 });
        }
        let denom = f1 - f0;
        let mut x2 = if denom != 0.0 { x1 - f1 * (x1 - x0) / denom } else { 0.5 * (lo + hi) };
        if !(x2 > lo && x2 < hi) {
            x2 = 0.5 * (lo + hi);
        }
        let f2 = f(x2);
        if f2 == 0.0 {
            return Ok(x2);
        }
        if f2.signum() == flo.signum() {
            lo = x2;
            flo = f2;
        } else {
            hi = x2;
            fhi = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
    }
    let _ = (f0, fhi);
    Ok(if f1.abs() <= flo.abs() { x1 } else { 0.5 * (lo + hi) })
}
