//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Power series below [`SERIES_LIMIT`], Hankel asymptotic expansion above.
//! At the switchover the series has lost about four digits to cancellation
//! and the asymptotic expansion has not yet hit its divergence floor, so
//! both branches sit well inside 1e-10 of each other.

use crate::error::{FtnError, Result};
use std::f64::consts::PI;

/// Arguments with `|x|` below this use the power series.
pub const SERIES_LIMIT: f64 = 14.0;

/// J0(x).
pub fn bessel_j0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(j0_unchecked(x))
}

/// J1(x), odd in `x`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check(x)?;
    Ok(j1_unchecked(x))
}

fn check(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(FtnError::NonFinite {
            context: "bessel argument",
            at: x,
        })
    }
}

/// J0 without the finiteness check; hot loops call this directly.
pub(crate) fn j0_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        j0_series(ax)
    } else {
        hankel(0.0, ax)
    }
}

pub(crate) fn j1_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        j1_series(ax)
    } else {
        hankel(1.0, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub(crate) fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 && k > 0.5 * x {
            break;
        }
        k += 1.0;
    }
    sum
}

pub(crate) fn j1_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-18 && k > 0.5 * x {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Hankel expansion J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), truncated
/// at the smallest term.
pub(crate) fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        let mag = a.abs();
        if mag > last || mag < 1e-18 {
            break;
        }
        last = mag;
        // k odd feeds Q, k even feeds P; signs alternate within each series.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
