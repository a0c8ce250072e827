//! Positive zeros of `J_ν` and a safeguarded Newton root polisher.

use std::f64::consts::{FRAC_PI_2, PI};

use super::bessel::{jq, jq_prime, BesselOrder};
use crate::error::{Error, Result};

/// McMahon's large-zero expansion for the `n`-th positive zero of `J_ν`.
pub fn mcmahon_estimate(order: BesselOrder, n: usize) -> f64 {
    let nu = order.nu();
    let mu = 4.0 * nu * nu;
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

/// The `n`-th (1-based) positive zero of `J_ν`.
pub fn bessel_j_zero(order: BesselOrder, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    let est = mcmahon_estimate(order, n);
    let lo = (est - FRAC_PI_2).max(1e-3 * est.abs().max(1e-3));
    let hi = est + FRAC_PI_2;
    let q = order.quarters();
    polish_root(|x| jq(q, x), |x| jq_prime(q, x), lo, hi)
        .map_err(|e| match e {
            Error::Bracket { lo, hi, .. } => Error::Bracket {
                lo,
                hi,
                context: format!("zero {n} of J_{}", order.nu()),
            },
            other => other,
        })
}

/// Safeguarded Newton iteration inside a sign-change bracket `[lo, hi]`.
///
/// Terminates once `|f(x)| <= 1e-13 * max(1, |f'(x)|)` or the bracket has
/// shrunk to a few ulps.
pub(crate) fn polish_root(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            context: format!("f(lo) = {fa:.3e}, f(hi) = {fb:.3e}"),
        });
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        let dfx = df(x);
        if fx == 0.0 || fx.abs() <= 1e-13 * dfx.abs().max(1.0) {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
