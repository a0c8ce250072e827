//! Bessel functions of the first kind for the quarter-integer orders the
//! time-of-arrival eigenfunctions are built from.
//!
//! Below the crossover the ascending series is summed in double-double
//! arithmetic (its terms reach `e^x` before cancelling); above it the
//! Hankel large-argument expansion is used.

use std::f64::consts::PI;

use super::dd::Dd;
use super::gamma::gamma;
use crate::error::{Error, Result};

/// The five orders that appear in the confined eigenfunctions and their
/// secular equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    MinusThreeQuarters,
    MinusQuarter,
    Quarter,
    ThreeQuarters,
    FiveQuarters,
}

impl BesselOrder {
    pub const ALL: [BesselOrder; 5] = [
        BesselOrder::MinusThreeQuarters,
        BesselOrder::MinusQuarter,
        BesselOrder::Quarter,
        BesselOrder::ThreeQuarters,
        BesselOrder::FiveQuarters,
    ];

    pub fn new(nu: f64) -> Result<Self> {
        let q = nu * 4.0;
        if q != q.round() {
            return Err(Error::Construction(format!("unsupported Bessel order {nu}")));
        }
        Self::from_quarters(q as i32)
            .ok_or_else(|| Error::Construction(format!("unsupported Bessel order {nu}")))
    }

    fn from_quarters(q: i32) -> Option<Self> {
        match q {
            -3 => Some(BesselOrder::MinusThreeQuarters),
            -1 => Some(BesselOrder::MinusQuarter),
            1 => Some(BesselOrder::Quarter),
            3 => Some(BesselOrder::ThreeQuarters),
            5 => Some(BesselOrder::FiveQuarters),
            _ => None,
        }
    }

    /// Order as a multiple of 1/4.
    pub fn quarters(self) -> i32 {
        match self {
            BesselOrder::MinusThreeQuarters => -3,
            BesselOrder::MinusQuarter => -1,
            BesselOrder::Quarter => 1,
            BesselOrder::ThreeQuarters => 3,
            BesselOrder::FiveQuarters => 5,
        }
    }

    pub fn nu(self) -> f64 {
        self.quarters() as f64 / 4.0
    }
}

/// Series/asymptotic switch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRegime {
    crossover: f64,
}

pub const DEFAULT_CROSSOVER: f64 = 25.0;

impl EvalRegime {
    pub fn new(crossover: f64) -> Result<Self> {
        if !(crossover > 0.0) {
            return Err(Error::Construction(format!(
                "crossover must be positive, got {crossover}"
            )));
        }
        Ok(EvalRegime { crossover })
    }

    pub fn crossover(&self) -> f64 {
        self.crossover
    }
}

impl Default for EvalRegime {
    fn default() -> Self {
        EvalRegime {
            crossover: DEFAULT_CROSSOVER,
        }
    }
}

fn check_arg(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Bessel argument must be positive and finite, got {x}"
        )))
    }
}

/// `J_ν(x)` for `x > 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(jq(order.quarters(), x))
}

/// `J_ν(x)` with an explicit series/asymptotic crossover.
pub fn bessel_j_with(order: BesselOrder, x: f64, regime: EvalRegime) -> Result<f64> {
    check_arg(x)?;
    let q = order.quarters();
    Ok(if x <= regime.crossover {
        series(q, x)
    } else {
        asymptotic(q, x).0
    })
}

/// Ascending-series evaluation regardless of the argument size.
pub fn bessel_j_series(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(series(order.quarters(), x))
}

/// Hankel asymptotic evaluation, with the magnitude of the first omitted
/// term (relative to `sqrt(2/(pi x))`) as an error estimate.
pub fn bessel_j_asymptotic(order: BesselOrder, x: f64) -> Result<(f64, f64)> {
    check_arg(x)?;
    Ok(asymptotic(order.quarters(), x))
}

/// `J_ν'(x) = (J_{ν-1}(x) - J_{ν+1}(x)) / 2`, neighbours evaluated directly.
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(jq_prime(order.quarters(), x))
}

pub(crate) fn jq_prime(q: i32, x: f64) -> f64 {
    0.5 * (jq(q - 4, x) - jq(q + 4, x))
}

/// `J_{q/4}(x)` for any quarter-integer order, `x > 0`.
#[inline]
pub(crate) fn jq(q: i32, x: f64) -> f64 {
    if x <= DEFAULT_CROSSOVER {
        series(q, x)
    } else {
        asymptotic(q, x).0
    }
}

/// Two orders at one argument, sharing the trigonometry.
#[inline]
pub(crate) fn jq_pair(qa: i32, qb: i32, x: f64) -> (f64, f64) {
    if x <= DEFAULT_CROSSOVER {
        (series(qa, x), series(qb, x))
    } else {
        let (s, c) = x.sin_cos();
        (asymptotic_sc(qa, x, s, c).0, asymptotic_sc(qb, x, s, c).0)
    }
}

/// `x^{p/4} J_{q/4}(x)` for `x >= 0`; finite at `x = 0` whenever `p + q >= 0`.
#[inline]
pub(crate) fn xj(p: i32, q: i32, x: f64) -> f64 {
    if x == 0.0 {
        return if p + q == 0 {
            let nu = q as f64 / 4.0;
            2f64.powf(-nu) / gamma(nu + 1.0)
        } else {
            0.0
        };
    }
    if x <= DEFAULT_CROSSOVER {
        series_scaled(p, q, x)
    } else {
        x.powf(p as f64 / 4.0) * asymptotic(q, x).0
    }
}

/// `x^{p/4} J_{q/4}(x)` for two orders sharing the same power and argument.
#[inline]
pub(crate) fn xj_pair(p: i32, qa: i32, qb: i32, x: f64) -> (f64, f64) {
    if x == 0.0 || x <= DEFAULT_CROSSOVER {
        (xj(p, qa, x), xj(p, qb, x))
    } else {
        let (a, b) = jq_pair(qa, qb, x);
        let s = x.powf(p as f64 / 4.0);
        (s * a, s * b)
    }
}

pub(crate) fn series(q: i32, x: f64) -> f64 {
    series_scaled(0, q, x)
}

fn series_scaled(p: i32, q: i32, x: f64) -> f64 {
    let nu = q as f64 / 4.0;
    let prefactor = 2f64.powf(-nu) * x.powf(nu + p as f64 / 4.0) / gamma(nu + 1.0);
    let y = -Dd::square_of(x).scale(0.25);
    let mut term = Dd::from_f64(1.0);
    let mut sum = Dd::from_f64(1.0);
    let mut max_term = 1.0f64;
    let mut k = 0usize;
    loop {
        let kk = (k + 1) as f64;
        term = (term * y).div_f64(kk * (kk + nu));
        sum = sum + term;
        max_term = max_term.max(term.abs_hi());
        k += 1;
        if term.abs_hi() < 1e-33 * max_term && (k as f64) > 0.5 * x {
            break;
        }
        if k > 2000 {
            break;
        }
    }
    prefactor * sum.to_f64()
}

/// Returns `(value, error_estimate)`.
pub(crate) fn asymptotic(q: i32, x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    asymptotic_sc(q, x, s, c)
}

fn asymptotic_sc(q: i32, x: f64, sin_x: f64, cos_x: f64) -> (f64, f64) {
    let mu = (q * q) as f64 / 4.0; // 4 nu^2
    let mut p = 1.0;
    let mut qq = 0.0;
    let mut term = 1.0f64;
    let mut k = 1usize;
    let estimate = loop {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next == 0.0 {
            break 0.0;
        }
        if k > 1 && next.abs() > term.abs() {
            // diverging: stop at the smallest term
            break term.abs();
        }
        term = next;
        // k-th term: sign pattern (+P, +Q, -P, -Q, ...)
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            qq += sign * term;
        }
        if term.abs() < 1e-17 || k > 200 {
            break term.abs();
        }
        k += 1;
    };
    let phi = (q as f64 / 8.0 + 0.25) * PI;
    let (sp, cp) = phi.sin_cos();
    let cos_chi = cos_x * cp + sin_x * sp;
    let sin_chi = sin_x * cp - cos_x * sp;
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * cos_chi - qq * sin_chi), estimate)
}
