//! Parabolic cylinder function `D_{1/2}(z)` for complex `z`.
//!
//! Three regimes:
//! * `|z| <= SERIES_RADIUS`: Kummer (confluent hypergeometric) series.
//! * `|z| >= ASYMPTOTIC_RADIUS`: large-`|z|` expansion with the Stokes
//!   term switched on for `|arg z| > pi/2`.
//! * in between: Taylor continuation of Weber's equation
//!   `w'' = (z^2/4 - 1) w` outward along the ray through `z`, started from
//!   the series. Along the rays `arg z = ±pi/4, ±3pi/4` both solutions are
//!   oscillatory, so the continuation is well conditioned there; elsewhere
//!   the conditioning loss is estimated and reported.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::gamma;
use crate::error::{Error, Result};

pub const SERIES_RADIUS: f64 = 3.5;
pub const ASYMPTOTIC_RADIUS: f64 = 9.0;
pub const PCF_TOLERANCE: f64 = 1e-9;

const TAYLOR_STEP: f64 = 0.5;

/// `D_{1/2}(0) = 2^{1/4} sqrt(pi) / Gamma(1/4)`.
fn d0() -> f64 {
    2f64.powf(0.25) * PI.sqrt() / gamma(0.25)
}

/// `D_{1/2}'(0) = -2^{3/4} sqrt(pi) / Gamma(-1/4)`.
fn d0_prime() -> f64 {
    -(2f64.powf(0.75)) * PI.sqrt() / gamma(-0.25)
}

/// `D_{1/2}(z)`, with relative error at most `PCF_TOLERANCE` or an
/// accuracy error carrying the achieved estimate.
pub fn parabolic_cylinder_d_half(z: Complex64) -> Result<Complex64> {
    let (v, err) = d_half_with_error(z);
    if err <= PCF_TOLERANCE {
        Ok(v)
    } else {
        Err(Error::accuracy(
            format!("D_1/2({z}) outside the resolved regimes"),
            err,
        ))
    }
}

/// Value and relative error estimate, without failing.
pub fn d_half_with_error(z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    if r <= SERIES_RADIUS {
        let (v, _, err) = series(z);
        (v, err)
    } else if r >= ASYMPTOTIC_RADIUS {
        asymptotic(z)
    } else {
        continuation(z)
    }
}

/// Kummer-series evaluation: `(D, D', relative error estimate)`.
pub fn series(z: Complex64) -> (Complex64, Complex64, f64) {
    let w = z * z * 0.5;
    let (m1, dm1, mag1) = kummer(-0.25, 0.5, w);
    let (m2, dm2, mag2) = kummer(0.25, 1.5, w);
    let e = (-z * z * 0.25).exp();
    let (u0, u1) = (d0(), d0_prime());
    let bracket = m1 * u0 + z * m2 * u1;
    let value = e * bracket;
    let deriv = -z * 0.5 * value + e * (z * dm1 * u0 + m2 * u1 + z * z * dm2 * u1);
    let scale = e.norm() * (u0 * mag1 + u1 * z.norm() * mag2);
    let err = 4.0 * f64::EPSILON * scale / value.norm().max(f64::MIN_POSITIVE);
    (value, deriv, err.max(f64::EPSILON))
}

/// `M(a, b, w)`, `M'(a, b, w)` and the sum of term magnitudes.
fn kummer(a: f64, b: f64, w: Complex64) -> (Complex64, Complex64, f64) {
    let mut coeff = 1.0f64; // (a)_k / ((b)_k k!)
    let mut wk = Complex64::new(1.0, 0.0); // w^k
    let mut wkm1 = Complex64::new(0.0, 0.0); // w^(k-1)
    let mut sum = Complex64::new(1.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut mag = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        coeff *= (a + kf - 1.0) / ((b + kf - 1.0) * kf);
        wkm1 = wk;
        wk *= w;
        let term = wk * coeff;
        sum += term;
        dsum += wkm1 * (coeff * kf);
        mag += term.norm();
        if term.norm() < 1e-18 * mag && kf > w.norm() {
            break;
        }
    }
    let _ = wkm1;
    (sum, dsum, mag)
}

fn continuation(z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    let dir = z / r;
    let z0 = dir * SERIES_RADIUS;
    let (mut w, mut dw, err0) = series(z0);
    let start_mag = w.norm();
    let steps = ((r - SERIES_RADIUS) / TAYLOR_STEP).ceil().max(1.0) as usize;
    let h = (z - z0) / steps as f64;
    let mut c = z0;
    for _ in 0..steps {
        let (nw, ndw) = taylor_step(c, w, dw, h);
        w = nw;
        dw = ndw;
        c += h;
    }
    // Worst-case growth of the other solution along the path relative to
    // the magnitude actually reached.
    let growth = ((z * z - z0 * z0).re.abs() * 0.25).exp();
    let err = (err0 + 1e-15) * start_mag * growth / w.norm().max(f64::MIN_POSITIVE);
    (w, err)
}

/// One Taylor step of `w'' = (z^2/4 - 1) w` from `c` to `c + h`.
fn taylor_step(c: Complex64, w0: Complex64, w1: Complex64, h: Complex64) -> (Complex64, Complex64) {
    let quarter = 0.25;
    let alpha = c * c * quarter - 1.0;
    let beta = c * 0.5;
    let mut t: Vec<Complex64> = Vec::with_capacity(80);
    t.push(w0);
    t.push(w1);
    let mut value = w0 + w1 * h;
    let mut deriv = w1;
    let mut hk = h; // h^(k-1) for the derivative, h^k for the value below
    let scale = w0.norm() + w1.norm() * h.norm();
    for k in 0..78usize {
        let mut rhs = alpha * t[k];
        if k >= 1 {
            rhs += beta * t[k - 1];
        }
        if k >= 2 {
            rhs += t[k - 2] * quarter;
        }
        let next = rhs / (((k + 2) * (k + 1)) as f64);
        t.push(next);
        // term index m = k + 2
        let m = (k + 2) as f64;
        let hm1 = hk; // h^(m-1)
        hk *= h;
        let term = next * hk;
        value += term;
        deriv += next * hm1 * m;
        if k > 6 && term.norm() < 1e-18 * scale && (next * hm1).norm() < 1e-18 * scale {
            break;
        }
    }
    (value, deriv)
}

/// Large-`|z|` expansion: `(value, relative error estimate)`.
pub fn asymptotic(z: Complex64) -> (Complex64, f64) {
    let inv = (z * z * 2.0).inv(); // 1 / (2 z^2)
    // S1 = sum (-1)^s (-1/2)_{2s} / (s! (2z^2)^s)
    // S2 = sum (3/2)_{2s} / (s! (2z^2)^s)
    let (s1, e1) = asymptotic_sum(-0.5, -1.0, inv);
    let main = z.sqrt() * (-z * z * 0.25).exp() * s1;
    let arg = z.arg();
    if arg.abs() <= 0.5 * PI {
        return (main, e1);
    }
    let (s2, e2) = asymptotic_sum(1.5, 1.0, inv);
    let sign = if arg > 0.0 { 1.0 } else { -1.0 };
    let stokes = Complex64::new(0.0, sign / 2f64.sqrt()) * (z * z * 0.25).exp() * z.powf(-1.5) * s2;
    let value = main + stokes;
    let err = (e1 * main.norm() + e2 * stokes.norm()) / value.norm().max(f64::MIN_POSITIVE);
    (value, err)
}

/// `sum_s sign^s (c)_{2s} / (s! (2z^2)^s)` truncated at the smallest term.
fn asymptotic_sum(c: f64, sign: f64, inv: Complex64) -> (Complex64, f64) {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    let mut s = 0usize;
    loop {
        let sf = s as f64;
        let poch = (c + 2.0 * sf) * (c + 2.0 * sf + 1.0);
        let next = term * inv * (sign * poch / (sf + 1.0));
        let n = next.norm();
        if n >= last || s > 200 {
            return (sum, last);
        }
        if n < 1e-17 {
            return (sum + next, n);
        }
        last = n;
        term = next;
        sum += term;
        s += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn value_at_origin() {
        // Γ(1/4) from its tabulated value, not from the crate's gamma.
        let expected = 2f64.powf(0.25) * PI.sqrt() / 3.625_609_908_221_908_3;
        let v = parabolic_cylinder_d_half(c(0.0, 0.0)).unwrap();
        assert!((v.re - expected).abs() < 1e-14 && v.im == 0.0);
    }

    // Reference values from mpmath.pcfd(0.5, z) at 30 significant digits.
    #[test]
    fn reference_values() {
        let e = |th: f64, r: f64| Complex64::from_polar(r, th * PI);
        let cases = [
            (c(1.0, 0.0), c(0.842_203_244_069_839_57, 0.0)),
            (c(-2.0, 0.0), c(-0.904_955_662_554_181_12, 0.0)),
            (c(5.0, 0.0), c(0.004_337_473_181_414_583_5, 0.0)),
            (c(-10.0, 0.0), c(-1_641_533_270.706_464_1, 0.0)),
            (c(3.0, 4.0), c(9.473_964_460_022_508_1, 8.684_373_518_094_974_1)),
            (e(0.25, 6.0), c(-1.681_949_495_730_506_6, -1.781_065_306_918_743_7)),
            (e(1.25, 6.0), c(-1.785_061_658_285_670_9, 1.634_205_422_055_539_6)),
            (e(1.25, 15.0), c(2.466_684_889_808_619_2, -2.972_903_618_937_998_8)),
        ];
        for (z, want) in cases {
            let got = parabolic_cylinder_d_half(z).unwrap();
            assert!(rel(got, want) < 1e-9, "z={z} got={got} want={want}");
        }
    }

    #[test]
    fn schwarz_reflection() {
        for &(r, th) in &[(0.5, 0.3), (2.0, FRAC_PI_4), (5.0, 3.0 * FRAC_PI_4), (12.0, FRAC_PI_4), (20.0, 5.0 * FRAC_PI_4)] {
            let z = Complex64::from_polar(r, th);
            let a = parabolic_cylinder_d_half(z).unwrap().conj();
            let b = parabolic_cylinder_d_half(z.conj()).unwrap();
            assert!(rel(a, b) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn regimes_agree_on_rays() {
        for th in [FRAC_PI_4, 3.0 * FRAC_PI_4, -FRAC_PI_4, -3.0 * FRAC_PI_4] {
            // series and continuation at the same point just outside the series radius
            let z = Complex64::from_polar(SERIES_RADIUS + 0.5, th);
            let (s, _, es) = series(z);
            let (k, ek) = continuation(z);
            assert!(es < 1e-12 && ek < 1e-12);
            assert!(rel(s, k) < 1e-11, "th={th}");
            // continuation and asymptotic past the asymptotic radius
            for r in [9.0, 10.0, 12.0] {
                let z = Complex64::from_polar(r, th);
                let (a, ea) = asymptotic(z);
                let (b, eb) = continuation(z);
                assert!(ea < 1e-10 && eb < 1e-10);
                assert!(rel(a, b) < 1e-9, "th={th} r={r} a={a} b={b}");
            }
        }
    }

    #[test]
    fn unresolved_region_reports_accuracy() {
        // positive real axis, between series and asymptotic radii
        let err = parabolic_cylinder_d_half(c(7.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn satisfies_weber_equation_on_ray() {
        let th = FRAC_PI_4;
        let h = 1e-3;
        for r in [1.0, 4.0, 6.0, 11.0] {
            let z = Complex64::from_polar(r, th);
            let dz = Complex64::from_polar(h, th);
            let f = |z: Complex64| parabolic_cylinder_d_half(z).unwrap();
            let d2 = (f(z + dz) - f(z) * 2.0 + f(z - dz)) / (dz * dz);
            let resid = d2 - (z * z * 0.25 - 1.0) * f(z);
            assert!(resid.norm() < 1e-4 * (z * z * 0.25 - 1.0).norm() * f(z).norm(), "r={r}");
        }
    }
}
