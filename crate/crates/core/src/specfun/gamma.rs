//! Real gamma function (Lanczos approximation, g = 7, nine terms).

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real `x`; poles at non-positive integers return NaN.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference constants (Abramowitz & Stegun / DLMF tables).
    const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;
    const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_6;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn quarter_integers() {
        assert!(rel(gamma(0.25), GAMMA_QUARTER) < 1e-13);
        assert!(rel(gamma(0.75), GAMMA_THREE_QUARTERS) < 1e-13);
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-13);
        // Γ(-1/4) = -4 Γ(3/4)
        assert!(rel(gamma(-0.25), -4.0 * GAMMA_THREE_QUARTERS) < 1e-13);
        assert!(rel(gamma(1.25), 0.25 * GAMMA_QUARTER) < 1e-13);
    }

    #[test]
    fn factorials() {
        let mut f = 1.0;
        for n in 1..20 {
            assert!(rel(gamma(n as f64), f) < 1e-13, "n = {n}");
            f *= n as f64;
        }
    }

    #[test]
    fn poles() {
        assert!(gamma(0.0).is_nan());
        assert!(gamma(-3.0).is_nan());
    }
}
