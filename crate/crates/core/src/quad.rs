//! Gauss-Legendre panel rules and an adaptive bisection integrator.

use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be accumulated by the integrators.
pub trait Accum: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Accum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accum for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

fn build(order: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"))
        .as_node_weight_pairs()
        .to_vec()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`; orders 4, 6, 8, 10, 16,
/// 32 are cached.
pub fn gauss_legendre(order: usize) -> &'static [(f64, f64)] {
    static CACHE: [OnceLock<Vec<(f64, f64)>>; 6] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match order {
        4 => 0,
        6 => 1,
        8 => 2,
        10 => 3,
        16 => 4,
        32 => 5,
        _ => panic!("uncached Gauss-Legendre order {order}"),
    };
    CACHE[slot].get_or_init(|| build(order))
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes.
pub fn panel_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre(order);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in base {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Integrate over equal panels.
pub fn panels<T: Accum>(a: f64, b: f64, n_panels: usize, order: usize, mut f: impl FnMut(f64) -> T) -> T {
    let base = gauss_legendre(order);
    let n_panels = n_panels.max(1);
    let h = (b - a) / n_panels as f64;
    let mut acc = T::zero();
    for p in 0..n_panels {
        let mid = a + h * (p as f64 + 0.5);
        let mut s = T::zero();
        for &(x, w) in base {
            s = s + f(mid + 0.5 * h * x) * w;
        }
        acc = acc + s * (0.5 * h);
    }
    acc
}

fn gl_on<T: Accum>(a: f64, b: f64, order: usize, f: &mut impl FnMut(f64) -> T) -> T {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = T::zero();
    for &(x, w) in gauss_legendre(order) {
        s = s + f(mid + half * x) * w;
    }
    s * half
}

/// Adaptive bisection with a 10-point/2x10-point comparison per interval.
/// Returns `(integral, error estimate)`; fails with an accuracy error if the
/// absolute tolerance is not met within `max_depth` levels.
pub fn adaptive<T: Accum>(
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: usize,
    mut f: impl FnMut(f64) -> T,
) -> Result<(T, f64)> {
    let whole = gl_on(a, b, 10, &mut f);
    let (v, e, ok) = recurse(a, b, whole, abs_tol, max_depth, &mut f);
    if ok {
        Ok((v, e))
    } else {
        Err(Error::accuracy(
            format!("adaptive quadrature on [{a}, {b}] did not converge"),
            e,
        ))
    }
}

fn recurse<T: Accum>(
    a: f64,
    b: f64,
    whole: T,
    tol: f64,
    depth: usize,
    f: &mut impl FnMut(f64) -> T,
) -> (T, f64, bool) {
    let m = 0.5 * (a + b);
    let left = gl_on(a, m, 10, f);
    let right = gl_on(m, b, 10, f);
    let both = left + right;
    let err = (both - whole).magnitude();
    if err <= tol || (b - a) <= 1e-14 * (a.abs() + b.abs()) {
        return (both, err, true);
    }
    if depth == 0 {
        return (both, err, false);
    }
    let (l, el, okl) = recurse(a, m, left, 0.5 * tol, depth - 1, f);
    let (r, er, okr) = recurse(m, b, right, 0.5 * tol, depth - 1, f);
    (l + r, el + er, okl && okr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v: f64 = panels(0.0, 2.0, 3, 4, |x| x.powi(7));
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_kink() {
        let (v, _) = adaptive(-1.0, 2.0, 1e-12, 40, |x: f64| x.abs()).unwrap();
        assert!((v - 2.5).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = adaptive(0.0, 1.0, 1e-14, 2, |x: f64| (200.0 * x).sin());
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn complex_oscillatory() {
        let k = 50.0;
        let v: Complex64 = panels(0.0, 1.0, 64, 8, |x| Complex64::from_polar(1.0, k * x));
        let exact = (Complex64::from_polar(1.0, k) - 1.0) / Complex64::new(0.0, k);
        assert!((v - exact).norm() < 1e-13);
    }
}
