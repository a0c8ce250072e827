//! Analytic spectrum of the periodic (`gamma = 0`) confined time-of-arrival
//! operator: secular roots, eigenvalues, normalized eigenfunctions.
//!
//! Odd eigenfunctions are `A_n q f^±(s_n q²/l²)` with
//! `f^±(ξ) = e^{∓iξ} ξ^{1/4} [J_{-1/4}(ξ) ∓ i J_{3/4}(ξ)]` and `s_n` the
//! positive zeros of `J_{-1/4}`. Even eigenfunctions are
//! `B_n g^±(r_n q²/l²)` with
//! `g^±(ξ) = e^{∓iξ} ξ^{3/4} [J_{-3/4}(ξ) ∓ i J_{1/4}(ξ)] + e^{∓i r_n} J_{1/4}(r_n) / r_n^{1/4}`
//! and `r_n` the positive roots of `J_{-3/4}(r) + (2/3) J_{5/4}(r) + J_{1/4}(r)/r`.
//! The eigenvalues are `τ_n^± = ± μ l² / (4 ρ_n ħ)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{bessel_j_zero, jq, jq_prime, polish_root, xj_pair, BesselOrder};

/// Physical setup: box `[-l, l]`, mass, reduced Planck constant, boundary phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConfig {
    pub l: f64,
    pub mu: f64,
    pub hbar: f64,
    pub gamma: f64,
}

impl BoxConfig {
    pub fn new(l: f64, mu: f64, hbar: f64, gamma: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("half-length must be positive, got {l}")));
        }
        if !(mu > 0.0) || !(hbar > 0.0) {
            return Err(Error::Domain(format!(
                "mass and hbar must be positive, got mu={mu} hbar={hbar}"
            )));
        }
        if !(gamma.abs() <= 0.5 * PI) {
            return Err(Error::Domain(format!("|gamma| must be <= pi/2, got {gamma}")));
        }
        Ok(BoxConfig { l, mu, hbar, gamma })
    }

    /// Periodic box in atomic units (`mu = hbar = 1`, `gamma = 0`).
    pub fn periodic(l: f64) -> Result<Self> {
        Self::new(l, 1.0, 1.0, 0.0)
    }

    pub fn with_units(l: f64, mu: f64, hbar: f64) -> Result<Self> {
        Self::new(l, mu, hbar, 0.0)
    }

    /// `tau = mu l^2 / (4 rho hbar)` for a positive root `rho`.
    pub fn tau_of_rho(&self, rho: f64) -> f64 {
        self.mu * self.l * self.l / (4.0 * rho * self.hbar)
    }

    pub fn rho_of_tau(&self, tau: f64) -> f64 {
        self.mu * self.l * self.l / (4.0 * tau.abs() * self.hbar)
    }

    /// Asymptotic spacing between neighbouring eigenvalues of one parity
    /// near `tau`: `4 pi hbar tau^2 / (mu l^2)`.
    pub fn asymptotic_spacing(&self, tau: f64) -> f64 {
        4.0 * PI * self.hbar * tau * tau / (self.mu * self.l * self.l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Sign of the eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// One confined eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenRecord {
    pub parity: Parity,
    /// 1-based index in increasing `rho`.
    pub n: usize,
    pub rho: f64,
    pub tau: f64,
    pub norm_const: f64,
    pub branch: Branch,
}

/// First `count` positive zeros of `J_{-1/4}`.
pub fn odd_roots(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("root count must be at least 1".into()));
    }
    (1..=count)
        .map(|n| bessel_j_zero(BesselOrder::MinusQuarter, n))
        .collect()
}

/// Left-hand side of the even secular equation.
pub fn even_secular(r: f64) -> f64 {
    jq(-3, r) + (2.0 / 3.0) * jq(5, r) + jq(1, r) / r
}

fn even_secular_prime(r: f64) -> f64 {
    jq_prime(-3, r) + (2.0 / 3.0) * jq_prime(5, r) + jq_prime(1, r) / r - jq(1, r) / (r * r)
}

/// First `count` positive roots of the even secular equation, from a sign
/// scan on a `pi/8` grid polished by safeguarded Newton.
pub fn even_roots(count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("root count must be at least 1".into()));
    }
    let mut step = PI / 8.0;
    for _ in 0..4 {
        let roots = scan_even(count, step)?;
        let ambiguous = roots.windows(2).any(|w| w[1] - w[0] < 2.0 * step);
        if !ambiguous {
            return Ok(roots);
        }
        step *= 0.5;
    }
    Err(Error::accuracy(
        "even secular roots closer than the refined scan grid",
        step,
    ))
}

fn scan_even(count: usize, step: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::with_capacity(count);
    let mut a = 0.5 * step;
    let mut fa = even_secular(a);
    while roots.len() < count {
        let b = a + step;
        let fb = even_secular(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() {
            roots.push(polish_root(even_secular, even_secular_prime, a, b)?);
        }
        a = b;
        fa = fb;
    }
    Ok(roots)
}

/// Secular roots for one parity.
pub fn roots(parity: Parity, count: usize) -> Result<Vec<f64>> {
    match parity {
        Parity::Odd => odd_roots(count),
        Parity::Even => even_roots(count),
    }
}

fn require_periodic(bx: &BoxConfig) -> Result<()> {
    if bx.gamma != 0.0 {
        return Err(Error::Unsupported(
            "analytic spectrum exists only for gamma = 0; use the Nystrom oracle".into(),
        ));
    }
    Ok(())
}

/// Records for the first `count` roots of one parity, both branches.
pub fn eigenvalues(bx: &BoxConfig, parity: Parity, count: usize) -> Result<Vec<EigenRecord>> {
    require_periodic(bx)?;
    let rhos = roots(parity, count)?;
    records_from_roots(bx, parity, &rhos)
}

/// Records built from precomputed roots (the roots do not depend on `l`).
pub fn records_from_roots(bx: &BoxConfig, parity: Parity, rhos: &[f64]) -> Result<Vec<EigenRecord>> {
    require_periodic(bx)?;
    let mut out = Vec::with_capacity(2 * rhos.len());
    for (i, &rho) in rhos.iter().enumerate() {
        let norm_const = normalization(parity, rho, bx)?;
        let tau = bx.tau_of_rho(rho);
        for branch in [Branch::Plus, Branch::Minus] {
            out.push(EigenRecord {
                parity,
                n: i + 1,
                rho,
                tau: branch.sign() * tau,
                norm_const,
                branch,
            });
        }
    }
    Ok(out)
}

/// Closed-form normalization constant (`A_n` or `B_n`, real positive).
///
/// Odd: `A_n^2 = 1 / (l^3 J_{3/4}(s_n)^2 sqrt(s_n))`.
/// Even: the Lommel integral `∫ x J_ν(x)^2 dx = x²/2 (J_ν² - J_{ν-1} J_{ν+1})`
/// together with `d/dξ [cos(r-ξ) ξ^{1/4} J_{1/4}(ξ)]` for the cross term
/// gives `∫_{-l}^{l} |g|² dq = (l/√r) I(r)` with
/// `I(r) = r²/2 (J_{-3/4}² + J_{1/4}² - J_{-7/4} J_{1/4} - J_{-3/4} J_{5/4}) + 4 J_{1/4}²`.
pub fn normalization(parity: Parity, rho: f64, bx: &BoxConfig) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("root must be positive, got {rho}")));
    }
    let l = bx.l;
    let squared_norm = match parity {
        Parity::Odd => {
            let j = jq(3, rho);
            l.powi(3) * j * j * rho.sqrt()
        }
        Parity::Even => {
            let (jm3, j1, jm7, j5) = (jq(-3, rho), jq(1, rho), jq(-7, rho), jq(5, rho));
            let i = 0.5 * rho * rho * (jm3 * jm3 + j1 * j1 - jm7 * j1 - jm3 * j5) + 4.0 * j1 * j1;
            l / rho.sqrt() * i
        }
    };
    Ok(1.0 / squared_norm.sqrt())
}

/// Normalization constant by adaptive quadrature of `|profile|²` over
/// `[-l, l]`, relative tolerance `1e-11`.
pub fn normalization_by_quadrature(parity: Parity, rho: f64, bx: &BoxConfig) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("root must be positive, got {rho}")));
    }
    let l = bx.l;
    let density = |q: f64| {
        let (p, _) = profile(parity, rho, rho * q * q / (l * l));
        let amp = match parity {
            Parity::Odd => q * p.norm(),
            Parity::Even => p.norm(),
        };
        amp * amp
    };
    // scale estimate from a coarse pass, then adaptive refinement
    let panels = 16 + (rho / PI).ceil() as usize * 4;
    let rough: f64 = quad::panels(0.0, l, panels, 8, density);
    let (half, _) = quad::adaptive(0.0, l, 1e-12 * rough, 30, density)?;
    Ok(1.0 / (2.0 * half).sqrt())
}

/// Unnormalized profile `(f^+, f^-)` or `(g^+, g^-)` at `ξ = rho q²/l²`.
#[inline]
pub(crate) fn profile(parity: Parity, rho: f64, xi: f64) -> (Complex64, Complex64) {
    let (s, c) = xi.sin_cos();
    match parity {
        Parity::Odd => {
            // ξ^{1/4} J_{-1/4}, ξ^{1/4} J_{3/4}
            let (a, b) = xj_pair(1, -1, 3, xi);
            profile_combine(a, b, s, c, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        }
        Parity::Even => {
            // ξ^{3/4} J_{-3/4}, ξ^{3/4} J_{1/4}
            let (a, b) = xj_pair(3, -3, 1, xi);
            let k = jq(1, rho) / rho.powf(0.25);
            let (sr, cr) = rho.sin_cos();
            let plus = Complex64::new(cr, -sr) * k;
            let minus = Complex64::new(cr, sr) * k;
            profile_combine(a, b, s, c, plus, minus)
        }
    }
}

#[inline]
fn profile_combine(a: f64, b: f64, s: f64, c: f64, add_plus: Complex64, add_minus: Complex64) -> (Complex64, Complex64) {
    // e^{-iξ}(a - i b) and e^{iξ}(a + i b)
    let plus = Complex64::new(c * a - s * b, -(s * a + c * b));
    let minus = plus.conj();
    (plus + add_plus, minus + add_minus)
}

/// Evaluate a normalized eigenfunction at `q`, `|q| <= l`.
pub fn eigenfunction(record: &EigenRecord, bx: &BoxConfig, q: f64) -> Result<Complex64> {
    if q.abs() > bx.l * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|q| = {} exceeds l = {}", q.abs(), bx.l)));
    }
    Ok(eval(record, bx, q))
}

#[inline]
pub(crate) fn eval(record: &EigenRecord, bx: &BoxConfig, q: f64) -> Complex64 {
    let xi = record.rho * q * q / (bx.l * bx.l);
    let (p, m) = profile(record.parity, record.rho, xi);
    let v = match record.branch {
        Branch::Plus => p,
        Branch::Minus => m,
    };
    match record.parity {
        Parity::Odd => v * (record.norm_const * q),
        Parity::Even => v * record.norm_const,
    }
}

/// Spectrum export: `parity,n,sign,rho,tau,norm_const`.
pub fn spectrum_csv(records: &[EigenRecord]) -> String {
    let mut out = String::from("parity,n,sign,rho,tau,norm_const\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{:.17e},{:.17e},{:.17e}\n",
            r.parity, r.n, r.branch, r.rho, r.tau, r.norm_const
        ));
    }
    out
}

/// Measured spacing of the two eigenvalues of `parity` straddling `tau`,
/// with the asymptotic prediction at their midpoint: `(spacing, predicted)`.
pub fn spacing_near(bx: &BoxConfig, parity: Parity, tau: f64) -> Result<(f64, f64)> {
    require_periodic(bx)?;
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("spacing needs tau > 0, got {tau}")));
    }
    let rho = bx.rho_of_tau(tau);
    let rs = roots(parity, (rho / PI) as usize + 5)?;
    let k = rs.iter().position(|&x| x > rho).unwrap_or(rs.len() - 1).max(1);
    let (t1, t2) = (bx.tau_of_rho(rs[k - 1]), bx.tau_of_rho(rs[k]));
    Ok((t1 - t2, bx.asymptotic_spacing(0.5 * (t1 + t2))))
}
