//! Gaussian wavepackets: position and momentum representations, free
//! evolution, truncation to a box, parity parts and inner products.
//!
//! A component is `(2 pi sigma^2)^{-1/4} exp(-(q - x0)^2 / 4 sigma^2 + i p0 q / hbar)`.
//! Momentum convention: `psi~(p) = (2 pi hbar)^{-1/2} ∫ e^{-i p q / hbar} psi(q) dq`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative amplitude below which a packet is treated as zero.
pub const NEGLIGIBLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub mu: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units { mu: 1.0, hbar: 1.0 }
    }
}

impl Units {
    pub fn new(mu: f64, hbar: f64) -> Result<Self> {
        if !(mu > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!("mu and hbar must be positive, got {mu}, {hbar}")));
        }
        Ok(Units { mu, hbar })
    }
}

/// How the width parameter of a [`GaussianSpec`] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    /// Full width at half maximum of `|psi(q)|^2`.
    #[default]
    Fwhm,
    /// Standard deviation of `|psi(q)|^2`.
    StdDev,
}

impl WidthConvention {
    pub fn sigma(self, width: f64) -> f64 {
        match self {
            WidthConvention::Fwhm => width / (2.0 * (2.0 * LN_2).sqrt()),
            WidthConvention::StdDev => width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub x0: f64,
    pub p0: f64,
    pub fwhm: f64,
    #[serde(default = "one")]
    pub weight_re: f64,
    #[serde(default)]
    pub weight_im: f64,
}

fn one() -> f64 {
    1.0
}

impl GaussianSpec {
    pub fn new(x0: f64, p0: f64, fwhm: f64) -> Self {
        GaussianSpec { x0, p0, fwhm, weight_re: 1.0, weight_im: 0.0 }
    }

    pub fn with_weight(mut self, w: Complex64) -> Self {
        self.weight_re = w.re;
        self.weight_im = w.im;
        self
    }

    pub fn weight(&self) -> Complex64 {
        Complex64::new(self.weight_re, self.weight_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Component {
    x0: f64,
    p0: f64,
    sigma: f64,
    weight: Complex64,
}

impl Component {
    /// `(2 sigma^2 / (pi hbar^2))^{1/4}`
    fn k_mom(&self, u: &Units) -> f64 {
        (2.0 * self.sigma * self.sigma / (PI * u.hbar * u.hbar)).powf(0.25)
    }

    fn momentum(&self, p: Complex64, tau: f64, u: &Units) -> Complex64 {
        let s2 = self.sigma * self.sigma / (u.hbar * u.hbar);
        let d = p - self.p0;
        let expo = -s2 * d * d - I * d * (self.x0 / u.hbar) - I * p * p * (tau / (2.0 * u.mu * u.hbar));
        self.weight * self.k_mom(u) * expo.exp()
    }

    /// Value and `d/dq` at time `tau` of free evolution.
    fn position(&self, q: f64, tau: f64, u: &Units) -> (Complex64, Complex64) {
        let h = u.hbar;
        let a = Complex64::new(self.sigma * self.sigma / (h * h), tau / (2.0 * u.mu * h));
        let b = Complex64::new(2.0 * self.sigma * self.sigma * self.p0 / (h * h), (q - self.x0) / h);
        let c = Complex64::new(-(self.sigma * self.p0 / h).powi(2), self.p0 * self.x0 / h);
        let pre = self.weight * self.k_mom(u) / (2.0 * PI * h).sqrt() * (Complex64::from(PI) / a).sqrt();
        let v = pre * (b * b / (4.0 * a) + c).exp();
        (v, v * I * b / (2.0 * a * h))
    }

    fn mirrored(&self) -> Self {
        Component { x0: -self.x0, p0: -self.p0, ..*self }
    }

    /// Position-space center and width of `|psi|^2` at time `tau`.
    fn spread_at(&self, tau: f64, u: &Units) -> (f64, f64) {
        let center = self.x0 + self.p0 * tau / u.mu;
        let r = u.hbar * tau / (2.0 * u.mu * self.sigma * self.sigma);
        (center, self.sigma * (1.0 + r * r).sqrt())
    }
}

/// Unnormalized overlap `<g_i|g_j>` of two unit-weight components.
fn gram(a: &Component, b: &Component, u: &Units) -> Complex64 {
    let (sa, sb) = (a.sigma * a.sigma, b.sigma * b.sigma);
    let aa = 0.25 / sa + 0.25 / sb;
    let bb = Complex64::new(a.x0 / (2.0 * sa) + b.x0 / (2.0 * sb), (b.p0 - a.p0) / u.hbar);
    let cc = -a.x0 * a.x0 / (4.0 * sa) - b.x0 * b.x0 / (4.0 * sb);
    let pre = (2.0 * PI * sa).powf(-0.25) * (2.0 * PI * sb).powf(-0.25) * (PI / aa).sqrt();
    pre * (bb * bb / (4.0 * aa) + cc).exp()
}

/// A finite sum of Gaussians, optionally freely evolved by `time` and
/// optionally truncated to `[-l, l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    comps: Vec<Component>,
    units: Units,
    time: f64,
    truncation: Option<f64>,
    /// Overall factor applied after summing components (1 / norm for a
    /// normalized packet).
    scale: f64,
}

impl WavePacket {
    /// Normalized packet on the full line.
    pub fn new(specs: &[GaussianSpec], convention: WidthConvention, units: Units) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Construction("packet needs at least one component".into()));
        }
        let mut comps = Vec::with_capacity(specs.len());
        for s in specs {
            if !(s.fwhm > 0.0) || !s.x0.is_finite() || !s.p0.is_finite() {
                return Err(Error::Construction(format!("invalid Gaussian {s:?}")));
            }
            comps.push(Component { x0: s.x0, p0: s.p0, sigma: convention.sigma(s.fwhm), weight: s.weight() });
        }
        let mut pk = WavePacket { comps, units, time: 0.0, truncation: None, scale: 1.0 };
        let n2 = pk.analytic_norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::Construction("packet has zero norm".into()));
        }
        pk.scale = 1.0 / n2.sqrt();
        Ok(pk)
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    /// Mean positions and momenta of the components.
    pub fn centers(&self) -> Vec<(f64, f64)> {
        self.comps.iter().map(|c| (c.x0 + c.p0 * self.time / self.units.mu, c.p0)).collect()
    }

    /// Position-space standard deviations of the components at `time`.
    pub fn sigmas(&self) -> Vec<f64> {
        self.comps.iter().map(|c| c.spread_at(self.time, &self.units).1).collect()
    }

    fn analytic_norm_sqr(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.comps {
            for b in &self.comps {
                acc += a.weight.conj() * b.weight * gram(a, b, &self.units);
            }
        }
        acc.re * self.scale * self.scale
    }

    /// Hard cutoff to `[-l, l]` followed by rescaling to the original norm
    /// (so a normalized packet stays normalized).
    pub fn truncated(&self, l: f64) -> Result<Self> {
        if self.time != 0.0 {
            return Err(Error::Unsupported("truncation applies to initial states only".into()));
        }
        if !(l > 0.0) {
            return Err(Error::Domain(format!("half-length must be positive, got {l}")));
        }
        let target = self.norm_sqr()?;
        let mut pk = WavePacket { truncation: Some(l), scale: 1.0, ..self.clone() };
        let n2 = pk.norm_sqr_by_quadrature()?;
        if !(n2 > 0.0) {
            return Err(Error::Domain(format!("packet has no weight inside [-{l}, {l}]")));
        }
        pk.scale = (target / n2).sqrt();
        Ok(pk)
    }

    /// The packet after free evolution for an additional `tau`.
    pub fn evolved(&self, tau: f64) -> Result<Self> {
        if self.is_truncated() {
            return Err(Error::Unsupported(
                "free evolution of a truncated packet; use box dynamics".into(),
            ));
        }
        Ok(WavePacket { time: self.time + tau, ..self.clone() })
    }

    fn with_comps(&self, comps: Vec<Component>) -> Self {
        WavePacket { comps, ..self.clone() }
    }

    /// `(psi(q) + psi(-q)) / 2`, not renormalized.
    pub fn even_part(&self) -> Self {
        self.parity_part(1.0)
    }

    /// `(psi(q) - psi(-q)) / 2`, not renormalized.
    pub fn odd_part(&self) -> Self {
        self.parity_part(-1.0)
    }

    fn parity_part(&self, sign: f64) -> Self {
        let mut comps = Vec::with_capacity(2 * self.comps.len());
        for c in &self.comps {
            comps.push(Component { weight: c.weight * 0.5, ..*c });
            let m = c.mirrored();
            comps.push(Component { weight: m.weight * (0.5 * sign), ..m });
        }
        self.with_comps(comps)
    }

    /// Complex conjugate in position space.
    pub fn conjugated(&self) -> Result<Self> {
        if self.time != 0.0 {
            return Err(Error::Unsupported("conjugation of an evolved packet".into()));
        }
        let comps = self
            .comps
            .iter()
            .map(|c| Component { p0: -c.p0, weight: c.weight.conj(), ..*c })
            .collect();
        Ok(self.with_comps(comps))
    }

    /// `‖psi‖^2` (1 for normalized packets, less for parity parts).
    pub fn norm_sqr(&self) -> Result<f64> {
        if self.is_truncated() {
            self.norm_sqr_by_quadrature()
        } else {
            Ok(self.analytic_norm_sqr())
        }
    }

    fn norm_sqr_by_quadrature(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (a, b) in self.support(NEGLIGIBLE * 1e-3) {
            let panels = self.position_panels(a, b);
            acc += quad::panels(a, b, panels, 16, |q| self.eval_position(q).norm_sqr());
        }
        Ok(acc)
    }

    fn position_panels(&self, a: f64, b: f64) -> usize {
        let sig = self.sigmas().into_iter().fold(f64::INFINITY, f64::min);
        let pmax = self.comps.iter().map(|c| c.p0.abs()).fold(0.0, f64::max) / self.units.hbar;
        let by_width = ((b - a) / sig).ceil();
        let by_phase = ((b - a) * pmax / (2.0 * PI)).ceil() * 2.0;
        (by_width.max(by_phase) as usize).max(4)
    }

    /// Merged position intervals outside which `|psi|` is below
    /// `rel * max|psi|` (clipped to the truncation box).
    pub fn support(&self, rel: f64) -> Vec<(f64, f64)> {
        let r = (2.0 * (1.0 / rel).ln()).sqrt();
        let mut spans: Vec<(f64, f64)> = self
            .comps
            .iter()
            .map(|c| {
                let (m, s) = c.spread_at(self.time, &self.units);
                (m - 2.0 * r * s, m + 2.0 * r * s)
            })
            .collect();
        if let Some(l) = self.truncation {
            spans = spans
                .into_iter()
                .filter_map(|(a, b)| {
                    let (a, b) = (a.max(-l), b.min(l));
                    (a < b).then_some((a, b))
                })
                .collect();
        }
        merge(spans)
    }

    /// Merged momentum intervals outside which `|psi~|` is below
    /// `rel * max|psi~|` (for the untruncated packet).
    pub fn momentum_support(&self, rel: f64) -> Vec<(f64, f64)> {
        let wmax = self.comps.iter().map(|c| c.weight.norm() * c.k_mom(&self.units)).fold(0.0, f64::max);
        let spans = self
            .comps
            .iter()
            .filter_map(|c| {
                let ratio = c.weight.norm() * c.k_mom(&self.units) / (rel * wmax);
                (ratio > 1.0).then(|| {
                    let d = self.units.hbar * ratio.ln().sqrt() / c.sigma;
                    (c.p0 - d, c.p0 + d)
                })
            })
            .collect();
        merge(spans)
    }

    /// `psi(q)` at the packet's time.
    pub fn eval_position(&self, q: f64) -> Complex64 {
        self.eval_with_derivative(q).0
    }

    /// `(psi(q), d psi / dq)`.
    pub fn eval_with_derivative(&self, q: f64) -> (Complex64, Complex64) {
        if let Some(l) = self.truncation {
            if q.abs() > l {
                return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            }
        }
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in &self.comps {
            let (a, b) = c.position(q, self.time, &self.units);
            v += a;
            d += b;
        }
        (v * self.scale, d * self.scale)
    }

    /// `psi~(p)`; analytic for untruncated packets, numerical Fourier
    /// transform over the box otherwise.
    pub fn eval_momentum(&self, p: f64) -> Complex64 {
        match self.truncation {
            None => self.eval_momentum_complex(Complex64::from(p)),
            Some(_) => self.fourier_numeric(p),
        }
    }

    /// Analytic continuation of `psi~` to complex momentum (untruncated
    /// packets; the truncation, if any, is ignored).
    pub fn eval_momentum_complex(&self, p: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for c in &self.comps {
            v += c.momentum(p, self.time, &self.units);
        }
        v * self.scale
    }

    /// `psi~` of the packet freely evolved by a further `dt`, at complex `p`.
    pub(crate) fn momentum_shifted(&self, p: Complex64, dt: f64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for c in &self.comps {
            v += c.momentum(p, self.time + dt, &self.units);
        }
        v * self.scale
    }

    /// `(x0, p0, sigma)` of each component at time 0.
    pub(crate) fn raw_components(&self) -> Vec<(f64, f64, f64)> {
        self.comps.iter().map(|c| (c.x0, c.p0, c.sigma)).collect()
    }

    fn fourier_numeric(&self, p: f64) -> Complex64 {
        let h = self.units.hbar;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.support(NEGLIGIBLE * 1e-3) {
            let rate = p.abs() / h;
            let panels = self.position_panels(a, b).max(((b - a) * rate / (2.0 * PI) * 2.0).ceil() as usize);
            acc += quad::panels(a, b, panels, 16, |q| {
                Complex64::from_polar(1.0, -p * q / h) * self.eval_position(q)
            });
        }
        acc / (2.0 * PI * h).sqrt()
    }

    /// Phase-derivative bound of `psi(q)` over `[a, b]`, in rad per unit length.
    pub fn phase_rate(&self, a: f64, b: f64) -> f64 {
        let u = &self.units;
        self.comps
            .iter()
            .map(|c| {
                let (m, _) = c.spread_at(self.time, u);
                // the evolved Gaussian's phase is p0 q / hbar plus a chirp
                // (q - m)^2 hbar tau / (8 mu sigma_t^2 sigma^2)
                let (_, st) = c.spread_at(self.time, u);
                let chirp = u.hbar * self.time.abs() / (4.0 * u.mu * st * st * c.sigma * c.sigma);
                c.p0.abs() / u.hbar + chirp * (a - m).abs().max((b - m).abs())
            })
            .fold(0.0, f64::max)
    }

    /// `<self|other>` over the union of both supports.
    pub fn inner(&self, other: &WavePacket) -> Result<Complex64> {
        let mut spans = self.support(NEGLIGIBLE * 1e-3);
        spans.extend(other.support(NEGLIGIBLE * 1e-3));
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in merge(spans) {
            let rate = self.phase_rate(a, b) + other.phase_rate(a, b);
            acc += oscillatory_overlap(|q| self.eval_position(q), |q| other.eval_position(q), a, b, rate);
        }
        Ok(acc)
    }
}

pub(crate) fn merge(mut spans: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(spans.len());
    for (a, b) in spans {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Adaptive `∫_a^b conj(f) g`, absolute tolerance `1e-10`.
pub fn inner_product(
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
) -> Result<Complex64> {
    quad::adaptive(a, b, 1e-10, 40, |q| f(q).conj() * g(q)).map(|(v, _)| v)
}

/// Panel rule for `∫_a^b conj(f) g` when the combined phase changes by at
/// most `rate` radians per unit length: at least 8 panels of 8 nodes per
/// oscillation, never fewer than 4 panels.
pub fn oscillatory_overlap(
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    rate: f64,
) -> Complex64 {
    let panels = overlap_panels(a, b, rate);
    quad::panels(a, b, panels, 8, |q| f(q).conj() * g(q))
}

pub(crate) fn overlap_panels(a: f64, b: f64, rate: f64) -> usize {
    let osc = (b - a) * rate / (2.0 * PI);
    ((8.0 * osc).ceil() as usize).max(4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> WavePacket {
        WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default()).unwrap()
    }

    fn fig2() -> WavePacket {
        WavePacket::new(
            &[GaussianSpec::new(-1.0, 200.0, 0.05), GaussianSpec::new(-0.5, 100.0, 0.05)],
            WidthConvention::Fwhm,
            Units::default(),
        )
        .unwrap()
    }

    fn total(pk: &WavePacket, a: f64, b: f64, panels: usize) -> f64 {
        quad::panels(a, b, panels, 16, |q| pk.eval_position(q).norm_sqr())
    }

    #[test]
    fn width_conventions() {
        let s = WidthConvention::Fwhm.sigma(0.05);
        assert!((s * 2.0 * (2.0 * LN_2).sqrt() - 0.05).abs() < 1e-16);
        assert_eq!(WidthConvention::StdDev.sigma(0.05), 0.05);
    }

    #[test]
    fn peak_at_center() {
        let pk = fig1();
        let at = pk.eval_position(-1.0).norm();
        for &d in &[1e-3, -1e-3, 0.01] {
            assert!(pk.eval_position(-1.0 + d).norm() < at);
        }
    }

    #[test]
    fn fig1_normalized_by_quadrature() {
        let n = total(&fig1(), -1.5, -0.5, 400);
        assert!((n - 1.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn superposition_normalized_by_quadrature() {
        let pk = WavePacket::new(
            &[
                GaussianSpec::new(-0.2, 3.0, 0.5),
                GaussianSpec::new(0.1, -2.0, 0.3).with_weight(Complex64::new(0.3, 0.8)),
            ],
            WidthConvention::StdDev,
            Units::new(2.0, 0.7).unwrap(),
        )
        .unwrap();
        let n = total(&pk, -6.0, 6.0, 400);
        assert!((n - 1.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn truncation_changes_norm_negligibly() {
        let pk = fig1();
        let t = pk.truncated(10.0).unwrap();
        let ratio = t.eval_position(-1.01) / pk.eval_position(-1.01);
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
        assert_eq!(t.eval_position(10.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn momentum_matches_numeric_transform() {
        for pk in [fig1(), fig2()] {
            let cut = pk.truncated(3.0).unwrap();
            for &p in &[0.0, 50.0, 100.0, 180.0, 230.0] {
                let a = pk.eval_momentum(p);
                let b = cut.eval_momentum(p);
                assert!((a - b).norm() < 1e-10, "p={p} {a} {b}");
            }
        }
    }

    #[test]
    fn momentum_peak_and_parseval() {
        let pk = fig1();
        let at = pk.eval_momentum(100.0).norm();
        assert!(pk.eval_momentum(99.0).norm() < at && pk.eval_momentum(101.0).norm() < at);
        let s: f64 = quad::panels(-300.0, 500.0, 400, 16, |p| pk.eval_momentum(p).norm_sqr());
        assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn negative_momentum_tail_depends_on_width_reading() {
        // |psi~(p)| for p < 0 relative to its peak
        let peak_ratio = |pk: &WavePacket, peak: f64| {
            let worst = (0..=200).map(|k| pk.eval_momentum(-(k as f64))).map(|v| v.norm()).fold(0.0, f64::max);
            worst / peak
        };
        let specs = [GaussianSpec::new(-1.0, 200.0, 0.05), GaussianSpec::new(-0.5, 100.0, 0.05)];
        let std = WavePacket::new(&specs, WidthConvention::StdDev, Units::default()).unwrap();
        let peak = std.eval_momentum(100.0).norm().max(std.eval_momentum(200.0).norm());
        assert!(peak_ratio(&std, peak) < 1e-10);
        let fwhm = fig2();
        let peak = fwhm.eval_momentum(100.0).norm().max(fwhm.eval_momentum(200.0).norm());
        let r = peak_ratio(&fwhm, peak);
        assert!(r > 1e-3 && r < 0.02, "{r}");
    }

    #[test]
    fn free_evolution_matches_momentum_integral() {
        let pk = fig2();
        let ev = pk.evolved(0.004).unwrap();
        for &q in &[-0.3, 0.0, 0.2] {
            let direct: Complex64 = quad::panels(-300.0, 600.0, 3000, 16, |p| {
                Complex64::from_polar(1.0, p * q) * ev.eval_momentum(p)
            }) / (2.0 * PI).sqrt();
            let v = ev.eval_position(q);
            assert!((direct - v).norm() < 1e-9, "{direct} {v}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let ev = fig2().evolved(0.003).unwrap();
        for &q in &[-0.4, 0.0, 0.1] {
            let h = 1e-6;
            let fd = (ev.eval_position(q + h) - ev.eval_position(q - h)) / (2.0 * h);
            let (_, d) = ev.eval_with_derivative(q);
            assert!((fd - d).norm() < 1e-5 * d.norm().max(1.0));
        }
    }

    #[test]
    fn unitarity_and_ehrenfest() {
        let pk = fig1();
        for &t in &[0.002, 0.01, 0.05] {
            let ev = pk.evolved(t).unwrap();
            let c = -1.0 + 100.0 * t;
            let w = 12.0 * ev.sigmas()[0];
            let (n, m): (f64, f64) = (
                quad::panels(c - w, c + w, 2000, 16, |q| ev.eval_position(q).norm_sqr()),
                quad::panels(c - w, c + w, 2000, 16, |q| q * ev.eval_position(q).norm_sqr()),
            );
            assert!((n - 1.0).abs() < 1e-12);
            assert!((m - c).abs() < 1e-9, "{m} {c}");
            assert!((ev.norm_sqr().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_split() {
        let pk = fig2();
        let (e, o) = (pk.even_part(), pk.odd_part());
        let eo = e.inner(&o).unwrap();
        assert!(eo.norm() < 1e-12, "{eo}");
        let s = e.norm_sqr().unwrap() + o.norm_sqr().unwrap();
        assert!((s - 1.0).abs() < 1e-10);
        for &q in &[-1.0, -0.5, 0.3] {
            let sum = e.eval_position(q) + o.eval_position(q);
            assert!((sum - pk.eval_position(q)).norm() < 1e-12 * pk.eval_position(q).norm().max(1.0));
            assert!((e.eval_position(-q) - e.eval_position(q)).norm() < 1e-12);
            assert!((o.eval_position(-q) + o.eval_position(q)).norm() < 1e-12);
        }
    }

    #[test]
    fn inner_products() {
        let pk = fig1();
        let v = pk.inner(&pk).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
        let ad = inner_product(|q| pk.eval_position(q), |q| pk.eval_position(q), -1.3, -0.7).unwrap();
        assert!((ad - 1.0).norm() < 1e-10);
    }

    #[test]
    fn construction_errors() {
        assert!(WavePacket::new(&[], WidthConvention::Fwhm, Units::default()).is_err());
        assert!(WavePacket::new(&[GaussianSpec::new(0.0, 0.0, -1.0)], WidthConvention::Fwhm, Units::default()).is_err());
        assert!(fig1().evolved(0.1).unwrap().truncated(5.0).is_err());
        assert!(fig1().truncated(5.0).unwrap().evolved(0.1).is_err());
    }
}
