//! Free-particle dynamics in the periodic box (spectral, on a uniform grid)
//! and on the line; density diagnostics, the flux at the origin, and the
//! collapse of evolved eigenfunctions at their eigenvalues.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::curve::{check_grid, Curve, CurveKind};
use crate::discrete::nearest_eigenrecord;
use crate::error::{Error, Result};
use crate::quad;
use crate::spectrum::{self, BoxConfig, EigenRecord, Parity};
use crate::states::{WavePacket, NEGLIGIBLE};

/// State in the box as plane-wave amplitudes `c_m`, basis
/// `e^{i pi m q / l} / sqrt(2 l)`, `m` in `[-N/2, N/2)`.
///
/// The amplitudes come from `N` samples at `q_j = -l + 2 l j / N`, so the
/// expansion reproduces those samples exactly and evolves them exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeExpansion {
    pub bx: BoxConfig,
    /// FFT order: index `k` holds mode `k` for `k < N/2`, `k - N` otherwise.
    pub coefficients: Vec<Complex64>,
    pub time: f64,
}

/// Controls for [`expand`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandOptions {
    /// Largest admissible fraction of `Σ|c_m|^2` in `|m| > N/4`.
    pub tail_tol: f64,
    pub min_points: usize,
    pub max_points: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { tail_tol: 1e-8, min_points: 1024, max_points: 1 << 22 }
    }
}

impl ModeExpansion {
    /// Expansion of grid samples (length a power of two).
    pub fn from_samples(bx: &BoxConfig, samples: &[Complex64]) -> Result<Self> {
        let n = samples.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Domain(format!("sample count must be a power of two >= 4, got {n}")));
        }
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = (2.0 * bx.l).sqrt() / n as f64;
        for (k, c) in buf.iter_mut().enumerate() {
            *c *= if k % 2 == 0 { scale } else { -scale };
        }
        Ok(ModeExpansion { bx: *bx, coefficients: buf, time: 0.0 })
    }

    /// Expansion of `f` sampled on `n` grid points.
    pub fn from_fn(bx: &BoxConfig, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples: Vec<Complex64> = grid(bx, n).into_iter().map(f).collect();
        Self::from_samples(bx, &samples)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Mode number at FFT index `k`.
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.len();
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Amplitude of mode `m` (zero outside the band).
    pub fn coefficient(&self, m: i64) -> Complex64 {
        let n = self.len() as i64;
        if m < -n / 2 || m >= n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[m.rem_euclid(n) as usize]
    }

    pub fn energy(&self, m: i64) -> f64 {
        let b = &self.bx;
        let k = PI * m as f64 * b.hbar / b.l;
        k * k / (2.0 * b.mu)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fraction of the norm carried by `|m| > N/4`.
    pub fn tail_fraction(&self) -> f64 {
        let n = self.len() as i64;
        let tail: f64 = (0..self.len())
            .filter(|&k| self.mode(k).abs() > n / 4)
            .map(|k| self.coefficients[k].norm_sqr())
            .sum();
        tail / self.norm_sqr()
    }

    /// Exact evolution by a further `t`: `c_m -> c_m e^{-i E_m t / hbar}`.
    pub fn evolve(&self, t: f64) -> ModeExpansion {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -self.energy(self.mode(k)) * t / self.bx.hbar))
            .collect();
        ModeExpansion { bx: self.bx, coefficients, time: self.time + t }
    }

    /// Values on the sampling grid.
    pub fn samples(&self) -> Vec<Complex64> {
        let n = self.len();
        let mut buf: Vec<Complex64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let scale = 1.0 / (2.0 * self.bx.l).sqrt();
        buf.iter().map(|v| v * scale).collect()
    }

    /// `(psi(q), d psi/dq)` by direct mode summation.
    pub fn eval_with_derivative(&self, q: f64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        let k0 = PI / self.bx.l;
        for (k, c) in self.coefficients.iter().enumerate() {
            let km = k0 * self.mode(k) as f64;
            let term = c * Complex64::from_polar(1.0, km * q);
            v += term;
            d += term * Complex64::new(0.0, km);
        }
        let s = 1.0 / (2.0 * self.bx.l).sqrt();
        (v * s, d * s)
    }

    pub fn grid(&self) -> Vec<f64> {
        grid(&self.bx, self.len())
    }

    /// `|psi(q_j)|^2` on the sampling grid.
    pub fn density(&self) -> Vec<f64> {
        self.samples().iter().map(|v| v.norm_sqr()).collect()
    }

    /// Grid and density closed with the periodic image of `-l` at `+l`.
    pub fn closed_density(&self) -> (Vec<f64>, Vec<f64>) {
        let mut q = self.grid();
        q.push(self.bx.l);
        let mut d = self.density();
        d.push(d[0]);
        (q, d)
    }
}

/// `q_j = -l + 2 l j / n`, `j = 0..n`.
pub fn grid(bx: &BoxConfig, n: usize) -> Vec<f64> {
    (0..n).map(|j| -bx.l + 2.0 * bx.l * j as f64 / n as f64).collect()
}

/// Expansion of `f` with the grid doubled until the tail criterion holds.
pub fn expand(bx: &BoxConfig, f: impl Fn(f64) -> Complex64, opts: ExpandOptions) -> Result<ModeExpansion> {
    let mut n = opts.min_points.next_power_of_two().max(4);
    loop {
        let e = ModeExpansion::from_fn(bx, n, &f)?;
        let tail = e.tail_fraction();
        if tail <= opts.tail_tol {
            return Ok(e);
        }
        if n >= opts.max_points {
            return Err(Error::accuracy(
                format!("mode tail above {:.1e} with {n} grid points", opts.tail_tol),
                tail,
            ));
        }
        n *= 2;
    }
}

/// Expansion of a packet that fits in the box.
pub fn expand_packet(packet: &WavePacket, bx: &BoxConfig, opts: ExpandOptions) -> Result<ModeExpansion> {
    let pk = crate::discrete::boxed_packet(packet, bx)?;
    expand(bx, |q| pk.eval_position(q), opts)
}

/// Expansion of a confined eigenfunction on `n` grid points.
pub fn expand_eigenfunction(record: &EigenRecord, bx: &BoxConfig, n: usize) -> Result<ModeExpansion> {
    ModeExpansion::from_fn(bx, n, |q| spectrum::eigenfunction(record, bx, q).unwrap_or_default())
}

/// Free evolution of a full-line packet by `t`.
pub fn evolve_free(packet: &WavePacket, t: f64) -> Result<WavePacket> {
    packet.evolved(t)
}

/// Moments and width of a sampled density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mass: f64,
    pub centroid: f64,
    pub variance: f64,
    /// Width at half maximum of the peak-connected component.
    pub whm: f64,
    pub peak: f64,
    pub peak_position: f64,
    /// Some point outside the peak-connected component exceeds half maximum.
    pub disconnected: bool,
}

/// Diagnostics of a density on a closed uniform grid (trapezoid weights);
/// the mass must be `1 ± 1e-6`.
pub fn density_diagnostics(q: &[f64], density: &[f64]) -> Result<Diagnostics> {
    if q.len() != density.len() || q.len() < 3 {
        return Err(Error::Domain("grid and density must have equal length >= 3".into()));
    }
    let h = q[1] - q[0];
    let last = q.len() - 1;
    let trap = |f: &dyn Fn(f64, f64) -> f64| {
        let inner: f64 = (1..last).map(|i| f(q[i], density[i])).sum();
        (inner + 0.5 * (f(q[0], density[0]) + f(q[last], density[last]))) * h
    };
    let mass = trap(&|_, d| d);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Domain(format!("density integrates to {mass}, not 1")));
    }
    let centroid = trap(&|x, d| x * d) / mass;
    let variance = trap(&|x, d| (x - centroid).powi(2) * d) / mass;
    let (ip, &peak) = density
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty density");
    let half = 0.5 * peak;
    let mut lo = ip;
    while lo > 0 && density[lo - 1] >= half {
        lo -= 1;
    }
    let mut hi = ip;
    while hi + 1 < density.len() && density[hi + 1] >= half {
        hi += 1;
    }
    let left = if lo > 0 {
        let (a, b) = (density[lo - 1], density[lo]);
        q[lo - 1] + h * (half - a) / (b - a)
    } else {
        q[0]
    };
    let right = if hi + 1 < density.len() {
        let (a, b) = (density[hi], density[hi + 1]);
        q[hi] + h * (a - half) / (a - b)
    } else {
        q[q.len() - 1]
    };
    let disconnected = density
        .iter()
        .enumerate()
        .any(|(i, &d)| (i < lo || i > hi) && d >= half);
    Ok(Diagnostics { mass, centroid, variance, whm: right - left, peak, peak_position: q[ip], disconnected })
}

/// `J(0, t) = (hbar/mu) Im[conj(psi) psi']` at the origin, box state.
pub fn flux_at_origin_box(expansion: &ModeExpansion, t: f64) -> f64 {
    let (v, d) = expansion.evolve(t).eval_with_derivative(0.0);
    expansion.bx.hbar / expansion.bx.mu * (v.conj() * d).im
}

/// `J(0, t)` for a full-line packet.
pub fn flux_at_origin_free(packet: &WavePacket, t: f64) -> Result<f64> {
    let u = packet.units();
    let (v, d) = packet.evolved(t)?.eval_with_derivative(0.0);
    Ok(u.hbar / u.mu * (v.conj() * d).im)
}

/// `∫_{-inf}^t J(0, t') dt'`: the probability on the right of the origin
/// at `t` minus its value in the remote past (the negative-momentum mass).
pub fn integrated_flux(packet: &WavePacket, t: f64) -> Result<f64> {
    if packet.is_truncated() {
        return Err(Error::Unsupported("integrated flux needs a full-line packet".into()));
    }
    let ev = packet.evolved(t)?;
    let mut right = 0.0;
    for (a, b) in ev.support(NEGLIGIBLE * 1e-3) {
        if b <= 0.0 {
            continue;
        }
        let a = a.max(0.0);
        let (r, _) = quad::adaptive(a, b, 1e-13, 40, |q| ev.eval_position(q).norm_sqr())?;
        right += r;
    }
    let mut left_moving = 0.0;
    for (a, b) in packet.momentum_support(NEGLIGIBLE) {
        if a >= 0.0 {
            continue;
        }
        let b = b.min(0.0);
        let (r, _) = quad::adaptive(a, b, 1e-13, 40, |p| packet.eval_momentum(p).norm_sqr())?;
        left_moving += r;
    }
    Ok(right - left_moving)
}

pub fn flux_curve(packet: &WavePacket, times: &[f64]) -> Result<Curve> {
    check_grid(times)?;
    let values = times.iter().map(|&t| flux_at_origin_free(packet, t)).collect::<Result<Vec<_>>>()?;
    Curve::new(times.to_vec(), values, CurveKind::Density, "flux")
}

pub fn integrated_flux_curve(packet: &WavePacket, times: &[f64]) -> Result<Curve> {
    check_grid(times)?;
    let values = crate::kijowski::par_map(times, |t| integrated_flux(packet, t))?;
    Curve::new(times.to_vec(), values, CurveKind::IntegratedFlux, "integrated_flux")
}

/// Maximal runs of consecutive grid intervals on which `values` decreases.
pub fn decreasing_windows(curve: &Curve) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 1..curve.len() {
        let falling = curve.values[i] < curve.values[i - 1];
        match (falling, start) {
            (true, None) => start = Some(i - 1),
            (false, Some(s)) => {
                out.push((curve.times[s], curve.times[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((curve.times[s], curve.times[curve.len() - 1]));
    }
    out
}

/// Controls for [`collapse_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseOptions {
    pub grid_points: usize,
    /// Time step is `tau_n / steps_per_tau`.
    pub steps_per_tau: usize,
    /// Scan covers `tau_n ± half_span_steps` steps.
    pub half_span_steps: usize,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions { grid_points: 1 << 15, steps_per_tau: 200, half_span_steps: 40 }
    }
}

/// Time scan of an evolved eigenfunction around its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseScan {
    pub record: EigenRecord,
    pub l: f64,
    pub step: f64,
    pub times: Vec<f64>,
    pub diagnostics: Vec<Diagnostics>,
    /// Density on the closed grid at `t = tau_n`.
    pub snapshot: Vec<f64>,
    pub grid: Vec<f64>,
}

impl CollapseScan {
    fn at_tau(&self) -> &Diagnostics {
        &self.diagnostics[self.diagnostics.len() / 2]
    }

    pub fn whm_at_tau(&self) -> f64 {
        self.at_tau().whm
    }

    pub fn centroid_at_tau(&self) -> f64 {
        self.at_tau().centroid
    }

    pub fn variance_at_tau(&self) -> f64 {
        self.at_tau().variance
    }

    pub fn peak_at_tau(&self) -> f64 {
        self.at_tau().peak
    }

    /// Grid time of minimal variance.
    pub fn t_min_variance(&self) -> f64 {
        let k = (0..self.times.len())
            .min_by(|&a, &b| self.diagnostics[a].variance.total_cmp(&self.diagnostics[b].variance))
            .expect("nonempty scan");
        self.times[k]
    }

    /// Grid time of minimal `|centroid|`.
    pub fn t_min_centroid(&self) -> f64 {
        let k = (0..self.times.len())
            .min_by(|&a, &b| self.diagnostics[a].centroid.abs().total_cmp(&self.diagnostics[b].centroid.abs()))
            .expect("nonempty scan");
        self.times[k]
    }

    /// Offset of the minimum-variance time from `tau_n`, in grid steps.
    pub fn variance_offset_steps(&self) -> f64 {
        (self.t_min_variance() - self.record.tau) / self.step
    }

    /// CSV with columns `t,centroid,variance,whm`.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("t,centroid,variance,whm\n");
        for (t, d) in self.times.iter().zip(&self.diagnostics) {
            out.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e}\n", t, d.centroid, d.variance, d.whm));
        }
        out
    }

    /// CSV with columns `q,density` at `tau_n`.
    pub fn snapshot_csv(&self) -> String {
        let mut out = String::from("q,density\n");
        for (q, d) in self.grid.iter().zip(&self.snapshot) {
            out.push_str(&format!("{:.12e},{:.12e}\n", q, d));
        }
        out
    }
}

/// Evolve the eigenfunction of `parity` whose eigenvalue is nearest
/// `t_target` and scan the density diagnostics around that eigenvalue.
pub fn collapse_scan(bx: &BoxConfig, parity: Parity, t_target: f64, opts: CollapseOptions) -> Result<CollapseScan> {
    let record = nearest_eigenrecord(bx, parity, t_target)?;
    let e0 = expand_eigenfunction(&record, bx, opts.grid_points)?;
    // renormalize on the grid
    let n2 = e0.norm_sqr();
    let e0 = ModeExpansion { coefficients: e0.coefficients.iter().map(|c| c / n2.sqrt()).collect(), ..e0 };
    let step = record.tau / opts.steps_per_tau as f64;
    let k = opts.half_span_steps as i64;
    let times: Vec<f64> = (-k..=k).map(|i| record.tau + i as f64 * step).collect();
    let diagnostics = crate::kijowski::par_map(&times, |t| {
        let (q, d) = e0.evolve(t).closed_density();
        density_diagnostics(&q, &d)
    })?;
    let (q, snapshot) = e0.evolve(record.tau).closed_density();
    Ok(CollapseScan { record, l: bx.l, step, times, diagnostics, snapshot, grid: q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::linspace;
    use crate::states::{GaussianSpec, Units, WidthConvention};

    fn bx(l: f64) -> BoxConfig {
        BoxConfig::periodic(l).unwrap()
    }

    #[test]
    fn plane_wave_is_a_single_mode() {
        let b = bx(2.0);
        let e = ModeExpansion::from_fn(&b, 64, |q| Complex64::from_polar(1.0, PI * 5.0 * q / 2.0) / 2.0).unwrap();
        for k in 0..e.len() {
            let want = if e.mode(k) == 5 { 1.0 } else { 0.0 };
            assert!((e.coefficients[k] - want).norm() < 1e-13);
        }
        assert!(ModeExpansion::from_fn(&b, 100, |_| Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn real_even_input_has_conjugate_symmetric_modes() {
        let b = bx(1.0);
        let e = ModeExpansion::from_fn(&b, 256, |q| Complex64::from((-8.0 * q * q).exp())).unwrap();
        for m in 1..100 {
            assert!((e.coefficient(-m) - e.coefficient(m).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn evolution_is_unitary_and_a_group() {
        let b = bx(1.0);
        let rec = spectrum::eigenvalues(&b, Parity::Odd, 1).unwrap()[0];
        let e = expand_eigenfunction(&rec, &b, 4096).unwrap();
        let n0 = e.norm_sqr();
        let a = e.evolve(0.013).evolve(0.029);
        let c = e.evolve(0.042);
        assert!((a.norm_sqr() - n0).abs() < 1e-14);
        for (x, y) in a.coefficients.iter().zip(&c.coefficients) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn eigenfunction_round_trip_on_the_grid() {
        let b = bx(1.0);
        let rec = spectrum::eigenvalues(&b, Parity::Odd, 1).unwrap()[0];
        let e = expand_eigenfunction(&rec, &b, 8192).unwrap();
        let h = 2.0 / 8192.0;
        let err: f64 = e
            .samples()
            .iter()
            .zip(e.grid())
            .map(|(v, q)| (v - spectrum::eigenfunction(&rec, &b, q).unwrap()).norm_sqr())
            .sum::<f64>()
            * h;
        assert!(err.sqrt() < 1e-8);
        // the odd eigenfunction jumps at the periodic wall, so the tail decays like 1/M
        let t1 = ModeExpansion::from_fn(&b, 2048, |q| spectrum::eigenfunction(&rec, &b, q).unwrap()).unwrap().tail_fraction();
        let t2 = e.tail_fraction();
        assert!(t2 < t1 && t2 > 1e-6);
        assert!(expand(&b, |q| spectrum::eigenfunction(&rec, &b, q).unwrap(), ExpandOptions { max_points: 1 << 14, ..Default::default() })
            .is_err());
    }

    #[test]
    fn box_and_free_evolution_agree_away_from_walls() {
        let pk = WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default()).unwrap();
        let b = bx(10.0);
        let e = expand_packet(&pk, &b, ExpandOptions::default()).unwrap();
        assert!((e.norm_sqr() - 1.0).abs() < 1e-8);
        for t in [0.0, 0.004, 0.01] {
            let ev = e.evolve(t);
            let free = evolve_free(&pk, t).unwrap();
            let worst = ev
                .grid()
                .iter()
                .zip(ev.density())
                .map(|(&q, d)| (d - free.eval_position(q).norm_sqr()).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "t {t}: {worst}");
        }
    }

    #[test]
    fn free_centroid_moves_at_group_velocity() {
        let pk = WavePacket::new(&[GaussianSpec::new(-0.5, 3.0, 0.4)], WidthConvention::Fwhm, Units::new(2.0, 1.0).unwrap()).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let ev = evolve_free(&pk, t).unwrap();
            let mut m = 0.0;
            for (a, b) in ev.support(1e-15) {
                m += quad::adaptive(a, b, 1e-12, 40, |q| q * ev.eval_position(q).norm_sqr()).unwrap().0;
            }
            assert!((m - (-0.5 + 1.5 * t)).abs() < 1e-9, "t {t}: {m}");
            assert!((ev.eval_momentum(2.7).norm() - pk.eval_momentum(2.7).norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_whm_and_symmetric_centroid() {
        let q = linspace(-5.0, 5.0, 4001);
        let s: f64 = 0.3;
        let d: Vec<f64> = q.iter().map(|x| (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())).collect();
        let dg = density_diagnostics(&q, &d).unwrap();
        assert!((dg.whm - 2.0 * (2.0 * 2f64.ln()).sqrt() * s).abs() < 1e-2 * dg.whm);
        assert!(dg.centroid.abs() < 1e-12);
        assert!((dg.variance - s * s).abs() < 1e-8);
        assert!(!dg.disconnected);
        let bad: Vec<f64> = d.iter().map(|x| 2.0 * x).collect();
        assert!(density_diagnostics(&q, &bad).is_err());
    }

    #[test]
    fn twin_peaks_are_flagged() {
        let q = linspace(-5.0, 5.0, 4001);
        let g = |x: f64, m: f64| (-(x - m).powi(2) / 0.02).exp();
        let raw: Vec<f64> = q.iter().map(|&x| g(x, -1.0) + 0.9 * g(x, 1.0)).collect();
        let h = q[1] - q[0];
        let z: f64 = raw.iter().sum::<f64>() * h;
        let d: Vec<f64> = raw.iter().map(|x| x / z).collect();
        let dg = density_diagnostics(&q, &d).unwrap();
        assert!(dg.disconnected);
        assert!(dg.whm < 0.5);
    }

    #[test]
    fn flux_of_a_distant_right_mover() {
        let pk = WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default()).unwrap();
        assert!(flux_at_origin_free(&pk, 0.0).unwrap().abs() < 1e-100);
        let total = integrated_flux(&pk, 1.0).unwrap();
        assert!((total - 1.0).abs() < 1e-3, "{total}");
        let early = integrated_flux(&pk, -0.005).unwrap();
        // only the negative-momentum mass remains before arrival
        assert!(early < 0.0 && early > -1e-4, "{early}");
        // derivative of the integrated flux is the flux
        let (t, h) = (0.0095, 1e-6);
        let fd = (integrated_flux(&pk, t + h).unwrap() - integrated_flux(&pk, t - h).unwrap()) / (2.0 * h);
        let j = flux_at_origin_free(&pk, t).unwrap();
        assert!((fd - j).abs() < 1e-5 * j.abs(), "{fd} vs {j}");
    }

    #[test]
    fn box_flux_matches_free_flux() {
        let pk = WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default()).unwrap();
        let e = expand_packet(&pk, &bx(10.0), ExpandOptions::default()).unwrap();
        for t in [0.009, 0.01, 0.011] {
            let a = flux_at_origin_box(&e, t);
            let b = flux_at_origin_free(&pk, t).unwrap();
            assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn backflow_in_the_two_gaussian_state() {
        let pk = WavePacket::new(
            &[GaussianSpec::new(-1.0, 200.0, 0.05), GaussianSpec::new(-0.5, 100.0, 0.05)],
            WidthConvention::Fwhm,
            Units::default(),
        )
        .unwrap();
        let times = linspace(0.0, 0.015, 1501);
        let j = flux_curve(&pk, &times).unwrap();
        assert!(j.values.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn collapse_scan_centers_and_narrows() {
        let opts = CollapseOptions { grid_points: 1 << 13, steps_per_tau: 200, half_span_steps: 4 };
        let s2 = collapse_scan(&bx(2.0), Parity::Even, 0.01, opts).unwrap();
        let s3 = collapse_scan(&bx(3.0), Parity::Even, 0.01, opts).unwrap();
        assert!(s2.centroid_at_tau().abs() < 1e-12);
        assert!(s3.whm_at_tau() < s2.whm_at_tau());
        assert!(s3.peak_at_tau() > s2.peak_at_tau());
        assert!(s2.variance_offset_steps().abs() <= 1.0);
    }
}
