//! The confined (discrete) arrival distribution: spectral weights of a
//! packet in the box eigenbasis, the step function `F^(l)(t)`, its
//! histogram derivative, and the large-`l` limit of the odd eigenfunctions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::curve::{check_grid, Curve, CurveKind};
use crate::error::{Error, Result};
use crate::kijowski::{kijowski_accumulated, par_map};
use crate::quad;
use crate::specfun::xj_pair;
use crate::spectrum::{self, Branch, BoxConfig, EigenRecord, Parity};
use crate::states::{overlap_panels, Units, WavePacket, NEGLIGIBLE};

/// Controls for [`spectral_weights_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightOptions {
    /// Stop once `1 - captured_norm` falls below this.
    pub target_deficit: f64,
    /// Roots per parity in the first pass; doubled until the target is met.
    pub initial_count: usize,
    /// Upper limit on roots per parity.
    pub max_count: usize,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions { target_deficit: 1e-4, initial_count: 128, max_count: 65_536 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    pub bx: BoxConfig,
    pub records: Vec<EigenRecord>,
    pub weights: Vec<f64>,
    pub captured_norm: f64,
    /// Norm of the (truncated) packet the weights refer to.
    pub packet_norm: f64,
    /// Set when the target deficit was not reached.
    pub warning: Option<String>,
    /// `(tau, cumulative weight)` sorted by `tau`.
    steps: Vec<(f64, f64)>,
}

impl SpectralWeights {
    fn build(bx: BoxConfig, records: Vec<EigenRecord>, weights: Vec<f64>, packet_norm: f64, warning: Option<String>) -> Self {
        let mut order: Vec<usize> = (0..records.len()).collect();
        order.sort_by(|&a, &b| records[a].tau.total_cmp(&records[b].tau));
        let mut acc = 0.0;
        let steps = order
            .iter()
            .map(|&i| {
                acc += weights[i];
                (records[i].tau, acc)
            })
            .collect();
        SpectralWeights { bx, captured_norm: acc, records, weights, packet_norm, warning, steps }
    }

    pub fn deficit(&self) -> f64 {
        self.packet_norm - self.captured_norm
    }

    /// Number of roots used for `parity`.
    pub fn count(&self, parity: Parity) -> usize {
        self.records.iter().filter(|r| r.parity == parity).count() / 2
    }

    /// Sum of the weights of one parity.
    pub fn parity_mass(&self, parity: Parity) -> f64 {
        self.records.iter().zip(&self.weights).filter(|(r, _)| r.parity == parity).map(|(_, w)| w).sum()
    }

    /// Weights restricted to one parity.
    pub fn restrict(&self, parity: Parity) -> SpectralWeights {
        let (records, weights): (Vec<_>, Vec<_>) = self
            .records
            .iter()
            .zip(&self.weights)
            .filter(|(r, _)| r.parity == parity)
            .map(|(r, w)| (*r, *w))
            .unzip();
        SpectralWeights::build(self.bx, records, weights, self.packet_norm, self.warning.clone())
    }

    /// CSV with columns `parity,n,sign,tau,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parity,n,sign,tau,weight\n");
        for (r, w) in self.records.iter().zip(&self.weights) {
            out.push_str(&format!("{},{},{},{:.15e},{:.15e}\n", r.parity, r.n, r.branch, r.tau, w));
        }
        out
    }
}

/// Packet restricted to the box, checking that nothing is cut off.
pub fn boxed_packet(packet: &WavePacket, bx: &BoxConfig) -> Result<WavePacket> {
    if packet.units() != (Units { mu: bx.mu, hbar: bx.hbar }) {
        return Err(Error::Domain("packet and box use different units".into()));
    }
    if let Some(l) = packet.truncation() {
        if l > bx.l {
            return Err(Error::Domain(format!("packet truncated to [-{l}, {l}] exceeds the box [-{0}, {0}]", bx.l)));
        }
        return Ok(packet.clone());
    }
    for (a, b) in packet.support(NEGLIGIBLE) {
        if a < -bx.l || b > bx.l {
            return Err(Error::Domain(format!(
                "packet support [{a:.4}, {b:.4}] is not inside the box [-{0}, {0}]",
                bx.l
            )));
        }
    }
    packet.truncated(bx.l)
}

fn root_weights(packet: &WavePacket, bx: &BoxConfig, parity: Parity, rho: f64) -> Result<(f64, f64)> {
    root_weights_refined(packet, bx, parity, rho, 1)
}

/// `|<phi_n^+|psi>|^2, |<phi_n^-|psi>|^2` for one root, with the panel
/// count multiplied by `refine`.
pub(crate) fn root_weights_refined(
    packet: &WavePacket,
    bx: &BoxConfig,
    parity: Parity,
    rho: f64,
    refine: usize,
) -> Result<(f64, f64)> {
    let norm = spectrum::normalization(parity, rho, bx)?;
    let l2 = bx.l * bx.l;
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    for (a, b) in packet.support(NEGLIGIBLE * 1e-3) {
        let reach = a.abs().max(b.abs());
        let rate = 2.0 * rho * reach / l2 + packet.phase_rate(a, b);
        let panels = overlap_panels(a, b, rate) * refine.max(1);
        for (q, w) in quad::panel_rule(a, b, panels, 8) {
            let (p, _) = spectrum::profile(parity, rho, rho * q * q / l2);
            let amp = match parity {
                Parity::Odd => norm * q,
                Parity::Even => norm,
            };
            let psi = packet.eval_position(q) * (w * amp);
            // the minus profile is the conjugate of the plus profile
            plus += p.conj() * psi;
            minus += p * psi;
        }
    }
    Ok((plus.norm_sqr(), minus.norm_sqr()))
}

/// Weights with the default options.
pub fn spectral_weights(packet: &WavePacket, bx: &BoxConfig) -> Result<SpectralWeights> {
    spectral_weights_with(packet, bx, WeightOptions::default())
}

/// Weights for both parities and both branches, growing the number of
/// roots until the captured norm is within the target of the packet norm.
pub fn spectral_weights_with(packet: &WavePacket, bx: &BoxConfig, opts: WeightOptions) -> Result<SpectralWeights> {
    if bx.gamma != 0.0 {
        return Err(Error::Unsupported("spectral weights need the analytic (gamma = 0) spectrum".into()));
    }
    let pk = boxed_packet(packet, bx)?;
    let packet_norm = pk.norm_sqr()?;
    let mut count = opts.initial_count.max(1);
    let mut done: [(Vec<f64>, Vec<(f64, f64)>); 2] = [(Vec::new(), Vec::new()), (Vec::new(), Vec::new())];
    loop {
        for (slot, parity) in [Parity::Odd, Parity::Even].into_iter().enumerate() {
            let rhos = spectrum::roots(parity, count)?;
            let have = done[slot].1.len();
            let fresh = par_map(&rhos[have..], |rho| root_weights(&pk, bx, parity, rho))?;
            done[slot].0 = rhos;
            done[slot].1.extend(fresh);
        }
        let captured: f64 = done.iter().flat_map(|d| d.1.iter().map(|(a, b)| a + b)).sum();
        let deficit = packet_norm - captured;
        if deficit <= opts.target_deficit || count >= opts.max_count {
            let warning = (deficit > opts.target_deficit).then(|| {
                format!("captured norm falls short of the packet norm by {deficit:.3e} with {count} roots per parity")
            });
            let mut records = Vec::new();
            let mut weights = Vec::new();
            for (slot, parity) in [Parity::Odd, Parity::Even].into_iter().enumerate() {
                let (rhos, ws) = &done[slot];
                for (i, (&rho, &(wp, wm))) in rhos.iter().zip(ws).enumerate() {
                    let tau = bx.tau_of_rho(rho);
                    let norm_const = spectrum::normalization(parity, rho, bx)?;
                    for (branch, w) in [(Branch::Plus, wp), (Branch::Minus, wm)] {
                        records.push(EigenRecord { parity, n: i + 1, rho, tau: branch.sign() * tau, norm_const, branch });
                        weights.push(w);
                    }
                }
            }
            return Ok(SpectralWeights::build(*bx, records, weights, packet_norm, warning));
        }
        count = (2 * count).min(opts.max_count);
    }
}

/// `F^(l)(t) = Σ_{tau_n <= t} w_n`.
pub fn accumulated_discrete(weights: &SpectralWeights, t: f64) -> f64 {
    let k = weights.steps.partition_point(|&(tau, _)| tau <= t);
    if k == 0 {
        0.0
    } else {
        weights.steps[k - 1].1
    }
}

pub fn accumulated_curve(weights: &SpectralWeights, times: &[f64]) -> Result<Curve> {
    check_grid(times)?;
    let values = times.iter().map(|&t| accumulated_discrete(weights, t)).collect();
    Curve::new(times.to_vec(), values, CurveKind::Accumulated, format!("confined_l{}", weights.bx.l))
}

/// Binned spectral weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub curve: Curve,
    /// Eigenvalues per bin.
    pub counts: Vec<usize>,
    /// Bins holding fewer than three eigenvalues.
    pub under_resolved: Vec<bool>,
    pub bin_width: f64,
}

impl Histogram {
    pub fn mass(&self) -> f64 {
        self.curve.values.iter().sum::<f64>() * self.bin_width
    }

    /// CSV with columns `t,density,count,under_resolved`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,density,count,under_resolved\n");
        for i in 0..self.counts.len() {
            out.push_str(&format!(
                "{:.12e},{:.15e},{},{}\n",
                self.curve.times[i], self.curve.values[i], self.counts[i], self.under_resolved[i]
            ));
        }
        out
    }
}

/// Ten local eigenvalue spacings at `t`.
pub fn default_bin_width(bx: &BoxConfig, t: f64) -> f64 {
    10.0 * bx.asymptotic_spacing(t)
}

/// Histogram of the weights by eigenvalue, over `range` (all eigenvalues
/// when `None`). Bins start at `range.0`.
pub fn density_histogram(weights: &SpectralWeights, bin_width: f64, range: Option<(f64, f64)>) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Domain(format!("bin width must be positive, got {bin_width}")));
    }
    let (lo, hi) = match range {
        Some((a, b)) if b > a => (a, b),
        Some((a, b)) => return Err(Error::Domain(format!("empty histogram range [{a}, {b}]"))),
        None => {
            let first = weights.steps.first().map_or(0.0, |s| s.0);
            let last = weights.steps.last().map_or(0.0, |s| s.0);
            (first, last + 0.5 * bin_width)
        }
    };
    let nbins = ((hi - lo) / bin_width).ceil().max(1.0) as usize;
    if nbins > 50_000_000 {
        return Err(Error::Domain(format!("{nbins} bins requested; use a wider bin or a narrower range")));
    }
    let mut mass = vec![0.0; nbins];
    let mut counts = vec![0usize; nbins];
    for (r, w) in weights.records.iter().zip(&weights.weights) {
        let k = ((r.tau - lo) / bin_width).floor();
        if k >= 0.0 && (k as usize) < nbins {
            mass[k as usize] += w;
            counts[k as usize] += 1;
        }
    }
    let times: Vec<f64> = (0..nbins).map(|k| lo + (k as f64 + 0.5) * bin_width).collect();
    let values = mass.iter().map(|m| m / bin_width).collect();
    let under_resolved = counts.iter().map(|&c| c < 3).collect();
    let curve = Curve::new(times, values, CurveKind::Density, format!("histogram_l{}", weights.bx.l))?;
    Ok(Histogram { curve, counts, under_resolved, bin_width })
}

/// Large-`l` limit of the odd eigenfunctions,
/// `sqrt(2 hbar/mu) (mu/4 hbar t)^{5/4} q ξ^{1/4} e^{-iξ} [J_{-1/4}(ξ) - i J_{3/4}(ξ)]`,
/// `ξ = mu q^2 / 4 t hbar`; conjugated for `t < 0`.
pub fn limit_eigenfunction_odd(t: f64, q: f64, units: Units) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("limit eigenfunction needs a nonzero finite time, got {t}")));
    }
    if t < 0.0 {
        return Ok(limit_eigenfunction_odd(-t, q, units)?.conj());
    }
    let k = units.mu / (4.0 * units.hbar * t);
    let xi = k * q * q;
    let (a, b) = xj_pair(1, -1, 3, xi);
    let (s, c) = xi.sin_cos();
    let bracket = Complex64::new(c, -s) * Complex64::new(a, -b);
    Ok(bracket * ((2.0 * units.hbar / units.mu).sqrt() * k.powf(1.25) * q))
}

/// `|<phi_t^odd|psi>|^2` with the limit eigenfunction: the density obtained
/// by differentiating the large-`l` odd accumulated probability.
pub fn limit_density_odd(packet: &WavePacket, t: f64) -> Result<f64> {
    let units = packet.units();
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in packet.support(NEGLIGIBLE * 1e-3) {
        let reach = a.abs().max(b.abs());
        let rate = units.mu * reach / (units.hbar * t.abs()) + packet.phase_rate(a, b);
        for (q, w) in quad::panel_rule(a, b, overlap_panels(a, b, rate), 8) {
            acc += limit_eigenfunction_odd(t, q, units)?.conj() * packet.eval_position(q) * w;
        }
    }
    Ok(acc.norm_sqr())
}

/// The record of `parity` whose eigenvalue has the sign of `t` and lies
/// closest to it; ties go to the smaller `n`.
pub fn nearest_record(records: &[EigenRecord], parity: Parity, t: f64) -> Option<EigenRecord> {
    records
        .iter()
        .filter(|r| r.parity == parity && r.tau.signum() == t.signum())
        .min_by(|a, b| (a.tau - t).abs().total_cmp(&(b.tau - t).abs()).then(a.n.cmp(&b.n)))
        .copied()
}

/// The record of `parity` closest to `t`, found from the roots up to just
/// beyond `mu l^2 / (4 |t| hbar)`.
pub fn nearest_eigenrecord(bx: &BoxConfig, parity: Parity, t: f64) -> Result<EigenRecord> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("no eigenvalue is nearest to t = {t}")));
    }
    let target = bx.rho_of_tau(t);
    let count = (target / PI).ceil() as usize + 3;
    let records = spectrum::eigenvalues(bx, parity, count)?;
    nearest_record(&records, parity, t).ok_or_else(|| Error::Domain(format!("no {parity} record near {t}")))
}

/// `sup_{|q| <= reach} |phi_n(q) / sqrt(dtau_n) - phi_t^odd(q)|` for the odd
/// record nearest `t`, where `dtau_n` is the local spacing of one branch.
pub fn limit_mismatch(bx: &BoxConfig, t: f64, reach: f64, samples: usize) -> Result<f64> {
    let rec = nearest_eigenrecord(bx, Parity::Odd, t)?;
    let scale = bx.asymptotic_spacing(rec.tau).sqrt();
    let units = Units { mu: bx.mu, hbar: bx.hbar };
    let mut worst: f64 = 0.0;
    for k in 0..=samples {
        let q = -reach + 2.0 * reach * k as f64 / samples as f64;
        let confined = spectrum::eigenfunction(&rec, bx, q)? / scale;
        let limit = limit_eigenfunction_odd(t, q, units)?;
        worst = worst.max((confined - limit).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub l: f64,
    pub sup_diff: f64,
    pub captured_norm: f64,
    pub roots_per_parity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub kijowski: Curve,
    pub confined: Vec<Curve>,
}

impl ConvergenceStudy {
    /// Whether the gap shrinks strictly from each `l` to the next.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_diff < w[0].sup_diff)
    }

    /// CSV with columns `l,sup_norm_diff,captured_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,sup_norm_diff,captured_norm\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.12e},{:.12e}\n", r.l, r.sup_diff, r.captured_norm));
        }
        out
    }
}

/// `sup_t |F^(l)(t) - F^K(t)|` over `t_grid` for each box length.
pub fn convergence_study(packet: &WavePacket, box_lengths: &[f64], t_grid: &[f64]) -> Result<ConvergenceStudy> {
    convergence_study_with(packet, box_lengths, t_grid, WeightOptions::default())
}

pub fn convergence_study_with(
    packet: &WavePacket,
    box_lengths: &[f64],
    t_grid: &[f64],
    opts: WeightOptions,
) -> Result<ConvergenceStudy> {
    check_grid(t_grid)?;
    let units = packet.units();
    let kijowski = kijowski_accumulated(packet, t_grid)?;
    let mut rows = Vec::new();
    let mut confined = Vec::new();
    for &l in box_lengths {
        let bx = BoxConfig::with_units(l, units.mu, units.hbar)?;
        let w = spectral_weights_with(packet, &bx, opts)?;
        let c = accumulated_curve(&w, t_grid)?;
        rows.push(ConvergenceRow {
            l,
            sup_diff: c.sup_diff(&kijowski)?,
            captured_norm: w.captured_norm,
            roots_per_parity: w.count(Parity::Odd),
        });
        confined.push(c);
    }
    Ok(ConvergenceStudy { rows, kijowski, confined })
}
