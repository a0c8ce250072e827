//! Kijowski's arrival-time distribution at the origin for free packets.
//!
//! Two independent routes to the density:
//! * momentum representation: the two half-line amplitudes
//!   `A_±(t) = ∫_{±p>0} sqrt(|p|/2 pi mu hbar) e^{-i p^2 t/2 mu hbar} psi~(p) dp`,
//!   `Pi(t) = |A_+|^2 + |A_-|^2`;
//! * position representation: overlaps with the even/odd eigenfunctions
//!   built from `D_{1/2}`.
//!
//! The momentum integrals use `p = ±u^2`, which removes the `sqrt(p)`
//! endpoint singularity. Where it is well conditioned the contour is
//! rotated onto the steepest-descent ray `p = e^{∓i pi/4} w`, on which the
//! integrand decays like a Gaussian and does not oscillate; otherwise
//! oscillation-resolving panels on the real axis are used.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;

use crate::curve::{check_grid, Curve, CurveKind};
use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::parabolic_cylinder_d_half;
use crate::spectrum::Parity;
use crate::states::{overlap_panels, Units, WavePacket, NEGLIGIBLE};

pub const DEFAULT_PANEL_BUDGET: usize = 400_000;

/// Largest growth exponent tolerated on the rotated ray.
const ROTATION_GAIN: f64 = 8.0;
/// Decay exponent at which the rotated integral is cut off.
const ROTATED_CUTOFF: f64 = 50.0;
/// Cancellation bound on the rotated route, relative to the density.
const ROTATED_REL_ERROR: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    RealAxis,
    Rotated,
}

/// The two half-line amplitudes at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub plus: Complex64,
    pub minus: Complex64,
    pub route: Route,
}

impl Amplitudes {
    pub fn density(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }
}

/// Momentum-representation evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kijowski {
    /// Maximum number of real-axis panels per half-line integral.
    pub panel_budget: usize,
    /// Permit the steepest-descent rotation.
    pub allow_rotation: bool,
    /// Absolute tolerance of time integrals.
    pub time_tol: f64,
}

impl Default for Kijowski {
    fn default() -> Self {
        Kijowski { panel_budget: DEFAULT_PANEL_BUDGET, allow_rotation: true, time_tol: 1e-11 }
    }
}

fn require_full_line(packet: &WavePacket) -> Result<()> {
    if packet.is_truncated() {
        return Err(Error::Unsupported("Kijowski's distribution is defined for untruncated packets".into()));
    }
    Ok(())
}

impl Kijowski {
    pub fn amplitudes(&self, packet: &WavePacket, t: f64) -> Result<Amplitudes> {
        require_full_line(packet)?;
        if !t.is_finite() {
            return Err(Error::Domain(format!("time {t} is not finite")));
        }
        let eff = packet.time() + t;
        if self.allow_rotation && eff.abs() >= rotation_threshold(packet) {
            if let Some(a) = self.rotated(packet, t)? {
                return Ok(a);
            }
        }
        self.real_axis(packet, t)
    }

    pub fn density(&self, packet: &WavePacket, t: f64) -> Result<f64> {
        Ok(self.amplitudes(packet, t)?.density())
    }

    /// Real-axis route only.
    pub fn real_axis(&self, packet: &WavePacket, t: f64) -> Result<Amplitudes> {
        require_full_line(packet)?;
        Ok(Amplitudes {
            plus: self.real_axis_branch(packet, t, 1.0)?,
            minus: self.real_axis_branch(packet, t, -1.0)?,
            route: Route::RealAxis,
        })
    }

    fn real_axis_branch(&self, packet: &WavePacket, t: f64, alpha: f64) -> Result<Complex64> {
        let units = packet.units();
        let (mu, hbar) = (units.mu, units.hbar);
        let eff = (packet.time() + t).abs();
        let comps = packet.raw_components();
        let x_rate = comps.iter().map(|c| c.0.abs()).fold(0.0, f64::max) / hbar;
        let sig = comps.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let dp_env = hbar / sig;
        // phase derivative in u of -(p x0)/hbar - p^2 T/(2 mu hbar), p = u^2
        let rate = |u: f64| 2.0 * u * (x_rate + u * u * eff / (mu * hbar));
        let env = |u: f64| if u * u < dp_env { dp_env.sqrt() } else { dp_env / (2.0 * u) };

        let mut spans = Vec::new();
        for (a, b) in packet.momentum_support(NEGLIGIBLE) {
            let (lo, hi) = if alpha > 0.0 { (a.max(0.0), b) } else { ((-b).max(0.0), -a) };
            if hi > lo {
                spans.push((lo.sqrt(), hi.sqrt()));
            }
        }

        let gl = quad::gauss_legendre(8);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut used = 0usize;
        for (ua, ub) in spans {
            let mut u = ua;
            while u < ub {
                let step = |x: f64| (2.0 * PI / (8.0 * rate(x).max(1e-300))).min(0.5 * env(x));
                let mut h = step(u).min(ub - u);
                h = h.min(step((u + h).min(ub)));
                let b = if ub - (u + h) < 1e-3 * h { ub } else { u + h };
                let (mid, half) = (0.5 * (u + b), 0.5 * (b - u));
                let mut s = Complex64::new(0.0, 0.0);
                for &(x, w) in gl {
                    let uu = mid + half * x;
                    s += packet.momentum_shifted(Complex64::from(alpha * uu * uu), t) * (uu * uu * w);
                }
                acc += s * half;
                u = b;
                used += 1;
                if used > self.panel_budget {
                    return Err(Error::accuracy(
                        format!(
                            "Kijowski density at t = {t}: oscillation count exceeds the panel budget of {}; \
                             use a coarser time or a larger budget",
                            self.panel_budget
                        ),
                        used as f64,
                    ));
                }
            }
        }
        Ok(acc * (2.0 / (2.0 * PI * mu * hbar).sqrt()))
    }

    /// Rotated route, or `None` when cancellation along the ray would cost
    /// more than the allowed relative error.
    fn rotated(&self, packet: &WavePacket, t: f64) -> Result<Option<Amplitudes>> {
        let (plus, m_plus) = match rotated_branch(packet, t, 1.0) {
            Some(v) => v,
            None => return Ok(None),
        };
        let (minus, m_minus) = match rotated_branch(packet, t, -1.0) {
            Some(v) => v,
            None => return Ok(None),
        };
        let amps = Amplitudes { plus, minus, route: Route::Rotated };
        let d = amps.density();
        let eps = 1e-15;
        let err = 2.0 * eps * (m_plus * plus.norm() + m_minus * minus.norm()) + (eps * (m_plus + m_minus)).powi(2);
        if err <= ROTATED_REL_ERROR * d || (d == 0.0 && m_plus + m_minus == 0.0) {
            Ok(Some(amps))
        } else {
            Ok(None)
        }
    }

    /// `F^K(t)` on an increasing grid.
    pub fn accumulated(&self, packet: &WavePacket, times: &[f64]) -> Result<Curve> {
        require_full_line(packet)?;
        check_grid(times)?;
        let w = Window::of(packet);
        let t_low = w.low - packet.time();
        let mut values = Vec::with_capacity(times.len());
        let mut prev = t_low;
        let mut acc = None;
        for &t in times {
            if t < t_low {
                values.push(self.lower_tail(packet, t)?);
                continue;
            }
            let base = match acc {
                Some(v) => v,
                None => self.lower_tail(packet, t_low)?,
            };
            let v = base + self.integrate(packet, prev, t)?;
            acc = Some(v);
            prev = t;
            values.push(v);
        }
        Curve::new(times.to_vec(), values, CurveKind::Accumulated, "kijowski")
    }

    /// `∫ Pi(t) dt` over the whole line.
    pub fn total(&self, packet: &WavePacket) -> Result<f64> {
        require_full_line(packet)?;
        let w = Window::of(packet);
        let (lo, hi) = (w.low - packet.time(), w.high - packet.time());
        Ok(self.lower_tail(packet, lo)? + self.integrate(packet, lo, hi)? + self.upper_tail(packet, hi)?)
    }

    fn integrate(&self, packet: &WavePacket, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let mut failure = None;
        let (v, _) = quad::adaptive(a, b, self.time_tol, 40, |t| match self.density(packet, t) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }

    /// `∫_{-inf}^{t_c} Pi` through `t = t_c + 1/u0^2 - 1/u^2`, `u in (0, u0]`.
    fn lower_tail(&self, packet: &WavePacket, t_c: f64) -> Result<f64> {
        self.tail(packet, t_c, -1.0)
    }

    /// `∫_{t_c}^{inf} Pi`.
    fn upper_tail(&self, packet: &WavePacket, t_c: f64) -> Result<f64> {
        self.tail(packet, t_c, 1.0)
    }

    fn tail(&self, packet: &WavePacket, t_c: f64, dir: f64) -> Result<f64> {
        let eff = packet.time() + t_c;
        let thr = rotation_threshold(packet);
        if dir * eff < thr {
            return Err(Error::accuracy(
                format!("tail cutoff at t = {t_c} lies inside the arrival window"),
                f64::NAN,
            ));
        }
        let u0 = 1.0 / eff.abs().sqrt();
        let mut failure = None;
        let (v, _) = quad::adaptive(0.0, u0, self.time_tol, 40, |u| {
            let t = t_c + dir * (1.0 / (u * u) - 1.0 / (u0 * u0));
            match self.density(packet, t) {
                Ok(d) => 2.0 * d / (u * u * u),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        })
        .map_err(|e| match e {
            Error::Accuracy { estimate, .. } => {
                Error::accuracy(format!("arrival-time tail beyond t = {t_c} not resolved"), estimate)
            }
            other => other,
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

/// Growth coefficients along the rotated ray and the ray's own data.
fn rotated_branch(packet: &WavePacket, t: f64, alpha: f64) -> Option<(Complex64, f64)> {
    let units = packet.units();
    let (mu, hbar) = (units.mu, units.hbar);
    let eff = packet.time() + t;
    let sg = eff.signum();
    let theta = -FRAC_PI_4 * sg;
    let ray = Complex64::from_polar(1.0, theta);
    let a = eff.abs() / (2.0 * mu * hbar);
    let c = packet
        .raw_components()
        .iter()
        .map(|&(x0, p0, s)| {
            let s2 = s * s / (hbar * hbar);
            (alpha * (SQRT_2 * s2 * p0 - x0 * sg / (SQRT_2 * hbar))).max(0.0)
        })
        .fold(0.0, f64::max);
    let wmax = (c + (c * c + 4.0 * a * ROTATED_CUTOFF).sqrt()) / (2.0 * a);
    let vmax = wmax.sqrt();
    let f = |v: f64| packet.momentum_shifted(ray * (alpha * v * v), t) * (v * v);
    let scale: f64 = quad::panels(0.0, vmax, 32, 8, |v| f(v).norm());
    if scale == 0.0 {
        return Some((Complex64::new(0.0, 0.0), 0.0));
    }
    let mut n = 16;
    let mut prev = quad::panels(0.0, vmax, n, 16, f);
    let v = loop {
        n *= 2;
        let next = quad::panels(0.0, vmax, n, 16, f);
        if (next - prev).norm() <= 1e-14 * scale {
            break next;
        }
        if n >= 1024 {
            return None;
        }
        prev = next;
    };
    let pre = 2.0 / (2.0 * PI * mu * hbar).sqrt();
    let phase = Complex64::from_polar(1.0, 1.5 * theta);
    Some((v * phase * pre, scale * pre))
}

/// `|t + tau|` beyond which the rotated route is used.
pub fn rotation_threshold(packet: &WavePacket) -> f64 {
    let units = packet.units();
    let c = packet
        .raw_components()
        .iter()
        .map(|&(x0, p0, s)| SQRT_2 * s * s * p0.abs() / (units.hbar * units.hbar) + x0.abs() / (SQRT_2 * units.hbar))
        .fold(0.0, f64::max);
    c * c * units.mu * units.hbar / (2.0 * ROTATION_GAIN)
}

/// Arrival window in effective time `t + tau`, covariant by construction.
struct Window {
    low: f64,
    high: f64,
}

impl Window {
    fn of(packet: &WavePacket) -> Self {
        let u = packet.units();
        let thr = rotation_threshold(packet);
        let spread = packet
            .raw_components()
            .iter()
            .map(|c| u.mu * c.2 * c.2 / u.hbar)
            .fold(0.0, f64::max);
        let guard = 2.0 * thr.max(spread);
        let (mut low, mut high) = (-guard, guard);
        for (x0, p0, s) in packet.raw_components() {
            if p0.abs() * s <= u.hbar {
                continue;
            }
            let arrive = -u.mu * x0 / p0;
            let width = u.mu * s / p0.abs() + u.mu * x0.abs() * u.hbar / (2.0 * s * p0 * p0);
            low = low.min(arrive - 10.0 * width);
            high = high.max(arrive + 10.0 * width);
        }
        Window { low, high }
    }
}

/// Momentum-representation density `Pi(t)`.
pub fn kijowski_density_momentum(packet: &WavePacket, t: f64) -> Result<f64> {
    Kijowski::default().density(packet, t)
}

/// `F^K(t) = ∫_{-inf}^t Pi` on an increasing grid.
pub fn kijowski_accumulated(packet: &WavePacket, times: &[f64]) -> Result<Curve> {
    Kijowski::default().accumulated(packet, times)
}

/// Density curve by the momentum route.
pub fn density_curve(packet: &WavePacket, times: &[f64]) -> Result<Curve> {
    check_grid(times)?;
    let k = Kijowski::default();
    let values = par_map(times, |t| k.density(packet, t))?;
    Curve::new(times.to_vec(), values, CurveKind::Density, "kijowski")
}

/// Density curve by the position route (no grid time may be 0).
pub fn density_curve_position(packet: &WavePacket, times: &[f64]) -> Result<Curve> {
    check_grid(times)?;
    let values = par_map(times, |t| kijowski_density_position(packet, t))?;
    Curve::new(times.to_vec(), values, CurveKind::Density, "kijowski_position")
}

/// Evaluate `f` at every point, spread over the available cores.
pub fn par_map<T: Send>(xs: &[f64], f: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(xs.len().max(1));
    let chunk = xs.len().div_ceil(threads).max(1);
    let f = &f;
    let parts: Vec<Result<Vec<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = xs
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(|&x| f(x)).collect::<Result<Vec<T>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(xs.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Even and odd position-representation eigenfunctions at `(t, q)`.
pub fn eigenfunction_pair(t: f64, q: f64, units: Units) -> Result<(Complex64, Complex64)> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("position eigenfunctions need a nonzero finite time, got {t}")));
    }
    if t < 0.0 {
        let (e, o) = eigenfunction_pair(-t, q, units)?;
        return Ok((e.conj(), o.conj()));
    }
    let k = (units.mu / (units.hbar * t)).sqrt();
    let z = Complex64::from_polar(k * q, FRAC_PI_4);
    let dm = parabolic_cylinder_d_half(-z)?;
    let dp = parabolic_cylinder_d_half(z)?;
    let common = 0.25 * (2.0 / (PI * t)).sqrt() * k.sqrt();
    let chirp = Complex64::from_polar(common, -units.mu * q * q / (4.0 * units.hbar * t));
    let even = Complex64::from_polar(1.0, 3.0 * PI / 8.0) * chirp * (dm + dp);
    let odd = Complex64::from_polar(1.0, -PI / 8.0) * chirp * (dm - dp);
    Ok((even, odd))
}

/// `phi_t^{e/o}(q)`.
pub fn position_eigenfunction(t: f64, parity: Parity, q: f64, units: Units) -> Result<Complex64> {
    let (e, o) = eigenfunction_pair(t, q, units)?;
    Ok(match parity {
        Parity::Even => e,
        Parity::Odd => o,
    })
}

/// `(<phi_t^e|psi>, <phi_t^o|psi>)` by panel quadrature over the packet support.
pub fn position_overlaps(packet: &WavePacket, t: f64) -> Result<(Complex64, Complex64)> {
    if t == 0.0 {
        return Err(Error::Domain("position eigenfunctions are undefined at t = 0".into()));
    }
    let units = packet.units();
    let mut even = Complex64::new(0.0, 0.0);
    let mut odd = Complex64::new(0.0, 0.0);
    for (a, b) in packet.support(NEGLIGIBLE * 1e-3) {
        let reach = a.abs().max(b.abs());
        let rate = units.mu * reach / (units.hbar * t.abs()) + packet.phase_rate(a, b);
        let panels = overlap_panels(a, b, rate);
        for (q, w) in quad::panel_rule(a, b, panels, 8) {
            let (fe, fo) = eigenfunction_pair(t, q, units)?;
            let psi = packet.eval_position(q) * w;
            even += fe.conj() * psi;
            odd += fo.conj() * psi;
        }
    }
    Ok((even, odd))
}

/// Position-representation density `|<phi^e|psi>|^2 + |<phi^o|psi>|^2`.
pub fn kijowski_density_position(packet: &WavePacket, t: f64) -> Result<f64> {
    let (e, o) = position_overlaps(packet, t)?;
    Ok(e.norm_sqr() + o.norm_sqr())
}
