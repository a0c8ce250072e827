//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ctoa::commands::backflow_windows;
use ctoa::config::ExperimentConfig;
use ctoa::curve::linspace;
use ctoa::discrete::{accumulated_curve, spectral_weights_with, WeightOptions};
use ctoa::dynamics::{flux_curve, integrated_flux_curve, CollapseOptions};
use ctoa::kijowski::{density_curve, kijowski_accumulated, Kijowski};
use ctoa::operator::compare_with_analytic;
use ctoa::spectrum::{spacing_near, BoxConfig, Parity};
use ctoa::states::{Units, WavePacket};
use ctoa::verify::{collapse_scans, covariance_error, phase_identity, representation_gap, strictly_decreasing};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into() }
    }
}

fn packet(preset: &str) -> ctoa::Result<WavePacket> {
    ExperimentConfig::preset(preset)?.wave_packet()
}

fn spectral_oracle() -> ctoa::Result<Verdict> {
    let start = Instant::now();
    let rows = compare_with_analytic(&BoxConfig::periodic(1.0)?, 2000, 10)?;
    let elapsed = start.elapsed();
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(Verdict::new(
        worst <= 1e-6 && elapsed <= Duration::from_secs(60),
        format!("top 10 |tau| at l = 1, 2000 nodes: max rel error {worst:.3e}, {elapsed:.1?}"),
    ))
}

fn representation_equivalence() -> ctoa::Result<Verdict> {
    let start = Instant::now();
    let mut times_neg = linspace(-1.0, -0.02, 25);
    times_neg.extend(linspace(0.02, 1.0, 25));
    let cases = [
        ("fig1", linspace(0.004, 0.02, 33)),
        ("fig2", linspace(0.002, 0.012, 33)),
        ("fig3", times_neg),
    ];
    let mut gaps = Vec::new();
    for (name, times) in cases {
        gaps.push((name, representation_gap(&packet(name)?, &times)?));
    }
    let elapsed = start.elapsed();
    let worst = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    let list = gaps.iter().map(|(n, g)| format!("{n} {g:.2e}")).collect::<Vec<_>>().join(", ");
    Ok(Verdict::new(
        worst <= 1e-6 && elapsed <= Duration::from_secs(120),
        format!("momentum vs position route, max rel gap: {list}; {elapsed:.1?}"),
    ))
}

fn covariance() -> ctoa::Result<Verdict> {
    let pk = packet("fig1")?;
    let k = Kijowski::default();
    let taus = [-0.006, -0.002, 0.0015, 0.004, 0.007];
    let times = [0.002, 0.006, 0.0095, 0.013];
    let mut worst: f64 = 0.0;
    for tau in taus {
        let ev = pk.evolved(tau)?;
        let shifted: Vec<f64> = times.iter().map(|t| t + tau).collect();
        let a = k.accumulated(&ev, &times)?;
        let b = k.accumulated(&pk, &shifted)?;
        worst = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
    }
    let density = covariance_error(&pk, &taus, &times)?;
    Ok(Verdict::new(
        worst <= 1e-8,
        format!("20 (tau, t) pairs: sup |F^K_tau(t) - F^K(t + tau)| {worst:.2e}; density rel {density:.2e}"),
    ))
}

fn fig1_reproduction() -> ctoa::Result<Verdict> {
    let pk = packet("fig1")?;
    let times = linspace(0.005, 0.02, 301);
    let w = spectral_weights_with(&pk, &BoxConfig::periodic(10.0)?, WeightOptions::default())?;
    let gap = accumulated_curve(&w, &times)?.sup_diff(&kijowski_accumulated(&pk, &times)?)?;
    Ok(Verdict::new(gap <= 0.02, format!("l = 10 on [0.005, 0.02]: sup gap {gap:.3e}")))
}

fn fig2_backflow() -> ctoa::Result<Verdict> {
    let cfg = ExperimentConfig::preset("fig2")?;
    let pk = cfg.wave_packet()?;
    let times = cfg.times();
    let flux = flux_curve(&pk, &times)?;
    let integrated = integrated_flux_curve(&pk, &times)?;
    let kij = kijowski_accumulated(&pk, &times)?;
    let dens = density_curve(&pk, &times)?;
    let w = spectral_weights_with(&pk, &BoxConfig::periodic(10.0)?, WeightOptions::default())?;
    let confined = accumulated_curve(&w, &times)?;
    let windows = backflow_windows(&flux, &integrated, &kij, &confined)?;
    let Some((a, b)) = windows.first().zip(windows.last()).map(|(f, l)| (f.start, l.end)) else {
        return Ok(Verdict::new(false, "no interval with decreasing integrated flux"));
    };
    let min_density = dens.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let inset = confined.sup_diff_within(&kij, a, b)?;
    let flux_gap = integrated.sup_diff_within(&kij, a, b)?;
    let rising = windows.iter().all(|w| w.kijowski_rise > 0.0);
    Ok(Verdict::new(
        min_density >= 0.0 && rising && inset <= 0.02,
        format!(
            "{} backflow intervals in [{a:.5}, {b:.5}], min J {:.2}; min Pi {min_density:.2e}; sup |F^(10) - F^K| {inset:.2e} vs sup |F_J - F^K| {flux_gap:.2e}",
            windows.len(),
            windows.iter().map(|w| w.min_flux).fold(f64::INFINITY, f64::min)
        ),
    ))
}

fn fig3_convergence() -> ctoa::Result<Verdict> {
    let cfg = ExperimentConfig::preset("fig3")?;
    let pk = cfg.wave_packet()?;
    let times = cfg.times();
    let kij = kijowski_accumulated(&pk, &times)?;
    let mut gaps = Vec::new();
    for bx in cfg.boxes()? {
        let w = spectral_weights_with(&pk, &bx, WeightOptions::default())?;
        gaps.push(accumulated_curve(&w, &times)?.sup_diff(&kij)?);
    }
    let list = gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ");
    Ok(Verdict::new(strictly_decreasing(&gaps), format!("sup gap at l = 3, 5, 15: {list}")))
}

fn phase_identity_check() -> ctoa::Result<Verdict> {
    let (c, var) = phase_identity(0.01, 1.5, 100, Units::default())?;
    Ok(Verdict::new(
        var <= 1e-10 && (c.norm() - 1.0).abs() <= 1e-10,
        format!("ratio variance {var:.2e}, |c| = {:.12}, arg c = {:.6} pi", c.norm(), c.arg() / PI),
    ))
}

fn spacing_asymptotics() -> ctoa::Result<Verdict> {
    let bx = BoxConfig::periodic(10.0)?;
    let mut worst: f64 = 0.0;
    for parity in [Parity::Odd, Parity::Even] {
        for tau in [0.0098, 0.01, 0.0102] {
            let (s, p) = spacing_near(&bx, parity, tau)?;
            worst = worst.max(((s - p) / p).abs());
        }
    }
    Ok(Verdict::new(worst <= 0.01, format!("l = 10 near tau = 0.01, both parities: max rel error {worst:.2e}")))
}

fn collapse_dynamics() -> ctoa::Result<Verdict> {
    let ls = [1.0, 2.0, 3.0, 4.0, 5.0];
    let opts = CollapseOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let scans = collapse_scans(&ls, parity, 0.01, opts, Units::default())?;
        let whm: Vec<f64> = scans.iter().map(|s| s.whm_at_tau()).collect();
        let offsets: Vec<f64> = scans.iter().map(|s| s.variance_offset_steps()).collect();
        let centroid_ok = scans.iter().all(|s| s.centroid_at_tau().abs() <= 2.0 * s.l / opts.grid_points as f64);
        let decreasing = strictly_decreasing(&whm);
        let synchronous = offsets.iter().all(|o| o.abs() <= 1.0);
        ok &= decreasing && synchronous && centroid_ok;
        parts.push(format!(
            "{parity}: WHM {} ({}), min-variance offset in steps [{}], centroid at tau within grid {}",
            whm.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>().join(" "),
            if decreasing { "decreasing" } else { "NOT decreasing" },
            offsets.iter().map(|o| format!("{o:+.0}")).collect::<Vec<_>>().join(" "),
            centroid_ok
        ));
    }
    Ok(Verdict::new(ok, parts.join("; ")))
}

fn invariant_suite() -> ctoa::Result<Verdict> {
    let dir = std::env::temp_dir().join(format!("ctoa-acceptance-{}", std::process::id()));
    let status = Command::new(env!("CARGO_BIN_EXE_ctoa"))
        .args(["verify", "--config", "preset:default", "--out"])
        .arg(&dir)
        .output()
        .map_err(|e| ctoa::Error::Io(e.to_string()))?;
    let table = std::fs::read_to_string(dir.join("verify.csv")).unwrap_or_default();
    let _ = std::fs::remove_dir_all(&dir);
    let rows = table.lines().skip(1).count();
    let failed: Vec<&str> = table
        .lines()
        .skip(1)
        .filter(|l| l.contains(",false,true,"))
        .map(|l| l.split(',').nth(1).unwrap_or(""))
        .collect();
    Ok(Verdict::new(
        status.status.code() == Some(0) && failed.is_empty() && rows > 0,
        format!("ctoa verify exit {:?}, {rows} checks, failing gating checks: {failed:?}", status.status.code()),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> ctoa::Result<Verdict>); 10] = [
        ("spectral oracle equivalence", spectral_oracle),
        ("representation equivalence", representation_equivalence),
        ("covariance", covariance),
        ("single Gaussian, l = 10", fig1_reproduction),
        ("backflow discrimination", fig2_backflow),
        ("convergence across l", fig3_convergence),
        ("phase identity", phase_identity_check),
        ("eigenvalue spacing", spacing_asymptotics),
        ("collapse dynamics", collapse_dynamics),
        ("invariant suite", invariant_suite),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        if !v.passed {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{:.1?}]",
            if v.passed { "PASS" } else { "FAIL" },
            k + 1,
            v.detail,
            start.elapsed()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
