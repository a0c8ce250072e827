//! The four experiment commands behind the `ctoa` binary. Each writes CSV
//! files and a `manifest.toml` into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::curve::Curve;
use crate::discrete::{
    accumulated_curve, default_bin_width, density_histogram, spectral_weights_with, ConvergenceRow, ConvergenceStudy,
    WeightOptions,
};
use crate::dynamics::{collapse_scan, decreasing_windows, flux_curve, integrated_flux_curve, CollapseScan};
use crate::error::{Error, Result};
use crate::kijowski::{density_curve, kijowski_accumulated};
use crate::operator;
use crate::spectrum::{self, Parity};
use crate::states::{GaussianSpec, WavePacket};
use crate::verify::{self, all_passed, Check, SuiteOptions};

/// Files written, checks run and notes raised by one command.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub command: String,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

/// Process exit status for an outcome: 0 when every gating check passed, 1 otherwise.
pub fn exit_status(outcome: &Outcome) -> u8 {
    if outcome.passed() {
        0
    } else {
        1
    }
}

/// Process exit status for an error: 3 for numerical accuracy failures, 2 otherwise.
pub fn error_status(err: &Error) -> u8 {
    match err {
        Error::Accuracy { .. } | Error::Numeric(_) | Error::Bracket { .. } => 3,
        _ => 2,
    }
}

impl Outcome {
    fn new(command: &str) -> Self {
        Outcome { command: command.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Write through a temporary file and rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Writer<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        self.outcome.files.push(path);
        Ok(())
    }

    fn finish(mut self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let manifest = Manifest {
            command: self.outcome.command.clone(),
            version: env!("CARGO_PKG_VERSION"),
            passed: self.outcome.passed(),
            files: self
                .outcome
                .files
                .iter()
                .filter_map(|p| p.file_name().and_then(|n| n.to_str()).map(String::from))
                .collect(),
            notes: self.outcome.notes.clone(),
            checks: self
                .outcome
                .checks
                .iter()
                .map(|c| ManifestCheck {
                    module: c.module.into(),
                    name: c.name.clone(),
                    value: c.value,
                    tolerance: c.tolerance,
                    passed: c.passed,
                    gating: c.gating,
                    detail: c.detail.clone(),
                })
                .collect(),
            config: cfg.clone(),
        };
        let text = toml::to_string(&manifest).map_err(|e| Error::Io(format!("manifest: {e}")))?;
        let path = self.dir.join("manifest.toml");
        write_atomic(&path, &text)?;
        self.outcome.files.push(path);
        Ok(self.outcome)
    }
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    version: &'static str,
    passed: bool,
    files: Vec<String>,
    notes: Vec<String>,
    checks: Vec<ManifestCheck>,
    config: ExperimentConfig,
}

#[derive(Serialize)]
struct ManifestCheck {
    module: String,
    name: String,
    value: f64,
    tolerance: f64,
    passed: bool,
    gating: bool,
    detail: String,
}

fn tag(l: f64) -> String {
    format!("l{l}")
}

/// Spectrum CSV per length, the analytic-vs-oracle table, and the
/// eigenvalue spacing near `target_time`.
pub fn cmd_spectrum(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let mut w = Writer { dir: out, outcome: Outcome::new("spectrum") };
    for bx in cfg.boxes()? {
        let l = tag(bx.l);
        if bx.gamma != 0.0 {
            w.outcome
                .notes
                .push(format!("{l}: gamma = {} has no analytic spectrum; writing the Nystrom spectrum only", bx.gamma));
            let vals = operator::oracle_eigenvalues(&operator::nystrom(&bx, cfg.nodes)?, 2 * cfg.count)?;
            w.put(&format!("oracle_{l}.csv"), &operator::oracle_csv(&vals))?;
            continue;
        }
        let mut records = spectrum::eigenvalues(&bx, Parity::Odd, cfg.count)?;
        records.extend(spectrum::eigenvalues(&bx, Parity::Even, cfg.count)?);
        w.put(&format!("spectrum_{l}.csv"), &spectrum::spectrum_csv(&records))?;

        let rows = operator::compare_with_analytic(&bx, cfg.nodes, 10)?;
        w.put(&format!("comparison_{l}.csv"), &operator::comparison_csv(&rows))?;
        let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        w.outcome.checks.push(
            Check::at_most("spectrum", format!("oracle vs analytic {l}"), worst, cfg.spectral_tol)
                .with_detail(format!("{} nodes, Richardson", cfg.nodes)),
        );

        let mut spacing = String::from("parity,tau,spacing,predicted,rel_error\n");
        for parity in [Parity::Odd, Parity::Even] {
            let (s, p) = spectrum::spacing_near(&bx, parity, cfg.target_time)?;
            let rel = ((s - p) / p).abs();
            spacing.push_str(&format!("{parity},{:.6e},{s:.12e},{p:.12e},{rel:.3e}\n", cfg.target_time));
            w.outcome.checks.push(
                Check::at_most("spectrum", format!("spacing near t={} ({parity}) {l}", cfg.target_time), rel, 0.01)
                    .informational(),
            );
        }
        w.put(&format!("spacing_{l}.csv"), &spacing)?;
    }
    w.finish(cfg)
}

/// Interval on which the integrated flux decreases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackflowWindow {
    pub start: f64,
    pub end: f64,
    pub min_flux: f64,
    pub flux_drop: f64,
    pub kijowski_rise: f64,
    /// `sup |F_J - F^K|` in the window.
    pub flux_gap: f64,
    /// `sup |F^(l) - F^K|` in the window, largest `l`.
    pub confined_gap: f64,
}

/// Backflow windows of `integrated`, ignoring drops below `1e-9`.
pub fn backflow_windows(flux: &Curve, integrated: &Curve, kij: &Curve, confined: &Curve) -> Result<Vec<BackflowWindow>> {
    let mut out = Vec::new();
    for (a, b) in decreasing_windows(integrated) {
        let at = |c: &Curve, t: f64| c.times.iter().position(|&s| s == t).map(|k| c.values[k]).unwrap_or(f64::NAN);
        let drop = at(integrated, a) - at(integrated, b);
        if !(drop > 1e-9) {
            continue;
        }
        let min_flux = flux
            .times
            .iter()
            .zip(&flux.values)
            .filter(|(t, _)| **t >= a && **t <= b)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        out.push(BackflowWindow {
            start: a,
            end: b,
            min_flux,
            flux_drop: drop,
            kijowski_rise: at(kij, b) - at(kij, a),
            flux_gap: integrated.sup_diff_within(kij, a, b)?,
            confined_gap: confined.sup_diff_within(kij, a, b)?,
        });
    }
    Ok(out)
}

fn flux_csv(flux: &Curve, integrated: &Curve) -> String {
    let mut s = String::from("t,J,integrated_J\n");
    for i in 0..flux.len() {
        s.push_str(&format!("{:.12e},{:.15e},{:.15e}\n", flux.times[i], flux.values[i], integrated.values[i]));
    }
    s
}

/// Confined and Kijowski distributions, densities and flux for the packet.
pub fn cmd_distribution(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let packet = cfg.wave_packet()?;
    let times = cfg.times();
    let (lo, hi) = cfg.gap_window();
    let mut w = Writer { dir: out, outcome: Outcome::new("distribution") };

    let kij = kijowski_accumulated(&packet, &times)?;
    let dens = density_curve(&packet, &times)?;
    let flux = flux_curve(&packet, &times)?;
    let integrated = integrated_flux_curve(&packet, &times)?;
    w.put("kijowski_accumulated.csv", &kij.to_csv())?;
    w.put("kijowski_density.csv", &dens.to_csv())?;
    w.put("flux.csv", &flux_csv(&flux, &integrated))?;
    let min_density = dens.values.iter().cloned().fold(f64::INFINITY, f64::min);
    w.outcome.checks.push(Check::flag(
        "kijowski",
        "density nonnegative",
        min_density >= 0.0,
        format!("min {min_density:.3e}"),
    ));
    let t_peak = dens.argmax().map(|k| dens.times[k]).unwrap_or(0.5 * (lo + hi));

    let opts = WeightOptions { target_deficit: cfg.target_deficit, max_count: cfg.max_roots, ..WeightOptions::default() };
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for bx in cfg.boxes()? {
        let l = tag(bx.l);
        let weights = spectral_weights_with(&packet, &bx, opts)?;
        if let Some(msg) = &weights.warning {
            w.outcome.notes.push(format!("{l}: {msg}"));
        }
        let confined = accumulated_curve(&weights, &times)?;
        let bin = cfg.bin_width.unwrap_or_else(|| default_bin_width(&bx, t_peak.abs().max(1e-12)));
        let hist = density_histogram(&weights, bin, Some((cfg.t_start, cfg.t_end)))?;
        w.put(&format!("confined_{l}.csv"), &confined.to_csv())?;
        w.put(&format!("histogram_{l}.csv"), &hist.to_csv())?;
        w.put(&format!("weights_{l}.csv"), &weights.to_csv())?;
        let gap = confined.sup_diff_within(&kij, lo, hi)?;
        rows.push(ConvergenceRow {
            l: bx.l,
            sup_diff: gap,
            captured_norm: weights.captured_norm,
            roots_per_parity: weights.count(Parity::Odd),
        });
        curves.push(confined);
    }
    let last = rows.len() - 1;
    for (i, r) in rows.iter().enumerate() {
        let c = Check::at_most("discrete", format!("sup gap on [{lo}, {hi}] l{}", r.l), r.sup_diff, cfg.gap_tol)
            .with_detail(format!("captured norm {:.8}, {} roots per parity", r.captured_norm, r.roots_per_parity));
        w.outcome.checks.push(if i == last { c } else { c.informational() });
    }
    let study = ConvergenceStudy { rows, kijowski: kij.clone(), confined: curves };
    w.put("convergence.csv", &study.to_csv())?;
    if study.rows.len() > 1 {
        let gaps = study.rows.iter().map(|r| format!("{:.3e}", r.sup_diff)).collect::<Vec<_>>().join(" ");
        w.outcome
            .checks
            .push(Check::flag("discrete", "sup gap strictly decreasing in l", study.strictly_decreasing(), gaps));
    }

    let confined = &study.confined[last];
    let windows = backflow_windows(&flux, &integrated, &kij, confined)?;
    if !windows.is_empty() {
        let mut csv = String::from("start,end,min_J,flux_drop,kijowski_rise,sup_flux_gap,sup_confined_gap\n");
        for b in &windows {
            csv.push_str(&format!(
                "{:.8e},{:.8e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}\n",
                b.start, b.end, b.min_flux, b.flux_drop, b.kijowski_rise, b.flux_gap, b.confined_gap
            ));
        }
        w.put("backflow.csv", &csv)?;
        let a = windows.first().map(|b| b.start).unwrap_or(lo);
        let b = windows.last().map(|b| b.end).unwrap_or(hi);
        let inset = confined.sup_diff_within(&kij, a, b)?;
        let flux_gap = integrated.sup_diff_within(&kij, a, b)?;
        w.outcome.notes.push(format!(
            "{} backflow windows in [{a:.5}, {b:.5}]; sup |F_J - F^K| {flux_gap:.3e}, sup |F^(l) - F^K| {inset:.3e}",
            windows.len()
        ));
        w.outcome.checks.push(Check::flag(
            "kijowski",
            "F^K rises across backflow windows",
            windows.iter().all(|b| b.kijowski_rise > 0.0),
            "",
        ));
        w.outcome
            .checks
            .push(Check::at_most("discrete", "confined gap in backflow inset", inset, cfg.gap_tol));
    }
    w.finish(cfg)
}

/// Collapse scans for both parities at every length.
pub fn collapse_table(cfg: &ExperimentConfig) -> Result<Vec<(Parity, Vec<CollapseScan>)>> {
    let opts = cfg.collapse_options();
    [Parity::Even, Parity::Odd]
        .into_iter()
        .map(|parity| {
            let scans = cfg
                .boxes()?
                .iter()
                .map(|bx| collapse_scan(bx, parity, cfg.target_time, opts))
                .collect::<Result<Vec<_>>>()?;
            Ok((parity, scans))
        })
        .collect()
}

/// WHM-vs-l table, diagnostic series and density snapshots at the
/// eigenvalues nearest `target_time`.
pub fn cmd_dynamics(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let mut w = Writer { dir: out, outcome: Outcome::new("dynamics") };
    let mut table = String::from(
        "parity,l,n,tau,whm,variance,centroid,peak,t_min_variance,t_min_centroid,offset_steps,disconnected\n",
    );
    for (parity, scans) in collapse_table(cfg)? {
        for s in &scans {
            let l = tag(s.l);
            let r = &s.record;
            if (r.tau - cfg.target_time).abs() > 0.1 * cfg.target_time.abs() {
                w.outcome.notes.push(format!(
                    "{parity} {l}: no eigenvalue within 10% of t = {}; nearest tau_{} = {:.6e}",
                    cfg.target_time, r.n, r.tau
                ));
            }
            let d = s.diagnostics[s.diagnostics.len() / 2];
            table.push_str(&format!(
                "{parity},{},{},{:.12e},{:.8e},{:.8e},{:.3e},{:.8e},{:.12e},{:.12e},{:.2},{}\n",
                s.l,
                r.n,
                r.tau,
                d.whm,
                d.variance,
                d.centroid,
                d.peak,
                s.t_min_variance(),
                s.t_min_centroid(),
                s.variance_offset_steps(),
                d.disconnected
            ));
            w.put(&format!("series_{parity}_{l}.csv"), &s.series_csv())?;
            if cfg.snapshots {
                w.put(&format!("snapshot_{parity}_{l}.csv"), &s.snapshot_csv())?;
            }
        }
        let whm: Vec<f64> = scans.iter().map(|s| s.whm_at_tau()).collect();
        let peaks: Vec<f64> = scans.iter().map(|s| -s.peak_at_tau()).collect();
        let list = |v: &[f64]| v.iter().map(|x| format!("{:.4}", x.abs())).collect::<Vec<_>>().join(" ");
        w.outcome.checks.push(Check::flag(
            "dynamics",
            format!("WHM strictly decreasing in l ({parity})"),
            verify::strictly_decreasing(&whm),
            list(&whm),
        ));
        w.outcome.checks.push(Check::flag(
            "dynamics",
            format!("peak increasing in l ({parity})"),
            verify::strictly_decreasing(&peaks),
            list(&peaks),
        ));
        let worst = scans.iter().map(|s| s.variance_offset_steps().abs()).fold(0.0, f64::max);
        w.outcome.checks.push(
            Check::at_most("dynamics", format!("min-variance offset in steps ({parity})"), worst, 1.0)
                .with_detail(scans.iter().map(|s| format!("{:+.0}", s.variance_offset_steps())).collect::<Vec<_>>().join(" "))
                .informational(),
        );
    }
    w.put("whm.csv", &table)?;
    w.finish(cfg)
}

/// Suite options derived from a config: spectral checks at the first
/// length, everything else at its defaults in the config's units.
pub fn suite_options(cfg: &ExperimentConfig) -> Result<SuiteOptions> {
    let units = cfg.units();
    Ok(SuiteOptions {
        units,
        l: cfg.lengths[0],
        nodes: cfg.nodes,
        bessel_perturbation: cfg.bessel_perturbation,
        covariance_taus: cfg.covariance_taus.clone(),
        packet: WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], cfg.width, units)?,
        ..SuiteOptions::default()
    })
}

/// Run the invariant suite and write its table.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    let mut w = Writer { dir: out, outcome: Outcome::new("verify") };
    w.outcome.checks = verify::run_suite(&suite_options(cfg)?)?;
    w.put("verify.csv", &verify::checks_csv(&w.outcome.checks))?;
    w.finish(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_statuses() {
        assert_eq!(error_status(&Error::accuracy("x", 1.0)), 3);
        assert_eq!(error_status(&Error::Numeric("x".into())), 3);
        assert_eq!(error_status(&Error::Usage("x".into())), 2);
        assert_eq!(error_status(&Error::Domain("x".into())), 2);
        let mut o = Outcome::new("t");
        assert_eq!(exit_status(&o), 0);
        o.checks.push(Check::at_most("m", "c", 2.0, 1.0).informational());
        assert_eq!(exit_status(&o), 0);
        o.checks.push(Check::at_most("m", "c", 2.0, 1.0));
        assert_eq!(exit_status(&o), 1);
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, "x\n").unwrap();
        write_atomic(&p, "y\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "y\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
