//! Experiment configuration: flat keys plus a `[[packet]]` list, in TOML.

use serde::{Deserialize, Serialize};

use crate::curve::{check_grid, linspace};
use crate::dynamics::CollapseOptions;
use crate::error::{Error, Result};
use crate::spectrum::BoxConfig;
use crate::states::{GaussianSpec, Units, WavePacket, WidthConvention};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub mu: f64,
    pub hbar: f64,
    pub gamma: f64,
    pub width: WidthConvention,
    /// Box half-lengths.
    pub lengths: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub t_points: usize,
    /// Window for the sup-norm gap; the whole time grid when absent.
    pub window: Option<[f64; 2]>,
    /// Eigenvalues per parity in the spectrum export.
    pub count: usize,
    pub nodes: usize,
    pub spectral_tol: f64,
    pub gap_tol: f64,
    pub target_deficit: f64,
    pub max_roots: usize,
    pub bin_width: Option<f64>,
    pub target_time: f64,
    pub grid_points: usize,
    pub steps_per_tau: usize,
    pub half_span_steps: usize,
    /// Write the full density at each eigenvalue.
    pub snapshots: bool,
    pub bessel_perturbation: f64,
    pub covariance_taus: Vec<f64>,
    pub packet: Vec<GaussianSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "custom".into(),
            mu: 1.0,
            hbar: 1.0,
            gamma: 0.0,
            width: WidthConvention::Fwhm,
            lengths: vec![1.0],
            t_start: 0.0,
            t_end: 0.03,
            t_points: 301,
            window: None,
            count: 10,
            nodes: crate::operator::DEFAULT_NODES,
            spectral_tol: 1e-6,
            gap_tol: 0.02,
            target_deficit: 1e-4,
            max_roots: 65536,
            bin_width: None,
            target_time: 0.01,
            grid_points: 1 << 15,
            steps_per_tau: 200,
            half_span_steps: 40,
            snapshots: false,
            bessel_perturbation: 0.0,
            covariance_taus: vec![-0.004, -0.001, 0.0, 0.002, 0.005],
            packet: Vec::new(),
        }
    }
}

const PRESETS: [(&str, &str); 6] = [
    ("default", include_str!("../presets/default.toml")),
    ("fig1", include_str!("../presets/fig1.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Usage(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// One of `default`, `fig1` .. `fig5`.
    pub fn preset(name: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_toml(text))
            .unwrap_or_else(|| Err(Error::Usage(format!("unknown preset {name}"))))
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(n, _)| *n)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if self.lengths.is_empty() {
            return usage("lengths must not be empty".into());
        }
        if self.lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return usage("lengths must be positive".into());
        }
        if !(self.mu > 0.0 && self.hbar > 0.0) {
            return usage("mu and hbar must be positive".into());
        }
        for (name, v) in [
            ("spectral_tol", self.spectral_tol),
            ("gap_tol", self.gap_tol),
            ("target_deficit", self.target_deficit),
            ("target_time", self.target_time),
        ] {
            if !(v > 0.0) {
                return usage(format!("{name} must be positive"));
            }
        }
        if self.t_points < 2 || !(self.t_end > self.t_start) {
            return usage("time grid must have t_end > t_start and at least 2 points".into());
        }
        if let Some([a, b]) = self.window {
            if !(b > a) {
                return usage("window must be increasing".into());
            }
        }
        if self.count == 0 || self.nodes < 8 || self.steps_per_tau == 0 {
            return usage("count, nodes and steps_per_tau must be positive".into());
        }
        if !self.grid_points.is_power_of_two() {
            return usage("grid_points must be a power of two".into());
        }
        check_grid(&self.times()).map_err(|e| Error::Usage(e.to_string()))
    }

    pub fn units(&self) -> Units {
        Units { mu: self.mu, hbar: self.hbar }
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(self.t_start, self.t_end, self.t_points)
    }

    pub fn gap_window(&self) -> (f64, f64) {
        self.window.map(|[a, b]| (a, b)).unwrap_or((self.t_start, self.t_end))
    }

    pub fn boxes(&self) -> Result<Vec<BoxConfig>> {
        self.lengths.iter().map(|&l| BoxConfig::new(l, self.mu, self.hbar, self.gamma)).collect()
    }

    pub fn wave_packet(&self) -> Result<WavePacket> {
        if self.packet.is_empty() {
            return Err(Error::Usage("this command needs at least one [[packet]] entry".into()));
        }
        WavePacket::new(&self.packet, self.width, Units::new(self.mu, self.hbar)?)
    }

    pub fn collapse_options(&self) -> CollapseOptions {
        CollapseOptions {
            grid_points: self.grid_points,
            steps_per_tau: self.steps_per_tau,
            half_span_steps: self.half_span_steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in ExperimentConfig::preset_names() {
            ExperimentConfig::preset(name).unwrap();
        }
        let f2 = ExperimentConfig::preset("fig2").unwrap();
        assert_eq!(f2.packet.len(), 2);
        assert_eq!(f2.packet[1].p0, 100.0);
        assert!(ExperimentConfig::preset("fig9").is_err());
    }

    #[test]
    fn validation_errors_are_usage_errors() {
        for text in ["lengths = []", "gap_tol = 0.0", "t_points = 1", "window = [0.2, 0.1]", "bogus = 1"] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Usage(_))), "{text}");
        }
        assert!(matches!(ExperimentConfig::default().wave_packet(), Err(Error::Usage(_))));
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::preset("fig3").unwrap();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }
}
