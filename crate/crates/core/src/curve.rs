//! Time series of densities and accumulated probabilities.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Density,
    Accumulated,
    IntegratedFlux,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Density => "density",
            CurveKind::Accumulated => "accumulated",
            CurveKind::IntegratedFlux => "integrated_flux",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
    pub label: String,
}

impl Curve {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: CurveKind, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Construction(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_grid(&times)?;
        Ok(Curve { times, values, kind, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `sup |self - other|` on a shared grid.
    pub fn sup_diff(&self, other: &Curve) -> Result<f64> {
        self.sup_diff_within(other, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `sup |self - other|` over grid times in `[lo, hi]`.
    pub fn sup_diff_within(&self, other: &Curve, lo: f64, hi: f64) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::Domain("curves are sampled on different grids".into()));
        }
        Ok(self
            .times
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - slack)
    }

    /// Index of the largest value.
    pub fn argmax(&self) -> Option<usize> {
        (0..self.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
    }

    /// CSV with columns `t,value,kind,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,kind,label\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{:.12e},{:.15e},{},{}\n", t, v, self.kind, self.label));
        }
        out
    }
}

pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("time grid contains non-finite values".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n` equally spaced times from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Curve::new(vec![0.0, 0.0], vec![1.0, 1.0], CurveKind::Density, "x").is_err());
        assert!(Curve::new(vec![0.0, 1.0], vec![1.0], CurveKind::Density, "x").is_err());
        assert!(Curve::new(vec![0.0, f64::NAN], vec![1.0, 1.0], CurveKind::Density, "x").is_err());
    }

    #[test]
    fn sup_diff_and_csv() {
        let a = Curve::new(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0], CurveKind::Accumulated, "a").unwrap();
        let b = Curve::new(linspace(0.0, 1.0, 3), vec![0.1, 0.5, 0.4], CurveKind::Accumulated, "b").unwrap();
        assert!((a.sup_diff(&b).unwrap() - 0.6).abs() < 1e-15);
        assert!((a.sup_diff_within(&b, 0.0, 0.6).unwrap() - 0.1).abs() < 1e-15);
        assert!(a.is_nondecreasing(0.0));
        assert!(!b.is_nondecreasing(0.0));
        let csv = a.to_csv();
        assert!(csv.starts_with("t,value,kind,label\n"));
        assert!(csv.lines().nth(1).unwrap().ends_with(",accumulated,a"));
    }
}
