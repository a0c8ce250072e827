//! Two Gaussians (p0 = 200, 100; x0 = -1, -0.5; FWHM 0.05) whose
//! flux at the origin turns negative, against Kijowski and the l = 10 box.

use ctoa::curve::linspace;
use ctoa::discrete::{accumulated_curve, spectral_weights};
use ctoa::dynamics::{decreasing_windows, flux_curve, integrated_flux_curve};
use ctoa::kijowski::{density_curve, kijowski_accumulated};
use ctoa::spectrum::BoxConfig;
use ctoa::states::{GaussianSpec, Units, WavePacket, WidthConvention};

fn main() -> ctoa::Result<()> {
    let packet = WavePacket::new(
        &[GaussianSpec::new(-1.0, 200.0, 0.05), GaussianSpec::new(-0.5, 100.0, 0.05)],
        WidthConvention::Fwhm,
        Units::default(),
    )?;
    let times = linspace(0.0, 0.015, 601);
    let flux = flux_curve(&packet, &times)?;
    let integrated = integrated_flux_curve(&packet, &times)?;
    let kij = kijowski_accumulated(&packet, &times)?;
    let dens = density_curve(&packet, &times)?;
    let weights = spectral_weights(&packet, &BoxConfig::periodic(10.0)?)?;
    let confined = accumulated_curve(&weights, &times)?;
    println!("captured norm {:.8}", weights.captured_norm);
    println!("min Kijowski density {:.3e}", dens.values.iter().cloned().fold(f64::INFINITY, f64::min));

    for (a, b) in decreasing_windows(&integrated) {
        let gap_flux = integrated.sup_diff_within(&kij, a, b)?;
        let gap_box = confined.sup_diff_within(&kij, a, b)?;
        let min_j = flux.times.iter().zip(&flux.values).filter(|(t, _)| **t >= a && **t <= b).map(|(_, v)| *v).fold(0.0, f64::min);
        println!(
            "backflow window [{a:.5}, {b:.5}]: min J {min_j:.3e}, sup |F_J - F^K| {gap_flux:.3e}, sup |F^(10) - F^K| {gap_box:.3e}"
        );
    }
    let k = (0..times.len()).max_by(|&i, &j| {
        (integrated.values[i] - kij.values[i]).abs().total_cmp(&(integrated.values[j] - kij.values[j]).abs())
    });
    if let Some(k) = k {
        println!(
            "largest flux/Kijowski gap at t = {:.5}: F_J {:.5}, F^K {:.5}, F^(10) {:.5}",
            times[k], integrated.values[k], kij.values[k], confined.values[k]
        );
    }
    Ok(())
}
