//! A single Gaussian (x0 = -1, p0 = 100, FWHM 0.05) in a box of
//! half-length 10, against Kijowski's distribution.

use std::time::Instant;

use ctoa::curve::linspace;
use ctoa::discrete::{accumulated_curve, default_bin_width, density_histogram, spectral_weights};
use ctoa::kijowski::{density_curve, kijowski_accumulated};
use ctoa::spectrum::BoxConfig;
use ctoa::states::{GaussianSpec, Units, WavePacket, WidthConvention};

fn main() -> ctoa::Result<()> {
    let packet = WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default())?;
    let bx = BoxConfig::periodic(10.0)?;

    let start = Instant::now();
    let weights = spectral_weights(&packet, &bx)?;
    println!(
        "weights: {} roots per parity, captured norm {:.8} ({:.1?})",
        weights.count(ctoa::spectrum::Parity::Odd),
        weights.captured_norm,
        start.elapsed()
    );

    let times = linspace(0.005, 0.02, 151);
    let confined = accumulated_curve(&weights, &times)?;
    let kij = kijowski_accumulated(&packet, &times)?;
    println!("sup |F^(10) - F^K| on [0.005, 0.02] = {:.3e}", confined.sup_diff(&kij)?);

    let bin = default_bin_width(&bx, 0.01);
    let hist = density_histogram(&weights, bin, Some((0.005, 0.02)))?;
    let dens = density_curve(&packet, &hist.curve.times)?;
    let k = dens.argmax().unwrap_or(0);
    println!(
        "peak: histogram {:.4} vs Kijowski {:.4} at t = {:.5} (bin width {:.2e})",
        hist.curve.values[k], dens.values[k], dens.times[k], bin
    );
    println!("t        F^(10)      F^K");
    for i in (0..times.len()).step_by(15) {
        println!("{:.4}  {:.6}  {:.6}", times[i], confined.values[i], kij.values[i]);
    }
    Ok(())
}
