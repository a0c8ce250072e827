//! A slow two-Gaussian packet in boxes of half-length 3, 5 and 15;
//! the sup-norm gap to Kijowski's accumulated distribution shrinks with l.

use std::time::Instant;

use ctoa::curve::linspace;
use ctoa::discrete::convergence_study;
use ctoa::states::{GaussianSpec, Units, WavePacket, WidthConvention};

fn main() -> ctoa::Result<()> {
    let packet = WavePacket::new(
        &[GaussianSpec::new(-1.0, 5.0, 0.05), GaussianSpec::new(-0.5, 1.5, 0.05)],
        WidthConvention::Fwhm,
        Units::default(),
    )?;
    let times = linspace(0.0, 1.0, 201);
    let start = Instant::now();
    let study = convergence_study(&packet, &[3.0, 5.0, 15.0], &times)?;
    println!("l     sup|F^(l) - F^K|   captured norm   roots/parity");
    for r in &study.rows {
        println!("{:<5} {:<18.6e} {:<15.10} {}", r.l, r.sup_diff, r.captured_norm, r.roots_per_parity);
    }
    println!("strictly decreasing: {} ({:.1?})", study.strictly_decreasing(), start.elapsed());
    println!("t      F^K       F^(3)     F^(5)     F^(15)");
    for i in (0..times.len()).step_by(20) {
        print!("{:.3}  {:.6}", times[i], study.kijowski.values[i]);
        for c in &study.confined {
            print!("  {:.6}", c.values[i]);
        }
        println!();
    }
    Ok(())
}
