//! Kijowski's density for a single fast Gaussian computed in momentum space and
//! through the limit eigenfunctions in position space.

use ctoa::curve::linspace;
use ctoa::kijowski::{kijowski_density_momentum, kijowski_density_position};
use ctoa::states::{GaussianSpec, Units, WavePacket, WidthConvention};

fn main() -> ctoa::Result<()> {
    let packet = WavePacket::new(&[GaussianSpec::new(-1.0, 100.0, 0.05)], WidthConvention::Fwhm, Units::default())?;
    println!("t         momentum          position          rel gap");
    for t in linspace(0.004, 0.02, 17) {
        let a = kijowski_density_momentum(&packet, t)?;
        let b = kijowski_density_position(&packet, t)?;
        println!("{t:.4}    {a:<17.10e} {b:<17.10e} {:.1e}", (a - b).abs() / a.abs().max(1e-300));
    }
    Ok(())
}
