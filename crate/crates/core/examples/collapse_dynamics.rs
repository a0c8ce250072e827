//! Box eigenfunctions evolved through their own eigenvalue tau ~ 0.01:
//! the density narrows at t = tau for every l, and more sharply for larger l.

use ctoa::dynamics::CollapseOptions;
use ctoa::spectrum::Parity;
use ctoa::states::Units;
use ctoa::verify::collapse_scans;

fn main() -> ctoa::Result<()> {
    let ls = [1.0, 2.0, 3.0, 4.0, 5.0];
    let opts = CollapseOptions::default();
    for parity in [Parity::Even, Parity::Odd] {
        println!("{parity}");
        println!("  l   n     tau_n          WHM       peak        min-var offset");
        for s in collapse_scans(&ls, parity, 0.01, opts, Units::default())? {
            println!(
                "  {:<3} {:<5} {:<14.8e} {:<9.5} {:<11.4} {:+.0}",
                s.l,
                s.record.n,
                s.record.tau,
                s.whm_at_tau(),
                s.peak_at_tau(),
                s.variance_offset_steps()
            );
        }
    }
    Ok(())
}
