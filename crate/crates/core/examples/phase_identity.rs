//! The l -> infinity limit of the odd box eigenfunctions is the odd
//! position eigenfunction up to a constant unimodular phase.

use std::f64::consts::PI;

use ctoa::discrete::limit_eigenfunction_odd;
use ctoa::kijowski::position_eigenfunction;
use ctoa::spectrum::Parity;
use ctoa::states::Units;
use ctoa::verify::phase_identity;

fn main() -> ctoa::Result<()> {
    let units = Units::default();
    for q in [-1.2, -0.4, 0.3, 1.1] {
        let c = limit_eigenfunction_odd(0.01, q, units)? / position_eigenfunction(0.01, Parity::Odd, q, units)?;
        println!("q = {q:+.1}  ratio = {:+.12} {:+.12}i  |c| = {:.12}", c.re, c.im, c.norm());
    }
    let (c, var) = phase_identity(0.01, 1.5, 100, units)?;
    println!("mean ratio arg = {:.9} pi, variance over 100 points {var:.1e}", c.arg() / PI);
    Ok(())
}
