//! Analytic time-of-arrival eigenvalues at l = 1 against the Nystrom
//! discretization of the kernel.

use ctoa::operator::compare_with_analytic;
use ctoa::spectrum::{eigenvalues, BoxConfig, Parity};

fn main() -> ctoa::Result<()> {
    let bx = BoxConfig::periodic(1.0)?;
    for parity in [Parity::Odd, Parity::Even] {
        println!("{parity}:");
        for r in eigenvalues(&bx, parity, 5)?.iter().filter(|r| r.tau > 0.0) {
            println!("  n = {}  rho = {:.12}  tau = {:.12e}", r.n, r.rho, r.tau);
        }
    }
    println!("rank  analytic          nystrom           rel error");
    for r in compare_with_analytic(&bx, 2000, 10)? {
        println!("{:<5} {:<+17.10e} {:<+17.10e} {:.2e}", r.rank, r.analytic, r.oracle, r.rel_error);
    }
    Ok(())
}
