//! Special functions: gamma, quarter-order Bessel `J`, its zeros, and the
//! parabolic cylinder function `D_{1/2}`.

mod bessel;
mod dd;
mod gamma;
mod pcf;
mod zeros;

pub use bessel::{
    bessel_j, bessel_j_asymptotic, bessel_j_prime, bessel_j_series, bessel_j_with, BesselOrder,
    EvalRegime, DEFAULT_CROSSOVER,
};
pub use gamma::gamma;
pub use pcf::{
    d_half_with_error, parabolic_cylinder_d_half, ASYMPTOTIC_RADIUS, PCF_TOLERANCE, SERIES_RADIUS,
};
pub use zeros::{bessel_j_zero, mcmahon_estimate};

pub(crate) use bessel::{jq, jq_prime, xj_pair};
pub(crate) use zeros::polish_root;
