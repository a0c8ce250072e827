//! Confined quantum time-of-arrival operators and the transition of their
//! discrete arrival distributions to Kijowski's continuum distribution.

pub mod commands;
pub mod config;
pub mod curve;
pub mod discrete;
pub mod dynamics;
pub mod error;
pub mod kijowski;
pub mod operator;
pub mod quad;
pub mod specfun;
pub mod spectrum;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
