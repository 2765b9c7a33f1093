//! Local spectral machinery for Bessel models of `GSp(4)`.

pub mod arith;
pub mod classgroup;
pub mod cli;
pub mod error;
pub mod gl2lab;
pub mod lfun;
pub mod lowlying;
pub mod measures;
pub mod quadrature;
pub mod rmt;
pub mod rng;
pub mod sugano;
pub mod wpoly;

pub use error::{Error, Result};
