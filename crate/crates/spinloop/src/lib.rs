//! Post-DFT photophysics pipeline for C3v spin-1 defects (divacancy-like
//! centers such as PL1/PLX1 in 4H-SiC).
//!
//! * [`multiplets`]: C3v projection, two-hole multiplets, oscillator sectors
//! * [`vibronic`]: E⊗e and lower-branch vibronic solvers, Ham factors
//! * [`spectral`]: Huang–Rhys lineshapes and configuration-coordinate checks
//! * [`isc`]: golden-rule intersystem-crossing rates
//! * [`spinparams`]: ZFS processing and the SOC finite-size fit
//! * [`kinetics`]: five-level rate model, lifetimes, ODMR contrast
//! * [`presets`]: bundled PL1/PLX1 parameter documents
//! * [`cli`]: the `spinloop` command-line front end

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod format;
pub mod isc;
pub mod kinetics;
pub mod multiplets;
pub mod presets;
pub mod spectral;
pub mod spinparams;
pub mod vibronic;

pub use error::{Error, Result};
