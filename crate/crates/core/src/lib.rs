//! Simulation and pulse design for two-qubit Rydberg-blockade SWAP gates driven
//! by Fourier-modulated laser waveforms.
//!
//! Units throughout: ħ = 1, time in μs, angular frequencies in rad/μs. Waveform
//! coefficients are stored in MHz and converted (×2π) exactly once, inside
//! [`waveform::FourierSeries::eval`].
//!
//! The crate is `no_std` (with `alloc`). File formats, the command-line front
//! end and thread-parallel orchestration live in the companion `rydswap` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod gate;
pub mod linalg;
pub mod optimize;
pub mod presets;
pub mod scan;
pub mod waveform;

pub use num_complex::Complex64 as C64;

pub use crate::{
    dynamics::{BlockadeModel, IntegratorConfig, Method},
    error::{Error, Result},
    gate::{GateOutcome, TargetGate, TargetKind},
    presets::PresetId,
    waveform::{FourierSeries, PhaseConvention, WaveformSet},
};

/// 2π, the factor between MHz and rad/μs.
pub const TWO_PI: f64 = core::f64::consts::TAU;

/// Convert a frequency in MHz to an angular frequency in rad/μs.
#[inline]
pub fn mhz(f: f64) -> f64 {
    TWO_PI * f
}
