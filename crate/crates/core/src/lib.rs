//! FBMC/OQAM scattered-pilot laboratory.
//!
//! The crate is split along the signal chain:
//!
//! - [`waveform`]: PHYDYAS prototype filter, OQAM synthesis/analysis, the
//!   ambiguity function and a CP-OFDM baseline.
//! - [`pilots`]: intrinsic-interference bookkeeping and the interference
//!   neutralization solver behind the AUP, CPP and dual dependent pilot
//!   (DDP) schemes, plus their closed-form power/SNR analysis.
//! - [`channel`]: AWGN, power-delay profiles and sum-of-sinusoids Rayleigh
//!   fading with a ground-truth frequency-response oracle.
//! - [`estimation`]: LS estimation, bilinear interpolation, one-tap
//!   equalization, hard detection and metrics.
//! - [`harness`]: frame construction, the Monte-Carlo experiments and CSV
//!   output used by the `fbmc-lab` binary.

pub mod channel;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod pilots;
pub mod waveform;

pub use error::{Error, Result};

/// Complex baseband sample type used throughout the crate.
pub type Complex = num_complex::Complex64;

/// Position of a cell on the time-frequency lattice: subcarrier `m`,
/// OQAM (or OFDM) symbol `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub m: usize,
    pub n: usize,
}

impl Cell {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }
}
