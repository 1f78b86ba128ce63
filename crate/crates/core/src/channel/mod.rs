//! Channel models: AWGN, power-delay profiles and sum-of-sinusoids Rayleigh
//! fading, with the true frequency response as a measurement oracle.

pub mod awgn;
pub mod fading;
pub mod profile;

pub use awgn::{add_awgn, awgn, complex_gaussian};
pub use fading::{apply_channel, make_channel, true_freq_response, ChannelRealization, SINUSOIDS_PER_TAP};
pub use profile::PowerDelayProfile;
