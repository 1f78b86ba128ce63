//! Receiver side: LS estimation at clean pilots, bilinear interpolation,
//! one-tap equalization with hard decisions, and MSE/BER bookkeeping.

pub mod detection;
pub mod interpolation;
pub mod metrics;

pub use detection::{bit_of, equalize_detect, Waveform, ERASURE_THRESHOLD};
pub use interpolation::{interpolate, ls_estimate, ChannelEstimateGrid, InterpolationMethod, PilotEstimate};
pub use metrics::{compute_metrics, MetricRecord, MetricTally};
