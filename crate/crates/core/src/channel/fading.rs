//! Sum-of-sinusoids Rayleigh fading.
//!
//! Each tap is
//!
//! ```text
//! g(t) = √(P/N) Σ_i exp(j(2π f_d cos(α_i) t + φ_i)),   α_i = (2πi + θ)/N
//! ```
//!
//! with `θ` and the `φ_i` drawn independently per tap. Averaged over `θ` the
//! arrival angles are uniform, which gives the Jakes autocorrelation
//! `P·J₀(2π f_d τ)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::profile::PowerDelayProfile;
use crate::{Complex, Error, Result};

pub const SINUSOIDS_PER_TAP: usize = 32;

/// Time-varying tap gains on a sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `tap_gains[t][k]`: gain of tap `t` at sample `k`.
    pub tap_gains: Vec<Vec<Complex>>,
    pub tap_delays_samples: Vec<usize>,
    pub doppler_hz: f64,
    pub seed: u64,
}

impl ChannelRealization {
    /// Time-invariant taps.
    pub fn static_taps(gains: &[Complex], delays: &[usize], num_samples: usize) -> Result<Self> {
        if gains.len() != delays.len() || gains.is_empty() {
            return Err(Error::Config("static channel needs matching gain and delay lists".into()));
        }
        Ok(Self {
            tap_gains: gains.iter().map(|&g| vec![g; num_samples]).collect(),
            tap_delays_samples: delays.to_vec(),
            doppler_hz: 0.0,
            seed: 0,
        })
    }

    /// Unit gain, zero delay.
    pub fn identity(num_samples: usize) -> Self {
        Self::static_taps(&[Complex::new(1.0, 0.0)], &[0], num_samples).expect("valid")
    }

    pub fn num_samples(&self) -> usize {
        self.tap_gains.first().map_or(0, |g| g.len())
    }

    pub fn num_taps(&self) -> usize {
        self.tap_gains.len()
    }

    pub fn max_delay(&self) -> usize {
        self.tap_delays_samples.iter().copied().max().unwrap_or(0)
    }
}

/// Draws one realization covering `num_samples` samples.
pub fn make_channel(
    profile: &PowerDelayProfile,
    doppler_hz: f64,
    sample_rate: f64,
    num_samples: usize,
    seed: u64,
) -> Result<ChannelRealization> {
    if !(sample_rate > 0.0) || doppler_hz < 0.0 {
        return Err(Error::Config("sample rate must be positive and Doppler non-negative".into()));
    }
    if profile.max_delay() >= num_samples as f64 / sample_rate {
        return Err(Error::Config(format!(
            "profile delay {:.3e} s exceeds the {num_samples}-sample stream",
            profile.max_delay()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = SINUSOIDS_PER_TAP;
    let mut tap_gains = Vec::with_capacity(profile.num_taps());
    for &p in profile.linear_powers() {
        let amp = (p / n as f64).sqrt();
        let theta: f64 = rng.gen::<f64>() * 2.0 * PI;
        let mut phasors = Vec::with_capacity(n);
        let mut steps = Vec::with_capacity(n);
        for i in 0..n {
            let alpha = (2.0 * PI * i as f64 + theta) / n as f64;
            let phi: f64 = rng.gen::<f64>() * 2.0 * PI;
            let w = 2.0 * PI * doppler_hz * alpha.cos() / sample_rate;
            phasors.push(Complex::from_polar(amp, phi));
            steps.push(Complex::from_polar(1.0, w));
        }
        let mut gains = Vec::with_capacity(num_samples);
        for k in 0..num_samples {
            gains.push(phasors.iter().sum());
            if k % 1024 == 1023 {
                // re-anchor the recurrence to bound rounding drift
                for z in phasors.iter_mut() {
                    *z = Complex::from_polar(amp, z.arg());
                }
            }
            for (z, s) in phasors.iter_mut().zip(&steps) {
                *z *= s;
            }
        }
        tap_gains.push(gains);
    }
    Ok(ChannelRealization {
        tap_gains,
        tap_delays_samples: profile.delays_in_samples(sample_rate),
        doppler_hz,
        seed,
    })
}

/// `y[k] = Σ_t g_t[k]·x[k - d_t]`, output length `len + max_delay`.
pub fn apply_channel(samples: &[Complex], realization: &ChannelRealization) -> Result<Vec<Complex>> {
    let out_len = samples.len() + realization.max_delay();
    if realization.num_samples() < out_len {
        return Err(Error::Length {
            expected: out_len,
            actual: realization.num_samples(),
        });
    }
    let mut out = vec![Complex::new(0.0, 0.0); out_len];
    for (gains, &d) in realization.tap_gains.iter().zip(&realization.tap_delays_samples) {
        for (k, &x) in samples.iter().enumerate() {
            out[k + d] += gains[k + d] * x;
        }
    }
    Ok(out)
}

/// `H(m, t) = Σ_taps g(t)·e^{-j2π m d/M}`; fractional `t` interpolates the
/// tap gains linearly.
pub fn true_freq_response(
    realization: &ChannelRealization,
    sample_index: f64,
    subcarrier: usize,
    num_subcarriers: usize,
) -> Result<Complex> {
    let last = realization.num_samples().saturating_sub(1) as f64;
    if !(0.0..=last).contains(&sample_index) {
        return Err(Error::Length {
            expected: sample_index.ceil() as usize + 1,
            actual: realization.num_samples(),
        });
    }
    let k0 = sample_index.floor() as usize;
    let frac = sample_index - k0 as f64;
    let mut h = Complex::new(0.0, 0.0);
    for (gains, &d) in realization.tap_gains.iter().zip(&realization.tap_delays_samples) {
        let g = if frac == 0.0 {
            gains[k0]
        } else {
            gains[k0] * (1.0 - frac) + gains[k0 + 1] * frac
        };
        let turns = (subcarrier * d) % num_subcarriers;
        h += g * Complex::from_polar(1.0, -2.0 * PI * turns as f64 / num_subcarriers as f64);
    }
    Ok(h)
}
