use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::Complex;

/// Circular complex Gaussian sample with variance `sigma2`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sigma2: f64) -> Complex {
    let s = (sigma2 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(s * re, s * im)
}

/// Adds noise of variance `sigma2` per complex sample in place.
pub fn add_awgn<R: Rng + ?Sized>(samples: &mut [Complex], sigma2: f64, rng: &mut R) {
    if sigma2 <= 0.0 {
        return;
    }
    for s in samples {
        *s += complex_gaussian(rng, sigma2);
    }
}

/// Returns `samples` plus seeded circular complex Gaussian noise.
pub fn awgn(samples: &[Complex], sigma2: f64, seed: u64) -> Vec<Complex> {
    let mut out = samples.to_vec();
    add_awgn(&mut out, sigma2, &mut ChaCha8Rng::seed_from_u64(seed));
    out
}
