use super::interpolation::ChannelEstimateGrid;
use crate::waveform::ComplexGrid;
use crate::{Cell, Complex, Error, Result};

/// Estimates smaller than this are treated as a deep fade and their bits
/// erased.
pub const ERASURE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Waveform {
    /// Real PAM-2 on an OQAM lattice, one bit per cell.
    Fbmc,
    /// QPSK on CP-OFDM, two bits per cell.
    Ofdm,
}

impl Waveform {
    pub fn name(&self) -> &'static str {
        match self {
            Waveform::Fbmc => "fbmc",
            Waveform::Ofdm => "ofdm",
        }
    }

    pub fn bits_per_cell(&self) -> usize {
        match self {
            Waveform::Fbmc => 1,
            Waveform::Ofdm => 2,
        }
    }
}

/// Bit carried by a real amplitude: `true` for non-negative.
#[inline]
pub fn bit_of(v: f64) -> bool {
    v >= 0.0
}

/// One-tap zero-forcing equalization and hard decision at `cells`.
///
/// Output holds `bits_per_cell` entries per cell in order; `None` marks an
/// erasure.
pub fn equalize_detect(
    received: &ComplexGrid,
    estimates: &ChannelEstimateGrid,
    waveform: Waveform,
    cells: &[Cell],
) -> Result<Vec<Option<bool>>> {
    let dims = (received.num_subcarriers(), received.num_symbols());
    if dims != (estimates.values.num_subcarriers(), estimates.values.num_symbols()) {
        return Err(Error::Config("received grid and estimate grid differ in size".into()));
    }
    let mut out = Vec::with_capacity(cells.len() * waveform.bits_per_cell());
    for c in cells {
        if c.m >= dims.0 || c.n >= dims.1 {
            return Err(Error::Config(format!("cell ({}, {}) outside the grid", c.m, c.n)));
        }
        let h = estimates.get(c.m, c.n);
        if h.norm() < ERASURE_THRESHOLD {
            out.extend(std::iter::repeat(None).take(waveform.bits_per_cell()));
            continue;
        }
        let z: Complex = received.get(c.m, c.n) / h;
        match waveform {
            Waveform::Fbmc => out.push(Some(bit_of(z.re))),
            Waveform::Ofdm => {
                out.push(Some(bit_of(z.re)));
                out.push(Some(bit_of(z.im)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_gaussian;
    use crate::estimation::interpolation::InterpolationMethod;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat(h: Complex, m: usize, n: usize) -> ChannelEstimateGrid {
        let mut v = ComplexGrid::zeros(m, n);
        for s in 0..n {
            for k in 0..m {
                v.set(k, s, h);
            }
        }
        ChannelEstimateGrid {
            values: v,
            pilots: vec![],
            method: InterpolationMethod::LsLinear,
        }
    }

    fn cells(m: usize, n: usize) -> Vec<Cell> {
        (0..n).flat_map(|s| (0..m).map(move |k| Cell::new(k, s))).collect()
    }

    #[test]
    fn noiseless_perfect_csi_and_phase_rotation() {
        let h = Complex::new(0.0, 1.0);
        let mut r = ComplexGrid::zeros(4, 2);
        let amps = [0.7, -0.7, 0.7, 0.7, -0.7, -0.7, 0.7, -0.7];
        for (i, c) in cells(4, 2).iter().enumerate() {
            // real symbol plus imaginary intrinsic interference, rotated by H
            r.set(c.m, c.n, h * Complex::new(amps[i], 0.3));
        }
        let bits = equalize_detect(&r, &flat(h, 4, 2), Waveform::Fbmc, &cells(4, 2)).unwrap();
        for (b, a) in bits.iter().zip(amps) {
            assert_eq!(*b, Some(a > 0.0));
        }
    }

    #[test]
    fn qpsk_quadrants() {
        let mut r = ComplexGrid::zeros(2, 1);
        r.set(0, 0, Complex::new(0.5, -0.5));
        r.set(1, 0, Complex::new(-0.5, 0.5));
        let bits = equalize_detect(&r, &flat(Complex::new(1.0, 0.0), 2, 1), Waveform::Ofdm, &cells(2, 1)).unwrap();
        assert_eq!(bits, vec![Some(true), Some(false), Some(false), Some(true)]);
    }

    #[test]
    fn deep_fade_is_erased() {
        let r = ComplexGrid::zeros(2, 1);
        let bits = equalize_detect(&r, &flat(Complex::new(1e-13, 0.0), 2, 1), Waveform::Ofdm, &cells(2, 1)).unwrap();
        assert!(bits.iter().all(|b| b.is_none()));
        assert_eq!(bits.len(), 4);
    }

    /// Q(x) by Simpson integration of the Gaussian density.
    fn q_oracle(x: f64) -> f64 {
        let (a, b, n) = (x, x + 12.0, 20_000);
        let h = (b - a) / n as f64;
        let f = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn pam2_ber_matches_gaussian_tail() {
        // amplitude √(1/2), real noise variance σ²/2: BER = Q(1/σ) = Q(√SNR)
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (m, n) = (64, 4000);
        for snr_db in [0.0, 4.0, 7.0] {
            let sigma2 = 10f64.powf(-snr_db / 10.0);
            let mut r = ComplexGrid::zeros(m, n);
            let mut tx = Vec::with_capacity(m * n);
            for c in cells(m, n) {
                let b: bool = rng.gen();
                let a = if b { 0.5f64.sqrt() } else { -(0.5f64.sqrt()) };
                tx.push(b);
                r.set(c.m, c.n, Complex::new(a, 0.0) + complex_gaussian(&mut rng, sigma2));
            }
            let bits = equalize_detect(&r, &flat(Complex::new(1.0, 0.0), m, n), Waveform::Fbmc, &cells(m, n)).unwrap();
            let errors = bits.iter().zip(&tx).filter(|(b, t)| **b != Some(**t)).count();
            let ber = errors as f64 / tx.len() as f64;
            let want = q_oracle((1.0 / sigma2).sqrt());
            assert!((ber / want - 1.0).abs() < 0.05, "{snr_db} dB: {ber} vs {want}");
        }
    }
}
