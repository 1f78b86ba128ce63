//! PHYDYAS prototype filter.
//!
//! The filter is obtained by frequency sampling: K real coefficients `H_l`
//! define a sum of cosines over one filter length `K·M`,
//!
//! ```text
//! g[k] = H_0 + 2 Σ_{l=1}^{K-1} (-1)^l H_l cos(2π l k / (K·M)),   k = 0..K·M-1
//! ```
//!
//! followed by unit-energy normalization so that the ambiguity self-term is
//! exactly one. With the K = 4 coefficients below `g[0]` vanishes (to 1e-10)
//! and the remaining taps are symmetric around the integer delay `K·M/2`.

use crate::{Error, Result};

/// PHYDYAS frequency-domain coefficients for K = 4.
pub const PHYDYAS_K4: [f64; 4] = [
    1.0,
    0.971_959_83,
    std::f64::consts::FRAC_1_SQRT_2,
    0.235_146_95,
];

/// Real prototype filter of length `K·M` together with the system size.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeFilter {
    taps: Vec<f64>,
    num_subcarriers: usize,
    overlap_factor: usize,
}

impl PrototypeFilter {
    /// Designs the PHYDYAS filter for `m` subcarriers and overlap factor `k`.
    ///
    /// Only K = 4 is supported. `m` must be a multiple of 4 and at least 16;
    /// the multiple-of-4 constraint keeps the `j^(m+n)` phase rule periodic
    /// across the subcarrier wrap-around.
    pub fn phydyas(m: usize, k: usize) -> Result<Self> {
        if k != 4 {
            return Err(Error::Config(format!(
                "PHYDYAS design supports overlap factor K = 4 only (got {k})"
            )));
        }
        if m < 16 || m % 4 != 0 {
            return Err(Error::Config(format!(
                "number of subcarriers must be a multiple of 4 and >= 16 (got {m})"
            )));
        }
        let len = k * m;
        let taps = (0..len)
            .map(|i| {
                let t = i as f64 / len as f64;
                PHYDYAS_K4
                    .iter()
                    .enumerate()
                    .skip(1)
                    .fold(PHYDYAS_K4[0], |acc, (l, &h)| {
                        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                        acc + 2.0 * sign * h * (2.0 * std::f64::consts::PI * l as f64 * t).cos()
                    })
            })
            .collect();
        Self::from_taps(taps, m, k)
    }

    /// Wraps arbitrary taps (normalized to unit energy). The length must be
    /// `k·m`.
    pub fn from_taps(mut taps: Vec<f64>, m: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 || m % 2 != 0 {
            return Err(Error::Config(format!("invalid filter dimensions M={m}, K={k}")));
        }
        if taps.len() != k * m {
            return Err(Error::Config(format!(
                "filter length {} does not equal K*M = {}",
                taps.len(),
                k * m
            )));
        }
        let energy: f64 = taps.iter().map(|t| t * t).sum();
        if energy <= 0.0 || !energy.is_finite() {
            return Err(Error::Config("filter has zero energy".into()));
        }
        let scale = energy.sqrt().recip();
        taps.iter_mut().for_each(|t| *t *= scale);
        Ok(Self {
            taps,
            num_subcarriers: m,
            overlap_factor: k,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn overlap_factor(&self) -> usize {
        self.overlap_factor
    }

    /// OQAM symbol spacing in samples (M/2).
    pub fn half_symbol(&self) -> usize {
        self.num_subcarriers / 2
    }

    /// Sample index of the filter's centre of symmetry (`K·M/2`).
    pub fn delay(&self) -> usize {
        self.taps.len() / 2
    }

    /// Tap value at an arbitrary integer index; zero outside the support.
    #[inline]
    pub fn tap(&self, k: isize) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.taps.get(k as usize).copied().unwrap_or(0.0)
        }
    }

    /// Stream length produced by synthesizing `n` OQAM symbols.
    pub fn stream_len(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            (n - 1) * self.half_symbol() + self.len()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_and_unit_energy() {
        let f = PrototypeFilter::phydyas(64, 4).unwrap();
        assert_eq!(f.len(), 256);
        let e: f64 = f.taps().iter().map(|t| t * t).sum();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_about_delay() {
        let f = PrototypeFilter::phydyas(64, 4).unwrap();
        let l = f.len();
        assert!(f.taps()[0].abs() < 1e-9);
        for k in 1..l {
            assert!((f.taps()[k] - f.taps()[l - k]).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn peak_at_midpoint() {
        let f = PrototypeFilter::phydyas(64, 4).unwrap();
        let (argmax, _) = f
            .taps()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        assert_eq!(argmax, f.delay());
        // neighbours of the peak are the next-largest pair
        let mut sorted: Vec<f64> = f.taps().to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((sorted[1] - f.taps()[f.delay() - 1]).abs() < 1e-15);
        assert!((sorted[2] - f.taps()[f.delay() + 1]).abs() < 1e-15);
    }

    #[test]
    fn rejects_unsupported_dimensions() {
        assert!(matches!(PrototypeFilter::phydyas(64, 3), Err(Error::Config(_))));
        assert!(matches!(PrototypeFilter::phydyas(8, 4), Err(Error::Config(_))));
        assert!(matches!(PrototypeFilter::phydyas(66, 4), Err(Error::Config(_))));
        assert!(PrototypeFilter::from_taps(vec![1.0; 10], 4, 4).is_err());
    }

    #[test]
    fn stream_length() {
        let f = PrototypeFilter::phydyas(16, 4).unwrap();
        assert_eq!(f.stream_len(10), 9 * 8 + 64);
        assert_eq!(f.stream_len(0), 0);
    }
}
