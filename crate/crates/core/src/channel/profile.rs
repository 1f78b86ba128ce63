use crate::{Error, Result};

/// Tapped-delay-line power profile. Powers are stored in dB as given and
/// exposed normalized to unit total linear power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    delays: Vec<f64>,
    powers_db: Vec<f64>,
    linear: Vec<f64>,
}

/// 3GPP Extended Typical Urban delays in nanoseconds.
pub const ETU_DELAYS_NS: [f64; 9] = [0.0, 50.0, 120.0, 200.0, 230.0, 500.0, 1600.0, 2300.0, 5000.0];
/// 3GPP Extended Typical Urban relative powers in dB.
pub const ETU_POWERS_DB: [f64; 9] = [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0];

impl PowerDelayProfile {
    /// `delays` in seconds (strictly increasing from 0), `powers_db`
    /// relative.
    pub fn new(delays: Vec<f64>, powers_db: Vec<f64>) -> Result<Self> {
        if delays.is_empty() || delays.len() != powers_db.len() {
            return Err(Error::Config(format!(
                "profile needs matching non-empty delay and power lists ({} vs {})",
                delays.len(),
                powers_db.len()
            )));
        }
        if delays[0] != 0.0 {
            return Err(Error::Config("first profile delay must be 0".into()));
        }
        if delays.windows(2).any(|w| w[1] <= w[0]) || delays.iter().any(|d| !d.is_finite()) {
            return Err(Error::Config("profile delays must be strictly increasing".into()));
        }
        if powers_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("profile powers must be finite".into()));
        }
        let raw: Vec<f64> = powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
        let total: f64 = raw.iter().sum();
        let linear = raw.iter().map(|p| p / total).collect();
        Ok(Self {
            delays,
            powers_db,
            linear,
        })
    }

    pub fn etu() -> Self {
        Self::new(ETU_DELAYS_NS.iter().map(|d| d * 1e-9).collect(), ETU_POWERS_DB.to_vec())
            .expect("ETU constants are valid")
    }

    /// One tap at zero delay.
    pub fn flat() -> Self {
        Self::new(vec![0.0], vec![0.0]).expect("single tap is valid")
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn powers_db(&self) -> &[f64] {
        &self.powers_db
    }

    /// Linear tap powers summing to one.
    pub fn linear_powers(&self) -> &[f64] {
        &self.linear
    }

    pub fn num_taps(&self) -> usize {
        self.delays.len()
    }

    pub fn max_delay(&self) -> f64 {
        *self.delays.last().expect("non-empty")
    }

    /// Delays rounded to the nearest sample.
    pub fn delays_in_samples(&self, sample_rate: f64) -> Vec<usize> {
        self.delays.iter().map(|d| (d * sample_rate).round() as usize).collect()
    }
}
