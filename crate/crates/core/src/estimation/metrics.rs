use crate::Complex;

/// One point of an MSE/BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub snr_db: f64,
    /// `E|Ĥ - H|² / E|H|²`.
    pub mse: f64,
    pub ber: f64,
    /// Mean transmitted pilot power per budget unit (one complex pilot or
    /// two real pilots).
    pub pilot_power: f64,
}

/// Raw sums behind a [`MetricRecord`]; merge partial tallies in a fixed
/// order to keep results reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricTally {
    pub squared_error: f64,
    pub estimates: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub pilot_energy: f64,
    pub pilot_units: usize,
}

impl MetricTally {
    pub fn add_estimates(&mut self, estimates: &[Complex], truth: &[Complex]) {
        for (e, t) in estimates.iter().zip(truth) {
            self.squared_error += (e - t).norm_sqr();
            self.estimates += 1;
        }
    }

    /// Erasures (`None`) count as errors.
    pub fn add_bits(&mut self, tx: &[bool], rx: &[Option<bool>]) {
        for (t, r) in tx.iter().zip(rx) {
            if *r != Some(*t) {
                self.bit_errors += 1;
            }
            self.bits += 1;
        }
    }

    /// Adds transmitted pilot energy spread over `units` budget units.
    pub fn add_pilots(&mut self, energy: f64, units: usize) {
        self.pilot_energy += energy;
        self.pilot_units += units;
    }

    pub fn merge(&mut self, other: &MetricTally) {
        self.squared_error += other.squared_error;
        self.estimates += other.estimates;
        self.bit_errors += other.bit_errors;
        self.bits += other.bits;
        self.pilot_energy += other.pilot_energy;
        self.pilot_units += other.pilot_units;
    }

    /// `channel_power` is `E|H|²` of the channel model.
    pub fn record(&self, snr_db: f64, channel_power: f64) -> MetricRecord {
        let ratio = |a: f64, b: usize| if b == 0 { 0.0 } else { a / b as f64 };
        MetricRecord {
            snr_db,
            mse: ratio(self.squared_error, self.estimates) / channel_power,
            ber: ratio(self.bit_errors as f64, self.bits),
            pilot_power: ratio(self.pilot_energy, self.pilot_units),
        }
    }
}

/// Single-shot metrics over matched estimate/truth pairs and bit lists.
pub fn compute_metrics(
    estimates: &[Complex],
    truth: &[Complex],
    tx_bits: &[bool],
    rx_bits: &[Option<bool>],
    snr_db: f64,
) -> MetricRecord {
    let mut t = MetricTally::default();
    t.add_estimates(estimates, truth);
    t.add_bits(tx_bits, rx_bits);
    t.record(snr_db, 1.0)
}
