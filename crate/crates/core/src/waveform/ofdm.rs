//! CP-OFDM reference transceiver with unitary DFT scaling, so that a unit
//! power cell and a unit-variance complex noise sample keep their powers
//! across the transform.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::grid::ComplexGrid;
use crate::{Complex, Error, Result};

#[derive(Clone)]
pub struct OfdmModem {
    num_subcarriers: usize,
    cp_length: usize,
    ifft: Arc<dyn Fft<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for OfdmModem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OfdmModem")
            .field("num_subcarriers", &self.num_subcarriers)
            .field("cp_length", &self.cp_length)
            .finish()
    }
}

impl OfdmModem {
    pub fn new(num_subcarriers: usize, cp_length: usize) -> Result<Self> {
        if num_subcarriers == 0 {
            return Err(Error::Config("OFDM needs at least one subcarrier".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            num_subcarriers,
            cp_length,
            ifft: planner.plan_fft_inverse(num_subcarriers),
            fft: planner.plan_fft_forward(num_subcarriers),
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn cp_length(&self) -> usize {
        self.cp_length
    }

    pub fn symbol_len(&self) -> usize {
        self.num_subcarriers + self.cp_length
    }

    /// Sample index at the middle of the FFT window of symbol `n`.
    pub fn symbol_center(&self, n: f64) -> f64 {
        n * self.symbol_len() as f64 + self.cp_length as f64 + self.num_subcarriers as f64 / 2.0
    }

    pub fn modulate(&self, grid: &ComplexGrid) -> Result<Vec<Complex>> {
        let m = self.num_subcarriers;
        if grid.num_subcarriers() != m {
            return Err(Error::Config(format!(
                "grid has {} subcarriers, modem expects {m}",
                grid.num_subcarriers()
            )));
        }
        let scale = (m as f64).sqrt().recip();
        let mut out = Vec::with_capacity(grid.num_symbols() * self.symbol_len());
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for n in 0..grid.num_symbols() {
            buf.copy_from_slice(grid.symbol(n));
            self.ifft.process(&mut buf);
            buf.iter_mut().for_each(|b| *b *= scale);
            out.extend_from_slice(&buf[m - self.cp_length..]);
            out.extend_from_slice(&buf);
        }
        Ok(out)
    }

    pub fn demodulate(&self, samples: &[Complex], num_symbols: usize) -> Result<ComplexGrid> {
        let m = self.num_subcarriers;
        let need = num_symbols * self.symbol_len();
        if samples.len() < need {
            return Err(Error::Length {
                expected: need,
                actual: samples.len(),
            });
        }
        let scale = (m as f64).sqrt().recip();
        let mut out = ComplexGrid::zeros(m, num_symbols);
        for n in 0..num_symbols {
            let start = n * self.symbol_len() + self.cp_length;
            let sym = out.symbol_mut(n);
            sym.copy_from_slice(&samples[start..start + m]);
            self.fft.process(sym);
            sym.iter_mut().for_each(|b| *b *= scale);
        }
        Ok(out)
    }
}
