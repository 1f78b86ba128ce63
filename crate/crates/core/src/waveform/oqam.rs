//! OQAM synthesis and analysis filter banks.
//!
//! Synthesis:
//!
//! ```text
//! s[k] = Σ_n Σ_m a[m,n] · g[k - n·M/2] · j^(m+n) · e^{j2πkm/M}
//! ```
//!
//! Analysis correlates the stream with the same synthesis filters:
//! `r[m,n] = Σ_k s[k] · conj(g_{m,n}[k])`.
//!
//! Two paths are provided. The `*_direct` functions evaluate the sums
//! literally and serve as the reference. The default path exploits the
//! M-periodicity of the carriers: one M-point IFFT per symbol on transmit,
//! one fold-and-FFT per symbol on receive.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::filter::PrototypeFilter;
use super::grid::{ComplexGrid, OqamGrid, PhaseConvention};
use crate::{Cell, Complex, Error, Result};

#[derive(Clone)]
pub struct OqamModem {
    filter: PrototypeFilter,
    convention: PhaseConvention,
    ifft: Arc<dyn Fft<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for OqamModem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OqamModem")
            .field("num_subcarriers", &self.filter.num_subcarriers())
            .field("overlap_factor", &self.filter.overlap_factor())
            .finish()
    }
}

impl OqamModem {
    pub fn new(filter: PrototypeFilter, convention: PhaseConvention) -> Self {
        let mut planner = FftPlanner::new();
        let m = filter.num_subcarriers();
        Self {
            ifft: planner.plan_fft_inverse(m),
            fft: planner.plan_fft_forward(m),
            filter,
            convention,
        }
    }

    /// PHYDYAS K=4 modem with the default phase rule.
    pub fn phydyas(m: usize) -> Result<Self> {
        Ok(Self::new(PrototypeFilter::phydyas(m, 4)?, PhaseConvention))
    }

    pub fn filter(&self) -> &PrototypeFilter {
        &self.filter
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn num_subcarriers(&self) -> usize {
        self.filter.num_subcarriers()
    }

    /// Sample index at which the synthesis filter of symbol `n` peaks.
    pub fn symbol_center(&self, n: f64) -> f64 {
        n * self.filter.half_symbol() as f64 + self.filter.delay() as f64
    }

    fn check_grid(&self, grid: &OqamGrid) -> Result<()> {
        if grid.num_subcarriers() != self.num_subcarriers() {
            return Err(Error::Config(format!(
                "grid has {} subcarriers, filter expects {}",
                grid.num_subcarriers(),
                self.num_subcarriers()
            )));
        }
        Ok(())
    }

    pub fn modulate(&self, grid: &OqamGrid) -> Result<Vec<Complex>> {
        self.check_grid(grid)?;
        let m = self.num_subcarriers();
        let half = self.filter.half_symbol();
        let taps = self.filter.taps();
        let mut out = vec![Complex::new(0.0, 0.0); self.filter.stream_len(grid.num_symbols())];
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for n in 0..grid.num_symbols() {
            let sym = grid.symbol(n);
            if sym.iter().all(|&a| a == 0.0) {
                continue;
            }
            for (sub, (b, &a)) in buf.iter_mut().zip(sym).enumerate() {
                *b = self.convention.factor(sub, n) * a;
            }
            self.ifft.process(&mut buf);
            let start = n * half;
            for (i, &g) in taps.iter().enumerate() {
                let k = start + i;
                out[k] += buf[k % m] * g;
            }
        }
        Ok(out)
    }

    /// Literal evaluation of the synthesis sum; O(N·M·K·M).
    pub fn modulate_direct(&self, grid: &OqamGrid) -> Result<Vec<Complex>> {
        self.check_grid(grid)?;
        let m = self.num_subcarriers();
        let half = self.filter.half_symbol();
        let mut out = vec![Complex::new(0.0, 0.0); self.filter.stream_len(grid.num_symbols())];
        for n in 0..grid.num_symbols() {
            for sub in 0..m {
                let a = grid.get(sub, n);
                if a == 0.0 {
                    continue;
                }
                let phase = self.convention.factor(sub, n) * a;
                for (i, &g) in self.filter.taps().iter().enumerate() {
                    let k = n * half + i;
                    let w = 2.0 * std::f64::consts::PI * ((k * sub) % m) as f64 / m as f64;
                    out[k] += phase * g * Complex::from_polar(1.0, w);
                }
            }
        }
        Ok(out)
    }

    fn check_len(&self, samples: &[Complex], num_symbols: usize) -> Result<()> {
        let need = self.filter.stream_len(num_symbols);
        if samples.len() < need {
            return Err(Error::Length {
                expected: need,
                actual: samples.len(),
            });
        }
        Ok(())
    }

    pub fn demodulate(&self, samples: &[Complex], num_symbols: usize) -> Result<ComplexGrid> {
        self.check_len(samples, num_symbols)?;
        let m = self.num_subcarriers();
        let half = self.filter.half_symbol();
        let taps = self.filter.taps();
        let mut out = ComplexGrid::zeros(m, num_symbols);
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for n in 0..num_symbols {
            buf.iter_mut().for_each(|b| *b = Complex::new(0.0, 0.0));
            let start = n * half;
            for (i, &g) in taps.iter().enumerate() {
                let k = start + i;
                buf[k % m] += samples[k] * g;
            }
            self.fft.process(&mut buf);
            for (sub, (o, &b)) in out.symbol_mut(n).iter_mut().zip(buf.iter()).enumerate() {
                *o = b * self.convention.factor(sub, n).conj();
            }
        }
        Ok(out)
    }

    /// Analysis filter output at a single cell, evaluated directly.
    pub fn analyze_cell(&self, samples: &[Complex], cell: Cell) -> Result<Complex> {
        self.check_len(samples, cell.n + 1)?;
        let m = self.num_subcarriers();
        let start = cell.n * self.filter.half_symbol();
        let mut acc = Complex::new(0.0, 0.0);
        for (i, &g) in self.filter.taps().iter().enumerate() {
            let k = start + i;
            let w = -2.0 * std::f64::consts::PI * ((k * cell.m) % m) as f64 / m as f64;
            acc += samples[k] * g * Complex::from_polar(1.0, w);
        }
        Ok(acc * self.convention.factor(cell.m, cell.n).conj())
    }

    /// Literal evaluation of the analysis bank; O(N·M·K·M).
    pub fn demodulate_direct(&self, samples: &[Complex], num_symbols: usize) -> Result<ComplexGrid> {
        self.check_len(samples, num_symbols)?;
        let m = self.num_subcarriers();
        let mut out = ComplexGrid::zeros(m, num_symbols);
        for n in 0..num_symbols {
            for sub in 0..m {
                out.set(sub, n, self.analyze_cell(samples, Cell::new(sub, n))?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn modem() -> OqamModem {
        OqamModem::phydyas(64).unwrap()
    }

    #[test]
    fn zero_grid_gives_zero_stream() {
        let md = modem();
        let g = OqamGrid::zeros(64, 8, 0.5);
        let s = md.modulate(&g).unwrap();
        assert_eq!(s.len(), 7 * 32 + 256);
        assert!(s.iter().all(|c| c.norm() == 0.0));
        let r = md.demodulate(&s, 8).unwrap();
        assert!(r.values().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn single_symbol_on_subcarrier_zero_is_the_filter() {
        let md = modem();
        let mut g = OqamGrid::zeros(64, 4, 0.5);
        g.set(0, 0, 1.0);
        let s = md.modulate(&g).unwrap();
        for (k, &t) in md.filter().taps().iter().enumerate() {
            assert!((s[k] - Complex::new(t, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn single_symbol_round_trip_and_neighbour() {
        let md = modem();
        for &(m, n) in &[(0usize, 5usize), (17, 6), (63, 7), (30, 4)] {
            let mut g = OqamGrid::zeros(64, 12, 0.5);
            g.set(m, n, 1.0);
            let r = md.demodulate(&md.modulate(&g).unwrap(), 12).unwrap();
            assert!((r.get(m, n) - Complex::new(1.0, 0.0)).norm() < 2e-3);
            // response at the next symbol on the same subcarrier
            let next = r.get(m, n + 1);
            assert!(next.re.abs() < 2e-3);
            assert!((next.im.abs() - 0.5646).abs() < 2e-3, "{next}");
        }
    }

    #[test]
    fn fast_matches_direct() {
        let md = OqamModem::phydyas(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = OqamGrid::random_pam2(16, 10, 0.5, &mut rng);
        let fast = md.modulate(&g).unwrap();
        let slow = md.modulate_direct(&g).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-9);
        }
        let rf = md.demodulate(&fast, 10).unwrap();
        let rs = md.demodulate_direct(&fast, 10).unwrap();
        for (a, b) in rf.values().iter().zip(rs.values()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn short_stream_is_rejected() {
        let md = modem();
        let s = vec![Complex::new(0.0, 0.0); 100];
        assert!(matches!(md.demodulate(&s, 4), Err(Error::Length { .. })));
    }

    #[test]
    fn random_grid_real_part_round_trip() {
        let md = modem();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = OqamGrid::random_pam2(64, 20, 0.5, &mut rng);
        let r = md.demodulate(&md.modulate(&g).unwrap(), 20).unwrap();
        let mut se = 0.0;
        let mut cnt = 0.0;
        for n in 4..16 {
            for m in 0..64 {
                se += (r.get(m, n).re - g.get(m, n)).powi(2);
                cnt += 1.0;
            }
        }
        let rms = (se / cnt).sqrt();
        assert!(rms < 2e-3 * 0.5f64.sqrt(), "rms {rms}");
    }
}
