use rand::Rng;

use crate::{Cell, Complex};

/// Phase factor applied to the OQAM symbol at `(m, n)`: `j^(m+n)`.
///
/// Horizontally and vertically adjacent cells differ by a quarter turn,
/// which is what places all intrinsic interference on the imaginary axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseConvention;

impl PhaseConvention {
    /// Exponent of `j` (mod 4) for the cell.
    #[inline]
    pub fn quarter_turns(&self, m: usize, n: usize) -> u8 {
        ((m + n) % 4) as u8
    }

    #[inline]
    pub fn factor(&self, m: usize, n: usize) -> Complex {
        j_pow(self.quarter_turns(m, n) as i64)
    }

    /// Same rule extended to negative lattice coordinates.
    #[inline]
    pub fn factor_signed(&self, m: isize, n: isize) -> Complex {
        j_pow((m + n) as i64)
    }
}

/// `j^p` for any integer power.
#[inline]
pub fn j_pow(p: i64) -> Complex {
    match p.rem_euclid(4) {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

/// Role of a lattice cell in a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellKind {
    #[default]
    Data,
    Pilot,
    Reserved,
}

/// Real-valued PAM symbol plane `a[m, n]`, stored symbol-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OqamGrid {
    num_subcarriers: usize,
    num_symbols: usize,
    values: Vec<f64>,
    mask: Vec<CellKind>,
    symbol_power: f64,
}

impl OqamGrid {
    pub fn zeros(num_subcarriers: usize, num_symbols: usize, symbol_power: f64) -> Self {
        Self {
            num_subcarriers,
            num_symbols,
            values: vec![0.0; num_subcarriers * num_symbols],
            mask: vec![CellKind::Data; num_subcarriers * num_symbols],
            symbol_power,
        }
    }

    /// Fills every cell with equiprobable PAM-2 symbols `±√ρ²`.
    pub fn random_pam2<R: Rng + ?Sized>(
        num_subcarriers: usize,
        num_symbols: usize,
        symbol_power: f64,
        rng: &mut R,
    ) -> Self {
        let mut g = Self::zeros(num_subcarriers, num_symbols, symbol_power);
        let amp = symbol_power.sqrt();
        g.values
            .iter_mut()
            .for_each(|v| *v = if rng.gen::<bool>() { amp } else { -amp });
        g
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn symbol_power(&self) -> f64 {
        self.symbol_power
    }

    #[inline]
    fn idx(&self, m: usize, n: usize) -> usize {
        debug_assert!(m < self.num_subcarriers && n < self.num_symbols);
        n * self.num_subcarriers + m
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[self.idx(m, n)]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, v: f64) {
        let i = self.idx(m, n);
        self.values[i] = v;
    }

    pub fn kind(&self, m: usize, n: usize) -> CellKind {
        self.mask[self.idx(m, n)]
    }

    pub fn set_kind(&mut self, m: usize, n: usize, kind: CellKind) {
        let i = self.idx(m, n);
        self.mask[i] = kind;
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.m < self.num_subcarriers && cell.n < self.num_symbols
    }

    /// Symbol `n` as a slice over subcarriers.
    pub fn symbol(&self, n: usize) -> &[f64] {
        &self.values[n * self.num_subcarriers..(n + 1) * self.num_subcarriers]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Copy with every non-data cell zeroed.
    pub fn data_only(&self) -> Self {
        let mut g = self.clone();
        for (v, k) in g.values.iter_mut().zip(&self.mask) {
            if *k != CellKind::Data {
                *v = 0.0;
            }
        }
        g
    }

    /// True if the cell is at least `guard` symbols away from both frame edges.
    pub fn is_interior(&self, n: usize, guard: usize) -> bool {
        n >= guard && n + guard < self.num_symbols
    }
}

/// Complex matrix of analysis-filter (or OFDM FFT) outputs, symbol-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    num_subcarriers: usize,
    num_symbols: usize,
    values: Vec<Complex>,
}

impl ComplexGrid {
    pub fn zeros(num_subcarriers: usize, num_symbols: usize) -> Self {
        Self {
            num_subcarriers,
            num_symbols,
            values: vec![Complex::new(0.0, 0.0); num_subcarriers * num_symbols],
        }
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> Complex {
        self.values[n * self.num_subcarriers + m]
    }

    #[inline]
    pub fn set(&mut self, m: usize, n: usize, v: Complex) {
        self.values[n * self.num_subcarriers + m] = v;
    }

    pub fn symbol(&self, n: usize) -> &[Complex] {
        &self.values[n * self.num_subcarriers..(n + 1) * self.num_subcarriers]
    }

    pub fn symbol_mut(&mut self, n: usize) -> &mut [Complex] {
        &mut self.values[n * self.num_subcarriers..(n + 1) * self.num_subcarriers]
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }
}
