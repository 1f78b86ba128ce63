use crate::pilots::CleanPilotTarget;
use crate::waveform::ComplexGrid;
use crate::{Complex, Error, Result};

/// `Ĥ = clean / (x + yj)`.
pub fn ls_estimate(clean_pilot: Complex, target: CleanPilotTarget) -> Result<Complex> {
    if target.power() == 0.0 {
        return Err(Error::ZeroTarget);
    }
    Ok(clean_pilot / target.value())
}

/// LS estimate at subcarrier `m` and (possibly fractional) symbol time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotEstimate {
    pub m: usize,
    pub t: f64,
    pub value: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpolationMethod {
    LsLinear,
}

/// Dense channel estimate with the pilot estimates it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimateGrid {
    pub values: ComplexGrid,
    pub pilots: Vec<PilotEstimate>,
    pub method: InterpolationMethod,
}

impl ChannelEstimateGrid {
    pub fn get(&self, m: usize, n: usize) -> Complex {
        self.values.get(m, n)
    }
}

/// Piecewise-linear interpolation of `(x, y)` points sorted by `x`, holding
/// the end values outside the covered range.
fn linear_hold(points: &[(f64, Complex)], x: f64) -> Complex {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= x);
    let (a, b) = (points[k - 1], points[k]);
    let w = (x - a.0) / (b.0 - a.0);
    a.1 * (1.0 - w) + b.1 * w
}

/// Bilinear interpolation: along time on every pilot subcarrier, then along
/// frequency on every symbol.
pub fn interpolate(pilots: &[PilotEstimate], num_subcarriers: usize, num_symbols: usize) -> Result<ChannelEstimateGrid> {
    if pilots.is_empty() {
        return Err(Error::NoPilots);
    }
    if let Some(p) = pilots.iter().find(|p| p.m >= num_subcarriers || !p.t.is_finite()) {
        return Err(Error::Config(format!("pilot at ({}, {}) outside the grid", p.m, p.t)));
    }
    let mut subcarriers: Vec<usize> = pilots.iter().map(|p| p.m).collect();
    subcarriers.sort_unstable();
    subcarriers.dedup();

    // time direction: one full column per pilot subcarrier
    let mut columns: Vec<(f64, Vec<Complex>)> = Vec::with_capacity(subcarriers.len());
    for &m in &subcarriers {
        let mut pts: Vec<(f64, Complex)> = pilots.iter().filter(|p| p.m == m).map(|p| (p.t, p.value)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let col = (0..num_symbols).map(|n| linear_hold(&pts, n as f64)).collect();
        columns.push((m as f64, col));
    }

    let mut values = ComplexGrid::zeros(num_subcarriers, num_symbols);
    let mut row = Vec::with_capacity(columns.len());
    for n in 0..num_symbols {
        row.clear();
        row.extend(columns.iter().map(|(m, col)| (*m, col[n])));
        for m in 0..num_subcarriers {
            values.set(m, n, linear_hold(&row, m as f64));
        }
    }
    Ok(ChannelEstimateGrid {
        values,
        pilots: pilots.to_vec(),
        method: InterpolationMethod::LsLinear,
    })
}
