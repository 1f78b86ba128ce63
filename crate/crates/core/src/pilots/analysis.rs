//! Closed-form pilot power and clean-pilot SNR, plus the expectation-level
//! quantities used to size pilot groups under a power budget.

use std::collections::HashSet;
use std::f64::consts::PI;

use super::schemes::Scheme;
use super::solver::PreparedSystem;
use crate::waveform::AmbiguityTable;
use crate::{Cell, Complex, Error, Result};

/// `β(m, n+1 → m, n)` at the reference cell.
pub fn pair_beta(table: &AmbiguityTable) -> f64 {
    table.get(0, 1).im
}

/// `E(i²) = ρ²·Σβ²` over the table neighbourhood minus one offset.
pub fn interference_power(table: &AmbiguityTable, rho2: f64, excluded: (isize, isize)) -> f64 {
    rho2 * table.beta_energy(&[excluded])
}

/// Pilot power from explicit second moments. `e2` is the per-component
/// target power: `E(x²)` for AUP, `E(x²) = E(y²)` for DDP2.
pub fn power_from_moments(scheme: Scheme, e2: f64, ei1: f64, ei2: f64, beta: f64) -> Result<f64> {
    match scheme {
        Scheme::Aup => Ok(e2 + ei1 / (beta * beta)),
        Scheme::Ddp2 => {
            let d = (1.0 + beta.abs()).powi(2);
            Ok((e2 + ei2) / d + (e2 + ei1) / d)
        }
        other => Err(Error::Config(format!("no closed-form power for {other}"))),
    }
}

/// Expected total pilot power of one AUP or DDP2 pair.
pub fn predicted_power(scheme: Scheme, rho2: f64, e2: f64, table: &AmbiguityTable) -> Result<f64> {
    let ei1 = interference_power(table, rho2, (0, 1));
    let ei2 = interference_power(table, rho2, (0, -1));
    power_from_moments(scheme, e2, ei1, ei2, pair_beta(table))
}

/// Clean-pilot noise variance in units of `σ²`: 1 for AUP, `2(1+|β|)` for
/// DDP2 on the minimum-power branch.
pub fn clean_noise_factor(scheme: Scheme, table: &AmbiguityTable) -> Result<f64> {
    match scheme {
        Scheme::Aup => Ok(1.0),
        Scheme::Ddp2 => Ok(2.0 * (1.0 + pair_beta(table).abs())),
        other => Err(Error::Config(format!("no closed-form SNR for {other}"))),
    }
}

pub fn predicted_snr(scheme: Scheme, e2: f64, sigma2: f64, table: &AmbiguityTable) -> Result<f64> {
    let signal = match scheme {
        Scheme::Aup => e2,
        _ => 2.0 * e2,
    };
    Ok(signal / (clean_noise_factor(scheme, table)? * sigma2))
}

/// Per-component target power that makes the clean-pilot SNR equal `1/σ²`.
pub fn parity_target_power(scheme: Scheme, table: &AmbiguityTable) -> Result<f64> {
    match scheme {
        Scheme::Aup => Ok(1.0),
        _ => Ok(clean_noise_factor(scheme, table)? / 2.0),
    }
}

/// `Var(Σ w_i·n_i)` for analysis-filtered white noise of variance `σ²`,
/// using `E[n_i·conj(n_j)] = σ²·Λ(slot_j → slot_i)`.
pub fn combined_noise_variance(weights: &[Complex], slots: &[Cell], table: &AmbiguityTable, sigma2: f64) -> f64 {
    let mut v = Complex::new(0.0, 0.0);
    for (i, (&wi, &si)) in weights.iter().zip(slots).enumerate() {
        for (j, (&wj, &sj)) in weights.iter().zip(slots).enumerate() {
            let k = if i == j { Complex::new(1.0, 0.0) } else { table.coupling(sj, si) };
            v += wi * wj.conj() * k;
        }
    }
    sigma2 * v.re
}

/// Expected pilot power spent on cancelling random data of power `ρ²`.
///
/// Data cells are the table neighbourhood around every slot for which
/// `is_data` holds; `coupling` must be the model the system was prepared
/// with.
pub fn expected_interference_power(
    prepared: &PreparedSystem,
    table: &AmbiguityTable,
    coupling: impl Fn(Cell, Cell) -> Complex,
    rho2: f64,
    num_subcarriers: usize,
    is_data: impl Fn(Cell) -> bool,
) -> Result<f64> {
    let slots = prepared.slots();
    let m_total = num_subcarriers as isize;
    let mut seen = HashSet::new();
    let zeros_t = vec![Complex::new(0.0, 0.0); prepared.system().combiners().len()];
    let zeros_q = vec![0.0; prepared.system().constraints().len()];
    let mut total = 0.0;
    for slot in slots {
        for (dm, dn) in table.neighbourhood() {
            let n = slot.n as isize + dn;
            if n < 0 {
                continue;
            }
            let cell = Cell::new((slot.m as isize + dm).rem_euclid(m_total) as usize, n as usize);
            if slots.contains(&cell) || !is_data(cell) || !seen.insert(cell) {
                continue;
            }
            let ext: Vec<Complex> = slots.iter().map(|&s| coupling(cell, s)).collect();
            let p = prepared.solve(&zeros_t, &zeros_q, &ext)?;
            total += p.iter().map(|v| v * v).sum::<f64>();
        }
    }
    Ok(rho2 * total)
}

/// `Σ p²` needed to deliver `targets` with no interference.
pub fn target_power(prepared: &PreparedSystem, targets: &[Complex]) -> Result<f64> {
    let zeros_q = vec![0.0; prepared.system().constraints().len()];
    let zeros_e = vec![Complex::new(0.0, 0.0); prepared.slots().len()];
    let p = prepared.solve(targets, &zeros_q, &zeros_e)?;
    Ok(p.iter().map(|v| v * v).sum())
}

/// Phases of unit-magnitude targets minimizing [`target_power`]: a coarse
/// grid over all phases followed by coordinate refinement.
pub fn optimize_target_phases(prepared: &PreparedSystem) -> Result<Vec<f64>> {
    let c = prepared.system().combiners().len();
    if c == 0 {
        return Ok(vec![]);
    }
    if c > 3 {
        return Err(Error::Config(format!("phase search supports up to 3 outputs, got {c}")));
    }
    let eval = |ph: &[f64]| -> Result<f64> {
        let t: Vec<Complex> = ph.iter().map(|&p| Complex::from_polar(1.0, p)).collect();
        target_power(prepared, &t)
    };
    let coarse = 72usize;
    let step = 2.0 * PI / coarse as f64;
    let mut best = vec![0.0; c];
    let mut best_val = eval(&best)?;
    let mut idx = vec![0usize; c];
    'grid: loop {
        let ph: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
        let v = eval(&ph)?;
        if v < best_val - 1e-15 {
            best_val = v;
            best = ph;
        }
        for d in 0..c {
            idx[d] += 1;
            if idx[d] < coarse {
                continue 'grid;
            }
            idx[d] = 0;
        }
        break;
    }
    let mut h = step;
    while h > 1e-6 {
        let mut improved = false;
        for d in 0..c {
            for s in [-h, h] {
                let mut ph = best.clone();
                ph[d] += s;
                let v = eval(&ph)?;
                if v < best_val - 1e-15 {
                    best_val = v;
                    best = ph;
                    improved = true;
                }
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    Ok(best.into_iter().map(|p| p.rem_euclid(2.0 * PI)).collect())
}
