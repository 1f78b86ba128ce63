//! Exact neutralization of every pilot group in a frame.
//!
//! Interference from the data is measured by running the frame through the
//! filter bank itself, so every coupling the truncated table would miss is
//! accounted for. Groups are solved with their intra-group coupling on the
//! left-hand side; the small coupling between different groups is resolved
//! by iterating until the pilot values stop moving.

use super::solver::PreparedSystem;
use crate::waveform::{CellKind, OqamGrid, OqamModem};
use crate::{Complex, Error, Result};

/// Largest pilot update accepted as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-13;
pub const MAX_ITERATIONS: usize = 30;

/// A prepared group together with its per-frame right-hand side.
#[derive(Debug, Clone)]
pub struct PilotGroup {
    pub system: PreparedSystem,
    pub targets: Vec<Complex>,
    pub constraint_rhs: Vec<f64>,
}

/// Writes neutralizing pilot values into `grid` and returns them per group.
///
/// Every slot of every group must be marked [`CellKind::Pilot`]; the values
/// already present at those slots are ignored.
pub fn neutralize_frame(modem: &OqamModem, grid: &mut OqamGrid, groups: &[PilotGroup]) -> Result<Vec<Vec<f64>>> {
    for g in groups {
        for s in g.system.slots() {
            if !grid.contains(*s) || grid.kind(s.m, s.n) != CellKind::Pilot {
                return Err(Error::Config(format!("slot ({}, {}) is not a pilot cell", s.m, s.n)));
            }
            grid.set(s.m, s.n, 0.0);
        }
    }
    let mut pilots: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; g.system.slots().len()]).collect();
    for _ in 0..MAX_ITERATIONS {
        let rx = modem.demodulate(&modem.modulate(grid)?, grid.num_symbols())?;
        let mut change = 0.0f64;
        let mut scale = 0.0f64;
        for (g, p) in groups.iter().zip(pilots.iter_mut()) {
            let kappa = g.system.coupling_matrix();
            let ext: Vec<Complex> = g
                .system
                .slots()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let own: Complex = kappa[i].iter().zip(p.iter()).map(|(k, v)| k * v).sum();
                    rx.get(s.m, s.n) - own
                })
                .collect();
            let next = g.system.solve(&g.targets, &g.constraint_rhs, &ext)?;
            for (old, new) in p.iter_mut().zip(&next) {
                change = change.max((new - *old).abs());
                scale = scale.max(new.abs());
                *old = *new;
            }
        }
        for (g, p) in groups.iter().zip(&pilots) {
            for (s, v) in g.system.slots().iter().zip(p) {
                grid.set(s.m, s.n, *v);
            }
        }
        if change <= CONVERGENCE_TOLERANCE * scale.max(1.0) {
            return Ok(pilots);
        }
    }
    Err(Error::Singular(format!(
        "pilot groups did not converge in {MAX_ITERATIONS} iterations"
    )))
}
