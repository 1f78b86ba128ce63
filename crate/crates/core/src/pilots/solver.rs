//! General interference-neutralization solver.
//!
//! A pilot group occupies `S` real-valued slots. Each slot receives
//!
//! ```text
//! r_i = Σ_j κ(slot_j → slot_i)·p_j + e_i
//! ```
//!
//! where `κ` is the coupling (self term 1) and `e_i` the complex interference
//! from everything outside the group. The receiver forms `C` combined outputs
//! `c_k = Σ_i w_ki·r_i`; the transmitter picks `p` so that every `c_k` equals
//! its complex target. Together with optional real side constraints
//! `Σ_j q_j·p_j = d` this is a square real system of size `2C + Q = S`.

use nalgebra::{DMatrix, DVector};

use crate::waveform::AmbiguityTable;
use crate::{Cell, Complex, Error, Result};

/// Relative magnitude of the smallest LU pivot below which a system is
/// reported singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Which coupling values the solver sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingModel {
    /// `j·β` from the table, negligible entries dropped, real residual
    /// ignored. This is the model behind the closed-form pilot formulas.
    Ideal,
    /// Full complex table values. With a complete table this reproduces the
    /// filter bank to rounding error.
    Exact,
}

/// `κ(src → dst)` under the chosen model.
pub fn coupling(table: &AmbiguityTable, model: CouplingModel, src: Cell, dst: Cell) -> Complex {
    if src == dst {
        return Complex::new(1.0, 0.0);
    }
    match model {
        CouplingModel::Ideal => Complex::new(0.0, table.beta(src, dst)),
        CouplingModel::Exact => table.coupling(src, dst),
    }
}

/// Slot layout, receiver combiners and side-constraint rows of a pilot group.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutralizationSystem {
    slots: Vec<Cell>,
    combiners: Vec<Vec<Complex>>,
    constraints: Vec<Vec<f64>>,
}

impl NeutralizationSystem {
    pub fn new(slots: Vec<Cell>, combiners: Vec<Vec<Complex>>, constraints: Vec<Vec<f64>>) -> Result<Self> {
        let s = slots.len();
        if s == 0 {
            return Err(Error::Config("pilot group has no slots".into()));
        }
        if combiners.iter().any(|w| w.len() != s) || constraints.iter().any(|q| q.len() != s) {
            return Err(Error::Config(format!("combiner and constraint rows must have {s} entries")));
        }
        if 2 * combiners.len() + constraints.len() != s {
            return Err(Error::Config(format!(
                "{} combiners and {} constraints do not determine {s} pilots",
                combiners.len(),
                constraints.len()
            )));
        }
        for (i, a) in slots.iter().enumerate() {
            if slots[..i].contains(a) {
                return Err(Error::Config(format!("slot ({}, {}) listed twice", a.m, a.n)));
            }
        }
        Ok(Self {
            slots,
            combiners,
            constraints,
        })
    }

    pub fn slots(&self) -> &[Cell] {
        &self.slots
    }

    pub fn combiners(&self) -> &[Vec<Complex>] {
        &self.combiners
    }

    pub fn constraints(&self) -> &[Vec<f64>] {
        &self.constraints
    }

    /// Builds and factorizes the real system for a given coupling.
    pub fn prepare(&self, coupling: impl Fn(Cell, Cell) -> Complex) -> Result<PreparedSystem> {
        let s = self.slots.len();
        let kappa: Vec<Vec<Complex>> = self
            .slots
            .iter()
            .map(|&dst| self.slots.iter().map(|&src| coupling(src, dst)).collect())
            .collect();
        let mut a = DMatrix::<f64>::zeros(s, s);
        for (k, w) in self.combiners.iter().enumerate() {
            for j in 0..s {
                let v: Complex = (0..s).map(|i| w[i] * kappa[i][j]).sum();
                a[(2 * k, j)] = v.re;
                a[(2 * k + 1, j)] = v.im;
            }
        }
        let base = 2 * self.combiners.len();
        for (q, row) in self.constraints.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                a[(base + q, j)] = v;
            }
        }
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lu = a.clone().lu();
        let pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if scale == 0.0 || pivot < SINGULAR_TOLERANCE * scale {
            return Err(Error::Singular(format!(
                "pivot {pivot:.3e} relative to {scale:.3e} for slots {:?}",
                self.slots.iter().map(|c| (c.m, c.n)).collect::<Vec<_>>()
            )));
        }
        let inverse = lu
            .try_inverse()
            .ok_or_else(|| Error::Singular("LU inverse failed".into()))?;
        Ok(PreparedSystem {
            system: self.clone(),
            kappa,
            matrix: a,
            inverse,
        })
    }
}

/// A factorized system ready to be solved for many right-hand sides.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    system: NeutralizationSystem,
    kappa: Vec<Vec<Complex>>,
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl PreparedSystem {
    pub fn system(&self) -> &NeutralizationSystem {
        &self.system
    }

    pub fn slots(&self) -> &[Cell] {
        &self.system.slots
    }

    /// `κ(slot_j → slot_i)` indexed `[i][j]`.
    pub fn coupling_matrix(&self) -> &[Vec<Complex>] {
        &self.kappa
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// Right-hand side for the given targets, side-constraint values and
    /// external interference.
    pub fn rhs(&self, targets: &[Complex], constraint_rhs: &[f64], external: &[Complex]) -> Result<DVector<f64>> {
        let sys = &self.system;
        if targets.len() != sys.combiners.len()
            || constraint_rhs.len() != sys.constraints.len()
            || external.len() != sys.slots.len()
        {
            return Err(Error::Config(format!(
                "expected {} targets, {} constraint values and {} interference values",
                sys.combiners.len(),
                sys.constraints.len(),
                sys.slots.len()
            )));
        }
        let mut b = DVector::<f64>::zeros(sys.slots.len());
        for (k, (w, t)) in sys.combiners.iter().zip(targets).enumerate() {
            let leak: Complex = w.iter().zip(external).map(|(w, e)| w * e).sum();
            let v = t - leak;
            b[2 * k] = v.re;
            b[2 * k + 1] = v.im;
        }
        let base = 2 * sys.combiners.len();
        for (q, &d) in constraint_rhs.iter().enumerate() {
            b[base + q] = d;
        }
        Ok(b)
    }

    pub fn solve(&self, targets: &[Complex], constraint_rhs: &[f64], external: &[Complex]) -> Result<Vec<f64>> {
        let b = self.rhs(targets, constraint_rhs, external)?;
        Ok((&self.inverse * b).iter().copied().collect())
    }

    /// Noiseless received values at the slots for given pilots.
    pub fn received(&self, pilots: &[f64], external: &[Complex]) -> Vec<Complex> {
        self.kappa
            .iter()
            .zip(external)
            .map(|(row, e)| row.iter().zip(pilots).map(|(k, p)| k * p).sum::<Complex>() + e)
            .collect()
    }

    /// Receiver combining of slot values.
    pub fn combine(&self, received: &[Complex]) -> Vec<Complex> {
        self.system
            .combiners
            .iter()
            .map(|w| combine_received(received, w))
            .collect()
    }
}

/// Literal weighted sum `Σ w_i·r_i`.
///
/// # Panics
/// If the slices differ in length.
pub fn combine_received(received: &[Complex], weights: &[Complex]) -> Complex {
    assert_eq!(received.len(), weights.len(), "received and weight lists differ in length");
    received.iter().zip(weights).map(|(r, w)| r * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{PhaseConvention, PrototypeFilter};

    const J: Complex = Complex::new(0.0, 1.0);
    const ONE: Complex = Complex::new(1.0, 0.0);
    const ZERO: Complex = Complex::new(0.0, 0.0);

    fn pair() -> NeutralizationSystem {
        NeutralizationSystem::new(vec![Cell::new(3, 6), Cell::new(3, 7)], vec![vec![ONE, J]], vec![]).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        let c = vec![Cell::new(0, 0), Cell::new(0, 1)];
        assert!(NeutralizationSystem::new(c.clone(), vec![], vec![]).is_err());
        assert!(NeutralizationSystem::new(c.clone(), vec![vec![ONE]], vec![]).is_err());
        assert!(NeutralizationSystem::new(vec![Cell::new(0, 0); 2], vec![vec![ONE, J]], vec![]).is_err());
        assert!(NeutralizationSystem::new(c, vec![vec![ONE, J]], vec![]).is_ok());
    }

    #[test]
    fn solution_reproduces_targets() {
        let f = PrototypeFilter::phydyas(64, 4).unwrap();
        let t = AmbiguityTable::complete(&f, PhaseConvention).unwrap();
        let p = pair().prepare(|s, d| coupling(&t, CouplingModel::Exact, s, d)).unwrap();
        let target = [Complex::new(0.7, -1.2)];
        let ext = [Complex::new(0.1, 0.4), Complex::new(-0.2, 0.3)];
        let pilots = p.solve(&target, &[], &ext).unwrap();
        let c = p.combine(&p.received(&pilots, &ext));
        assert!((c[0] - target[0]).norm() < 1e-12);
    }

    #[test]
    fn singular_combination_is_reported() {
        // r1 + r2 with no coupling only observes p1 + p2
        let sys =
            NeutralizationSystem::new(vec![Cell::new(0, 0), Cell::new(0, 1)], vec![vec![ONE, ONE]], vec![]).unwrap();
        let r = sys.prepare(|s, d| if s == d { ONE } else { ZERO });
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn combine_is_weighted_sum() {
        let r = [Complex::new(1.0, 1.0), Complex::new(1.0, -1.0)];
        assert_eq!(combine_received(&r, &[ONE, ZERO]), r[0]);
        assert_eq!(combine_received(&r, &[ONE, -J]), Complex::new(0.0, 0.0));
    }

    #[test]
    #[should_panic]
    fn combine_length_mismatch_panics() {
        combine_received(&[ONE], &[ONE, ONE]);
    }
}
