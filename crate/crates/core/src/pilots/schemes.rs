//! Pilot generators.
//!
//! The closed forms work under the ideal coupling model: every neighbour
//! couples into a pilot as `j·β` with real `β`, and
//! `β(n → n+1) = -β(n+1 → n)`. Throughout, `beta` denotes the coupling from
//! the later slot onto the earlier one, `β(m, n+1 → m, n)`.
//!
//! Exact neutralization on a real filter bank goes through the layouts at
//! the bottom of this file and [`super::frame::neutralize_frame`].

use std::f64::consts::FRAC_1_SQRT_2;

use super::interference::compute_interference;
use super::solver::{coupling, CouplingModel, NeutralizationSystem};
use crate::waveform::{AmbiguityTable, OqamGrid};
use crate::{Cell, Complex, Error, Result};

const J: Complex = Complex::new(0.0, 1.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

/// Pilot scheme identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Aup,
    Cpp,
    Ddp2,
    Ddp4,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Aup => "aup",
            Scheme::Cpp => "cpp",
            Scheme::Ddp2 => "ddp2",
            Scheme::Ddp4 => "ddp4",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Clean complex reference `x + yj` the receiver should see after combining.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CleanPilotTarget {
    pub x: f64,
    pub y: f64,
}

impl CleanPilotTarget {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub const fn real(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn from_complex(c: Complex) -> Self {
        Self { x: c.re, y: c.im }
    }

    pub fn value(&self) -> Complex {
        Complex::new(self.x, self.y)
    }

    /// `x² + y²`.
    pub fn power(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Transmitted pilot amplitudes together with the receiver combining that
/// turns them into clean references.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSolution {
    pub scheme: Scheme,
    pub pilot_values: Vec<f64>,
    /// One weight row per combined output, spanning all pilot slots.
    pub combining_weights: Vec<Vec<Complex>>,
    pub targets: Vec<CleanPilotTarget>,
}

impl PilotSolution {
    /// Total transmitted pilot power `Σ p²`.
    pub fn power(&self) -> f64 {
        self.pilot_values.iter().map(|p| p * p).sum()
    }

    pub fn combine(&self, received: &[Complex]) -> Vec<Complex> {
        self.combining_weights
            .iter()
            .map(|w| super::solver::combine_received(received, w))
            .collect()
    }
}

/// Solves `r₁ + α·r₂ = x + yj` for two adjacent real pilots.
///
/// With `α = a + jb` the real and imaginary parts give
///
/// ```text
/// (1 + bβ)·p¹ + a·p²        = x + b·i₂
/// -aβ·p¹      + (β + b)·p²  = y - i₁ - a·i₂
/// ```
pub fn solve_neutralization(
    alpha: Complex,
    target: CleanPilotTarget,
    i1: f64,
    i2: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    let (a, b) = (alpha.re, alpha.im);
    let (a11, a12, a21, a22) = (1.0 + b * beta, a, -a * beta, beta + b);
    let r1 = target.x + b * i2;
    let r2 = target.y - i1 - a * i2;
    let scale = [a11, a12, a21, a22].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if a == 0.0 {
        if a11.abs() < 1e-12 * scale.max(1.0) || a22.abs() < 1e-12 * scale.max(1.0) {
            return Err(Error::Singular(format!("alpha = {alpha}, beta = {beta}")));
        }
        return Ok((r1 / a11, r2 / a22));
    }
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-12 * scale * scale {
        return Err(Error::Singular(format!("alpha = {alpha}, beta = {beta}")));
    }
    Ok(((r1 * a22 - a12 * r2) / det, (a11 * r2 - a21 * r1) / det))
}

fn next(cell: Cell, k: usize) -> Cell {
    Cell::new(cell.m, cell.n + k)
}

fn require_coupling(beta: f64, table: &AmbiguityTable) -> Result<()> {
    if beta == 0.0 || beta.abs() < table.floor() {
        return Err(Error::IllConditioned(beta));
    }
    Ok(())
}

/// Prime pilot `x` at `prime`, auxiliary at the next symbol cancelling the
/// data interference on the prime.
pub fn aup_pilots(x: f64, grid: &OqamGrid, table: &AmbiguityTable, prime: Cell) -> Result<PilotSolution> {
    let aux = next(prime, 1);
    let beta = table.beta(aux, prime);
    require_coupling(beta, table)?;
    let i1 = compute_interference(grid, table, prime, &[prime, aux])?.i_value;
    let (p1, p2) = solve_neutralization(ZERO, CleanPilotTarget::real(x), i1, 0.0, beta)?;
    Ok(PilotSolution {
        scheme: Scheme::Aup,
        pilot_values: vec![p1, p2],
        combining_weights: vec![vec![ONE, ZERO]],
        targets: vec![CleanPilotTarget::real(x)],
    })
}

/// Auxiliary pair of the composite scheme around a prime pilot.
///
/// `s` is the data interference on the prime, `beta_prev` and `beta_next`
/// the couplings of the slots before and after onto it. Each auxiliary
/// cancels half of `s`; the superimposed symbol `a*` enters both so that its
/// own contributions cancel:
///
/// ```text
/// c₋ = a*/√2 - s/(2β₋)
/// c₊ = -(β₋/β₊)·a*/√2 - s/(2β₊)
/// ```
///
/// For `β₊ = β₋` this is `c₊ = -a*/√2 - s/(2β₊)`.
pub fn cpp_auxiliaries(a_star: f64, s: f64, beta_prev: f64, beta_next: f64) -> Result<(f64, f64)> {
    if beta_prev == 0.0 || beta_next == 0.0 {
        return Err(Error::IllConditioned(if beta_prev == 0.0 { beta_prev } else { beta_next }));
    }
    let sup = a_star * FRAC_1_SQRT_2;
    Ok((
        sup - s / (2.0 * beta_prev),
        -(beta_prev / beta_next) * sup - s / (2.0 * beta_next),
    ))
}

/// Composite pilot triple `(c₋, x, c₊)` centred on `centre`.
pub fn cpp_pilots(x: f64, a_star: f64, grid: &OqamGrid, table: &AmbiguityTable, centre: Cell) -> Result<PilotSolution> {
    if centre.n == 0 {
        return Err(Error::Boundary {
            m: centre.m,
            n: centre.n,
            guard: 1,
        });
    }
    let prev = Cell::new(centre.m, centre.n - 1);
    let after = next(centre, 1);
    let (bp, bn) = (table.beta(prev, centre), table.beta(after, centre));
    require_coupling(bp, table)?;
    require_coupling(bn, table)?;
    let s = compute_interference(grid, table, centre, &[prev, centre, after])?.i_value;
    let (cm, cp) = cpp_auxiliaries(a_star, s, bp, bn)?;
    Ok(PilotSolution {
        scheme: Scheme::Cpp,
        pilot_values: vec![cm, x, cp],
        combining_weights: vec![vec![ZERO, ONE, ZERO]],
        targets: vec![CleanPilotTarget::real(x)],
    })
}

/// Combining weight of the minimum-power branch: `j·sign(β)`.
pub fn min_power_alpha(beta: f64) -> Result<Complex> {
    if beta > 0.0 {
        Ok(J)
    } else if beta < 0.0 {
        Ok(-J)
    } else {
        Err(Error::IllConditioned(beta))
    }
}

/// Dual dependent pair on the minimum-power branch.
pub fn ddp_pair(target: CleanPilotTarget, i1: f64, i2: f64, beta: f64) -> Result<PilotSolution> {
    let alpha = min_power_alpha(beta)?;
    if (beta.abs() - 1.0).abs() < 1e-12 {
        return Err(Error::Singular(format!("|beta| = 1 (beta = {beta})")));
    }
    let (p1, p2) = solve_neutralization(alpha, target, i1, i2, beta)?;
    Ok(PilotSolution {
        scheme: Scheme::Ddp2,
        pilot_values: vec![p1, p2],
        combining_weights: vec![vec![ONE, alpha]],
        targets: vec![target],
    })
}

/// `β(slot_j → slot_i)` indexed `[i][j]` for `size` consecutive symbols on
/// one subcarrier.
pub fn group_betas(table: &AmbiguityTable, anchor: Cell, size: usize) -> Vec<Vec<f64>> {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == j { 0.0 } else { table.beta(next(anchor, j), next(anchor, i)) })
                .collect()
        })
        .collect()
}

/// Four jointly solved dependent pilots read as two pairs,
/// `c₁ = r₁ + α₁r₂` and `c₂ = r₃ + α₂r₄`.
///
/// `betas[i][j]` is the ideal coupling from slot `j` onto slot `i` (see
/// [`group_betas`]); `external` holds the data interference on each slot.
pub fn ddp_group4(
    targets: [CleanPilotTarget; 2],
    external: [f64; 4],
    alphas: [Complex; 2],
    betas: &[Vec<f64>],
) -> Result<PilotSolution> {
    if betas.len() != 4 || betas.iter().any(|r| r.len() != 4) {
        return Err(Error::Config("DDP4 coupling matrix must be 4x4".into()));
    }
    let slots: Vec<Cell> = (0..4).map(|k| Cell::new(0, k)).collect();
    let sys = ddp4_system(slots[0], alphas)?;
    let prepared = sys
        .prepare(|src, dst| {
            if src == dst {
                ONE
            } else {
                Complex::new(0.0, betas[dst.n][src.n])
            }
        })
        .map_err(|e| {
            Error::Config(format!(
                "DDP4 system singular for alpha signs ({:+}, {:+}): {e}",
                alphas[0].im, alphas[1].im
            ))
        })?;
    let ext: Vec<Complex> = external.iter().map(|&i| Complex::new(0.0, i)).collect();
    let pilots = prepared.solve(&[targets[0].value(), targets[1].value()], &[], &ext)?;
    Ok(PilotSolution {
        scheme: Scheme::Ddp4,
        pilot_values: pilots,
        combining_weights: sys.combiners().to_vec(),
        targets: targets.to_vec(),
    })
}

/// AUP layout. `size = 2`: prime, auxiliary. `size = 4`: auxiliary, prime,
/// prime, auxiliary.
pub fn aup_system(anchor: Cell, size: usize) -> Result<NeutralizationSystem> {
    let slots: Vec<Cell> = (0..size).map(|k| next(anchor, k)).collect();
    let combiners = match size {
        2 => vec![vec![ONE, ZERO]],
        4 => vec![vec![ZERO, ONE, ZERO, ZERO], vec![ZERO, ZERO, ONE, ZERO]],
        _ => return Err(Error::Config(format!("AUP group size must be 2 or 4, got {size}"))),
    };
    NeutralizationSystem::new(slots, combiners, vec![])
}

/// CPP layout starting at `anchor` (the first auxiliary). The side
/// constraint `c₋ - (β₊/β₋)·c₊ = √2·a*` carries the superimposed symbol.
pub fn cpp_system(anchor: Cell, table: &AmbiguityTable) -> Result<NeutralizationSystem> {
    let slots: Vec<Cell> = (0..3).map(|k| next(anchor, k)).collect();
    let bp = table.beta(slots[0], slots[1]);
    let bn = table.beta(slots[2], slots[1]);
    require_coupling(bp, table)?;
    require_coupling(bn, table)?;
    NeutralizationSystem::new(slots, vec![vec![ZERO, ONE, ZERO]], vec![vec![1.0, 0.0, -bn / bp]])
}

pub fn ddp2_system(anchor: Cell, alpha: Complex) -> Result<NeutralizationSystem> {
    NeutralizationSystem::new(vec![anchor, next(anchor, 1)], vec![vec![ONE, alpha]], vec![])
}

pub fn ddp4_system(anchor: Cell, alphas: [Complex; 2]) -> Result<NeutralizationSystem> {
    NeutralizationSystem::new(
        (0..4).map(|k| next(anchor, k)).collect(),
        vec![vec![ONE, alphas[0], ZERO, ZERO], vec![ZERO, ZERO, ONE, alphas[1]]],
        vec![],
    )
}

/// Minimum-power combining weight for the pair starting at `first`.
pub fn pair_alpha(table: &AmbiguityTable, first: Cell) -> Result<Complex> {
    min_power_alpha(coupling(table, CouplingModel::Ideal, next(first, 1), first).im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilots::solver::PreparedSystem;
    use crate::waveform::{PhaseConvention, PrototypeFilter};
    use proptest::prelude::*;

    const BETA: f64 = 0.5646;

    fn window() -> AmbiguityTable {
        AmbiguityTable::interference_window(&PrototypeFilter::phydyas(64, 4).unwrap(), PhaseConvention).unwrap()
    }

    /// Literal evaluation of the two received pilots under the ideal model.
    fn pair_received(p1: f64, p2: f64, i1: f64, i2: f64, beta: f64) -> (Complex, Complex) {
        (
            Complex::new(p1, i1 + beta * p2),
            Complex::new(p2, i2 - beta * p1),
        )
    }

    #[test]
    fn alpha_zero_is_aup() {
        let (p1, p2) = solve_neutralization(ZERO, CleanPilotTarget::real(1.3), 0.4, -0.9, BETA).unwrap();
        assert_eq!(p1, 1.3);
        assert_eq!(p2, -0.4 / BETA);
    }

    #[test]
    fn plus_j_branch_closed_form() {
        let (x, y, i1, i2) = (0.8, -0.3, 0.25, -0.6);
        let (p1, p2) = solve_neutralization(J, CleanPilotTarget::new(x, y), i1, i2, BETA).unwrap();
        assert!((p1 - (x + i2) / (1.0 + BETA)).abs() < 1e-15);
        assert!((p2 - (y - i1) / (1.0 + BETA)).abs() < 1e-15);
        let (p1, p2) = solve_neutralization(-J, CleanPilotTarget::new(x, y), i1, i2, BETA).unwrap();
        assert!((p1 - (x - i2) / (1.0 - BETA)).abs() < 1e-15);
        assert!((p2 - (y - i1) / (BETA - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_everything_gives_zero_pilots() {
        for alpha in [J, -J, Complex::new(0.3, 0.7)] {
            let (p1, p2) = solve_neutralization(alpha, CleanPilotTarget::default(), 0.0, 0.0, BETA).unwrap();
            assert_eq!((p1, p2), (0.0, 0.0));
        }
        let s = ddp_pair(CleanPilotTarget::default(), 0.0, 0.0, BETA).unwrap();
        assert_eq!(s.pilot_values, vec![0.0, 0.0]);
    }

    #[test]
    fn degenerate_alpha_is_singular() {
        // b = -β with a = 0 kills the imaginary equation
        let r = solve_neutralization(Complex::new(0.0, -BETA), CleanPilotTarget::new(1.0, 1.0), 0.0, 0.0, BETA);
        assert!(matches!(r, Err(Error::Singular(_))));
        assert!(ddp_pair(CleanPilotTarget::new(1.0, 1.0), 0.0, 0.0, 1.0).is_err());
        assert!(matches!(
            ddp_pair(CleanPilotTarget::new(1.0, 1.0), 0.0, 0.0, 0.0),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn aup_with_empty_neighbourhood() {
        let g = OqamGrid::zeros(64, 16, 0.5);
        let s = aup_pilots(1.0, &g, &window(), Cell::new(12, 7)).unwrap();
        assert_eq!(s.pilot_values, vec![1.0, 0.0]);
    }

    #[test]
    fn cpp_literal_form_with_equal_couplings() {
        let (cm, cp) = cpp_auxiliaries(1.0, 0.0, BETA, BETA).unwrap();
        assert!((cm - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cp + FRAC_1_SQRT_2).abs() < 1e-15);
        let (s, a) = (0.37, -1.0);
        let (cm, cp) = cpp_auxiliaries(a, s, BETA, BETA).unwrap();
        assert!((BETA * cm + BETA * cp + s).abs() < 1e-15);
    }

    #[test]
    fn cpp_on_the_filter_bank_couplings() {
        let t = window();
        let g = OqamGrid::zeros(64, 16, 0.5);
        let s = cpp_pilots(1.0, 1.0, &g, &t, Cell::new(4, 8)).unwrap();
        // antisymmetric couplings: both auxiliaries carry +a*/√2
        assert!((s.pilot_values[0] - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.pilot_values[2] - FRAC_1_SQRT_2).abs() < 1e-12);
        let zero = cpp_pilots(1.0, 0.0, &g, &t, Cell::new(4, 8)).unwrap();
        assert_eq!(zero.pilot_values, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn ddp4_without_targets_or_interference_is_silent() {
        let betas = group_betas(&window(), Cell::new(5, 8), 4);
        let s = ddp_group4([CleanPilotTarget::default(); 2], [0.0; 4], [J, J], &betas).unwrap();
        assert!(s.pilot_values.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn ddp4_unit_targets_by_substitution() {
        let betas = group_betas(&window(), Cell::new(5, 8), 4);
        let t = [CleanPilotTarget::real(1.0); 2];
        let s = ddp_group4(t, [0.0; 4], [J, J], &betas).unwrap();
        let r: Vec<Complex> = (0..4)
            .map(|i| {
                let leak: f64 = (0..4).map(|j| betas[i][j] * s.pilot_values[j]).sum();
                Complex::new(s.pilot_values[i], leak)
            })
            .collect();
        for c in s.combine(&r) {
            assert!((c - ONE).norm() < 1e-9);
        }
    }

    #[test]
    fn layouts_reject_bad_sizes() {
        assert!(aup_system(Cell::new(0, 4), 3).is_err());
        assert_eq!(aup_system(Cell::new(0, 4), 4).unwrap().slots().len(), 4);
    }

    #[test]
    fn pair_alpha_sign_follows_beta() {
        let t = window();
        let b = t.beta(Cell::new(3, 9), Cell::new(3, 8));
        assert!(b > 0.0);
        assert_eq!(pair_alpha(&t, Cell::new(3, 8)).unwrap(), J);
    }

    fn ideal(t: &AmbiguityTable, sys: &NeutralizationSystem) -> PreparedSystem {
        sys.prepare(|s, d| coupling(t, CouplingModel::Ideal, s, d)).unwrap()
    }

    #[test]
    fn general_system_matches_closed_forms() {
        let t = window();
        let a = Cell::new(9, 8);
        let (i1, i2) = (0.31, -0.47);
        let ext = [Complex::new(0.0, i1), Complex::new(0.0, i2)];
        let target = CleanPilotTarget::new(0.9, 1.1);
        let beta = t.beta(next(a, 1), a);
        let closed = ddp_pair(target, i1, i2, beta).unwrap();
        let general = ideal(&t, &ddp2_system(a, J).unwrap()).solve(&[target.value()], &[], &ext).unwrap();
        for (c, g) in closed.pilot_values.iter().zip(&general) {
            assert!((c - g).abs() < 1e-12);
        }
        let aup = ideal(&t, &aup_system(a, 2).unwrap())
            .solve(&[Complex::new(0.9, 0.0)], &[], &ext)
            .unwrap();
        assert!((aup[0] - 0.9).abs() < 1e-12 && (aup[1] + i1 / beta).abs() < 1e-12);
    }

    #[test]
    fn cpp_system_matches_closed_form() {
        let t = window();
        let centre = Cell::new(9, 8);
        let s = 0.42;
        let a_star = -0.7;
        let sys = cpp_system(Cell::new(9, 7), &t).unwrap();
        let ext = [ZERO, Complex::new(0.0, s), ZERO];
        let p = ideal(&t, &sys)
            .solve(&[Complex::new(1.0, 0.0)], &[std::f64::consts::SQRT_2 * a_star], &ext)
            .unwrap();
        let bp = t.beta(Cell::new(9, 7), centre);
        let bn = t.beta(Cell::new(9, 9), centre);
        let (cm, cp) = cpp_auxiliaries(a_star, s, bp, bn).unwrap();
        assert!((p[0] - cm).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12 && (p[2] - cp).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pair_combines_to_target(
            x in -3.0f64..3.0, y in -3.0f64..3.0, i1 in -2.0f64..2.0, i2 in -2.0f64..2.0,
            beta in prop_oneof![-0.9f64..-0.05, 0.05f64..0.9],
        ) {
            let s = ddp_pair(CleanPilotTarget::new(x, y), i1, i2, beta).unwrap();
            let (r1, r2) = pair_received(s.pilot_values[0], s.pilot_values[1], i1, i2, beta);
            let c = s.combine(&[r1, r2])[0];
            prop_assert!((c - Complex::new(x, y)).norm() < 1e-9);
        }

        #[test]
        fn any_valid_alpha_neutralizes(
            x in -3.0f64..3.0, y in -3.0f64..3.0, i1 in -2.0f64..2.0, i2 in -2.0f64..2.0,
            a in -2.0f64..2.0, b in -2.0f64..2.0,
        ) {
            let alpha = Complex::new(a, b);
            if let Ok((p1, p2)) = solve_neutralization(alpha, CleanPilotTarget::new(x, y), i1, i2, BETA) {
                let (r1, r2) = pair_received(p1, p2, i1, i2, BETA);
                let c = r1 + alpha * r2;
                prop_assert!((c - Complex::new(x, y)).norm() < 1e-7 * (1.0 + p1.abs() + p2.abs()));
            }
        }

        #[test]
        fn specialization_is_bit_exact(x in -3.0f64..3.0, i1 in -2.0f64..2.0, i2 in -2.0f64..2.0) {
            let (p1, p2) = solve_neutralization(ZERO, CleanPilotTarget::real(x), i1, i2, BETA).unwrap();
            prop_assert_eq!(p1, x);
            prop_assert_eq!(p2, -i1 / BETA);
        }

        #[test]
        fn ddp4_degenerates_to_pairs(
            x1 in -2.0f64..2.0, y1 in -2.0f64..2.0, x2 in -2.0f64..2.0, y2 in -2.0f64..2.0,
            e in proptest::array::uniform4(-1.5f64..1.5),
        ) {
            let mut betas = group_betas(&window(), Cell::new(7, 8), 4);
            for i in 0..4 {
                for j in 0..4 {
                    if i / 2 != j / 2 {
                        betas[i][j] = 0.0;
                    }
                }
            }
            let t = [CleanPilotTarget::new(x1, y1), CleanPilotTarget::new(x2, y2)];
            let g = ddp_group4(t, e, [J, J], &betas).unwrap();
            let a = ddp_pair(t[0], e[0], e[1], betas[0][1]).unwrap();
            let b = ddp_pair(t[1], e[2], e[3], betas[2][3]).unwrap();
            let pairs = [a.pilot_values, b.pilot_values].concat();
            for (u, v) in g.pilot_values.iter().zip(&pairs) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }
}
