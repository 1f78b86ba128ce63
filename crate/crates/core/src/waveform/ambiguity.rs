//! Ambiguity function and interference-coefficient tables.
//!
//! `Λ(src → dst) = Σ_k g_src[k] · conj(g_dst[k])` is the contribution of a
//! unit symbol at `src` to the analysis output at `dst`. With the `j^(m+n)`
//! phase rule every off-origin value is (up to the near-PR residual) purely
//! imaginary, `Λ = jβ`, and `β` is the real interference coefficient.
//!
//! The function depends on the absolute cell only through a sign:
//! `Λ((m+Δm, n+Δn) → (m, n)) = (-1)^(n·Δm) · Λ((Δm, Δn) → (0, 0))`.
//! [`AmbiguityTable`] stores the reference values and applies that factor.

use super::filter::PrototypeFilter;
use super::grid::PhaseConvention;
use crate::{Cell, Complex, Error, Result};

/// Default magnitude below which a table entry is treated as negligible.
pub const DEFAULT_NEGLIGIBLE_FLOOR: f64 = 1e-3;

/// `Σ_k g[k - src_start] g[k - dst_start] e^{j2π c(k)/M}` where `carrier`
/// returns `c(k)` as an integer number of `2π/M` turns.
fn synthesis_overlap(
    filter: &PrototypeFilter,
    src: (isize, isize),
    dst: (isize, isize),
    carrier: impl Fn(isize, isize) -> isize,
) -> Complex {
    let m = filter.num_subcarriers() as isize;
    let half = filter.half_symbol() as isize;
    let len = filter.len() as isize;
    let (src_start, dst_start) = (src.1 * half, dst.1 * half);
    let lo = src_start.max(dst_start);
    let hi = (src_start + len).min(dst_start + len);
    let mut acc = Complex::new(0.0, 0.0);
    for k in lo..hi {
        let g = filter.tap(k - src_start) * filter.tap(k - dst_start);
        if g == 0.0 {
            continue;
        }
        let turns = carrier(k, src_start).rem_euclid(m);
        acc += g * Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * turns as f64 / m as f64);
    }
    acc
}

/// `Λ(src → dst)` between two arbitrary (possibly negative) lattice points,
/// evaluated directly from the synthesis filters.
pub fn ambiguity_between(
    filter: &PrototypeFilter,
    convention: PhaseConvention,
    src: (isize, isize),
    dst: (isize, isize),
) -> Complex {
    let m = filter.num_subcarriers() as isize;
    let dm = src.0 - dst.0;
    let raw = synthesis_overlap(filter, src, dst, |k, _| k.rem_euclid(m) * dm.rem_euclid(m));
    raw * convention.factor_signed(src.0, src.1) * convention.factor_signed(dst.0, dst.1).conj()
}

/// `Λ((Δm, Δn) → (0, 0))`.
pub fn ambiguity(filter: &PrototypeFilter, convention: PhaseConvention, dm: isize, dn: isize) -> Complex {
    ambiguity_between(filter, convention, (dm, dn), (0, 0))
}

/// Transmultiplexer impulse response in the conventional tabulated form:
/// carriers referenced to each symbol's own start and no OQAM phase factors.
/// Row `Δm`, column `Δn` is the response at `(0, 0)` to a unit symbol at
/// `(Δm, Δn)`.
///
/// Relation to the ambiguity function at the even reference cell:
/// `T(Δm, Δn) = Λ(Δm, Δn) · j^-(Δm+Δn) · (-1)^(Δm·Δn)`.
pub fn impulse_response(filter: &PrototypeFilter, dm: isize, dn: isize) -> Complex {
    let m = filter.num_subcarriers() as isize;
    synthesis_overlap(filter, (dm, dn), (0, 0), |k, src_start| {
        (k - src_start).rem_euclid(m) * dm.rem_euclid(m)
    })
}

/// Dense table of `Λ` over `|Δm| ≤ dm_max`, `|Δn| ≤ dn_max` at reference
/// cell `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityTable {
    num_subcarriers: usize,
    dm_max: usize,
    dn_max: usize,
    entries: Vec<Complex>,
    floor: f64,
}

impl AmbiguityTable {
    /// Table over the given window with entries below `floor` flagged
    /// negligible. The window must be at least `(1, 3)`.
    pub fn new(
        filter: &PrototypeFilter,
        convention: PhaseConvention,
        window: (usize, usize),
        floor: f64,
    ) -> Result<Self> {
        let (dm_max, dn_max) = window;
        if dm_max < 1 || dn_max < 3 {
            return Err(Error::Config(format!(
                "interference window must be at least (1, 3), got ({dm_max}, {dn_max})"
            )));
        }
        let m = filter.num_subcarriers();
        if dm_max > m / 2 {
            return Err(Error::Config(format!("window Δm {dm_max} exceeds M/2 = {}", m / 2)));
        }
        let mut entries = Vec::with_capacity((2 * dm_max + 1) * (2 * dn_max + 1));
        for dm in -(dm_max as isize)..=dm_max as isize {
            for dn in -(dn_max as isize)..=dn_max as isize {
                entries.push(ambiguity(filter, convention, dm, dn));
            }
        }
        Ok(Self {
            num_subcarriers: m,
            dm_max,
            dn_max,
            entries,
            floor,
        })
    }

    /// The 3 × 7 neighbourhood with the default negligible floor.
    pub fn interference_window(filter: &PrototypeFilter, convention: PhaseConvention) -> Result<Self> {
        Self::new(filter, convention, (1, 3), DEFAULT_NEGLIGIBLE_FLOOR)
    }

    /// Every non-zero coupling: all subcarrier offsets and `|Δn| ≤ 2K-1`,
    /// nothing floored.
    pub fn complete(filter: &PrototypeFilter, convention: PhaseConvention) -> Result<Self> {
        Self::new(
            filter,
            convention,
            (filter.num_subcarriers() / 2, 2 * filter.overlap_factor() - 1),
            0.0,
        )
    }

    pub fn window(&self) -> (usize, usize) {
        (self.dm_max, self.dn_max)
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    #[inline]
    fn index(&self, dm: isize, dn: isize) -> Option<usize> {
        if dm.unsigned_abs() > self.dm_max || dn.unsigned_abs() > self.dn_max {
            return None;
        }
        let row = (dm + self.dm_max as isize) as usize;
        let col = (dn + self.dn_max as isize) as usize;
        Some(row * (2 * self.dn_max + 1) + col)
    }

    /// Raw table value; zero outside the window.
    pub fn get(&self, dm: isize, dn: isize) -> Complex {
        self.index(dm, dn)
            .map(|i| self.entries[i])
            .unwrap_or_else(|| Complex::new(0.0, 0.0))
    }

    pub fn is_negligible(&self, dm: isize, dn: isize) -> bool {
        (dm, dn) != (0, 0) && self.get(dm, dn).norm() < self.floor
    }

    /// Table value with negligible entries forced to zero.
    pub fn coefficient(&self, dm: isize, dn: isize) -> Complex {
        if self.is_negligible(dm, dn) {
            Complex::new(0.0, 0.0)
        } else {
            self.get(dm, dn)
        }
    }

    /// Subcarrier offset `src - dst` wrapped into `(-M/2, M/2]`.
    pub fn wrap_dm(&self, src_m: usize, dst_m: usize) -> isize {
        let m = self.num_subcarriers as isize;
        let mut d = (src_m as isize - dst_m as isize).rem_euclid(m);
        if d > m / 2 {
            d -= m;
        }
        d
    }

    /// `Λ(src → dst)` for absolute cells, using the table entry and the
    /// `(-1)^(n·Δm)` shift factor.
    pub fn coupling(&self, src: Cell, dst: Cell) -> Complex {
        let dm = self.wrap_dm(src.m, dst.m);
        let dn = src.n as isize - dst.n as isize;
        let c = self.coefficient(dm, dn);
        if (dst.n as isize * dm).rem_euclid(2) == 1 {
            -c
        } else {
            c
        }
    }

    /// Interference coefficient `β(src → dst) = Im Λ(src → dst)`.
    pub fn beta(&self, src: Cell, dst: Cell) -> f64 {
        self.coupling(src, dst).im
    }

    /// Non-origin offsets in the window whose entries are not negligible.
    pub fn neighbourhood(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let (dm_max, dn_max) = (self.dm_max as isize, self.dn_max as isize);
        (-dm_max..=dm_max)
            .flat_map(move |dm| (-dn_max..=dn_max).map(move |dn| (dm, dn)))
            .filter(move |&(dm, dn)| (dm, dn) != (0, 0) && !self.is_negligible(dm, dn))
    }

    /// `Σ β²` over the non-negligible neighbourhood, optionally excluding
    /// some offsets.
    pub fn beta_energy(&self, excluded: &[(isize, isize)]) -> f64 {
        self.neighbourhood()
            .filter(|o| !excluded.contains(o))
            .map(|(dm, dn)| self.get(dm, dn).im.powi(2))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::grid::j_pow;

    fn filt() -> PrototypeFilter {
        PrototypeFilter::phydyas(64, 4).unwrap()
    }

    #[test]
    fn self_term_is_one() {
        let a = ambiguity(&filt(), PhaseConvention, 0, 0);
        assert!((a - Complex::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn known_coefficients() {
        let f = filt();
        let a01 = ambiguity(&f, PhaseConvention, 0, 1);
        assert!(a01.re.abs() < 2e-3 && (a01.im - 0.5646).abs() < 2e-3, "{a01}");
        let a10 = ambiguity(&f, PhaseConvention, 1, 0);
        assert!((a10.norm() - 0.2393).abs() < 2e-3);
        assert!(ambiguity(&f, PhaseConvention, 0, 2).norm() < 2e-3);
    }

    #[test]
    fn near_pr_real_residual() {
        let f = filt();
        for dm in -1..=1 {
            for dn in -3..=3 {
                if (dm, dn) != (0, 0) {
                    assert!(ambiguity(&f, PhaseConvention, dm, dn).re.abs() < 2e-3);
                }
            }
        }
    }

    #[test]
    fn swapped_arguments_are_antisymmetric() {
        let f = filt();
        for &(a, b) in &[((5isize, 3isize), (5isize, 4isize)), ((2, 7), (3, 6)), ((9, 2), (8, 5))] {
            let fwd = ambiguity_between(&f, PhaseConvention, a, b);
            let rev = ambiguity_between(&f, PhaseConvention, b, a);
            assert!((fwd - rev.conj()).norm() < 1e-12);
            assert!((fwd.im + rev.im).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_invariance_up_to_sign() {
        let f = filt();
        let t = AmbiguityTable::new(&f, PhaseConvention, (2, 7), 0.0).unwrap();
        for &(m, n) in &[(0usize, 0usize), (7, 3), (12, 8), (63, 5)] {
            for dm in -2isize..=2 {
                for dn in -7isize..=7 {
                    let src = ((m as isize + dm), (n as isize + dn));
                    let direct = ambiguity_between(&f, PhaseConvention, src, (m as isize, n as isize));
                    let sign = if (n as isize * dm).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                    assert!((direct - t.get(dm, dn) * sign).norm() < 1e-9);
                    if src.0 >= 0 && src.1 >= 0 && (src.0 as usize) < 64 {
                        let c = t.coupling(Cell::new(src.0 as usize, src.1 as usize), Cell::new(m, n));
                        assert!((direct - c).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn subcarrier_wraparound() {
        let f = filt();
        let t = AmbiguityTable::new(&f, PhaseConvention, (2, 3), 0.0).unwrap();
        let direct = ambiguity_between(&f, PhaseConvention, (-1, 5), (0, 4));
        let c = t.coupling(Cell::new(63, 5), Cell::new(0, 4));
        assert!((direct - c).norm() < 1e-9);
    }

    #[test]
    fn impulse_response_relation() {
        let f = filt();
        for dm in -1isize..=1 {
            for dn in -3isize..=3 {
                let t = impulse_response(&f, dm, dn);
                let sign = if (dm * dn).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                let via = ambiguity(&f, PhaseConvention, dm, dn) * j_pow(-(dm + dn) as i64) * sign;
                assert!((t - via).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn window_validation_and_floor() {
        let f = filt();
        assert!(AmbiguityTable::new(&f, PhaseConvention, (0, 3), 1e-3).is_err());
        let t = AmbiguityTable::interference_window(&f, PhaseConvention).unwrap();
        assert_eq!(t.window(), (1, 3));
        assert!(t.is_negligible(0, 2));
        assert!(!t.is_negligible(0, 0));
        assert_eq!(t.neighbourhood().count(), 18);
        assert_eq!(t.coefficient(0, 2), Complex::new(0.0, 0.0));
    }
}
