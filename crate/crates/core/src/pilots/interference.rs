//! Intrinsic interference collected at a pilot cell from its data
//! neighbourhood.

use crate::waveform::{AmbiguityTable, OqamGrid};
use crate::{Cell, Error, Result};

/// Real interference value `i` at a cell: the received signal there carries
/// `j·i` on top of the cell's own symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodInterference {
    pub position: Cell,
    pub i_value: f64,
    pub excluded_positions: Vec<Cell>,
}

/// Symbols a cell must keep from either frame edge so that its whole
/// interference window lies inside the frame.
pub fn guard_symbols(table: &AmbiguityTable) -> usize {
    table.window().1 + 1
}

/// `i = Σ β(src → position)·a[src]` over the table's non-negligible
/// neighbourhood, skipping `excluded` cells. Subcarrier offsets wrap.
pub fn compute_interference(
    grid: &OqamGrid,
    table: &AmbiguityTable,
    position: Cell,
    excluded: &[Cell],
) -> Result<NeighborhoodInterference> {
    let guard = guard_symbols(table);
    if !grid.contains(position) || !grid.is_interior(position.n, guard) {
        return Err(Error::Boundary {
            m: position.m,
            n: position.n,
            guard,
        });
    }
    let m_total = grid.num_subcarriers() as isize;
    let mut i_value = 0.0;
    for (dm, dn) in table.neighbourhood() {
        let src = Cell::new(
            (position.m as isize + dm).rem_euclid(m_total) as usize,
            (position.n as isize + dn) as usize,
        );
        if excluded.contains(&src) {
            continue;
        }
        let a = grid.get(src.m, src.n);
        if a != 0.0 {
            i_value += table.beta(src, position) * a;
        }
    }
    Ok(NeighborhoodInterference {
        position,
        i_value,
        excluded_positions: excluded.to_vec(),
    })
}
