//! Reference impulse-response table of the K=4 PHYDYAS filter bank and its
//! comparison against the computed filter.

use crate::waveform::{impulse_response, PrototypeFilter};
use crate::{Complex, Result};

const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Rows `Δm = -1, 0, +1`, columns `Δn = -3..=3`.
pub const REFERENCE_TABLE: [[Complex; 7]; 3] = [
    [c(0.0, 0.043), c(-0.125, 0.0), c(0.0, -0.206), c(0.2393, 0.0), c(0.0, 0.206), c(-0.125, 0.0), c(0.0, -0.043)],
    [c(-0.067, 0.0), c(0.0, 0.0), c(0.564, 0.0), c(1.0, 0.0), c(0.564, 0.0), c(0.0, 0.0), c(-0.067, 0.0)],
    [c(0.0, -0.043), c(-0.125, 0.0), c(0.0, 0.206), c(0.239, 0.0), c(0.0, -0.206), c(-0.125, 0.0), c(0.0, 0.043)],
];

/// Entries are printed to three decimals.
pub const TABLE_TOLERANCE: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub dm: isize,
    pub dn: isize,
    pub computed: Complex,
    pub reference: Complex,
}

impl TableRow {
    pub fn error(&self) -> f64 {
        (self.computed - self.reference).norm()
    }

    /// Same real/imaginary character and sign as the reference.
    pub fn pattern_matches(&self) -> bool {
        let class = |v: Complex| -> (i8, i8) {
            let s = |x: f64| if x.abs() < TABLE_TOLERANCE { 0 } else if x > 0.0 { 1 } else { -1 };
            (s(v.re), s(v.im))
        };
        class(self.computed) == class(self.reference)
    }

    pub fn passes(&self) -> bool {
        self.error() <= TABLE_TOLERANCE && self.pattern_matches()
    }
}

/// The 21 entries of the table for a K=4 PHYDYAS bank with `m` subcarriers.
pub fn compare_table(m: usize) -> Result<Vec<TableRow>> {
    let f = PrototypeFilter::phydyas(m, 4)?;
    let mut rows = Vec::with_capacity(21);
    for (i, dm) in (-1isize..=1).enumerate() {
        for (j, dn) in (-3isize..=3).enumerate() {
            rows.push(TableRow {
                dm,
                dn,
                computed: impulse_response(&f, dm, dn),
                reference: REFERENCE_TABLE[i][j],
            });
        }
    }
    Ok(rows)
}

pub const TABLE_CSV_HEADER: &str = "dm,dn,re,im,reference_re,reference_im,abs_error,pass";

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = format!("{TABLE_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.6},{:.6},{},{},{:.2e},{}\n",
            r.dm,
            r.dn,
            r.computed.re,
            r.computed.im,
            r.reference.re,
            r.reference.im,
            r.error(),
            r.passes()
        ));
    }
    s
}
