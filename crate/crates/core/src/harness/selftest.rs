//! Fast invariant checks run by `fbmc-lab selftest`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::frame::{run_frame, FramePlan};
use super::table::compare_table;
use crate::channel::{apply_channel, ChannelRealization};
use crate::pilots::analysis::pair_beta;
use crate::waveform::{AmbiguityTable, OqamGrid, OqamModem, PhaseConvention, PrototypeFilter};
use crate::{Complex, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn run_selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let rows = compare_table(64)?;
    let worst = rows.iter().map(|r| r.error()).fold(0.0, f64::max);
    out.push(check(
        "impulse-response table",
        rows.iter().all(|r| r.passes()),
        format!("max error {worst:.1e}"),
    ));

    let table = AmbiguityTable::interference_window(&PrototypeFilter::phydyas(64, 4)?, PhaseConvention)?;
    let beta = pair_beta(&table);
    out.push(check("pair coupling", (beta - 0.5646).abs() < 1e-3, format!("beta = {beta:.4}")));

    let modem = OqamModem::phydyas(32)?;
    let grid = OqamGrid::random_pam2(32, 6, 0.5, &mut ChaCha8Rng::seed_from_u64(3));
    let fast = modem.modulate(&grid)?;
    let direct = modem.modulate_direct(&grid)?;
    let err = fast.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    out.push(check("polyphase synthesis", err < 1e-10, format!("max deviation {err:.1e}")));

    let x: Vec<Complex> = (0..16).map(|k| Complex::new(k as f64, -(k as f64))).collect();
    let y = apply_channel(&x, &ChannelRealization::identity(16))?;
    out.push(check("identity channel", y == x, String::new()));

    let cfg = ExperimentConfig {
        snr_db: vec![300.0],
        ..ExperimentConfig::awgn_default()
    };
    let plan = FramePlan::new(&cfg)?;
    let tallies = run_frame(&plan, 0)?;
    let worst = tallies
        .iter()
        .map(|row| row[0].record(300.0, 1.0).mse)
        .fold(0.0, f64::max);
    out.push(check("noiseless neutralization", worst < 1e-18, format!("max MSE {worst:.1e}")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run_selftest().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
