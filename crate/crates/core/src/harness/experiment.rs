//! Parallel Monte-Carlo runs and their CSV output.

use std::io::Write;

use rayon::prelude::*;

use super::config::{ChannelKind, ExperimentConfig, System};
use super::frame::{run_frame, FramePlan};
use crate::estimation::{MetricRecord, MetricTally};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "snr_db,mse,ber,pilot_power,scheme,waveform,seed,frames";

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub version: String,
    pub config_hash: u64,
    pub seed: u64,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemCurve {
    pub system: System,
    pub records: Vec<MetricRecord>,
}

impl SystemCurve {
    /// Pilot power averaged over the SNR points.
    pub fn mean_pilot_power(&self) -> f64 {
        self.records.iter().map(|r| r.pilot_power).sum::<f64>() / self.records.len().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub curves: Vec<SystemCurve>,
    pub metadata: RunMetadata,
}

impl ExperimentResult {
    pub fn curve(&self, system: System) -> Option<&SystemCurve> {
        self.curves.iter().find(|c| c.system == system)
    }

    /// Pilot power of `system` relative to OFDM (or to one unit per budget
    /// unit when OFDM was not simulated).
    pub fn power_ratio(&self, system: System) -> Option<f64> {
        let reference = self.curve(System::Ofdm).map(|c| c.mean_pilot_power()).unwrap_or(1.0);
        self.curve(system).map(|c| c.mean_pilot_power() / reference)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for c in &self.curves {
            for r in &c.records {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.snr_db,
                    r.mse,
                    r.ber,
                    r.pilot_power,
                    c.system.scheme_name(),
                    c.system.waveform().name(),
                    self.metadata.seed,
                    self.metadata.frames
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// One line per metadata field, `# key = value`.
    pub fn metadata_lines(&self) -> String {
        format!(
            "# version = {}\n# config_hash = {:016x}\n# seed = {}\n# frames = {}\n",
            self.metadata.version, self.metadata.config_hash, self.metadata.seed, self.metadata.frames
        )
    }
}

/// Runs every frame (in parallel) and folds the tallies in frame order, so
/// results do not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let plan = FramePlan::new(config)?;
    let per_frame: Vec<Vec<Vec<MetricTally>>> = (0..config.frames)
        .into_par_iter()
        .map(|f| run_frame(&plan, f))
        .collect::<Result<_>>()?;
    let mut acc = vec![vec![MetricTally::default(); config.snr_db.len()]; config.systems.len()];
    for frame in &per_frame {
        for (a_sys, f_sys) in acc.iter_mut().zip(frame) {
            for (a, t) in a_sys.iter_mut().zip(f_sys) {
                a.merge(t);
            }
        }
    }
    let curves = config
        .systems
        .iter()
        .zip(&acc)
        .map(|(&system, tallies)| SystemCurve {
            system,
            records: tallies
                .iter()
                .zip(&config.snr_db)
                .map(|(t, &snr)| t.record(snr, 1.0))
                .collect(),
        })
        .collect();
    Ok(ExperimentResult {
        config: config.clone(),
        curves,
        metadata: RunMetadata {
            version: format!("fbmc-core {}", env!("CARGO_PKG_VERSION")),
            config_hash: config.hash(),
            seed: config.seed,
            frames: config.frames,
        },
    })
}

/// Pilot power of each FBMC system relative to OFDM at equal clean-pilot SNR.
pub fn run_power_experiment(config: &ExperimentConfig) -> Result<(ExperimentResult, Vec<(System, f64)>)> {
    let result = run_awgn_experiment(config)?;
    let ratios = config
        .systems
        .iter()
        .filter(|s| **s != System::Ofdm)
        .filter_map(|&s| result.power_ratio(s).map(|r| (s, r)))
        .collect();
    Ok((result, ratios))
}

pub fn run_awgn_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.channel != ChannelKind::Awgn {
        return Err(Error::Config("the AWGN experiment needs channel = awgn".into()));
    }
    run_experiment(config)
}

pub fn run_etu_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.channel == ChannelKind::Awgn {
        return Err(Error::Config("the fading experiment needs channel = etu or custom".into()));
    }
    run_experiment(config)
}
