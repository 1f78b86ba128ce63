//! Frame layouts, transmit-side frame construction and the receive chain
//! shared by every experiment.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, PowerPolicy, System, OVERLAP};
use crate::channel::{apply_channel, complex_gaussian, make_channel, true_freq_response, ChannelRealization};
use crate::estimation::{bit_of, equalize_detect, interpolate, MetricTally, PilotEstimate};
use crate::pilots::analysis::{
    combined_noise_variance, expected_interference_power, optimize_target_phases, target_power,
};
use crate::pilots::schemes::{aup_system, ddp2_system, ddp4_system, pair_alpha};
use crate::pilots::{coupling, neutralize_frame, CouplingModel, PilotGroup, Scheme};
use crate::waveform::{AmbiguityTable, CellKind, ComplexGrid, OfdmModem, OqamGrid, OqamModem};
use crate::{Cell, Complex, Error, Result};

/// Independent random streams of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Channel = 0,
    Noise = 1,
    FbmcData = 2,
    OfdmData = 3,
}

/// Generator for `stream` of frame `frame`; identical across systems, so
/// compared systems see the same channel, noise and data.
pub fn frame_rng(seed: u64, frame: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame as u64 * 4 + stream as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct FbmcPlan {
    pub scheme: Scheme,
    pub modem: OqamModem,
    pub groups: Vec<PilotGroup>,
    /// Subcarrier of each group.
    pub subcarriers: Vec<usize>,
    /// Symbol time each combiner output of each group is attributed to.
    pub estimate_times: Vec<Vec<f64>>,
    /// Data cells counted in the metrics, symbol-major.
    pub metric_cells: Vec<Cell>,
    pub pilot_cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
pub struct OfdmPlan {
    pub modem: OfdmModem,
    pub pilot_cells: Vec<Cell>,
    pub pilot_value: Complex,
    pub metric_cells: Vec<Cell>,
}

#[derive(Debug, Clone)]
pub enum SystemPlan {
    Fbmc(FbmcPlan),
    Ofdm(OfdmPlan),
}

impl SystemPlan {
    /// Transmit stream length in samples.
    pub fn stream_len(&self, config: &ExperimentConfig) -> usize {
        match self {
            SystemPlan::Fbmc(p) => p.modem.filter().stream_len(config.fbmc_symbols),
            SystemPlan::Ofdm(p) => p.modem.symbol_len() * config.ofdm_symbols,
        }
    }
}

/// Everything that does not change from frame to frame.
#[derive(Debug, Clone)]
pub struct FramePlan {
    pub config: ExperimentConfig,
    pub systems: Vec<(System, SystemPlan)>,
    /// Channel realizations cover this many samples.
    pub channel_len: usize,
}

/// A transmitted frame before the channel.
#[derive(Debug, Clone)]
pub struct TxFrame {
    pub samples: Vec<Complex>,
    /// Pilot values per group (FBMC) or per pilot cell (OFDM, one entry).
    pub pilot_values: Vec<Vec<Complex>>,
    /// Bits carried by the metric cells, in order.
    pub bits: Vec<bool>,
    /// Pilot energy and the number of budget units it covers.
    pub pilot_energy: f64,
    pub pilot_units: usize,
}

fn fbmc_plan(config: &ExperimentConfig, scheme: Scheme) -> Result<FbmcPlan> {
    let m_total = config.num_subcarriers;
    let n_total = config.fbmc_symbols;
    let modem = OqamModem::phydyas(m_total)?;
    let table = AmbiguityTable::complete(modem.filter(), modem.convention())?;
    let kappa = |src: Cell, dst: Cell| coupling(&table, CouplingModel::Exact, src, dst);

    let size = config.group_size;
    let anchors: Vec<Cell> = config
        .fbmc_group_starts
        .iter()
        .flat_map(|&n| config.pilot_subcarriers().into_iter().map(move |m| Cell::new(m, n)))
        .collect();
    let pilot_cells: Vec<Cell> = anchors
        .iter()
        .flat_map(|a| (0..size).map(move |k| Cell::new(a.m, a.n + k)))
        .collect();

    let build = |anchor: Cell| -> Result<_> {
        let sys = match scheme {
            Scheme::Aup => aup_system(anchor, size)?,
            Scheme::Ddp2 => ddp2_system(anchor, pair_alpha(&table, anchor)?)?,
            Scheme::Ddp4 => {
                let second = Cell::new(anchor.m, anchor.n + 2);
                ddp4_system(anchor, [pair_alpha(&table, anchor)?, pair_alpha(&table, second)?])?
            }
            Scheme::Cpp => return Err(Error::Config("CPP is not available as a frame scheme".into())),
        };
        sys.prepare(kappa)
    };

    // Target phases and magnitudes are fixed per group start; every
    // subcarrier shares the layout.
    let mut per_start = Vec::new();
    for &n0 in &config.fbmc_group_starts {
        let rep = Cell::new(config.pilot_offset, n0);
        let prepared = build(rep)?;
        let phases = match scheme {
            Scheme::Aup => vec![0.0; prepared.system().combiners().len()],
            Scheme::Ddp2 => vec![FRAC_PI_4],
            _ => optimize_target_phases(&prepared)?,
        };
        let units: Vec<Complex> = phases.iter().map(|&p| Complex::from_polar(1.0, p)).collect();
        let targets = match config.power_policy {
            PowerPolicy::Boost => prepared
                .system()
                .combiners()
                .iter()
                .zip(&units)
                .map(|(w, u)| u * combined_noise_variance(w, prepared.slots(), &table, 1.0).sqrt())
                .collect(),
            PowerPolicy::Normalized => {
                let is_data = |c: Cell| c.n < n_total && !pilot_cells.contains(&c);
                let qi = expected_interference_power(&prepared, &table, kappa, config.data_power, m_total, is_data)?;
                let qt = target_power(&prepared, &units)?;
                let budget = size as f64 / 2.0;
                if qi >= budget {
                    return Err(Error::Config(format!(
                        "pilot budget {budget} cannot cover the expected interference power {qi:.3}"
                    )));
                }
                let s = ((budget - qi) / qt).sqrt();
                units.iter().map(|u| u * s).collect::<Vec<_>>()
            }
        };
        per_start.push((n0, targets));
    }

    let mut groups = Vec::with_capacity(anchors.len());
    let mut estimate_times = Vec::with_capacity(anchors.len());
    for &anchor in &anchors {
        let prepared = build(anchor)?;
        let targets = per_start.iter().find(|(n0, _)| *n0 == anchor.n).map(|(_, t)| t.clone()).unwrap_or_default();
        estimate_times.push(prepared
            .system()
            .combiners()
            .iter()
            .map(|w| {
                let total: f64 = w.iter().map(|x| x.norm()).sum();
                w.iter().zip(prepared.slots()).map(|(x, s)| x.norm() * s.n as f64).sum::<f64>() / total
            })
            .collect());
        groups.push(PilotGroup {
            system: prepared,
            targets,
            constraint_rhs: vec![],
        });
    }

    let metric_cells = (OVERLAP..n_total - OVERLAP)
        .flat_map(|n| (0..m_total).map(move |m| Cell::new(m, n)))
        .filter(|c| !pilot_cells.contains(c))
        .collect();
    Ok(FbmcPlan {
        scheme,
        modem,
        subcarriers: anchors.iter().map(|a| a.m).collect(),
        groups,
        estimate_times,
        metric_cells,
        pilot_cells,
    })
}

fn ofdm_plan(config: &ExperimentConfig) -> Result<OfdmPlan> {
    let modem = OfdmModem::new(config.num_subcarriers, config.cp_length)?;
    let per_group = config.ofdm_pilots_per_group();
    let pilot_cells: Vec<Cell> = config
        .ofdm_pilot_starts
        .iter()
        .flat_map(|&s| (0..per_group).map(move |k| s + k))
        .flat_map(|n| config.pilot_subcarriers().into_iter().map(move |m| Cell::new(m, n)))
        .collect();
    let guard = config.ofdm_guard();
    let metric_cells = (guard..config.ofdm_symbols - guard)
        .flat_map(|n| (0..config.num_subcarriers).map(move |m| Cell::new(m, n)))
        .filter(|c| !pilot_cells.contains(c))
        .collect();
    Ok(OfdmPlan {
        modem,
        pilot_cells,
        pilot_value: Complex::from_polar(1.0, FRAC_PI_4),
        metric_cells,
    })
}

impl FramePlan {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut systems = Vec::with_capacity(config.systems.len());
        for &s in &config.systems {
            let plan = match s {
                System::Ofdm => SystemPlan::Ofdm(ofdm_plan(config)?),
                System::Fbmc(scheme) => SystemPlan::Fbmc(fbmc_plan(config, scheme)?),
            };
            systems.push((s, plan));
        }
        let max_delay = match config.channel {
            super::config::ChannelKind::Awgn => 0,
            _ => config
                .profile()?
                .delays_in_samples(config.sample_rate_hz)
                .into_iter()
                .max()
                .unwrap_or(0),
        };
        let longest = systems.iter().map(|(_, p)| p.stream_len(config)).max().unwrap_or(0);
        Ok(Self {
            config: config.clone(),
            systems,
            channel_len: longest + max_delay + 1,
        })
    }

    /// Channel of frame `frame`, `None` for AWGN.
    pub fn channel(&self, frame: usize) -> Result<Option<ChannelRealization>> {
        let c = &self.config;
        if c.channel == super::config::ChannelKind::Awgn {
            return Ok(None);
        }
        let seed = frame_rng(c.seed, frame, Stream::Channel).gen::<u64>();
        make_channel(&c.profile()?, c.doppler_hz, c.sample_rate_hz, self.channel_len, seed).map(Some)
    }

    /// Unit-variance complex noise for frame `frame`, scaled per SNR later.
    pub fn unit_noise(&self, frame: usize) -> Vec<Complex> {
        let mut rng = frame_rng(self.config.seed, frame, Stream::Noise);
        (0..self.channel_len).map(|_| complex_gaussian(&mut rng, 1.0)).collect()
    }
}

/// Builds the transmitted frame of system `index` for frame `frame`.
pub fn build_frame(plan: &FramePlan, index: usize, frame: usize) -> Result<TxFrame> {
    let c = &plan.config;
    match &plan.systems[index].1 {
        SystemPlan::Fbmc(p) => {
            let mut rng = frame_rng(c.seed, frame, Stream::FbmcData);
            let mut grid = OqamGrid::random_pam2(c.num_subcarriers, c.fbmc_symbols, c.data_power, &mut rng);
            for cell in &p.pilot_cells {
                grid.set_kind(cell.m, cell.n, CellKind::Pilot);
            }
            let pilots = neutralize_frame(&p.modem, &mut grid, &p.groups)?;
            let samples = p.modem.modulate(&grid)?;
            let bits = p.metric_cells.iter().map(|cell| bit_of(grid.get(cell.m, cell.n))).collect();
            let pilot_energy = pilots.iter().flatten().map(|v| v * v).sum();
            Ok(TxFrame {
                samples,
                pilot_units: p.pilot_cells.len() / 2,
                pilot_values: pilots
                    .into_iter()
                    .map(|g| g.into_iter().map(|v| Complex::new(v, 0.0)).collect())
                    .collect(),
                bits,
                pilot_energy,
            })
        }
        SystemPlan::Ofdm(p) => {
            let mut rng = frame_rng(c.seed, frame, Stream::OfdmData);
            let amp = 0.5f64.sqrt();
            let mut grid = ComplexGrid::zeros(c.num_subcarriers, c.ofdm_symbols);
            for n in 0..c.ofdm_symbols {
                for m in 0..c.num_subcarriers {
                    let (b0, b1): (bool, bool) = (rng.gen(), rng.gen());
                    grid.set(m, n, Complex::new(if b0 { amp } else { -amp }, if b1 { amp } else { -amp }));
                }
            }
            for cell in &p.pilot_cells {
                grid.set(cell.m, cell.n, p.pilot_value);
            }
            let bits = p
                .metric_cells
                .iter()
                .flat_map(|cell| {
                    let v = grid.get(cell.m, cell.n);
                    [bit_of(v.re), bit_of(v.im)]
                })
                .collect();
            Ok(TxFrame {
                samples: p.modem.modulate(&grid)?,
                pilot_values: vec![vec![p.pilot_value; p.pilot_cells.len()]],
                bits,
                pilot_energy: p.pilot_value.norm_sqr() * p.pilot_cells.len() as f64,
                pilot_units: p.pilot_cells.len(),
            })
        }
    }
}

/// Pilot estimation points of a system: `(subcarrier, symbol time, sample index)`.
fn estimate_points(plan: &SystemPlan) -> Vec<(usize, f64, f64)> {
    match plan {
        SystemPlan::Fbmc(p) => p
            .subcarriers
            .iter()
            .zip(&p.estimate_times)
            .flat_map(|(&m, times)| times.iter().map(move |&t| (m, t, p.modem.symbol_center(t))))
            .collect(),
        SystemPlan::Ofdm(p) => p
            .pilot_cells
            .iter()
            .map(|c| (c.m, c.n as f64, p.modem.symbol_center(c.n as f64)))
            .collect(),
    }
}

/// Runs one frame of every system through the channel at every SNR and
/// returns the tallies indexed `[system][snr]`.
pub fn run_frame(plan: &FramePlan, frame: usize) -> Result<Vec<Vec<MetricTally>>> {
    let c = &plan.config;
    let channel = plan.channel(frame)?;
    let noise = plan.unit_noise(frame);
    let mut out = Vec::with_capacity(plan.systems.len());
    for (index, (system, sp)) in plan.systems.iter().enumerate() {
        let tx = build_frame(plan, index, frame)?;
        let clean = match &channel {
            Some(ch) => apply_channel(&tx.samples, ch)?,
            None => tx.samples.clone(),
        };
        let points = estimate_points(sp);
        let truth: Vec<Complex> = match &channel {
            Some(ch) => points
                .iter()
                .map(|&(m, _, k)| true_freq_response(ch, k, m, c.num_subcarriers))
                .collect::<Result<_>>()?,
            None => vec![Complex::new(1.0, 0.0); points.len()],
        };

        let mut per_snr = Vec::with_capacity(c.snr_db.len());
        let mut rx = clean.clone();
        for &snr in &c.snr_db {
            let sigma = 10f64.powf(-snr / 20.0);
            for ((r, s), n) in rx.iter_mut().zip(&clean).zip(&noise) {
                *r = s + n * sigma;
            }
            let (estimates, grid, cells, n_sym) = match sp {
                SystemPlan::Fbmc(p) => {
                    let grid = p.modem.demodulate(&rx, c.fbmc_symbols)?;
                    let mut est = Vec::with_capacity(points.len());
                    for g in &p.groups {
                        let r: Vec<Complex> = g.system.slots().iter().map(|s| grid.get(s.m, s.n)).collect();
                        for (y, t) in g.system.combine(&r).iter().zip(&g.targets) {
                            est.push(y / t);
                        }
                    }
                    (est, grid, &p.metric_cells, c.fbmc_symbols)
                }
                SystemPlan::Ofdm(p) => {
                    let grid = p.modem.demodulate(&rx, c.ofdm_symbols)?;
                    let est = p.pilot_cells.iter().map(|cell| grid.get(cell.m, cell.n) / p.pilot_value).collect();
                    (est, grid, &p.metric_cells, c.ofdm_symbols)
                }
            };
            let pilots: Vec<PilotEstimate> = points
                .iter()
                .zip(&estimates)
                .map(|(&(m, t, _), &value)| PilotEstimate { m, t, value })
                .collect();
            let dense = interpolate(&pilots, c.num_subcarriers, n_sym)?;
            let detected = equalize_detect(&grid, &dense, system.waveform(), cells)?;

            let mut tally = MetricTally::default();
            tally.add_estimates(&estimates, &truth);
            tally.add_bits(&tx.bits, &detected);
            tally.add_pilots(tx.pilot_energy, tx.pilot_units);
            per_snr.push(tally);
        }
        out.push(per_snr);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ChannelKind;

    fn small(policy: PowerPolicy) -> ExperimentConfig {
        let base = ExperimentConfig {
            power_policy: policy,
            snr_db: vec![200.0],
            ..ExperimentConfig::awgn_default()
        };
        match policy {
            PowerPolicy::Boost => ExperimentConfig {
                systems: vec![System::Ofdm, System::Fbmc(Scheme::Aup), System::Fbmc(Scheme::Ddp2)],
                ..base
            },
            PowerPolicy::Normalized => ExperimentConfig {
                group_size: 4,
                fbmc_group_starts: vec![6],
                ofdm_pilot_starts: vec![3],
                systems: vec![System::Ofdm, System::Fbmc(Scheme::Aup), System::Fbmc(Scheme::Ddp4)],
                ..base
            },
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = frame_rng(5, 3, Stream::Noise).gen();
        let b: u64 = frame_rng(5, 3, Stream::Noise).gen();
        let c: u64 = frame_rng(5, 4, Stream::Noise).gen();
        let d: u64 = frame_rng(5, 3, Stream::Channel).gen();
        assert_eq!(a, b);
        assert!(a != c && a != d);
    }

    #[test]
    fn noiseless_awgn_frames_are_perfect() {
        for policy in [PowerPolicy::Boost, PowerPolicy::Normalized] {
            let plan = FramePlan::new(&small(policy)).unwrap();
            let t = run_frame(&plan, 0).unwrap();
            for (s, row) in plan.systems.iter().zip(&t) {
                let r = row[0].record(200.0, 1.0);
                assert!(r.mse < 1e-18, "{:?} {policy:?}: {}", s.0, r.mse);
                assert_eq!(r.ber, 0.0);
            }
        }
    }

    #[test]
    fn boost_targets_match_noise_factor() {
        let plan = FramePlan::new(&small(PowerPolicy::Boost)).unwrap();
        for (sys, sp) in &plan.systems {
            if let SystemPlan::Fbmc(p) = sp {
                let t = p.groups[0].targets[0];
                let want = if *sys == System::Fbmc(Scheme::Aup) { 1.0 } else { 2.0 * (1.0 + 0.5646) };
                assert!((t.norm_sqr() - want).abs() < 2e-3, "{sys:?}: {}", t.norm_sqr());
            }
        }
    }

    #[test]
    fn normalized_budget_is_met_on_average() {
        let cfg = ExperimentConfig {
            frames: 60,
            ..small(PowerPolicy::Normalized)
        };
        let plan = FramePlan::new(&cfg).unwrap();
        let mut tallies = vec![MetricTally::default(); plan.systems.len()];
        for f in 0..cfg.frames {
            for (acc, row) in tallies.iter_mut().zip(run_frame(&plan, f).unwrap()) {
                acc.merge(&row[0]);
            }
        }
        for (s, t) in plan.systems.iter().zip(&tallies) {
            let p = t.record(0.0, 1.0).pilot_power;
            assert!((p - 1.0).abs() < 0.05, "{:?}: {p}", s.0);
        }
    }

    #[test]
    fn pilot_cells_are_excluded_from_metrics() {
        let plan = FramePlan::new(&ExperimentConfig::etu_default()).unwrap();
        for (_, sp) in &plan.systems {
            let (metric, pilots, lo, hi) = match sp {
                SystemPlan::Fbmc(p) => (&p.metric_cells, &p.pilot_cells, OVERLAP, 28 - OVERLAP),
                SystemPlan::Ofdm(p) => (&p.metric_cells, &p.pilot_cells, 2, 12),
            };
            assert!(metric.iter().all(|c| !pilots.contains(c) && c.n >= lo && c.n < hi));
        }
    }

    #[test]
    fn channel_is_shared_and_awgn_has_none() {
        let cfg = ExperimentConfig {
            channel: ChannelKind::Etu,
            ..ExperimentConfig::etu_default()
        };
        let plan = FramePlan::new(&cfg).unwrap();
        let a = plan.channel(2).unwrap().unwrap();
        let b = plan.channel(2).unwrap().unwrap();
        assert_eq!(a.tap_gains[0][100], b.tap_gains[0][100]);
        assert_eq!(a.num_samples(), plan.channel_len);
        let awgn = FramePlan::new(&small(PowerPolicy::Boost)).unwrap();
        assert!(awgn.channel(0).unwrap().is_none());
    }

    #[test]
    fn aup_pairs_cannot_meet_a_unit_budget() {
        let cfg = ExperimentConfig {
            power_policy: PowerPolicy::Normalized,
            systems: vec![System::Fbmc(Scheme::Aup)],
            ..ExperimentConfig::awgn_default()
        };
        assert!(matches!(FramePlan::new(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn ls_estimates_are_unbiased_in_awgn() {
        let cfg = ExperimentConfig {
            systems: vec![System::Fbmc(Scheme::Ddp2)],
            ..ExperimentConfig::awgn_default()
        };
        let plan = FramePlan::new(&cfg).unwrap();
        let SystemPlan::Fbmc(p) = &plan.systems[0].1 else { unreachable!() };
        let sigma2 = 0.5;
        let (mut sum, mut sq, mut count) = (Complex::new(0.0, 0.0), 0.0, 0usize);
        for f in 0..1000 {
            let tx = build_frame(&plan, 0, f).unwrap();
            let mut rng = frame_rng(3, f, Stream::Noise);
            let rx: Vec<Complex> = tx.samples.iter().map(|s| s + complex_gaussian(&mut rng, sigma2)).collect();
            let grid = p.modem.demodulate(&rx, cfg.fbmc_symbols).unwrap();
            for g in &p.groups {
                let r: Vec<Complex> = g.system.slots().iter().map(|s| grid.get(s.m, s.n)).collect();
                let e = g.system.combine(&r)[0] / g.targets[0] - 1.0;
                sum += e;
                sq += e.norm_sqr();
                count += 1;
            }
        }
        assert!(count >= 10_000);
        let mean = sum / count as f64;
        let sd = (sq / count as f64).sqrt();
        assert!(mean.norm() < 3.0 * sd / (count as f64).sqrt(), "{mean} vs {sd}");
        assert!((sq / count as f64 / sigma2 - 1.0).abs() < 0.05);
    }
}
