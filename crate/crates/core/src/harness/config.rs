//! Experiment configuration in flat `key = value` text.
//!
//! Lines starting with `#` are comments. Lists are comma separated; SNR
//! sweeps also accept `start:step:stop`. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::channel::PowerDelayProfile;
use crate::estimation::Waveform;
use crate::pilots::Scheme;
use crate::{Error, Result};

/// One transceiver compared inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Ofdm,
    Fbmc(Scheme),
}

impl System {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "ofdm" => Ok(System::Ofdm),
            "fbmc-aup" => Ok(System::Fbmc(Scheme::Aup)),
            "fbmc-ddp2" => Ok(System::Fbmc(Scheme::Ddp2)),
            "fbmc-ddp4" => Ok(System::Fbmc(Scheme::Ddp4)),
            other => Err(Error::Parse(format!(
                "unknown system '{other}' (expected ofdm, fbmc-aup, fbmc-ddp2 or fbmc-ddp4)"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            System::Ofdm => "ofdm".into(),
            System::Fbmc(s) => format!("fbmc-{}", s.name()),
        }
    }

    pub fn waveform(&self) -> Waveform {
        match self {
            System::Ofdm => Waveform::Ofdm,
            System::Fbmc(_) => Waveform::Fbmc,
        }
    }

    /// Scheme column of the CSV output.
    pub fn scheme_name(&self) -> &'static str {
        match self {
            System::Ofdm => "none",
            System::Fbmc(s) => s.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerPolicy {
    /// Pilot targets sized so the clean pilot SNR equals the data SNR.
    Boost,
    /// Expected transmit power of 1 per two real pilots.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    Etu,
    /// Profile taken from `profile_delays_ns` / `profile_powers_db`.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub num_subcarriers: usize,
    pub fbmc_symbols: usize,
    pub ofdm_symbols: usize,
    pub cp_length: usize,
    pub pilot_stride: usize,
    pub pilot_offset: usize,
    pub fbmc_group_starts: Vec<usize>,
    pub ofdm_pilot_starts: Vec<usize>,
    pub group_size: usize,
    pub snr_db: Vec<f64>,
    pub frames: usize,
    pub power_policy: PowerPolicy,
    pub channel: ChannelKind,
    pub doppler_hz: f64,
    pub sample_rate_hz: f64,
    pub profile_delays_ns: Vec<f64>,
    pub profile_powers_db: Vec<f64>,
    pub seed: u64,
    pub systems: Vec<System>,
    pub data_power: f64,
}

/// Overlap factor of the filter bank; also the FBMC metric guard in symbols.
pub const OVERLAP: usize = 4;

impl ExperimentConfig {
    /// AWGN block with pilot pairs and SNR-parity pilots.
    pub fn awgn_default() -> Self {
        Self {
            num_subcarriers: 64,
            fbmc_symbols: 16,
            ofdm_symbols: 8,
            cp_length: 4,
            pilot_stride: 6,
            pilot_offset: 2,
            fbmc_group_starts: vec![7],
            ofdm_pilot_starts: vec![4],
            group_size: 2,
            snr_db: sweep(0.0, 2.0, 30.0),
            frames: 2000,
            power_policy: PowerPolicy::Boost,
            channel: ChannelKind::Awgn,
            doppler_hz: 0.0,
            sample_rate_hz: 0.96e6,
            profile_delays_ns: vec![0.0],
            profile_powers_db: vec![0.0],
            seed: 1,
            systems: vec![System::Ofdm, System::Fbmc(Scheme::Aup), System::Fbmc(Scheme::Ddp2)],
            data_power: 0.5,
        }
    }

    /// Power-boosting measurement: the AWGN block at a single SNR.
    pub fn power_default() -> Self {
        Self {
            snr_db: vec![10.0],
            frames: 20_000,
            ..Self::awgn_default()
        }
    }

    /// LTE-like block in ETU fading with a normalized pilot budget.
    pub fn etu_default() -> Self {
        Self {
            num_subcarriers: 256,
            fbmc_symbols: 28,
            ofdm_symbols: 14,
            cp_length: 20,
            pilot_stride: 6,
            pilot_offset: 0,
            fbmc_group_starts: vec![6, 18],
            ofdm_pilot_starts: vec![3, 9],
            group_size: 4,
            snr_db: sweep(0.0, 2.0, 30.0),
            frames: 2000,
            power_policy: PowerPolicy::Normalized,
            channel: ChannelKind::Etu,
            doppler_hz: 92.6,
            sample_rate_hz: 3.84e6,
            profile_delays_ns: crate::channel::profile::ETU_DELAYS_NS.to_vec(),
            profile_powers_db: crate::channel::profile::ETU_POWERS_DB.to_vec(),
            seed: 1,
            systems: vec![System::Ofdm, System::Fbmc(Scheme::Aup), System::Fbmc(Scheme::Ddp4)],
            data_power: 0.5,
        }
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(mut self, text: &str) -> Result<Self> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn load(base: Self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        base.apply_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" | "num_subcarriers" => self.num_subcarriers = parse_num(value)?,
            "fbmc_symbols" => self.fbmc_symbols = parse_num(value)?,
            "ofdm_symbols" => self.ofdm_symbols = parse_num(value)?,
            "cp_length" => self.cp_length = parse_num(value)?,
            "pilot_stride" => self.pilot_stride = parse_num(value)?,
            "pilot_offset" => self.pilot_offset = parse_num(value)?,
            "fbmc_group_starts" => self.fbmc_group_starts = parse_list(value)?,
            "ofdm_pilot_starts" | "ofdm_pair_starts" => self.ofdm_pilot_starts = parse_list(value)?,
            "group_size" => self.group_size = parse_num(value)?,
            "snr_db" => self.snr_db = parse_sweep(value)?,
            "frames" => self.frames = parse_num(value)?,
            "power_policy" => {
                self.power_policy = match value {
                    "boost" => PowerPolicy::Boost,
                    "normalized" => PowerPolicy::Normalized,
                    _ => return Err(Error::Parse(format!("power_policy '{value}' (boost|normalized)"))),
                }
            }
            "channel" => {
                self.channel = match value {
                    "awgn" => ChannelKind::Awgn,
                    "etu" => ChannelKind::Etu,
                    "custom" => ChannelKind::Custom,
                    _ => return Err(Error::Parse(format!("channel '{value}' (awgn|etu|custom)"))),
                }
            }
            "doppler_hz" => self.doppler_hz = parse_num(value)?,
            "sample_rate_hz" => self.sample_rate_hz = parse_num(value)?,
            "profile_delays_ns" => self.profile_delays_ns = parse_list(value)?,
            "profile_powers_db" => self.profile_powers_db = parse_list(value)?,
            "seed" => self.seed = parse_num(value)?,
            "systems" => self.systems = value.split(',').map(System::parse).collect::<Result<_>>()?,
            "data_power" => self.data_power = parse_num(value)?,
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Metric guard for OFDM symbols: the same time span as the FBMC guard.
    pub fn ofdm_guard(&self) -> usize {
        OVERLAP / 2
    }

    /// OFDM pilots per group (one complex pilot per two real pilots).
    pub fn ofdm_pilots_per_group(&self) -> usize {
        self.group_size / 2
    }

    pub fn pilot_subcarriers(&self) -> Vec<usize> {
        (self.pilot_offset..self.num_subcarriers)
            .step_by(self.pilot_stride.max(1))
            .collect()
    }

    pub fn profile(&self) -> Result<PowerDelayProfile> {
        match self.channel {
            ChannelKind::Awgn => Ok(PowerDelayProfile::flat()),
            ChannelKind::Etu => Ok(PowerDelayProfile::etu()),
            ChannelKind::Custom => PowerDelayProfile::new(
                self.profile_delays_ns.iter().map(|d| d * 1e-9).collect(),
                self.profile_powers_db.clone(),
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_subcarriers < 16 || self.num_subcarriers % 4 != 0 {
            return bad(format!("m = {} must be a multiple of 4 and >= 16", self.num_subcarriers));
        }
        if self.group_size != 2 && self.group_size != 4 {
            return bad(format!("group_size must be 2 or 4, got {}", self.group_size));
        }
        if self.pilot_stride == 0 || self.pilot_offset >= self.num_subcarriers {
            return bad("pilot_stride must be positive and pilot_offset inside the band".into());
        }
        if self.frames == 0 || self.snr_db.is_empty() || self.systems.is_empty() {
            return bad("frames, snr_db and systems must be non-empty".into());
        }
        if !(self.data_power > 0.0) {
            return bad("data_power must be positive".into());
        }
        for s in &self.systems {
            match s {
                System::Fbmc(Scheme::Ddp2) if self.group_size != 2 => {
                    return bad("fbmc-ddp2 needs group_size = 2".into())
                }
                System::Fbmc(Scheme::Ddp4) if self.group_size != 4 => {
                    return bad("fbmc-ddp4 needs group_size = 4".into())
                }
                System::Fbmc(Scheme::Cpp) => return bad("CPP is not available as a frame scheme".into()),
                _ => {}
            }
        }
        check_layout(
            "FBMC",
            &self.fbmc_group_starts,
            self.group_size,
            OVERLAP,
            self.fbmc_symbols,
        )?;
        check_layout(
            "OFDM",
            &self.ofdm_pilot_starts,
            self.ofdm_pilots_per_group(),
            self.ofdm_guard(),
            self.ofdm_symbols,
        )?;
        if self.channel != ChannelKind::Awgn {
            let p = self.profile()?;
            let d = p.delays_in_samples(self.sample_rate_hz);
            if d.iter().any(|&x| x > self.cp_length) && self.systems.contains(&System::Ofdm) {
                return bad(format!(
                    "channel delay {} samples exceeds the cyclic prefix {}",
                    d.iter().max().unwrap_or(&0),
                    self.cp_length
                ));
            }
        }
        Ok(())
    }

    /// Canonical `key=value` listing, used for hashing.
    pub fn canonical(&self) -> String {
        let mut m = BTreeMap::new();
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let joinu = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        m.insert("m", self.num_subcarriers.to_string());
        m.insert("fbmc_symbols", self.fbmc_symbols.to_string());
        m.insert("ofdm_symbols", self.ofdm_symbols.to_string());
        m.insert("cp_length", self.cp_length.to_string());
        m.insert("pilot_stride", self.pilot_stride.to_string());
        m.insert("pilot_offset", self.pilot_offset.to_string());
        m.insert("fbmc_group_starts", joinu(&self.fbmc_group_starts));
        m.insert("ofdm_pilot_starts", joinu(&self.ofdm_pilot_starts));
        m.insert("group_size", self.group_size.to_string());
        m.insert("snr_db", join(&self.snr_db));
        m.insert("frames", self.frames.to_string());
        m.insert("power_policy", format!("{:?}", self.power_policy).to_lowercase());
        m.insert("channel", format!("{:?}", self.channel).to_lowercase());
        m.insert("doppler_hz", self.doppler_hz.to_string());
        m.insert("sample_rate_hz", self.sample_rate_hz.to_string());
        m.insert("profile_delays_ns", join(&self.profile_delays_ns));
        m.insert("profile_powers_db", join(&self.profile_powers_db));
        m.insert("seed", self.seed.to_string());
        m.insert(
            "systems",
            self.systems.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
        );
        m.insert("data_power", self.data_power.to_string());
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// 64-bit FNV-1a of [`Self::canonical`].
    pub fn hash(&self) -> u64 {
        self.canonical().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        })
    }
}

fn check_layout(name: &str, starts: &[usize], width: usize, guard: usize, symbols: usize) -> Result<()> {
    if starts.is_empty() {
        return Err(Error::Config(format!("{name} layout has no pilot groups")));
    }
    let mut sorted = starts.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[1] < w[0] + width {
            return Err(Error::Config(format!(
                "{name} pilot groups at symbols {} and {} collide",
                w[0], w[1]
            )));
        }
    }
    for &s in &sorted {
        if s < guard || s + width + guard > symbols {
            return Err(Error::Config(format!(
                "{name} pilot group at symbols {s}..{} enters the {guard}-symbol guard of a {symbols}-symbol frame",
                s + width - 1
            )));
        }
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse '{v}' as a number")))
}

fn parse_list<T: std::str::FromStr>(v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(parse_num).collect()
}

/// Inclusive arithmetic sweep.
pub fn sweep(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// `start:step:stop` or a comma-separated list.
pub fn parse_sweep(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.len() {
        1 => parse_list(v),
        3 => {
            let (a, s, b): (f64, f64, f64) = (parse_num(parts[0])?, parse_num(parts[1])?, parse_num(parts[2])?);
            if !(s > 0.0) || b < a {
                return Err(Error::Parse(format!("bad sweep '{v}'")));
            }
            Ok(sweep(a, s, b))
        }
        _ => Err(Error::Parse(format!("bad sweep '{v}'"))),
    }
}
