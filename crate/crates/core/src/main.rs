use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fbmc_core::harness::config::parse_sweep;
use fbmc_core::harness::{
    compare_table, run_awgn_experiment, run_etu_experiment, run_power_experiment, run_selftest, table_csv,
    ExperimentConfig, ExperimentResult,
};

/// Scattered-pilot channel estimation experiments for FBMC/OQAM and OFDM.
#[derive(Parser, Debug)]
#[command(name = "fbmc-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare the computed filter-bank impulse response with the reference table.
    Table {
        /// Number of subcarriers.
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pilot power needed by each FBMC scheme relative to OFDM.
    Power(RunArgs),
    /// Clean-pilot MSE and BER over AWGN.
    Awgn(RunArgs),
    /// MSE and BER in a time-varying multipath channel.
    Etu(RunArgs),
    /// Fast invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// key = value file applied over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frames: Option<usize>,
    /// start:step:stop or a comma-separated list, in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Tolerance(String),
}

impl From<fbmc_core::Error> for Failure {
    fn from(e: fbmc_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(base: ExperimentConfig, args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(base, p)?,
        None => base,
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(f) = args.frames {
        cfg.frames = f;
    }
    if let Some(s) = &args.snr {
        cfg.snr_db = parse_sweep(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_result(r: &ExperimentResult, out: &Option<PathBuf>) -> Result<(), Failure> {
    eprint!("{}", r.metadata_lines());
    emit(&r.to_csv(), out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Table { m, out } => {
            let rows = compare_table(m)?;
            emit(&table_csv(&rows), &out)?;
            let bad = rows.iter().filter(|r| !r.passes()).count();
            if bad > 0 {
                return Err(Failure::Tolerance(format!("{bad} table entries outside tolerance")));
            }
        }
        Command::Power(a) => {
            let cfg = load(ExperimentConfig::power_default(), &a)?;
            let (r, ratios) = run_power_experiment(&cfg)?;
            for (s, eta) in ratios {
                eprintln!("{} power ratio = {eta:.4}", s.name());
            }
            emit_result(&r, &a.out)?;
        }
        Command::Awgn(a) => {
            let cfg = load(ExperimentConfig::awgn_default(), &a)?;
            emit_result(&run_awgn_experiment(&cfg)?, &a.out)?;
        }
        Command::Etu(a) => {
            let cfg = load(ExperimentConfig::etu_default(), &a)?;
            emit_result(&run_etu_experiment(&cfg)?, &a.out)?;
        }
        Command::Selftest => {
            let checks = run_selftest()?;
            for c in &checks {
                println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                return Err(Failure::Tolerance("selftest failed".into()));
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Tolerance(msg)) => {
            eprintln!("tolerance check failed: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::execute;

    fn run(args: &[&str]) -> u8 {
        execute(std::iter::once("fbmc-lab").chain(args.iter().copied()))
    }

    #[test]
    fn table_writes_csv_and_succeeds() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.csv");
        assert_eq!(run(&["table", "--out", out.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(out).unwrap();
        assert_eq!(text.lines().count(), 22);
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(&["awgn", "--bogus"]), 1);
        assert_eq!(run(&["nosuch"]), 1);
        assert_eq!(run(&["awgn", "--snr", "5:0:1"]), 1);
        assert_eq!(run(&["awgn", "--config", "/nonexistent/cfg"]), 1);
        assert_eq!(run(&["table", "--m", "30"]), 1);
    }

    #[test]
    fn help_and_version_exit_0() {
        assert_eq!(run(&["--help"]), 0);
        assert_eq!(run(&["--version"]), 0);
    }

    #[test]
    fn selftest_succeeds() {
        assert_eq!(run(&["selftest"]), 0);
    }

    #[test]
    fn seeded_runs_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.cfg");
        std::fs::write(&cfg, "# short run\nsystems = ofdm, fbmc-ddp2\n").unwrap();
        let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("p{i}.csv"))).collect();
        for p in &paths {
            let code = run(&[
                "power", "--frames", "50", "--seed", "7", "--snr", "0:5:10",
                "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
        }
        let a = std::fs::read(&paths[0]).unwrap();
        assert_eq!(a, std::fs::read(&paths[1]).unwrap());
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 3);
        assert!(text.lines().nth(1).unwrap().ends_with(",7,50"));
    }
}
