//! Monte-Carlo experiments comparing OFDM with FBMC pilot schemes.

pub mod config;
pub mod experiment;
pub mod frame;
pub mod selftest;
pub mod table;

pub use config::{ChannelKind, ExperimentConfig, PowerPolicy, System};
pub use experiment::{
    run_awgn_experiment, run_etu_experiment, run_experiment, run_power_experiment, ExperimentResult, RunMetadata,
    SystemCurve, CSV_HEADER,
};
pub use frame::{build_frame, run_frame, FramePlan, SystemPlan, TxFrame};
pub use selftest::{run_selftest, Check};
pub use table::{compare_table, table_csv, TableRow, REFERENCE_TABLE, TABLE_TOLERANCE};
