//! Pilot design: interference bookkeeping, the neutralization solver, the
//! AUP/CPP/DDP generators and their power and SNR analysis.

pub mod analysis;
pub mod frame;
pub mod interference;
pub mod schemes;
pub mod solver;

pub use frame::{neutralize_frame, PilotGroup};
pub use interference::{compute_interference, NeighborhoodInterference};
pub use schemes::{
    aup_pilots, cpp_pilots, ddp_group4, ddp_pair, solve_neutralization, CleanPilotTarget, PilotSolution, Scheme,
};
pub use solver::{combine_received, coupling, CouplingModel, NeutralizationSystem, PreparedSystem};
