//! Prototype filter, OQAM filter banks, ambiguity function and the CP-OFDM
//! baseline.

pub mod ambiguity;
pub mod filter;
pub mod grid;
pub mod ofdm;
pub mod oqam;

pub use ambiguity::{ambiguity, ambiguity_between, impulse_response, AmbiguityTable};
pub use filter::PrototypeFilter;
pub use grid::{CellKind, ComplexGrid, OqamGrid, PhaseConvention};
pub use ofdm::OfdmModem;
pub use oqam::OqamModem;
