//! Stabilizer Rényi entropy and entanglement of W-like states and of the
//! ground states of frustrated XYZ rings.

pub mod clifford;
pub mod entanglement;
pub mod error;
pub mod lanczos;
pub mod oracles;
pub mod pauli;
pub mod registry;
pub mod sector;
pub mod special;
pub mod state;
pub mod summation;
pub mod xyz;

pub use error::{Error, Result};
pub use state::{MomentumIndex, SiteLabel, StateVector, C64};
