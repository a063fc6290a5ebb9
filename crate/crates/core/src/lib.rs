//! Simulation of two-mode Jaynes-Cummings dynamics for deterministic
//! preparation of Bell, W, GHZ and cluster states.

pub mod analytic;
pub mod dispersive;
pub mod error;
pub mod geometry;
pub mod hamiltonians;
pub mod hilbert;
pub mod imperfections;
pub mod nonlocality;
pub mod numkit;
pub mod opensys;
pub mod oracle;
pub mod protocols;
pub mod sweep;

pub use error::{Error, Result};
pub use numkit::{CMatrix, CVector, C64};
pub use protocols::{ProtocolName, ProtocolOptions, ProtocolSpec};
pub use sweep::{SweepResult, SweepRow};
