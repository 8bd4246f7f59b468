//! Group-majority-voting GHZ state preparation on hardware coupling graphs.
//!
//! Pipeline: build a coupling graph ([`topology`]), split a qubit selection
//! into connected groups and pick redundant boundary links ([`partition`]),
//! synthesize a dynamic circuit ([`synth`]), simulate it with noise
//! ([`sim`]) and estimate the entanglement witness and fidelity
//! ([`analysis`]). [`experiment`] runs configured sweeps and writes CSV/SVG.

pub mod analysis;
pub mod bits;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod partition;
pub mod seed;
pub mod sim;
pub mod synth;
pub mod topology;

pub use error::{Error, Result};
