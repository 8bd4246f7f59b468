//! Witness, fidelity and repetition statistics from shot records.

mod fidelity;
mod mitigation;
mod witness;

pub use fidelity::{estimate_fidelity, sample_ghz_stabilizer, FidelityEstimate, FidelityMitigation, GhzStabilizerElement};
pub use mitigation::{histogram, mitigate_readout, Counts, QuasiDist, ENTRY_CUTOFF, SOLVER_TOLERANCE};
pub use witness::{estimate_witness, WitnessEstimate};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std_dev: f64,
    pub count: usize,
}

pub fn aggregate(values: &[f64]) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot aggregate an empty list".into()));
    }
    let count = values.len();
    // shifting by the first value keeps constant inputs exact
    let shift = values[0];
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / count as f64;
    let std_dev = if count == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    };
    Ok(Aggregate { mean, std_dev, count })
}
