//! Two-setting GHZ entanglement witness.

use super::mitigation::{histogram, mitigate_readout, QuasiDist};
use crate::error::{Error, Result};
use crate::sim::{Basis, NoiseModel, ShotRecord};

/// `w = (p0 + p1 + x_expect) / 2`; values above 1/2 certify genuine
/// multipartite entanglement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessEstimate {
    pub n: usize,
    /// Probability of the all-zeros string, clipped to [0, 1].
    pub p0: f64,
    /// Probability of the all-ones string, clipped to [0, 1].
    pub p1: f64,
    /// `<X^n>`, clipped to [-1, 1].
    pub x_expect: f64,
    pub w: f64,
    /// Witness value before clipping the three terms.
    pub w_raw: f64,
    pub std_err: f64,
    pub mitigated: bool,
}

impl WitnessEstimate {
    pub fn from_parts(n: usize, p0: f64, p1: f64, x_expect: f64, std_err: f64, mitigated: bool) -> Self {
        let w_raw = (p0 + p1 + x_expect) / 2.0;
        let (p0, p1, x_expect) = (p0.clamp(0.0, 1.0), p1.clamp(0.0, 1.0), x_expect.clamp(-1.0, 1.0));
        WitnessEstimate { n, p0, p1, x_expect, w: (p0 + p1 + x_expect) / 2.0, w_raw, std_err, mitigated }
    }
}

fn distribution(records: &[ShotRecord], p_ro: f64, mitigate: bool) -> Result<QuasiDist> {
    let counts = histogram(records.iter().map(|r| &r.final_bits));
    if mitigate && p_ro > 0.0 {
        mitigate_readout(&counts, p_ro)
    } else {
        Ok(QuasiDist::empirical(&counts))
    }
}

/// Witness from Z-basis and X-basis final readouts. With `mitigate`, the
/// final readout is corrected for the model's readout error; mid-circuit
/// bits play no part.
///
/// The standard error is the binomial (for `p0 + p1`) and parity (for
/// `<X^n>`) normal approximation, inflated by the mitigation gain
/// `1 / (1 - p)^n` and `1 / (1 - 2p)^n` respectively.
pub fn estimate_witness(z_records: &[ShotRecord], x_records: &[ShotRecord], nm: &NoiseModel, mitigate: bool) -> Result<WitnessEstimate> {
    let (Some(z0), Some(x0)) = (z_records.first(), x_records.first()) else {
        return Err(Error::InvalidArgument("witness needs Z-basis and X-basis records".into()));
    };
    if z_records.iter().any(|r| r.basis != Basis::Z) || x_records.iter().any(|r| r.basis != Basis::X) {
        return Err(Error::InvalidArgument("record basis tags do not match their batch".into()));
    }
    let n = z0.final_bits.len();
    if x0.final_bits.len() != n || z_records.iter().chain(x_records).any(|r| r.final_bits.len() != n) {
        return Err(Error::InvalidArgument("records have different qubit counts".into()));
    }
    let p = nm.readout();
    let z = distribution(z_records, p, mitigate)?;
    let x = distribution(x_records, p, mitigate)?;
    let p0 = z.mass(|b| b.all_zero());
    let p1 = z.mass(|b| b.all_one());
    let x_expect = x.parity_expectation(None);

    let (gain_z, gain_x) = if mitigate && p > 0.0 {
        ((1.0 - p).powi(n as i32).recip(), (1.0 - 2.0 * p).powi(n as i32).recip())
    } else {
        (1.0, 1.0)
    };
    let s = (p0 + p1).clamp(0.0, 1.0);
    let var_z = s * (1.0 - s) / z_records.len() as f64 * gain_z * gain_z;
    let xe = x_expect.clamp(-1.0, 1.0);
    let var_x = (1.0 - xe * xe) / x_records.len() as f64 * gain_x * gain_x;
    let std_err = 0.5 * (var_z + var_x).sqrt();
    Ok(WitnessEstimate::from_parts(n, p0, p1, x_expect, std_err, mitigate && p > 0.0))
}
