//! Fidelity with GHZ_n by sampling elements of its stabilizer group.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::mitigation::{histogram, mitigate_readout, QuasiDist};
use super::aggregate;
use crate::bits::BitString;
use crate::circuit::DynamicCircuit;
use crate::error::{Error, Result};
use crate::seed;
use crate::sim::{run_shots_with, Basis, Faults, FinalLayer, NoiseModel, Pauli, SimOptions};

/// Element of the GHZ_n stabilizer group generated by `X^n` and
/// `Z_i Z_{i+1}`: `sign * X^{x_type} Z^{z_support}` written per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzStabilizerElement {
    pub x_type: bool,
    pub z_support: Vec<bool>,
    pub sign: i8,
}

impl GhzStabilizerElement {
    /// Compose the generators selected by `coeffs`: `coeffs[0]` picks
    /// `X^n`, `coeffs[i]` (i >= 1) picks `Z_{i-1} Z_i`.
    pub fn from_coefficients(coeffs: &[bool]) -> Self {
        let n = coeffs.len();
        let mut z = vec![false; n];
        for i in 1..n {
            if coeffs[i] {
                z[i - 1] ^= true;
                z[i] ^= true;
            }
        }
        let x_type = coeffs.first().copied().unwrap_or(false);
        let weight = z.iter().filter(|&&b| b).count();
        // X Z = -iY on every qubit of the (even) Z support
        let sign = if x_type && (weight / 2) % 2 == 1 { -1 } else { 1 };
        GhzStabilizerElement { x_type, z_support: z, sign }
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        self.z_support
            .iter()
            .map(|&z| match (self.x_type, z) {
                (true, true) => Pauli::Y,
                (true, false) => Pauli::X,
                (false, true) => Pauli::Z,
                (false, false) => Pauli::I,
            })
            .collect()
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<bool> {
        self.z_support.iter().map(|&z| z || self.x_type).collect()
    }

    pub fn is_identity(&self) -> bool {
        !self.x_type && self.z_support.iter().all(|&z| !z)
    }
}

impl fmt::Display for GhzStabilizerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.sign < 0 { "-" } else { "+" })?;
        for p in self.paulis() {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

/// Uniformly random element of the GHZ_n stabilizer group.
pub fn sample_ghz_stabilizer<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GhzStabilizerElement {
    let coeffs: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    GhzStabilizerElement::from_coefficients(&coeffs)
}

/// How final readout is mitigated when measuring a stabilizer element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FidelityMitigation {
    None,
    /// Mitigate the full n-bit strings, then take the parity on the support.
    Full,
    /// Marginalize onto the element's support first, then mitigate.
    Support,
}

impl FidelityMitigation {
    pub fn name(self) -> &'static str {
        match self {
            FidelityMitigation::None => "none",
            FidelityMitigation::Full => "full",
            FidelityMitigation::Support => "support",
        }
    }
}

impl FromStr for FidelityMitigation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(FidelityMitigation::None),
            "full" => Ok(FidelityMitigation::Full),
            "support" => Ok(FidelityMitigation::Support),
            other => Err(Error::InvalidArgument(format!("unknown fidelity mitigation `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    /// Estimate clipped to [0, 1].
    pub f: f64,
    pub f_raw: f64,
    pub std_err: f64,
    pub num_stabilizers_sampled: usize,
    pub shots_per_stabilizer: usize,
}

/// Expectation of `el` from final readouts taken in its per-qubit bases.
fn element_value(el: &GhzStabilizerElement, finals: &[BitString], p_ro: f64, mode: FidelityMitigation) -> Result<f64> {
    let support = el.support();
    let sign = f64::from(el.sign);
    let dist = match mode {
        FidelityMitigation::None => QuasiDist::empirical(&histogram(finals)),
        FidelityMitigation::Full if p_ro > 0.0 => mitigate_readout(&histogram(finals), p_ro)?,
        FidelityMitigation::Full => QuasiDist::empirical(&histogram(finals)),
        FidelityMitigation::Support => {
            let pos: Vec<usize> = (0..support.len()).filter(|&q| support[q]).collect();
            let marg: Vec<BitString> = finals.iter().map(|b| b.select(&pos)).collect();
            let counts = histogram(&marg);
            let d = if p_ro > 0.0 { mitigate_readout(&counts, p_ro)? } else { QuasiDist::empirical(&counts) };
            return Ok(sign * d.parity_expectation(None));
        }
    };
    let mask = BitString::from_bools(&support);
    Ok(sign * dist.parity_expectation(Some(&mask)))
}

/// Average measured expectation of `m_elements` uniformly sampled GHZ
/// stabilizer elements; each is measured with `shots_per_element` shots
/// after rotating every qubit into its factor's eigenbasis.
///
/// Element `i` and its shots use seeds derived from `(seed, i)`, so two
/// circuits estimated with the same seed see the same elements.
pub fn estimate_fidelity(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    m_elements: usize,
    shots_per_element: usize,
    seed: u64,
    mode: FidelityMitigation,
) -> Result<FidelityEstimate> {
    if m_elements == 0 || shots_per_element == 0 {
        return Err(Error::InvalidArgument("fidelity needs at least one element and one shot".into()));
    }
    let n = c.num_qubits;
    let mut values = Vec::with_capacity(m_elements);
    for i in 0..m_elements as u64 {
        let s = seed::derive(seed, i);
        let el = sample_ghz_stabilizer(n, &mut seed::rng(seed::derive(s, 0)));
        if el.is_identity() {
            values.push(1.0);
            continue;
        }
        let layer = FinalLayer { paulis: el.paulis() };
        let tag = if el.x_type { Basis::X } else { Basis::Z };
        let recs = run_shots_with(c, nm, &layer, tag, &Faults::default(), shots_per_element, seed::derive(s, 1), SimOptions::default());
        let finals: Vec<BitString> = recs.into_iter().map(|r| r.final_bits).collect();
        values.push(element_value(&el, &finals, nm.readout(), mode)?);
    }
    let agg = aggregate(&values)?;
    Ok(FidelityEstimate {
        f: agg.mean.clamp(0.0, 1.0),
        f_raw: agg.mean,
        std_err: agg.std_dev / (m_elements as f64).sqrt(),
        num_stabilizers_sampled: m_elements,
        shots_per_stabilizer: shots_per_element,
    })
}
