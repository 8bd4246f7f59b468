//! Brute-force complex state-vector simulation for small circuits.
//!
//! Qubit `q` is bit `q` of the basis-state index. Measurements can be forced
//! onto chosen outcomes, and [`branches`] enumerates every outcome branch of
//! nonzero probability.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::bits::BitString;
use crate::circuit::{DynamicCircuit, Op};
use crate::error::{Error, Result};
use crate::sim::Faults;

pub const MAX_QUBITS: usize = 12;
const ZERO_PROB: f64 = 1e-12;

#[derive(Clone, Debug)]
struct State {
    amps: Vec<Complex64>,
}

impl State {
    fn new(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        State { amps }
    }

    fn h(&mut self, q: usize) {
        let m = 1usize << q;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (a, b) = (self.amps[i], self.amps[i | m]);
                self.amps[i] = (a + b) * r;
                self.amps[i | m] = (a - b) * r;
            }
        }
    }

    fn x(&mut self, q: usize) {
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    fn phase(&mut self, q: usize, f: Complex64) {
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a *= f;
            }
        }
    }

    fn cx(&mut self, c: usize, t: usize) {
        let (mc, mt) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn project(&mut self, q: usize, v: bool, p: f64) {
        let m = 1usize << q;
        let s = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & m) != 0) == v {
                *a *= s;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// One measurement-outcome branch of a circuit.
#[derive(Clone, Debug)]
pub struct Branch {
    /// True outcomes of every measurement event (Measure and Reset) in order.
    pub outcomes: Vec<bool>,
    /// Recorded classical bits after fault injection.
    pub recorded: Vec<bool>,
    pub probability: f64,
    pub state: Vec<Complex64>,
}

fn check_size(c: &DynamicCircuit) -> Result<()> {
    if c.num_qubits > MAX_QUBITS {
        return Err(Error::Simulation(format!("dense oracle supports at most {MAX_QUBITS} qubits, got {}", c.num_qubits)));
    }
    Ok(())
}

/// Run `c` from op `start` on `st`, branching at every measurement whose
/// outcome is not forced by `forced`.
#[allow(clippy::too_many_arguments)]
fn explore(
    c: &DynamicCircuit,
    start: usize,
    mut st: State,
    mut recorded: Vec<bool>,
    mut outcomes: Vec<bool>,
    mut prob: f64,
    flip: &[bool],
    forced: Option<&[bool]>,
    out: &mut Vec<Branch>,
) -> Result<()> {
    for (idx, op) in c.ops.iter().enumerate().skip(start) {
        match op {
            Op::H(q) => st.h(*q),
            Op::X(q) => st.x(*q),
            Op::Z(q) => st.phase(*q, Complex64::new(-1.0, 0.0)),
            Op::S(q) => st.phase(*q, Complex64::new(0.0, 1.0)),
            Op::Cx(a, b) => st.cx(*a, *b),
            Op::CondX { qubit, cond } => {
                if cond.eval_bits(&recorded) {
                    st.x(*qubit);
                }
            }
            Op::Measure { qubit: q, .. } | Op::Reset(q) => {
                let p1 = st.prob_one(*q).clamp(0.0, 1.0);
                let choices: Vec<bool> = match forced.and_then(|f| f.get(outcomes.len()).copied()) {
                    Some(v) => {
                        let p = if v { p1 } else { 1.0 - p1 };
                        if p < ZERO_PROB {
                            return Err(Error::Simulation(format!(
                                "forced outcome {} for measurement event {} has probability 0",
                                v as u8,
                                outcomes.len()
                            )));
                        }
                        vec![v]
                    }
                    None if forced.is_some() => {
                        return Err(Error::Simulation("forced outcome list shorter than measurement count".into()));
                    }
                    None => [false, true]
                        .into_iter()
                        .filter(|&v| (if v { p1 } else { 1.0 - p1 }) >= ZERO_PROB)
                        .collect(),
                };
                let last = choices.len() - 1;
                for (ci, v) in choices.into_iter().enumerate() {
                    let p = if v { p1 } else { 1.0 - p1 };
                    let mut s2 = if ci == last { std::mem::replace(&mut st, State::new(0)) } else { st.clone() };
                    s2.project(*q, v, p);
                    let mut rec = recorded.clone();
                    match op {
                        Op::Measure { clbit, .. } => rec[*clbit] = v ^ flip[*clbit],
                        _ => {
                            if v {
                                s2.x(*q);
                            }
                        }
                    }
                    let mut oc = outcomes.clone();
                    oc.push(v);
                    if ci == last {
                        st = s2;
                        recorded = rec;
                        outcomes = oc;
                        prob *= p;
                    } else {
                        explore(c, idx + 1, s2, rec, oc, prob * p, flip, forced, out)?;
                    }
                }
            }
        }
    }
    out.push(Branch { outcomes, recorded, probability: prob, state: st.amps });
    Ok(())
}

/// Every outcome branch of nonzero probability, with recorded bits passed
/// through `faults`. Probabilities sum to 1.
pub fn branches(c: &DynamicCircuit, faults: &Faults) -> Result<Vec<Branch>> {
    check_size(c)?;
    let flip = flip_mask(faults, c.num_clbits);
    let mut out = Vec::new();
    explore(c, 0, State::new(c.num_qubits), vec![false; c.num_clbits], Vec::new(), 1.0, &flip, None, &mut out)?;
    Ok(out)
}

/// Final state vector of `c`. With `forced`, measurement event `i` is
/// projected onto `forced[i]` (error if that branch has probability 0);
/// without it, each measurement takes its first outcome of nonzero
/// probability, preferring 0.
pub fn dense_oracle(c: &DynamicCircuit, forced: Option<&[bool]>, faults: &Faults) -> Result<Vec<Complex64>> {
    check_size(c)?;
    let flip = flip_mask(faults, c.num_clbits);
    let mut out = Vec::new();
    explore(c, 0, State::new(c.num_qubits), vec![false; c.num_clbits], Vec::new(), 1.0, &flip, forced, &mut out)?;
    if forced.is_some() {
        return Ok(out.pop().expect("one branch").state);
    }
    // the DFS visits outcome 0 first; the first branch prefers 0 everywhere
    Ok(out.swap_remove(0).state)
}

fn flip_mask(faults: &Faults, n: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for &b in &faults.flip {
        if b < n {
            m[b] = true;
        }
    }
    m
}

/// `|<GHZ_n|psi>|^2`.
pub fn ghz_overlap(state: &[Complex64]) -> f64 {
    let a = state[0] + state[state.len() - 1];
    a.norm_sqr() / 2.0
}

/// Exact joint distribution of (recorded mid-circuit bits, final Z readout
/// of all qubits), with no noise.
pub fn outcome_distribution(c: &DynamicCircuit) -> Result<BTreeMap<(String, String), f64>> {
    let mut dist = BTreeMap::new();
    for b in branches(c, &Faults::default())? {
        let mid = BitString::from_bools(&b.recorded).to_string();
        for (i, a) in b.state.iter().enumerate() {
            let p = a.norm_sqr() * b.probability;
            if p < ZERO_PROB {
                continue;
            }
            let fin: Vec<bool> = (0..c.num_qubits).map(|q| i >> q & 1 == 1).collect();
            *dist.entry((mid.clone(), BitString::from_bools(&fin).to_string())).or_insert(0.0) += p;
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ClassicalExpr;

    #[test]
    fn bell_amplitudes() {
        let mut c = DynamicCircuit::new(vec![0, 1]);
        c.push(Op::H(0));
        c.push(Op::Cx(0, 1));
        let s = dense_oracle(&c, None, &Faults::default()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = [r, 0.0, 0.0, r];
        for (a, w) in s.iter().zip(want) {
            assert!((a.re - w).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
        assert!((ghz_overlap(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branches_sum_to_one_and_forced_zero_rejected() {
        let mut c = DynamicCircuit::new(vec![0, 1, 2]);
        c.push(Op::H(0));
        c.push(Op::H(1));
        c.measure(0);
        c.measure(1);
        c.push(Op::Reset(0));
        let bs = branches(&c, &Faults::default()).unwrap();
        assert_eq!(bs.len(), 4);
        let total: f64 = bs.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // qubit 2 is |0>; forcing the other branches works, but measuring
        // qubit 0 after the reset as 1 does not
        let mut d = DynamicCircuit::new(vec![0]);
        d.measure(0);
        assert!(dense_oracle(&d, Some(&[true]), &Faults::default()).is_err());
    }

    #[test]
    fn feedforward_repairs_fusion() {
        // two Bell pairs fused by measuring the parity of qubits 1 and 2
        let mut c = DynamicCircuit::new(vec![0, 1, 2, 3]);
        c.push(Op::H(0));
        c.push(Op::Cx(0, 1));
        c.push(Op::H(2));
        c.push(Op::Cx(2, 3));
        c.push(Op::Cx(1, 2));
        let b = c.measure(2);
        c.push(Op::CondX { qubit: 3, cond: ClassicalExpr::Bit(b) });
        c.push(Op::Reset(2));
        c.push(Op::Cx(1, 2));
        for br in branches(&c, &Faults::default()).unwrap() {
            assert!((ghz_overlap(&br.state) - 1.0).abs() < 1e-10);
        }
        for br in branches(&c, &Faults::flip([b])).unwrap() {
            assert!(ghz_overlap(&br.state) < 1e-10);
        }
    }

    #[test]
    fn too_many_qubits() {
        let c = DynamicCircuit::new((0..13).collect());
        assert!(dense_oracle(&c, None, &Faults::default()).is_err());
    }
}
