//! Pauli-frame sampling.
//!
//! A noiseless reference trajectory is computed once on the tableau (random
//! outcomes fixed to 0). Each shot then only tracks the Pauli frame relating
//! its state to the reference: noise toggles frame bits, a measurement's
//! outcome differs from the reference exactly when the frame has X on the
//! qubit, and the Z component of a freshly measured or reset qubit is
//! randomized, which reproduces the randomness of later measurements.
//! Classically controlled X gates act on the frame whenever the shot's
//! recorded bits disagree with the reference about the condition.

use rand::Rng;

use super::{FinalLayer, Faults, NoiseModel, Pauli, ShotRecord, SimOptions, Tableau};
use crate::bits::BitString;
use crate::circuit::{DynamicCircuit, Op};
use crate::sim::Basis;

/// Frame-level instruction derived from the circuit plus final layer.
#[derive(Clone, Debug)]
enum Step {
    H(usize),
    S(usize),
    Cx(usize, usize),
    Noise1(usize),
    Noise2(usize, usize),
    Measure { qubit: usize, clbit: usize, reference: bool },
    Reset { qubit: usize, reference: bool },
    CondX { op: usize, qubit: usize, reference: bool },
    Final { qubit: usize, reference: bool },
}

/// Reference trajectory for one circuit, final layer and fault set.
#[derive(Clone, Debug)]
pub struct FrameProgram<'c> {
    circuit: &'c DynamicCircuit,
    steps: Vec<Step>,
    flip: Vec<bool>,
}

impl<'c> FrameProgram<'c> {
    pub fn compile(c: &'c DynamicCircuit, layer: &FinalLayer, faults: &Faults, opts: SimOptions) -> Self {
        let n = c.num_qubits;
        let flip = faults.flip_mask(c.num_clbits);
        let mut t = Tableau::new(n);
        let mut recorded = vec![false; c.num_clbits];
        let mut steps = Vec::with_capacity(c.ops.len() * 2 + 2 * n);
        let check = |t: &Tableau| {
            if opts.check_invariants {
                t.check_invariants().expect("symplectic invariant");
            }
        };
        for (i, op) in c.ops.iter().enumerate() {
            match op {
                Op::H(q) => {
                    t.h(*q);
                    steps.push(Step::H(*q));
                    steps.push(Step::Noise1(*q));
                }
                Op::S(q) => {
                    t.s(*q);
                    steps.push(Step::S(*q));
                    steps.push(Step::Noise1(*q));
                }
                Op::X(q) => {
                    t.x_gate(*q);
                    steps.push(Step::Noise1(*q));
                }
                Op::Z(q) => {
                    t.z_gate(*q);
                    steps.push(Step::Noise1(*q));
                }
                Op::Cx(a, b) => {
                    t.cx(*a, *b);
                    steps.push(Step::Cx(*a, *b));
                    steps.push(Step::Noise2(*a, *b));
                }
                Op::Measure { qubit, clbit } => {
                    let v = t.measure_with(*qubit, || false);
                    recorded[*clbit] = v ^ flip[*clbit];
                    steps.push(Step::Measure { qubit: *qubit, clbit: *clbit, reference: v });
                }
                Op::Reset(q) => {
                    let v = t.measure_with(*q, || false);
                    if v {
                        t.x_gate(*q);
                    }
                    steps.push(Step::Reset { qubit: *q, reference: v });
                }
                Op::CondX { qubit, cond } => {
                    let fire = cond.eval_bits(&recorded);
                    if fire {
                        t.x_gate(*qubit);
                    }
                    steps.push(Step::CondX { op: i, qubit: *qubit, reference: fire });
                    steps.push(Step::Noise1(*qubit));
                }
            }
            check(&t);
        }
        for (q, &p) in layer.paulis.iter().enumerate().take(n) {
            match p {
                Pauli::X => {
                    t.h(q);
                    steps.push(Step::H(q));
                }
                Pauli::Y => {
                    t.z_gate(q);
                    t.s(q);
                    t.h(q);
                    steps.push(Step::S(q));
                    steps.push(Step::H(q));
                }
                Pauli::I | Pauli::Z => {}
            }
            if matches!(p, Pauli::X | Pauli::Y) {
                steps.push(Step::Noise1(q));
            }
        }
        for q in 0..n {
            let v = t.measure_with(q, || false);
            steps.push(Step::Final { qubit: q, reference: v });
        }
        check(&t);
        FrameProgram { circuit: c, steps, flip }
    }

    /// Sample one shot.
    pub fn sample<R: Rng + ?Sized>(&self, nm: &NoiseModel, basis_tag: Basis, rng: &mut R) -> ShotRecord {
        let c = self.circuit;
        let n = c.num_qubits;
        let (p1, p2, pro) = (nm.p1(), nm.p2(), nm.readout());
        let mut fx = vec![false; n];
        let mut fz: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        let mut recorded = vec![false; c.num_clbits];
        let mut final_bits = BitString::zeros(n);
        let readout = |rng: &mut R| pro > 0.0 && rng.random::<f64>() < pro;
        let toggle = |fx: &mut [bool], fz: &mut [bool], q: usize, p: Pauli| match p {
            Pauli::X => fx[q] ^= true,
            Pauli::Z => fz[q] ^= true,
            Pauli::Y => {
                fx[q] ^= true;
                fz[q] ^= true;
            }
            Pauli::I => {}
        };
        for step in &self.steps {
            match *step {
                Step::H(q) => std::mem::swap(&mut fx[q], &mut fz[q]),
                Step::S(q) => fz[q] ^= fx[q],
                Step::Cx(a, b) => {
                    fx[b] ^= fx[a];
                    fz[a] ^= fz[b];
                }
                Step::Noise1(q) => {
                    if p1 > 0.0 && rng.random::<f64>() < p1 {
                        toggle(&mut fx, &mut fz, q, Pauli::from_index(rng.random_range(1..4)));
                    }
                }
                Step::Noise2(a, b) => {
                    if p2 > 0.0 && rng.random::<f64>() < p2 {
                        let k = rng.random_range(1..16usize);
                        toggle(&mut fx, &mut fz, a, Pauli::from_index(k & 3));
                        toggle(&mut fx, &mut fz, b, Pauli::from_index(k >> 2));
                    }
                }
                Step::Measure { qubit, clbit, reference } => {
                    let v = reference ^ fx[qubit];
                    recorded[clbit] = v ^ readout(rng) ^ self.flip[clbit];
                    fz[qubit] = rng.random();
                }
                Step::Reset { qubit, reference } => {
                    let v = reference ^ fx[qubit];
                    let seen = if nm.readout_on_reset { v ^ readout(rng) } else { v };
                    // the shot applies X on `seen`, the reference on `reference`
                    fx[qubit] ^= seen ^ reference;
                    fz[qubit] = rng.random();
                }
                Step::CondX { op, qubit, reference } => {
                    let Op::CondX { cond, .. } = &c.ops[op] else { unreachable!() };
                    if cond.eval_bits(&recorded) != reference {
                        fx[qubit] ^= true;
                    }
                }
                Step::Final { qubit, reference } => {
                    final_bits.set(qubit, reference ^ fx[qubit] ^ readout(rng));
                }
            }
        }
        ShotRecord { basis: basis_tag, mid_bits: BitString::from_bools(&recorded), final_bits }
    }
}
