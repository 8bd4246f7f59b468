//! Shot-based stabilizer simulation of dynamic circuits with stochastic
//! Pauli noise and classical readout errors, plus a small dense-vector
//! simulator used as an independent oracle.

pub mod dense;
mod frame;
mod tableau;

pub use frame::FrameProgram;
pub use tableau::{Pauli, Tableau};

use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::circuit::{DynamicCircuit, Op};
use crate::error::{Error, Result};
use crate::seed;

/// Gate and readout error rates.
///
/// After every single-qubit gate (including `CondX` and basis changes) a
/// uniformly random non-identity Pauli hits the qubit with probability
/// `p_1q`; after every CX a uniformly random non-identity two-qubit Pauli hits
/// its support with probability `p_2q`. Each recorded measurement bit is
/// flipped with probability `p_ro`; the quantum state keeps the true outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub p_1q: f64,
    pub p_2q: f64,
    pub p_ro: f64,
    pub enabled: bool,
    /// Whether the measurement inside `Reset` suffers readout error (its
    /// corrective X then acts on the recorded value). Off by default.
    pub readout_on_reset: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            p_1q: 0.0,
            p_2q: 0.0,
            p_ro: 0.0,
            enabled: false,
            readout_on_reset: false,
        }
    }

    pub fn new(p_1q: f64, p_2q: f64, p_ro: f64) -> Result<Self> {
        let nm = NoiseModel {
            p_1q,
            p_2q,
            p_ro,
            enabled: true,
            readout_on_reset: false,
        };
        nm.validate()?;
        Ok(nm)
    }

    /// Gate errors of 1e-4 on all gates and 5% readout bit flips.
    pub fn reference_default() -> Self {
        NoiseModel::new(1e-4, 1e-4, 0.05).expect("valid probabilities")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_1q", self.p_1q), ("p_2q", self.p_2q), ("p_ro", self.p_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name}={p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn p1(&self) -> f64 {
        if self.enabled { self.p_1q } else { 0.0 }
    }

    fn p2(&self) -> f64 {
        if self.enabled { self.p_2q } else { 0.0 }
    }

    /// Effective readout flip probability (0 when disabled).
    pub fn readout(&self) -> f64 {
        if self.enabled { self.p_ro } else { 0.0 }
    }
}

/// Final measurement basis applied to every circuit qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::Z => "Z",
            Basis::X => "X",
        }
    }
}

/// Deterministic fault injection on recorded mid-circuit bits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Classical bits whose recorded value is always flipped.
    pub flip: Vec<usize>,
}

impl Faults {
    pub fn flip(bits: impl IntoIterator<Item = usize>) -> Self {
        Faults { flip: bits.into_iter().collect() }
    }

    fn flip_mask(&self, num_clbits: usize) -> Vec<bool> {
        let mut m = vec![false; num_clbits];
        for &b in &self.flip {
            if b < num_clbits {
                m[b] = true;
            }
        }
        m
    }
}

/// Per-shot measurement record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub basis: Basis,
    /// Recorded (possibly corrupted) mid-circuit bits, indexed by clbit.
    pub mid_bits: BitString,
    /// Recorded final measurement of every circuit qubit.
    pub final_bits: BitString,
}

impl ShotRecord {
    /// Raw-shot dump line: `basis mid_bits final_bits`.
    pub fn to_line(&self) -> String {
        let mid = if self.mid_bits.is_empty() { "-".to_string() } else { self.mid_bits.to_string() };
        format!("{} {} {}", self.basis.tag(), mid, self.final_bits)
    }
}

/// How shots are sampled. Both engines draw from the same distribution but
/// consume randomness differently, so individual shots differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// One reference tableau run, then a Pauli frame per shot.
    #[default]
    Frame,
    /// A full tableau per shot.
    Tableau,
}

/// Options that do not change the sampled distribution.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimOptions {
    /// Assert the tableau's symplectic invariant after every op.
    pub check_invariants: bool,
    pub engine: Engine,
}

/// Per-qubit rotation applied before the final Z-basis readout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalLayer {
    /// Pauli measured on each circuit qubit; `I` and `Z` need no rotation.
    pub paulis: Vec<Pauli>,
}

impl FinalLayer {
    pub fn uniform(n: usize, basis: Basis) -> Self {
        let p = match basis {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
        };
        FinalLayer { paulis: vec![p; n] }
    }
}

fn depolarize_1q<R: Rng + ?Sized>(t: &mut Tableau, q: usize, p: f64, rng: &mut R) {
    if p > 0.0 && rng.random::<f64>() < p {
        t.pauli(q, Pauli::from_index(rng.random_range(1..4)));
    }
}

fn depolarize_2q<R: Rng + ?Sized>(t: &mut Tableau, a: usize, b: usize, p: f64, rng: &mut R) {
    if p > 0.0 && rng.random::<f64>() < p {
        let k = rng.random_range(1..16usize);
        t.pauli(a, Pauli::from_index(k & 3));
        t.pauli(b, Pauli::from_index(k >> 2));
    }
}

/// Run one shot: every op of `c`, then the final rotation layer and a
/// readout of all qubits.
pub fn run_shot<R: Rng + ?Sized>(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    layer: &FinalLayer,
    faults: &Faults,
    basis_tag: Basis,
    opts: SimOptions,
    rng: &mut R,
) -> ShotRecord {
    let n = c.num_qubits;
    let mut t = Tableau::new(n);
    let mut recorded = vec![false; c.num_clbits];
    let flip = faults.flip_mask(c.num_clbits);
    let (p1, p2, pro) = (nm.p1(), nm.p2(), nm.readout());
    let readout = |v: bool, rng: &mut R| v ^ (pro > 0.0 && rng.random::<f64>() < pro);

    for op in &c.ops {
        match op {
            Op::H(q) => {
                t.h(*q);
                depolarize_1q(&mut t, *q, p1, rng);
            }
            Op::X(q) => {
                t.x_gate(*q);
                depolarize_1q(&mut t, *q, p1, rng);
            }
            Op::Z(q) => {
                t.z_gate(*q);
                depolarize_1q(&mut t, *q, p1, rng);
            }
            Op::S(q) => {
                t.s(*q);
                depolarize_1q(&mut t, *q, p1, rng);
            }
            Op::Cx(a, b) => {
                t.cx(*a, *b);
                depolarize_2q(&mut t, *a, *b, p2, rng);
            }
            Op::Measure { qubit, clbit } => {
                let v = t.measure(*qubit, rng);
                recorded[*clbit] = readout(v, rng) ^ flip[*clbit];
            }
            Op::Reset(q) => {
                let v = t.measure(*q, rng);
                let seen = if nm.readout_on_reset { readout(v, rng) } else { v };
                if seen {
                    t.x_gate(*q);
                }
            }
            Op::CondX { qubit, cond } => {
                if cond.eval_bits(&recorded) {
                    t.x_gate(*qubit);
                }
                depolarize_1q(&mut t, *qubit, p1, rng);
            }
        }
        if opts.check_invariants {
            t.check_invariants().expect("symplectic invariant");
        }
    }

    let mut final_bits = BitString::zeros(n);
    for (q, &p) in layer.paulis.iter().enumerate().take(n) {
        match p {
            Pauli::X => t.h(q),
            Pauli::Y => {
                // S^dagger then H maps Y onto Z
                t.z_gate(q);
                t.s(q);
                t.h(q);
            }
            Pauli::I | Pauli::Z => {}
        }
        if matches!(p, Pauli::X | Pauli::Y) {
            depolarize_1q(&mut t, q, p1, rng);
        }
    }
    for q in 0..n {
        let v = t.measure(q, rng);
        final_bits.set(q, readout(v, rng));
    }
    if opts.check_invariants {
        t.check_invariants().expect("symplectic invariant");
    }
    ShotRecord {
        basis: basis_tag,
        mid_bits: BitString::from_bools(&recorded),
        final_bits,
    }
}

/// Run `shots` independent shots in parallel. Shot `i` uses the seed derived
/// from `(seed, i)`, so results do not depend on scheduling.
pub fn run_shots(c: &DynamicCircuit, nm: &NoiseModel, basis: Basis, shots: usize, seed: u64) -> Vec<ShotRecord> {
    run_shots_with(c, nm, &FinalLayer::uniform(c.num_qubits, basis), basis, &Faults::default(), shots, seed, SimOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn run_shots_with(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    layer: &FinalLayer,
    basis_tag: Basis,
    faults: &Faults,
    shots: usize,
    seed: u64,
    opts: SimOptions,
) -> Vec<ShotRecord> {
    match opts.engine {
        Engine::Tableau => (0..shots as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::rng(seed::derive(seed, i));
                run_shot(c, nm, layer, faults, basis_tag, opts, &mut rng)
            })
            .collect(),
        Engine::Frame => {
            let prog = FrameProgram::compile(c, layer, faults, opts);
            (0..shots as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = seed::rng(seed::derive(seed, i));
                    prog.sample(nm, basis_tag, &mut rng)
                })
                .collect()
        }
    }
}

/// Noiseless final stabilizer tableau for one branch, with every random
/// mid-circuit outcome fixed by `outcome` (called once per random
/// measurement, in order). Recorded bits pass through `faults`.
pub fn final_tableau(c: &DynamicCircuit, faults: &Faults, mut outcome: impl FnMut(usize) -> bool) -> Tableau {
    let mut t = Tableau::new(c.num_qubits);
    let mut recorded = vec![false; c.num_clbits];
    let flip = faults.flip_mask(c.num_clbits);
    let mut k = 0;
    for op in &c.ops {
        match op {
            Op::H(q) => t.h(*q),
            Op::X(q) => t.x_gate(*q),
            Op::Z(q) => t.z_gate(*q),
            Op::S(q) => t.s(*q),
            Op::Cx(a, b) => t.cx(*a, *b),
            Op::Measure { qubit, clbit } => {
                let v = t.measure_with(*qubit, || {
                    k += 1;
                    outcome(k - 1)
                });
                recorded[*clbit] = v ^ flip[*clbit];
            }
            Op::Reset(q) => {
                let v = t.measure_with(*q, || {
                    k += 1;
                    outcome(k - 1)
                });
                if v {
                    t.x_gate(*q);
                }
            }
            Op::CondX { qubit, cond } => {
                if cond.eval_bits(&recorded) {
                    t.x_gate(*qubit);
                }
            }
        }
    }
    t
}

/// Whether tableau `t` is exactly `GHZ_n` on all of its qubits: it must
/// stabilize `X^n` and every `Z_i Z_{i+1}` with eigenvalue +1.
pub fn is_exact_ghz(t: &Tableau) -> bool {
    let n = t.num_qubits();
    let xs = vec![true; n];
    let zs = vec![false; n];
    if t.pauli_expectation(&xs, &zs, false) != 1 {
        return false;
    }
    (0..n.saturating_sub(1)).all(|i| {
        let mut z = vec![false; n];
        z[i] = true;
        z[i + 1] = true;
        t.pauli_expectation(&vec![false; n], &z, false) == 1
    })
}
