#![allow(dead_code)]

use std::collections::BTreeMap;

use groupmv::analysis::GhzStabilizerElement;
use groupmv::circuit::{ClassicalExpr, DynamicCircuit, Op};
use groupmv::sim::dense::branches;
use groupmv::sim::{Faults, Pauli, ShotRecord};
use groupmv::topology::{make_grid, make_heavy_hex, make_ring, CouplingGraph};
use num_complex::Complex64;
use rand::Rng;

/// Small instances with at least 8 nodes, one per topology family.
pub fn small_graphs() -> Vec<(&'static str, CouplingGraph)> {
    vec![
        ("grid", make_grid(3, 3).unwrap()),
        ("ring", make_ring(8).unwrap()),
        ("heavy_hex", make_heavy_hex(1, 1).unwrap()),
    ]
}

/// Random circuit over the full gate set. Classical conditions only read
/// bits that are already written.
pub fn random_circuit<R: Rng>(n: usize, len: usize, rng: &mut R) -> DynamicCircuit {
    let mut c = DynamicCircuit::new((0..n).collect());
    for _ in 0..len {
        let q = rng.random_range(0..n);
        match rng.random_range(0..10) {
            0 | 1 => c.push(Op::H(q)),
            2 => c.push(Op::S(q)),
            3 => c.push(Op::X(q)),
            4 => c.push(Op::Z(q)),
            5 | 6 if n > 1 => {
                let mut t = rng.random_range(0..n - 1);
                if t >= q {
                    t += 1;
                }
                c.push(Op::Cx(q, t));
            }
            7 => {
                c.measure(q);
            }
            8 => c.push(Op::Reset(q)),
            _ if c.num_clbits > 0 => {
                let k = rng.random_range(1..=c.num_clbits.min(3));
                let bits: Vec<ClassicalExpr> = (0..k).map(|_| ClassicalExpr::Bit(rng.random_range(0..c.num_clbits))).collect();
                let cond = if k == 2 || rng.random() { ClassicalExpr::xor(bits) } else { ClassicalExpr::Maj(bits) };
                c.push(Op::CondX { qubit: q, cond });
            }
            _ => c.push(Op::H(q)),
        }
    }
    c
}

/// Empirical joint distribution of (mid bits, final bits).
pub fn empirical(records: &[ShotRecord]) -> BTreeMap<(String, String), f64> {
    let mut m = BTreeMap::new();
    let w = 1.0 / records.len() as f64;
    for r in records {
        *m.entry((r.mid_bits.to_string(), r.final_bits.to_string())).or_insert(0.0) += w;
    }
    m
}

pub fn tvd(a: &BTreeMap<(String, String), f64>, b: &BTreeMap<(String, String), f64>) -> f64 {
    let mut keys: Vec<&(String, String)> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter().map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>() / 2.0
}

/// `|<GHZ|psi>|^2`, written out independently of the library helper.
pub fn ghz_fidelity(psi: &[Complex64]) -> f64 {
    let a = (psi[0] + psi[psi.len() - 1]) / 2f64.sqrt();
    a.norm_sqr()
}

/// Minimum and maximum GHZ overlap over every outcome branch.
pub fn overlap_range(c: &DynamicCircuit, faults: &Faults) -> (f64, f64) {
    let bs = branches(c, faults).unwrap();
    let total: f64 = bs.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-9, "branch probabilities sum to {total}");
    bs.iter().map(|b| ghz_fidelity(&b.state)).fold((f64::INFINITY, 0.0), |(lo, hi), f| (lo.min(f), hi.max(f)))
}

/// `<psi| P |psi>` for a Pauli string, by direct action on amplitudes.
pub fn pauli_expectation(psi: &[Complex64], paulis: &[Pauli], sign: f64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, amp) in psi.iter().enumerate() {
        let mut target = idx;
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, p) in paulis.iter().enumerate() {
            let bit = idx >> q & 1 == 1;
            match p {
                Pauli::I => {}
                Pauli::X => target ^= 1 << q,
                Pauli::Z => {
                    if bit {
                        phase = -phase;
                    }
                }
                Pauli::Y => {
                    target ^= 1 << q;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    phase *= if bit { -i } else { i };
                }
            }
        }
        acc += psi[target].conj() * phase * amp;
    }
    sign * acc.re
}

pub fn element_expectation(psi: &[Complex64], e: &GhzStabilizerElement) -> f64 {
    pauli_expectation(psi, &e.paulis(), f64::from(e.sign))
}

/// Every coefficient vector of length `n`.
pub fn all_coefficients(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}
