//! Oracle cross-checks run by the `selftest` subcommand.

use std::collections::BTreeMap;

use rand::Rng;

use crate::analysis::{estimate_witness, mitigate_readout};
use crate::bits::BitString;
use crate::circuit::DynamicCircuit;
use crate::error::Result;
use crate::partition::plan_links;
use crate::seed;
use crate::sim::dense::{branches, ghz_overlap, outcome_distribution};
use crate::sim::{final_tableau, is_exact_ghz, run_shots, Basis, Faults, NoiseModel};
use crate::synth::{randomized_search, synth_group_mv, Method, SynthRequest};
use crate::topology::{make_grid, make_heavy_hex, make_ring, CouplingGraph, QubitSelection};

#[derive(Clone, Debug)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SelfCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        SelfCheck { name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

const TOL: f64 = 1e-10;

fn small_instances() -> Result<Vec<(String, CouplingGraph, usize)>> {
    Ok(vec![
        ("grid(2x4)".into(), make_grid(2, 4)?, 8),
        ("ring(7)".into(), make_ring(7)?, 7),
        ("heavy_hex(1x1)".into(), make_heavy_hex(1, 1)?, 8),
    ])
}

fn worst_branch_overlap(c: &DynamicCircuit, faults: &Faults) -> Result<f64> {
    Ok(branches(c, faults)?.iter().map(|b| ghz_overlap(&b.state)).fold(f64::INFINITY, f64::min))
}

/// Every method on small graphs reaches GHZ on every outcome branch, and
/// the stabilizer simulator agrees on random branches.
fn exactness() -> Result<SelfCheck> {
    let mut worst = f64::INFINITY;
    let mut tableau_ok = true;
    let mut count = 0;
    for (_, g, n) in small_instances()? {
        for method in Method::ALL {
            let req = SynthRequest { graph: &g, n, k: n.div_ceil(2), l: 1, method, restarts: 2, seed: 7 };
            let (c, _, _) = randomized_search(&req)?;
            worst = worst.min(worst_branch_overlap(&c, &Faults::default())?);
            let mut rng = seed::rng(seed::derive(7, count));
            for _ in 0..8 {
                let t = final_tableau(&c, &Faults::default(), |_| rng.random());
                tableau_ok &= is_exact_ghz(&t);
            }
            count += 1;
        }
    }
    let passed = (1.0 - worst).abs() < TOL && tableau_ok;
    Ok(SelfCheck::new(
        "exactness",
        passed,
        format!("{count} circuits, min branch overlap {worst:.12}, tableau agrees {tableau_ok}"),
    ))
}

/// Three links across one boundary: any single recorded-bit flip is
/// outvoted, a double flip breaks the state.
fn majority_vote() -> Result<SelfCheck> {
    let g = make_grid(3, 3)?;
    let sel = QubitSelection { nodes: (0..9).collect(), start: 0 };
    let plan = plan_links(&[vec![0, 3, 6], vec![1, 2, 4, 5, 7, 8]], &g, 0, 3, 0)?;
    let c = synth_group_mv(&g, &sel, &plan)?;
    let mut single = f64::INFINITY;
    for b in 0..c.num_clbits {
        single = single.min(worst_branch_overlap(&c, &Faults::flip([b]))?);
    }
    let mut double = 0.0f64;
    for a in 0..c.num_clbits {
        for b in a + 1..c.num_clbits {
            double = double.max(branches(&c, &Faults::flip([a, b]))?.iter().map(|br| ghz_overlap(&br.state)).fold(0.0, f64::max));
        }
    }
    let passed = plan.min_l_eff() == Some(3) && (1.0 - single).abs() < TOL && double < TOL;
    Ok(SelfCheck::new(
        "majority_vote",
        passed,
        format!("l_eff {:?}, single-flip min overlap {single:.12}, double-flip max overlap {double:.3e}", plan.min_l_eff()),
    ))
}

/// Noiseless stabilizer sampling matches the exact joint outcome
/// distribution within sampling error.
fn sampling_distribution() -> Result<SelfCheck> {
    let g = make_grid(2, 3)?;
    let req = SynthRequest { graph: &g, n: 6, k: 3, l: 1, method: Method::GroupMV, restarts: 1, seed: 3 };
    let (c, _, _) = randomized_search(&req)?;
    let exact = outcome_distribution(&c)?;
    let shots = 20_000;
    let mut freq: BTreeMap<(String, String), f64> = BTreeMap::new();
    for r in run_shots(&c, &NoiseModel::noiseless(), Basis::Z, shots, 5) {
        let mid = if r.mid_bits.is_empty() { String::new() } else { r.mid_bits.to_string() };
        *freq.entry((mid, r.final_bits.to_string())).or_insert(0.0) += 1.0 / shots as f64;
    }
    let keys: std::collections::BTreeSet<_> = exact.keys().chain(freq.keys()).cloned().collect();
    let tv: f64 = keys
        .iter()
        .map(|k| (exact.get(k).copied().unwrap_or(0.0) - freq.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0;
    Ok(SelfCheck::new("sampling_distribution", tv < 0.03, format!("{} outcomes, total variation {tv:.4}", exact.len())))
}

/// Readout mitigation on a hand-solvable one-qubit histogram.
fn mitigation() -> Result<SelfCheck> {
    let zero = BitString::from_bools(&[false]);
    let one = BitString::from_bools(&[true]);
    let mut counts = BTreeMap::new();
    counts.insert(zero.clone(), 9500u64);
    counts.insert(one.clone(), 500u64);
    let q = mitigate_readout(&counts, 0.05)?;
    let err = (q.get(&zero) - 1.0).abs().max(q.get(&one).abs());
    Ok(SelfCheck::new("mitigation", err < 1e-6, format!("max deviation {err:.2e}")))
}

/// Ideal GHZ, noiseless: witness 1.
fn witness_ideal() -> Result<SelfCheck> {
    let g = make_grid(3, 3)?;
    let req = SynthRequest { graph: &g, n: 9, k: 9, l: 1, method: Method::Unitary, restarts: 1, seed: 0 };
    let (c, _, _) = randomized_search(&req)?;
    let nm = NoiseModel::noiseless();
    let z = run_shots(&c, &nm, Basis::Z, 4000, 1);
    let x = run_shots(&c, &nm, Basis::X, 4000, 2);
    let w = estimate_witness(&z, &x, &nm, true)?;
    Ok(SelfCheck::new("witness_ideal", (w.w - 1.0).abs() < 1e-9, format!("w = {:.6}", w.w)))
}

type Check = fn() -> Result<SelfCheck>;

/// Run all checks. A check that errors is reported as failed.
pub fn run_selftest() -> Vec<SelfCheck> {
    let checks: [(&str, Check); 5] = [
        ("exactness", exactness),
        ("majority_vote", majority_vote),
        ("sampling_distribution", sampling_distribution),
        ("mitigation", mitigation),
        ("witness_ideal", witness_ideal),
    ];
    checks
        .iter()
        .map(|(name, f)| f().unwrap_or_else(|e| SelfCheck::new(name, false, format!("error: {e}"))))
        .collect()
}
