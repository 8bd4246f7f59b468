//! Witness, fidelity and readout mitigation against analytic values and
//! the dense oracle.

mod common;

use std::collections::BTreeMap;

use common::{all_coefficients, element_expectation, ghz_fidelity, random_circuit};
use groupmv::analysis::{
    aggregate, estimate_fidelity, estimate_witness, histogram, mitigate_readout, FidelityMitigation, GhzStabilizerElement, QuasiDist,
};
use groupmv::bits::BitString;
use groupmv::circuit::{DynamicCircuit, Op};
use groupmv::partition::plan_links;
use groupmv::sim::dense::{branches, dense_oracle};
use groupmv::sim::{run_shots, run_shots_with, Basis, Faults, FinalLayer, NoiseModel, SimOptions};
use groupmv::synth::{synth_ghz_tree, synth_group_mv};
use groupmv::topology::{make_grid, QubitSelection};
use rand::Rng;

fn ghz_line(n: usize) -> DynamicCircuit {
    let g = make_grid(1, n).unwrap();
    synth_ghz_tree(&g, &(0..n).collect::<Vec<_>>(), 0).unwrap()
}

#[test]
fn xx_times_zz_is_minus_yy() {
    let el = GhzStabilizerElement::from_coefficients(&[true, true]);
    assert_eq!(el.to_string(), "-YY");
    let psi = dense_oracle(&ghz_line(2), None, &Faults::default()).unwrap();
    assert!((element_expectation(&psi, &el) - 1.0).abs() < 1e-12);
}

#[test]
fn every_stabilizer_element_fixes_ghz() {
    for n in 2..=8 {
        let psi = dense_oracle(&ghz_line(n), None, &Faults::default()).unwrap();
        for coeffs in all_coefficients(n) {
            let el = GhzStabilizerElement::from_coefficients(&coeffs);
            let v = element_expectation(&psi, &el);
            assert!((v - 1.0).abs() < 1e-10, "n={n} {el}: {v}");
        }
    }
}

#[test]
fn averaging_all_elements_gives_the_fidelity() {
    // the projector onto GHZ_n is the mean of its 2^n stabilizer elements
    let mut rng = groupmv::seed::rng(17);
    for trial in 0..24 {
        let n = 2 + trial % 5;
        let mut c = if trial % 2 == 0 { ghz_line(n) } else { DynamicCircuit::new((0..n).collect()) };
        let extra = random_circuit(n, 6 + trial, &mut rng);
        c.num_clbits = extra.num_clbits;
        c.ops.extend(extra.ops);
        for b in branches(&c, &Faults::default()).unwrap() {
            let mean: f64 = all_coefficients(n).map(|k| element_expectation(&b.state, &GhzStabilizerElement::from_coefficients(&k))).sum::<f64>()
                / f64::from(1u32 << n);
            assert!((mean - ghz_fidelity(&b.state)).abs() < 1e-10, "trial {trial}");
        }
    }
}

#[test]
fn fidelity_of_ideal_and_flipped_ghz() {
    let nm = NoiseModel::noiseless();
    let c = ghz_line(12);
    let f = estimate_fidelity(&c, &nm, 200, 128, 1, FidelityMitigation::Full).unwrap();
    assert!((f.f - 1.0).abs() < 1e-12, "{f:?}");
    let mut bad = c.clone();
    bad.push(Op::X(5));
    let f = estimate_fidelity(&bad, &nm, 400, 128, 1, FidelityMitigation::Full).unwrap();
    assert!(f.f_raw.abs() < 0.1, "{f:?}");
}

#[test]
fn fidelity_mitigation_recovers_readout_loss() {
    let c = ghz_line(8);
    let nm = NoiseModel::new(0.0, 0.0, 0.05).unwrap();
    for mode in [FidelityMitigation::Full, FidelityMitigation::Support] {
        let f = estimate_fidelity(&c, &nm, 100, 4000, 2, mode).unwrap();
        assert!((f.f_raw - 1.0).abs() < 0.05, "{mode:?}: {f:?}");
    }
    let raw = estimate_fidelity(&c, &nm, 100, 4000, 2, FidelityMitigation::None).unwrap();
    assert!(raw.f < 0.8);
}

#[test]
fn witness_of_ideal_and_product_states() {
    let nm = NoiseModel::noiseless();
    let c = ghz_line(10);
    let w = estimate_witness(&run_shots(&c, &nm, Basis::Z, 10_000, 1), &run_shots(&c, &nm, Basis::X, 10_000, 2), &nm, true).unwrap();
    assert!((w.w - 1.0).abs() < 0.02);
    let zero = DynamicCircuit::new((0..10).collect());
    let w = estimate_witness(&run_shots(&zero, &nm, Basis::Z, 4000, 1), &run_shots(&zero, &nm, Basis::X, 4000, 2), &nm, true).unwrap();
    assert_eq!((w.p0, w.p1), (1.0, 0.0));
    assert!(w.x_expect.abs() < 0.05);
    assert!((w.w - 0.5).abs() < 0.03);
    assert!((w.w - (w.p0 + w.p1 + w.x_expect) / 2.0).abs() < 1e-15);
}

#[test]
fn corrupted_fusion_gives_half() {
    // (|0_A 1_B> + |1_A 0_B>)/sqrt 2: P0 = P1 = 0, <X^n> = 1
    let g = make_grid(2, 4).unwrap();
    let sel = QubitSelection { nodes: (0..8).collect(), start: 0 };
    let left: Vec<usize> = (0..8).filter(|u| u % 4 < 2).collect();
    let right: Vec<usize> = (0..8).filter(|u| u % 4 >= 2).collect();
    let plan = plan_links(&[left, right], &g, 0, 1, 0).unwrap();
    let c = synth_group_mv(&g, &sel, &plan).unwrap();
    assert_eq!(c.num_clbits, 1);
    let nm = NoiseModel::noiseless();
    let run = |basis| run_shots_with(&c, &nm, &FinalLayer::uniform(8, basis), basis, &Faults::flip([0]), 10_000, 5, SimOptions::default());
    let w = estimate_witness(&run(Basis::Z), &run(Basis::X), &nm, false).unwrap();
    assert_eq!((w.p0, w.p1, w.x_expect), (0.0, 0.0, 1.0));
    assert_eq!(w.w, 0.5);
}

#[test]
fn two_by_two_inversion() {
    let mut counts = BTreeMap::new();
    counts.insert(BitString::from_bools(&[false]), 9500);
    counts.insert(BitString::from_bools(&[true]), 500);
    let q = mitigate_readout(&counts, 0.05).unwrap();
    assert!((q.get(&BitString::from_bools(&[false])) - 1.0).abs() < 1e-9);
    assert!(q.get(&BitString::from_bools(&[true])).abs() < 1e-9);
}

#[test]
fn zero_readout_error_is_identity() {
    let recs = run_shots(&ghz_line(5), &NoiseModel::noiseless(), Basis::X, 1000, 3);
    let counts = histogram(recs.iter().map(|r| &r.final_bits));
    let q = mitigate_readout(&counts, 0.0).unwrap();
    let e = QuasiDist::empirical(&counts);
    for s in counts.keys() {
        assert!((q.get(s) - e.get(s)).abs() < 1e-12);
    }
}

#[test]
fn mitigated_parity_matches_analytic_rescaling() {
    // <Z^n> of a tensored flip channel shrinks by (1 - 2p)^n
    let n = 6;
    let p = 0.05;
    let mut rng = groupmv::seed::rng(8);
    let mut counts = BTreeMap::new();
    for _ in 0..50_000 {
        let bits: Vec<bool> = (0..n).map(|i| (i < 2) ^ (rng.random::<f64>() < p)).collect();
        *counts.entry(BitString::from_bools(&bits)).or_insert(0u64) += 1;
    }
    let raw = QuasiDist::empirical(&counts).parity_expectation(None);
    let mitigated = mitigate_readout(&counts, p).unwrap().parity_expectation(None);
    let expected = raw / (1.0 - 2.0 * p).powi(n);
    assert!((mitigated - expected).abs() < 0.02, "{mitigated} vs {expected}");
    assert!((mitigated - 1.0).abs() < 0.05);
}

#[test]
fn mitigation_round_trip_on_ghz() {
    // raw X parity is (0.9)^8 ~ 0.43, so the mitigated estimate has a
    // standard error near 0.007 at 1e5 shots
    let c = ghz_line(8);
    let nm = NoiseModel::new(0.0, 0.0, 0.05).unwrap();
    let w = estimate_witness(&run_shots(&c, &nm, Basis::Z, 100_000, 1), &run_shots(&c, &nm, Basis::X, 100_000, 2), &nm, true).unwrap();
    assert!((w.p0 - 0.5).abs() < 0.02 && (w.p1 - 0.5).abs() < 0.02, "{w:?}");
    assert!((w.x_expect - 1.0).abs() < 0.02, "{w:?}");
}

#[test]
fn invalid_readout_rates_rejected() {
    let mut counts = BTreeMap::new();
    counts.insert(BitString::from_bools(&[true]), 1);
    assert!(mitigate_readout(&counts, 0.5).is_err());
    assert!(mitigate_readout(&counts, -0.1).is_err());
    assert!(mitigate_readout(&BTreeMap::new(), 0.1).is_err());
}

#[test]
fn aggregate_examples() {
    let a = aggregate(&[0.5]).unwrap();
    assert_eq!((a.mean, a.std_dev, a.count), (0.5, 0.0, 1));
    let a = aggregate(&[0.4, 0.6]).unwrap();
    assert!((a.mean - 0.5).abs() < 1e-15 && (a.std_dev - 0.1414213562).abs() < 1e-9);
    assert_eq!(aggregate(&[0.37; 10]).unwrap().std_dev, 0.0);
    assert!(aggregate(&[]).is_err());
}
