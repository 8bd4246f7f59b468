//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance -- 1 4 8` runs a subset. The exit status
//! is nonzero on a failed criterion only when `ACCEPTANCE_STRICT` is set.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use common::{empirical, overlap_range, random_circuit, tvd};
use groupmv::analysis::{estimate_witness, mitigate_readout, QuasiDist};
use groupmv::bits::BitString;
use groupmv::circuit::{DynamicCircuit, Op};
use groupmv::experiment::{parse_config, run_partition_demo, run_sweep, ResultRow, TopologySpec};
use groupmv::partition::{plan_links, GroupPlan};
use groupmv::sim::dense::outcome_distribution;
use groupmv::sim::{final_tableau, is_exact_ghz, run_shots, run_shots_with, Basis, Engine, Faults, FinalLayer, NoiseModel, SimOptions, Tableau};
use rand::Rng;
use groupmv::synth::{randomized_search, synth_ghz_tree, synth_group_mv, Method, SynthRequest};
use groupmv::topology::{heavy_hex_for_nodes, make_grid, make_heavy_hex, make_ring, CouplingGraph, GraphKind, QubitSelection};

struct Verdict {
    passed: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {msg}", if ok { "ok  " } else { "MISS" }));
    }
}

const EXACT_TOL: f64 = 1e-10;

fn exact(lo: f64, hi: f64) -> bool {
    (lo - 1.0).abs() < EXACT_TOL && (hi - 1.0).abs() < EXACT_TOL
}

fn exactness() -> Verdict {
    let mut v = Verdict::new();
    let graphs: [(&str, CouplingGraph); 3] =
        [("grid", make_grid(3, 3).unwrap()), ("ring", make_ring(8).unwrap()), ("heavy_hex", make_heavy_hex(1, 1).unwrap())];
    for (name, g) in &graphs {
        for method in Method::ALL {
            let mut worst: f64 = 1.0;
            let mut count = 0;
            for n in 2usize..=8 {
                for (k, l) in [(2, 1), (n.div_ceil(2).max(2), 3), (n, 1)] {
                    for seed in 0..3 {
                        let req = SynthRequest { graph: g, n, k, l, method, restarts: 2, seed };
                        let (c, _, _) = randomized_search(&req).unwrap();
                        let (lo, hi) = overlap_range(&c, &Faults::default());
                        if !exact(lo, hi) {
                            worst = worst.min(lo);
                        }
                        count += 1;
                    }
                }
            }
            v.check(worst == 1.0, format!("{name} {method}: {count} circuits, every branch overlap 1 (worst {worst})"));
        }
    }
    v
}

/// Rows of a 3-row grid grouped by column blocks, three links per boundary.
fn column_groups(cols: usize, blocks: &[std::ops::Range<usize>]) -> (DynamicCircuit, GroupPlan) {
    let g = make_grid(3, cols).unwrap();
    let sel = QubitSelection { nodes: (0..3 * cols).collect(), start: 0 };
    let groups: Vec<Vec<usize>> = blocks.iter().map(|r| (0..3 * cols).filter(|u| r.contains(&(u % cols))).collect()).collect();
    let plan = plan_links(&groups, &g, 0, 3, 0).unwrap();
    (synth_group_mv(&g, &sel, &plan).unwrap(), plan)
}

fn boundary_bits(c: &DynamicCircuit, plan: &GroupPlan) -> Vec<Vec<usize>> {
    plan.tree
        .iter()
        .map(|e| {
            e.links
                .iter()
                .map(|&(_, child)| {
                    let q = c.index_of(child).unwrap();
                    c.ops
                        .iter()
                        .find_map(|op| match op {
                            Op::Measure { qubit, clbit } if *qubit == q => Some(*clbit),
                            _ => None,
                        })
                        .unwrap()
                })
                .collect()
        })
        .collect()
}

/// Tableau state is orthogonal to GHZ_n: some GHZ stabilizer generator has
/// expectation exactly -1.
fn orthogonal_to_ghz(t: &Tableau) -> bool {
    let n = t.num_qubits();
    let none = vec![false; n];
    t.pauli_expectation(&vec![true; n], &none, false) == -1
        || (0..n - 1).any(|i| {
            let mut z = none.clone();
            z[i] = true;
            z[i + 1] = true;
            t.pauli_expectation(&none, &z, false) == -1
        })
}

/// (every branch exact GHZ, every branch orthogonal to GHZ). Small circuits
/// enumerate all branches densely; larger ones sample 64 random branches on
/// the tableau.
fn branch_verdict(c: &DynamicCircuit, faults: &Faults, rng: &mut impl Rng) -> (bool, bool) {
    if c.num_qubits <= 12 {
        let (lo, hi) = overlap_range(c, faults);
        return (exact(lo, hi), hi < EXACT_TOL);
    }
    let (mut all_exact, mut all_orth) = (true, true);
    for _ in 0..64 {
        let t = final_tableau(c, faults, |_| rng.random::<bool>());
        all_exact &= is_exact_ghz(&t);
        all_orth &= orthogonal_to_ghz(&t);
    }
    (all_exact, all_orth)
}

fn majority_vote() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = groupmv::seed::rng(3);
    // the three-group chain needs 18 qubits so every child keeps unmeasured
    // qubits; that is past the dense limit
    for (cols, blocks) in [(3, vec![0..1, 1..3]), (6, vec![0..1, 1..3, 3..6])] {
        let (c, plan) = column_groups(cols, &blocks);
        let how = if c.num_qubits <= 12 { "dense, all branches" } else { "tableau, 64 sampled branches" };
        let bits = boundary_bits(&c, &plan);
        v.check(bits.iter().all(|b| b.len() == 3), format!("{} groups ({} qubits): every boundary l_eff = 3", blocks.len(), c.num_qubits));
        // one flip on each boundary at once
        let mut combos: Vec<Vec<usize>> = vec![vec![]];
        for b in &bits {
            combos = combos.iter().flat_map(|pre| b.iter().map(move |&x| [pre.clone(), vec![x]].concat())).collect();
        }
        let single_ok = combos.iter().all(|f| branch_verdict(&c, &Faults::flip(f.iter().copied()), &mut rng).0);
        v.check(single_ok, format!("{} groups: {} single-flip-per-boundary patterns exact GHZ ({how})", blocks.len(), combos.len()));
        let mut doubles = 0;
        let mut double_ok = true;
        for b in &bits {
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    double_ok &= branch_verdict(&c, &Faults::flip([b[i], b[j]]), &mut rng).1;
                    doubles += 1;
                }
            }
        }
        v.check(double_ok, format!("{} groups: {doubles} double flips, overlap 0 with GHZ ({how})", blocks.len()));
    }
    v
}

fn corrupted_witness() -> Verdict {
    let mut v = Verdict::new();
    let nm = NoiseModel::noiseless();
    let cases: [(&str, CouplingGraph, usize, usize); 3] = [
        ("grid", make_grid(2, 4).unwrap(), 8, 4),
        ("heavy_hex", heavy_hex_for_nodes(30).unwrap(), 30, 15),
        ("grid", make_grid(5, 8).unwrap(), 40, 20),
    ];
    for (name, g, n, k) in cases {
        let req = SynthRequest { graph: &g, n, k, l: 1, method: Method::GroupMV, restarts: 1, seed: 3 };
        let (c, _, _) = randomized_search(&req).unwrap();
        let run = |basis| run_shots_with(&c, &nm, &FinalLayer::uniform(n, basis), basis, &Faults::flip([0]), 10_000, 11, SimOptions::default());
        let w = estimate_witness(&run(Basis::Z), &run(Basis::X), &nm, true).unwrap();
        v.check(
            c.num_clbits == 1 && (w.w - 0.5).abs() <= 0.02,
            format!("{name} N={n}: flipped fusion bit, w = {:.4} (p0 {:.3}, p1 {:.3}, <X> {:.3})", w.w, w.p0, w.p1, w.x_expect),
        );
    }
    v
}

fn cfg(text: &str) -> groupmv::experiment::ExperimentConfig {
    parse_config(text, Path::new(".")).unwrap()
}

fn noiseless_sweep() -> Verdict {
    let mut v = Verdict::new();
    let t0 = Instant::now();
    let c = cfg("topologies = heavy_hex, grid\nn_values = 30, 60\nk = 20\nl_values = 1, 3\nshots = 10000\nrepetitions = 2\nrestarts = 4\nmaster_seed = 1\n[fidelity]\nenabled = true\nn_values = 30\nelements = 100\nshots_per_element = 128\n");
    for r in run_sweep(&c).unwrap().rows() {
        let w = r.w_mean.unwrap_or(f64::NAN);
        let mut ok = r.error.is_none() && (w - 1.0).abs() <= 0.02;
        let mut msg = format!("{} N={} {}: w = {w:.4}", r.topology, r.n, series(&r));
        if r.n == 30 {
            let f = r.f_mean.unwrap_or(f64::NAN);
            ok &= (f - 1.0).abs() <= 0.02;
            msg.push_str(&format!(", f = {f:.4}"));
        }
        v.check(ok, msg);
    }
    let secs = t0.elapsed().as_secs_f64();
    v.check(secs < 60.0, format!("wall time {secs:.1} s"));
    v
}

fn series(r: &ResultRow) -> String {
    match (r.method, r.l_requested) {
        (Method::GroupMV, Some(l)) => format!("group_mv L={l}"),
        (m, _) => m.to_string(),
    }
}

const REFERENCE_SWEEP: &str = "
topologies = heavy_hex, grid
n_values = 30, 40, 50, 60
k = 20
l_values = 1, 3
shots = 10000
repetitions = 10
restarts = 8
master_seed = 2024
[noise]
p_1q = 0.0001
p_2q = 0.0001
p_ro = 0.05
";

fn lookup<'a>(rows: &'a [ResultRow], topo: &str, n: usize, method: Method, l: Option<usize>) -> &'a ResultRow {
    rows.iter()
        .find(|r| r.topology == topo && r.n == n && r.method == method && (method != Method::GroupMV || r.l_requested == l))
        .unwrap_or_else(|| panic!("no row {topo} {n} {method} {l:?}"))
}

fn witness_scaling() -> Verdict {
    let mut v = Verdict::new();
    let t0 = Instant::now();
    let rows = run_sweep(&cfg(REFERENCE_SWEEP)).unwrap().rows();
    for r in &rows {
        assert!(r.error.is_none(), "{r:?}");
    }
    let w = |topo: &str, n, m, l| lookup(&rows, topo, n, m, l).w_mean.unwrap();
    for topo in ["heavy_hex", "grid"] {
        for n in [30, 40, 50, 60] {
            let (u, ld, l1, l3) = (
                w(topo, n, Method::Unitary, None),
                w(topo, n, Method::LineDynamic, None),
                w(topo, n, Method::GroupMV, Some(1)),
                w(topo, n, Method::GroupMV, Some(3)),
            );
            let eff = lookup(&rows, topo, n, Method::GroupMV, Some(3)).min_l_eff.unwrap_or(0);
            v.lines.push(format!(
                "     {topo} N={n}: unitary {u:.3}  line_dynamic {ld:.3}  group_mv L=1 {l1:.3}  L=3 {l3:.3} (l_eff {eff})"
            ));
            if n >= 40 {
                v.check(l3 >= l1 && l1 >= ld, format!("(a) {topo} N={n}: L3 {l3:.3} >= L1 {l1:.3} >= LD {ld:.3}"));
            }
            v.check((l3 - u).abs() <= 0.03, format!("(b) {topo} N={n}: |L3 - unitary| = {:.3}", (l3 - u).abs()));
        }
    }
    let reference = [
        ("heavy_hex", 30, Some(3), 0.45),
        ("heavy_hex", 50, Some(1), 0.26),
        ("heavy_hex", 50, Some(3), 0.29),
        ("grid", 60, Some(1), 0.18),
        ("grid", 60, Some(3), 0.20),
        ("heavy_hex", 60, Some(3), 0.20),
    ];
    for (topo, n, l, want) in reference {
        let got = w(topo, n, Method::GroupMV, l);
        v.check((got - want).abs() <= 0.07, format!("(c) {topo} N={n} group_mv L={}: {got:.3} vs {want:.2}", l.unwrap()));
    }
    v.lines.push(format!("     wall time {:.0} s", t0.elapsed().as_secs_f64()));
    v
}

fn fidelity() -> Verdict {
    let mut v = Verdict::new();
    let t0 = Instant::now();
    let text = REFERENCE_SWEEP.replace("topologies = heavy_hex, grid", "topologies = heavy_hex").replace("n_values = 30, 40, 50, 60", "n_values = 30")
        + "[fidelity]\nenabled = true\nelements = 200\nshots_per_element = 256\nmitigation = full\n";
    let rows = run_sweep(&cfg(&text)).unwrap().rows();
    let f = |m, l| lookup(&rows, "heavy_hex", 30, m, l).clone();
    let (u, ld, l3) = (f(Method::Unitary, None), f(Method::LineDynamic, None), f(Method::GroupMV, Some(3)));
    let (fu, fld, fl3) = (u.f_mean.unwrap(), ld.f_mean.unwrap(), l3.f_mean.unwrap());
    v.lines.push(format!(
        "     heavy_hex N=30: unitary {fu:.3} ± {:.3}  line_dynamic {fld:.3} ± {:.3}  group_mv L=3 {fl3:.3} ± {:.3} (std over reps)",
        u.f_std.unwrap(),
        ld.f_std.unwrap(),
        l3.f_std.unwrap()
    ));
    v.check(fl3 / fld >= 2.0, format!("ratio L3 / LD = {:.2}", fl3 / fld));
    v.check(fl3 >= fu, format!("L3 {fl3:.3} >= unitary {fu:.3}"));
    v.check((fl3 - 0.119).abs() <= 0.04, format!("L3 {fl3:.3} vs 0.119"));
    v.check((fld - 0.049).abs() <= 0.04, format!("LD {fld:.3} vs 0.049"));
    v.check((fu - 0.093).abs() <= 0.04, format!("unitary {fu:.3} vs 0.093"));
    // for comparison only: the same estimator without final-readout mitigation
    let raw_rows = run_sweep(&cfg(&text.replace("mitigation = full", "mitigation = none"))).unwrap().rows();
    let raw = |m, l| lookup(&raw_rows, "heavy_hex", 30, m, l).f_mean.unwrap();
    v.lines.push(format!(
        "     info, unmitigated estimator: unitary {:.3}  line_dynamic {:.3}  group_mv L=3 {:.3}",
        raw(Method::Unitary, None),
        raw(Method::LineDynamic, None),
        raw(Method::GroupMV, Some(3))
    ));
    v.lines.push(format!("     wall time {:.0} s", t0.elapsed().as_secs_f64()));
    v
}

/// Random circuits whose joint outcome distribution has at most
/// `MAX_SUPPORT` outcomes; beyond that the sampling noise of the total
/// variation distance at 1e5 shots approaches the 0.02 threshold itself.
const MAX_SUPPORT: usize = 64;

fn oracle_equivalence() -> Verdict {
    let mut v = Verdict::new();
    let mut rng = groupmv::seed::rng(2024);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut sizes = BTreeMap::new();
    while done < 50 {
        let n = 2 + done % 7;
        let c = random_circuit(n, 16 + 2 * n, &mut rng);
        let exact = outcome_distribution(&c).unwrap();
        if exact.len() > MAX_SUPPORT {
            continue;
        }
        *sizes.entry(n).or_insert(0) += 1;
        for engine in [Engine::Tableau, Engine::Frame] {
            let recs = run_shots_with(
                &c,
                &NoiseModel::noiseless(),
                &FinalLayer::uniform(n, Basis::Z),
                Basis::Z,
                &Faults::default(),
                100_000,
                done as u64,
                SimOptions { check_invariants: engine == Engine::Tableau, engine },
            );
            let d = tvd(&exact, &empirical(&recs));
            worst = worst.max(d);
            if d >= 0.02 {
                v.check(false, format!("circuit {done} (n={n}, {} outcomes, {engine:?}): tvd {d:.4}", exact.len()));
            }
        }
        done += 1;
    }
    v.check(worst < 0.02, format!("50 circuits {sizes:?} (qubits: count), max tvd {worst:.4} over both engines, invariant checked after every op"));
    v
}

fn scalability() -> Verdict {
    let mut v = Verdict::new();
    let t0 = Instant::now();
    let d = run_partition_demo(&TopologySpec::Auto(GraphKind::HeavyHex), 1000, 125, 3, 32, 0).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let g = heavy_hex_for_nodes(1000).unwrap();
    let connected = d.plan.groups.iter().all(|grp| g.is_connected_subset(grp));
    let l_effs: Vec<usize> = d.plan.tree.iter().map(|e| e.l_eff()).collect();
    v.check(d.node_count >= 1000, format!("lattice {} with {} nodes", d.topology, d.node_count));
    v.check(d.plan.groups.len() == 8 && connected, format!("{} connected groups, sizes {:?}", d.plan.groups.len(), d.group_sizes()));
    v.check(l_effs.iter().all(|&l| l == 3), format!("boundary l_eff {l_effs:?} after {} attempt(s)", d.attempts));
    v.check(secs < 10.0, format!("wall time {secs:.2} s"));
    v
}

fn degradation() -> Verdict {
    let mut v = Verdict::new();
    let g = make_ring(40).unwrap();
    let req = SynthRequest { graph: &g, n: 40, k: 20, l: 3, method: Method::GroupMV, restarts: 8, seed: 0 };
    let (_, plan, stats) = randomized_search(&req).unwrap();
    v.check(plan.degraded() && stats.degraded && plan.min_l_eff() == Some(1), format!("plan degraded, l_eff {:?}", plan.min_l_eff()));
    let rows = run_sweep(&cfg("topologies = ring(40)\nn_values = 40\nk = 20\nl_values = 3\nmethods = group_mv\nshots = 10000\nrepetitions = 2\n"))
        .unwrap()
        .rows();
    let r = &rows[0];
    v.check(
        r.error.is_none() && r.degraded && r.min_l_eff == Some(1) && r.w_mean.unwrap() > 0.5,
        format!("sweep row degraded={} min_l_eff={:?} w = {:.4}", r.degraded, r.min_l_eff, r.w_mean.unwrap_or(f64::NAN)),
    );
    v
}

/// Expected GHZ_n counts after independent bit flips with probability `p`.
fn flipped_ghz_counts(n: usize, p: f64, x_basis: bool, shots: f64) -> BTreeMap<BitString, u64> {
    let mut out = BTreeMap::new();
    for s in 0..1u32 << n {
        let bits: Vec<bool> = (0..n).map(|i| s >> i & 1 == 1).collect();
        let ideal = |t: u32| -> f64 {
            if x_basis {
                if t.count_ones().is_multiple_of(2) { 1.0 / f64::from(1u32 << (n - 1)) } else { 0.0 }
            } else if t == 0 || t == (1 << n) - 1 {
                0.5
            } else {
                0.0
            }
        };
        let prob: f64 = (0..1u32 << n)
            .map(|t| {
                let d = (s ^ t).count_ones() as i32;
                ideal(t) * p.powi(d) * (1.0 - p).powi(n as i32 - d)
            })
            .sum();
        let c = (prob * shots).round() as u64;
        if c > 0 {
            out.insert(BitString::from_bools(&bits), c);
        }
    }
    out
}

fn ghz_stats(z: &QuasiDist, x: &QuasiDist) -> (f64, f64, f64) {
    (z.mass(|b| b.all_zero()), z.mass(|b| b.all_one()), x.parity_expectation(None))
}

fn mitigation() -> Verdict {
    let mut v = Verdict::new();
    let p = 0.05;
    for n in [4, 8, 10] {
        let z = mitigate_readout(&flipped_ghz_counts(n, p, false, 1e5), p).unwrap();
        let x = mitigate_readout(&flipped_ghz_counts(n, p, true, 1e5), p).unwrap();
        let (p0, p1, xe) = ghz_stats(&z, &x);
        let ok = (p0 - 0.5).abs() <= 0.01 && (p1 - 0.5).abs() <= 0.01 && (xe - 1.0).abs() <= 0.01;
        v.check(ok, format!("expected counts, N={n}: p0 {p0:.4} p1 {p1:.4} <X> {xe:.4}"));
    }
    let nm = NoiseModel::new(0.0, 0.0, p).unwrap();
    for n in [4, 8] {
        let g = make_grid(1, n).unwrap();
        let c = synth_ghz_tree(&g, &(0..n).collect::<Vec<_>>(), 0).unwrap();
        let w = estimate_witness(&run_shots(&c, &nm, Basis::Z, 100_000, 1), &run_shots(&c, &nm, Basis::X, 100_000, 2), &nm, true).unwrap();
        let ok = (w.p0 - 0.5).abs() <= 0.01 && (w.p1 - 0.5).abs() <= 0.01 && (w.x_expect - 1.0).abs() <= 0.01;
        v.check(ok, format!("sampled 1e5 shots, N={n}: p0 {:.4} p1 {:.4} <X> {:.4}", w.p0, w.p1, w.x_expect));
    }
    v
}

type Criterion = fn() -> Verdict;

fn main() {
    let criteria: [(u32, &str, Criterion); 10] = [
        (1, "exactness over all outcome branches", exactness),
        (2, "majority-vote tolerance", majority_vote),
        (3, "corrupted-state witness", corrupted_witness),
        (4, "noiseless sweep", noiseless_sweep),
        (5, "reference values: witness scaling", witness_scaling),
        (6, "reference values: fidelity", fidelity),
        (7, "simulator oracle equivalence", oracle_equivalence),
        (8, "scalability", scalability),
        (9, "degradation", degradation),
        (10, "mitigation correctness", mitigation),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut summary = Vec::new();
    for (id, name, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let v = f();
        for l in &v.lines {
            println!("  [{id}] {l}");
        }
        let line = format!("criterion {id:>2} {}: {name} ({:.1} s)", if v.passed { "PASS" } else { "FAIL" }, t0.elapsed().as_secs_f64());
        println!("{line}");
        summary.push((v.passed, line));
    }
    println!("\nacceptance summary");
    for (_, l) in &summary {
        println!("{l}");
    }
    let failed = summary.iter().filter(|(ok, _)| !ok).count();
    println!("{} of {} criteria passed", summary.len() - failed, summary.len());
    // failures are reported above; set ACCEPTANCE_STRICT=1 to also fail the
    // test run on them
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
