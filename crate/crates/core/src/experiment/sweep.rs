//! Sweep execution and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{ExperimentConfig, TopologySpec};
use super::plot::emit_plot;
use crate::analysis::{aggregate, estimate_fidelity, estimate_witness};
use crate::circuit::DynamicCircuit;
use crate::error::{Error, Result};
use crate::partition::GroupPlan;
use crate::seed;
use crate::sim::{run_shots_with, Basis, Faults, FinalLayer, ShotRecord, SimOptions};
use crate::synth::{randomized_search, Method, SearchStats, SynthRequest};

/// One (topology, N, method, L) combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    pub topology: TopologySpec,
    pub n: usize,
    pub method: Method,
    /// Requested redundancy; `None` for the unitary baseline.
    pub l: Option<usize>,
}

impl SweepPoint {
    /// File-name friendly identifier.
    pub fn label(&self) -> String {
        let topo: String = self
            .topology
            .to_string()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
            .collect();
        match self.l {
            Some(l) => format!("{topo}_n{}_{}_l{l}", self.n, self.method),
            None => format!("{topo}_n{}_{}", self.n, self.method),
        }
    }
}

/// Points in output order: topology, then N, then method, then L. Only
/// Group-MV is swept over L; Line Dynamic always uses one link per junction.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for topology in &cfg.topologies {
        for &n in &cfg.n_values {
            for &method in &cfg.methods {
                let ls: Vec<Option<usize>> = match method {
                    Method::Unitary => vec![None],
                    Method::LineDynamic => vec![Some(1)],
                    Method::GroupMV => cfg.l_values.iter().map(|&l| Some(l)).collect(),
                };
                for l in ls {
                    out.push(SweepPoint { topology: topology.clone(), n, method, l });
                }
            }
        }
    }
    out
}

/// Aggregated result of one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub topology: String,
    pub n: usize,
    pub method: Method,
    pub l_requested: Option<usize>,
    pub min_l_eff: Option<usize>,
    pub w_mean: Option<f64>,
    pub w_std: Option<f64>,
    /// Standard error of the mean over repetitions.
    pub w_sem: Option<f64>,
    pub f_mean: Option<f64>,
    pub f_std: Option<f64>,
    pub f_sem: Option<f64>,
    pub two_qubit_depth: Option<usize>,
    pub total_depth: Option<usize>,
    pub cx_count: Option<usize>,
    pub measure_count: Option<usize>,
    pub degraded: bool,
    pub seed: u64,
    pub error: Option<String>,
}

pub const CSV_HEADER: &str = "topology,n,method,l_requested,min_l_eff,w_mean,w_std,w_sem,f_mean,f_std,f_sem,two_qubit_depth,total_depth,cx_count,measure_count,degraded,seed,error";

/// Everything produced for one point.
#[derive(Clone, Debug)]
pub struct PointOutcome {
    pub point: SweepPoint,
    pub row: ResultRow,
    pub circuit: Option<DynamicCircuit>,
    pub plan: Option<GroupPlan>,
    pub search: Option<SearchStats>,
    /// `basis mid_bits final_bits` lines, repetition by repetition.
    pub raw_shots: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub outcomes: Vec<PointOutcome>,
}

impl SweepResult {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.outcomes.iter().map(|o| o.row.clone()).collect()
    }
}

/// Seed shared by every method at one (topology, N): shots and fidelity
/// elements are drawn from it, so methods are compared on common random
/// numbers.
fn scope_seed(cfg: &ExperimentConfig, p: &SweepPoint) -> u64 {
    seed::derive_label(cfg.master_seed, &format!("{}|{}", p.topology, p.n))
}

/// Synthesis seed. Independent of L, so requests that degrade to the same
/// redundancy explore the same candidates.
fn synth_seed(cfg: &ExperimentConfig, p: &SweepPoint) -> u64 {
    seed::derive_label(scope_seed(cfg, p), p.method.name())
}

fn empty_row(p: &SweepPoint, seed: u64) -> ResultRow {
    ResultRow {
        topology: p.topology.to_string(),
        n: p.n,
        method: p.method,
        l_requested: p.l,
        min_l_eff: None,
        w_mean: None,
        w_std: None,
        w_sem: None,
        f_mean: None,
        f_std: None,
        f_sem: None,
        two_qubit_depth: None,
        total_depth: None,
        cx_count: None,
        measure_count: None,
        degraded: false,
        seed,
        error: None,
    }
}

/// Run one point. Failures land in the row's `error` field.
pub fn run_point(cfg: &ExperimentConfig, p: &SweepPoint) -> PointOutcome {
    let sseed = synth_seed(cfg, p);
    let mut out = PointOutcome {
        point: p.clone(),
        row: empty_row(p, sseed),
        circuit: None,
        plan: None,
        search: None,
        raw_shots: Vec::new(),
    };
    if let Err(e) = fill_point(cfg, p, sseed, &mut out) {
        out.row.error = Some(e.to_string());
    }
    out
}

fn fill_point(cfg: &ExperimentConfig, p: &SweepPoint, sseed: u64, out: &mut PointOutcome) -> Result<()> {
    let g = p.topology.build(p.n)?;
    let req = SynthRequest {
        graph: &g,
        n: p.n,
        k: cfg.k.min(p.n),
        l: p.l.unwrap_or(1),
        method: p.method,
        restarts: cfg.restarts,
        seed: sseed,
    };
    let (circuit, plan, stats) = randomized_search(&req)?;
    let d = circuit.depth();
    let row = &mut out.row;
    row.two_qubit_depth = Some(d.two_qubit_depth);
    row.total_depth = Some(d.total_depth);
    row.cx_count = Some(d.cx_count);
    row.measure_count = Some(d.measure_count);
    row.min_l_eff = match p.method {
        Method::Unitary => None,
        _ => plan.min_l_eff(),
    };
    row.degraded = p.method == Method::GroupMV && stats.degraded;

    let scope = scope_seed(cfg, p);
    let n = circuit.num_qubits;
    let mut ws = Vec::with_capacity(cfg.repetitions);
    let mut fs = Vec::new();
    for rep in 0..cfg.repetitions as u64 {
        let batch = |basis: Basis, tag: u64| {
            run_shots_with(
                &circuit,
                &cfg.noise,
                &FinalLayer::uniform(n, basis),
                basis,
                &Faults::default(),
                cfg.shots,
                seed::derive_path(scope, &[rep, tag]),
                SimOptions::default(),
            )
        };
        let z = batch(Basis::Z, 0);
        let x = batch(Basis::X, 1);
        ws.push(estimate_witness(&z, &x, &cfg.noise, cfg.mitigate)?.w);
        if cfg.output.raw_shots {
            out.raw_shots.extend(z.iter().chain(&x).map(ShotRecord::to_line));
        }
        if cfg.fidelity_at(p.n) {
            let mode = if cfg.mitigate { cfg.fidelity.mitigation } else { crate::analysis::FidelityMitigation::None };
            let f = estimate_fidelity(
                &circuit,
                &cfg.noise,
                cfg.fidelity.elements,
                cfg.fidelity.shots_per_element,
                seed::derive_path(scope, &[rep, 2]),
                mode,
            )?;
            fs.push(f.f);
        }
    }
    let w = aggregate(&ws)?;
    row.w_mean = Some(w.mean);
    row.w_std = Some(w.std_dev);
    row.w_sem = Some(w.std_dev / (w.count as f64).sqrt());
    if !fs.is_empty() {
        let f = aggregate(&fs)?;
        row.f_mean = Some(f.mean);
        row.f_std = Some(f.std_dev);
        row.f_sem = Some(f.std_dev / (f.count as f64).sqrt());
    }
    out.circuit = Some(circuit);
    out.plan = Some(plan);
    out.search = Some(stats);
    Ok(())
}

/// Run every point of the sweep. Points may run concurrently; results come
/// back in point order and do not depend on scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let points = sweep_points(cfg);
    let outcomes = points.par_iter().map(|p| run_point(cfg, p)).collect();
    Ok(SweepResult { outcomes })
}

/// `x` with six significant digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return "nan".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // the exponent after rounding to six digits fixes the decimal count
    let sci = format!("{x:.5e}");
    let mag: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-4..15).contains(&mag) {
        let (m, e) = sci.split_once('e').expect("exponent");
        return format!("{}e{e}", trim_zeros(m));
    }
    let decimals = (5 - mag).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn opt_f(v: Option<f64>) -> String {
    v.map_or(String::new(), fmt_sig)
}

/// CSV text for `rows` (header first).
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let fields = [
            csv_field(&r.topology),
            r.n.to_string(),
            r.method.to_string(),
            opt(r.l_requested),
            opt(r.min_l_eff),
            opt_f(r.w_mean),
            opt_f(r.w_std),
            opt_f(r.w_sem),
            opt_f(r.f_mean),
            opt_f(r.f_std),
            opt_f(r.f_sem),
            opt(r.two_qubit_depth),
            opt(r.total_depth),
            opt(r.cx_count),
            opt(r.measure_count),
            r.degraded.to_string(),
            r.seed.to_string(),
            csv_field(r.error.as_deref().unwrap_or("")),
        ];
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    write(path, &csv_string(rows))
}

/// Per-restart synthesis statistics.
pub fn search_stats_csv(result: &SweepResult) -> String {
    let mut s = String::from("topology,n,method,l_requested,restart,seed,two_qubit_depth,total_depth,cx_count,min_l_eff,chosen,error\n");
    for o in &result.outcomes {
        let Some(stats) = &o.search else { continue };
        for (i, r) in stats.restarts.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&o.row.topology),
                o.row.n,
                o.row.method,
                opt(o.row.l_requested),
                i,
                r.seed,
                opt(r.depth.map(|d| d.two_qubit_depth)),
                opt(r.depth.map(|d| d.total_depth)),
                opt(r.depth.map(|d| d.cx_count)),
                opt(r.min_l_eff),
                i == stats.chosen,
                csv_field(r.error.as_deref().unwrap_or("")),
            );
        }
    }
    s
}

/// Write every output the config asks for; returns the files written.
pub fn write_outputs(cfg: &ExperimentConfig, result: &SweepResult) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    let mut written = Vec::new();
    let rows = result.rows();
    if cfg.output.csv {
        let p = dir.join("results.csv");
        emit_csv(&rows, &p)?;
        written.push(p);
        let p = dir.join("search_stats.csv");
        write(&p, &search_stats_csv(result))?;
        written.push(p);
    }
    if cfg.output.svg && !rows.is_empty() {
        written.extend(emit_plot(&rows, dir)?);
    }
    for o in &result.outcomes {
        let label = o.point.label();
        if cfg.output.dump_circuits {
            if let Some(c) = &o.circuit {
                let p = dir.join("circuits").join(format!("{label}.txt"));
                write(&p, &c.to_text())?;
                written.push(p);
            }
        }
        if cfg.output.dump_plans {
            if let Some(plan) = &o.plan {
                let p = dir.join("plans").join(format!("{label}.txt"));
                write(&p, &plan.to_text())?;
                written.push(p);
            }
        }
        if cfg.output.raw_shots && !o.raw_shots.is_empty() {
            let p = dir.join("raw").join(format!("{label}.txt"));
            write(&p, &(o.raw_shots.join("\n") + "\n"))?;
            written.push(p);
        }
    }
    Ok(written)
}
