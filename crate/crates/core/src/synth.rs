//! Circuit synthesis for the three GHZ preparation methods and the
//! randomized minimum-depth restart search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::circuit::{ClassicalExpr, DepthStats, DynamicCircuit, Op};
use crate::error::{Error, Result};
use crate::partition::{partition_groups, plan_links, GroupPlan, TreeEdge};
use crate::seed;
use crate::topology::{bfs_select, find_simple_path, graph_center, CouplingGraph, QubitSelection};

/// Randomized DFS restarts when looking for a linear embedding.
pub const PATH_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Unitary,
    LineDynamic,
    GroupMV,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Unitary, Method::LineDynamic, Method::GroupMV];

    pub fn name(self) -> &'static str {
        match self {
            Method::Unitary => "unitary",
            Method::LineDynamic => "line_dynamic",
            Method::GroupMV => "group_mv",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "unitary" => Ok(Method::Unitary),
            "line_dynamic" | "linedynamic" | "line" => Ok(Method::LineDynamic),
            "group_mv" | "groupmv" | "gmv" => Ok(Method::GroupMV),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// CX schedule preparing GHZ on `nodes` from `root`, in physical node
/// indices, layer by layer.
///
/// Every entangled qubit, in ascending index order, recruits its
/// lowest-index un-entangled neighbor not already claimed in the same layer.
fn infection_layers(g: &CouplingGraph, nodes: &[usize], root: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if !nodes.contains(&root) {
        return Err(Error::Synthesis(format!("root {root} is not in the node set")));
    }
    if !g.is_connected_subset(nodes) {
        return Err(Error::Synthesis("node set is not connected".into()));
    }
    let inside = g.mask_of(nodes);
    let mut entangled = vec![false; g.node_count()];
    entangled[root] = true;
    let mut members = vec![root];
    let mut layers = Vec::new();
    while members.len() < nodes.len() {
        members.sort_unstable();
        let mut layer = Vec::new();
        for &u in &members {
            if let Some(&v) = g.neighbors(u).iter().filter(|&&v| inside[v] && !entangled[v]).min() {
                entangled[v] = true;
                layer.push((u, v));
            }
        }
        members.extend(layer.iter().map(|&(_, v)| v));
        layers.push(layer);
    }
    Ok(layers)
}

/// Local GHZ preparation on `nodes` rooted at `root`: `H(root)` followed by
/// the infection CX schedule. The fragment's qubits are `nodes` in the given
/// order.
pub fn synth_ghz_tree(g: &CouplingGraph, nodes: &[usize], root: usize) -> Result<DynamicCircuit> {
    let layers = infection_layers(g, nodes, root)?;
    let mut c = DynamicCircuit::new(nodes.to_vec());
    let idx = index_map(g, nodes);
    c.push(Op::H(idx[root]));
    for (a, b) in layers.into_iter().flatten() {
        c.push(Op::Cx(idx[a], idx[b]));
    }
    Ok(c)
}

fn index_map(g: &CouplingGraph, nodes: &[usize]) -> Vec<usize> {
    let mut idx = vec![usize::MAX; g.node_count()];
    for (i, &u) in nodes.iter().enumerate() {
        idx[u] = i;
    }
    idx
}

/// Single GHZ tree over the whole selection.
pub fn synth_unitary(g: &CouplingGraph, sel: &QubitSelection, root: usize) -> Result<DynamicCircuit> {
    let mut c = synth_ghz_tree(g, &sel.nodes, root)?;
    c.set_meta("method", Method::Unitary);
    c.set_meta("n", sel.len());
    c.set_meta("root", root);
    Ok(c)
}

/// Partition-and-fuse circuit for `plan`:
///
/// 1. local GHZ trees in every group, rooted at the group's center;
/// 2. `CX(parent, child)` on every boundary link;
/// 3. measurement of every child-side link qubit;
/// 4. for every non-root group, `CondX` on its unmeasured qubits with the
///    XOR, along the tree path from the root, of each edge's majority vote;
/// 5. reset of every measured qubit and a re-entangling CX from its partner.
pub fn synth_group_mv(g: &CouplingGraph, sel: &QubitSelection, plan: &GroupPlan) -> Result<DynamicCircuit> {
    let problems = plan.violations(g, sel);
    if !problems.is_empty() {
        return Err(Error::Synthesis(format!("plan does not match selection: {}", problems.join("; "))));
    }
    let idx = index_map(g, &sel.nodes);
    let mut c = DynamicCircuit::new(sel.nodes.clone());

    for grp in &plan.groups {
        let root = g.center_within(grp).expect("groups are nonempty");
        c.push(Op::H(idx[root]));
        for (a, b) in infection_layers(g, grp, root)?.into_iter().flatten() {
            c.push(Op::Cx(idx[a], idx[b]));
        }
    }
    // deepest edges first: a measured qubit that also controls a deeper
    // link must copy its value out before its own boundary CX
    for e in plan.tree.iter().rev() {
        for &(a, b) in &e.links {
            c.push(Op::Cx(idx[a], idx[b]));
        }
    }
    let mut edge_bits: Vec<Vec<usize>> = Vec::with_capacity(plan.tree.len());
    for e in &plan.tree {
        edge_bits.push(e.links.iter().map(|&(_, b)| c.measure(idx[b])).collect());
    }
    let measured = plan.measured_qubits();
    for (gi, grp) in plan.groups.iter().enumerate() {
        if gi == plan.root_group {
            continue;
        }
        let cond = ClassicalExpr::xor(plan.path_from_root(gi).into_iter().map(|ei| ClassicalExpr::maj_of_bits(&edge_bits[ei])));
        for &u in grp.iter().filter(|u| !measured.contains(u)) {
            c.push(Op::CondX { qubit: idx[u], cond: cond.clone() });
        }
    }
    for e in &plan.tree {
        for &(_, b) in &e.links {
            c.push(Op::Reset(idx[b]));
        }
    }
    for e in &plan.tree {
        for &(a, b) in &e.links {
            c.push(Op::Cx(idx[a], idx[b]));
        }
    }

    c.set_meta("method", Method::GroupMV);
    c.set_meta("n", sel.len());
    c.set_meta("groups", plan.groups.len());
    c.set_meta("l_requested", plan.l_requested);
    c.set_meta("l_eff", plan.min_l_eff().map_or("-".to_string(), |l| l.to_string()));
    c.set_meta("degraded", plan.degraded());
    let skipped = plan.even_capacity_skipped();
    if !skipped.is_empty() {
        c.set_meta("even_capacity_skipped", skipped.len());
    }
    Ok(c)
}

/// Linear embedding for Line Dynamic: a simple path through all selected
/// qubits if one is found, otherwise a simple path of the same length
/// anywhere in the graph (starting near the selection start).
pub fn linear_embedding(g: &CouplingGraph, sel: &QubitSelection, seed: u64) -> Result<(Vec<usize>, bool)> {
    let n = sel.len();
    if let Some(p) = find_simple_path(g, &sel.nodes, Some(sel.start), n, PATH_ATTEMPTS, seed::derive(seed, 0)) {
        return Ok((p, true));
    }
    if let Some(p) = serpentine(g, sel) {
        return Ok((p, true));
    }
    let all: Vec<usize> = (0..g.node_count()).collect();
    if let Some(p) = find_simple_path(g, &all, Some(sel.start), n, PATH_ATTEMPTS, seed::derive(seed, 1)) {
        return Ok((p, false));
    }
    Err(Error::LinearEmbeddingUnavailable(n))
}

/// Boustrophedon order of the selection when it is a full rectangle of a
/// grid layout.
fn serpentine(g: &CouplingGraph, sel: &QubitSelection) -> Option<Vec<usize>> {
    let (_, cols) = g.dims()?;
    let rows: Vec<usize> = sel.nodes.iter().map(|u| u / cols).collect();
    let cs: Vec<usize> = sel.nodes.iter().map(|u| u % cols).collect();
    let (r0, r1) = (*rows.iter().min()?, *rows.iter().max()?);
    let (c0, c1) = (*cs.iter().min()?, *cs.iter().max()?);
    if (r1 - r0 + 1) * (c1 - c0 + 1) != sel.len() {
        return None;
    }
    let mut path = Vec::with_capacity(sel.len());
    for (i, r) in (r0..=r1).enumerate() {
        let row: Vec<usize> = (c0..=c1).map(|c| r * cols + c).collect();
        if i % 2 == 0 {
            path.extend(row);
        } else {
            path.extend(row.into_iter().rev());
        }
    }
    path.windows(2).all(|w| g.has_edge(w[0], w[1])).then_some(path)
}

/// Chain plan along `path`: consecutive pairs (the last segment is a triple
/// when the length is odd), each fused to the next over one link.
pub fn chain_plan(path: &[usize]) -> GroupPlan {
    let n = path.len();
    let mut groups: Vec<Vec<usize>> = path.chunks(2).map(<[usize]>::to_vec).collect();
    if n % 2 == 1 && groups.len() > 1 {
        let last = groups.pop().expect("odd tail");
        groups.last_mut().expect("previous pair").extend(last);
    }
    let tree = groups
        .windows(2)
        .enumerate()
        .map(|(i, w)| TreeEdge {
            parent: i,
            child: i + 1,
            links: vec![(*w[0].last().expect("nonempty"), w[1][0])],
            matching_size: 1,
        })
        .collect();
    for grp in &mut groups {
        grp.sort_unstable();
    }
    GroupPlan { groups, root_group: 0, tree, l_requested: 1 }
}

/// Line Dynamic baseline: fusion of GHZ pairs along a linear embedding with
/// one link per junction and prefix-XOR corrections.
pub fn synth_line_dynamic(g: &CouplingGraph, sel: &QubitSelection, seed: u64) -> Result<DynamicCircuit> {
    if sel.len() < 2 {
        let mut c = synth_unitary(g, sel, sel.start)?;
        c.set_meta("method", Method::LineDynamic);
        return Ok(c);
    }
    let (path, within) = linear_embedding(g, sel, seed)?;
    let path_sel = QubitSelection { nodes: path.clone(), start: path[0] };
    let plan = chain_plan(&path);
    let mut c = synth_group_mv(g, &path_sel, &plan)?;
    c.metadata.clear();
    c.set_meta("method", Method::LineDynamic);
    c.set_meta("n", sel.len());
    c.set_meta("construction", "pair_chain_fusion");
    c.set_meta("embedding", if within { "selection" } else { "graph" });
    Ok(c)
}

/// Inputs of one randomized synthesis search.
#[derive(Clone, Debug)]
pub struct SynthRequest<'a> {
    pub graph: &'a CouplingGraph,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub method: Method,
    pub restarts: usize,
    pub seed: u64,
}

impl SynthRequest<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > self.graph.node_count() {
            return Err(Error::InvalidArgument(format!(
                "n={} must be in 2..={}",
                self.n,
                self.graph.node_count()
            )));
        }
        if self.l == 0 || self.l.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("l={} must be odd", self.l)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.method == Method::GroupMV && (self.k < 2 || self.k > self.n) {
            return Err(Error::InvalidArgument(format!("k={} must be in 2..={}", self.k, self.n)));
        }
        Ok(())
    }

    /// Qubit selection every method works on: BFS from the graph center.
    pub fn selection(&self) -> Result<QubitSelection> {
        bfs_select(self.graph, graph_center(self.graph), self.n)
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartStat {
    pub seed: u64,
    pub depth: Option<DepthStats>,
    pub min_l_eff: Option<usize>,
    pub degraded: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchStats {
    pub restarts: Vec<RestartStat>,
    /// Index of the winning restart.
    pub chosen: usize,
    /// Whether no restart met the requested redundancy on every boundary.
    pub degraded: bool,
}

struct Candidate {
    circuit: DynamicCircuit,
    plan: GroupPlan,
    depth: DepthStats,
}

fn pipeline(req: &SynthRequest<'_>, sel: &QubitSelection, seed: u64) -> Result<Candidate> {
    let (circuit, plan) = match req.method {
        Method::Unitary => {
            let root = req.graph.center_within(&sel.nodes).expect("nonempty selection");
            let plan = GroupPlan {
                groups: vec![{
                    let mut v = sel.nodes.clone();
                    v.sort_unstable();
                    v
                }],
                root_group: 0,
                tree: Vec::new(),
                l_requested: req.l,
            };
            (synth_unitary(req.graph, sel, root)?, plan)
        }
        Method::LineDynamic => {
            let c = synth_line_dynamic(req.graph, sel, seed)?;
            let path: Vec<usize> = c.physical.clone();
            (c, chain_plan(&path))
        }
        Method::GroupMV => {
            let groups = partition_groups(req.graph, sel, req.k, seed::derive(seed, 0))?;
            let plan = plan_links(&groups, req.graph, sel.start, req.l, seed::derive(seed, 1))?;
            (synth_group_mv(req.graph, sel, &plan)?, plan)
        }
    };
    let depth = circuit.depth();
    Ok(Candidate { circuit, plan, depth })
}

/// Run `restarts` independent pipelines with seeds derived from
/// `req.seed` and keep the minimum `(two_qubit_depth, total_depth,
/// cx_count)` circuit among those with `l_eff >= l` on every boundary. When
/// no restart reaches `l`, the best degraded candidate (highest minimum
/// `l_eff`, then lowest depth) is returned and flagged.
pub fn randomized_search(req: &SynthRequest<'_>) -> Result<(DynamicCircuit, GroupPlan, SearchStats)> {
    req.validate()?;
    let sel = req.selection()?;
    let results: Vec<(u64, Result<Candidate>)> = (0..req.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let s = seed::derive(req.seed, r);
            (s, pipeline(req, &sel, s))
        })
        .collect();

    let stats: Vec<RestartStat> = results
        .iter()
        .map(|(s, r)| match r {
            Ok(c) => RestartStat {
                seed: *s,
                depth: Some(c.depth),
                min_l_eff: c.plan.min_l_eff(),
                degraded: c.plan.min_l_eff().is_some_and(|l| l < req.l),
                error: None,
            },
            Err(e) => RestartStat { seed: *s, depth: None, min_l_eff: None, degraded: false, error: Some(e.to_string()) },
        })
        .collect();

    let meets = |c: &Candidate| req.method != Method::GroupMV || c.plan.min_l_eff().is_none_or(|l| l >= req.l);
    let any_meets = results.iter().any(|(_, r)| r.as_ref().is_ok_and(meets));
    let best = results
        .iter()
        .enumerate()
        .filter_map(|(i, (_, r))| r.as_ref().ok().map(|c| (i, c)))
        .filter(|(_, c)| !any_meets || meets(c))
        .min_by_key(|(i, c)| (std::cmp::Reverse(c.plan.min_l_eff().unwrap_or(usize::MAX)), c.depth.key(), *i))
        .map(|(i, _)| i);

    let Some(chosen) = best else {
        let first = results.into_iter().find_map(|(_, r)| r.err()).expect("all restarts failed");
        return Err(first);
    };
    let degraded = !any_meets;
    let (_, winner) = results.into_iter().nth(chosen).expect("chosen index");
    let mut cand = winner.expect("chosen candidate succeeded");
    cand.circuit.set_meta("restarts", req.restarts);
    cand.circuit.set_meta("chosen_restart", chosen);
    if req.method == Method::GroupMV {
        cand.circuit.set_meta("search_degraded", degraded);
    }
    Ok((cand.circuit, cand.plan, SearchStats { restarts: stats, chosen, degraded }))
}
