//! Hardware coupling graphs and contiguous qubit selection.
//!
//! Generators cover the three lattices used in the experiments (heavy-hex,
//! square grid, ring). Arbitrary graphs enter through
//! [`CouplingGraph::from_edges`] or the edge-list text format
//! ([`CouplingGraph::to_edge_list`] / [`CouplingGraph::parse_edge_list`]).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphKind {
    HeavyHex,
    Grid,
    Ring,
    Custom,
}

impl GraphKind {
    pub fn name(self) -> &'static str {
        match self {
            GraphKind::HeavyHex => "heavy_hex",
            GraphKind::Grid => "grid",
            GraphKind::Ring => "ring",
            GraphKind::Custom => "custom",
        }
    }

    fn max_degree(self) -> Option<usize> {
        match self {
            GraphKind::HeavyHex => Some(3),
            GraphKind::Grid => Some(4),
            GraphKind::Ring => Some(2),
            GraphKind::Custom => None,
        }
    }
}

/// Undirected, connected hardware connectivity graph. Nodes are physical
/// qubits `0..node_count`, edges are native two-qubit couplers.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingGraph {
    kind: GraphKind,
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    layout: Option<Vec<(f64, f64)>>,
    dims: Option<(usize, usize)>,
}

impl CouplingGraph {
    /// Build a graph from an edge list, normalizing each pair to `(min, max)`.
    /// Rejects self-loops, duplicates, out-of-range indices, disconnected
    /// graphs and degree violations for the given kind.
    pub fn from_edges(kind: GraphKind, node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range 0..{node_count}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        if let Some(max) = kind.max_degree() {
            if let Some((node, list)) = adj.iter().enumerate().find(|(_, l)| l.len() > max) {
                return Err(Error::InvalidGraph(format!(
                    "node {node} has degree {} > {max} allowed for {}",
                    list.len(),
                    kind.name()
                )));
            }
        }
        if kind == GraphKind::Ring && adj.iter().any(|l| l.len() != 2) {
            return Err(Error::InvalidGraph("ring nodes must have degree 2".into()));
        }
        let g = CouplingGraph {
            kind,
            node_count,
            edges,
            adj,
            layout: None,
            dims: None,
        };
        let all: Vec<usize> = (0..node_count).collect();
        if !g.is_connected_subset(&all) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `u` in ascending index order.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count && self.adj[u].binary_search(&v).is_ok()
    }

    /// Per-node 2D coordinates, only used for plotting.
    pub fn layout(&self) -> Option<&[(f64, f64)]> {
        self.layout.as_deref()
    }

    /// Generator parameters: `(rows, cols)` for grids, `(cell_rows, cell_cols)`
    /// for heavy-hex, `(n, 1)` for rings.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    /// Short human-readable label such as `grid(5x8)`.
    pub fn label(&self) -> String {
        match (self.kind, self.dims) {
            (GraphKind::Ring, _) => format!("ring({})", self.node_count),
            (k, Some((a, b))) => format!("{}({a}x{b})", k.name()),
            (k, None) => format!("{}({})", k.name(), self.node_count),
        }
    }

    fn with_meta(mut self, layout: Vec<(f64, f64)>, dims: (usize, usize)) -> Self {
        self.layout = Some(layout);
        self.dims = Some(dims);
        self
    }

    /// BFS distances from `src` restricted to `mask` (all nodes when `None`).
    pub(crate) fn bfs_distances(&self, src: usize, mask: Option<&[bool]>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX && mask.is_none_or(|m| m[v]) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub(crate) fn mask_of(&self, nodes: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.node_count];
        for &u in nodes {
            mask[u] = true;
        }
        mask
    }

    /// Whether the subgraph induced by `nodes` is connected. The empty set
    /// counts as connected.
    pub fn is_connected_subset(&self, nodes: &[usize]) -> bool {
        self.components(nodes).len() <= 1
    }

    /// Connected components of the induced subgraph, each sorted, listed in
    /// order of their smallest member.
    pub fn components(&self, nodes: &[usize]) -> Vec<Vec<usize>> {
        let mask = self.mask_of(nodes);
        let mut seen = vec![false; self.node_count];
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if mask[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Eccentricity of `u` within the subgraph induced by `nodes`.
    pub fn eccentricity_within(&self, u: usize, nodes: &[usize]) -> usize {
        let mask = self.mask_of(nodes);
        let dist = self.bfs_distances(u, Some(&mask));
        nodes.iter().map(|&v| dist[v]).max().unwrap_or(0)
    }

    /// Node of minimum eccentricity within the induced subgraph on `nodes`,
    /// smallest index on ties.
    pub fn center_within(&self, nodes: &[usize]) -> Option<usize> {
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        sorted
            .into_iter()
            .map(|u| (self.eccentricity_within(u, nodes), u))
            .min()
            .map(|(_, u)| u)
    }

    /// Edge-list dump: header `nodes <count>`, then one `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("nodes {}\n", self.node_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parse the edge-list format written by [`Self::to_edge_list`]. The
    /// result has kind [`GraphKind::Custom`].
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let count = header
            .strip_prefix("nodes")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or(Error::Parse { line: hline, msg: format!("expected `nodes <count>`, got `{header}`") })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::Parse { line, msg: format!("expected `u v`, got `{l}`") }),
            }
        }
        CouplingGraph::from_edges(GraphKind::Custom, count, &edges)
    }
}

/// Square lattice; node index = `row * cols + col`.
pub fn make_grid(rows: usize, cols: usize) -> Result<CouplingGraph> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid {rows}x{cols} has no couplers (need rows, cols >= 1 and rows*cols >= 2)"
        )));
    }
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                edges.push((u, u + 1));
            }
            if r + 1 < rows {
                edges.push((u, u + cols));
            }
        }
    }
    let layout = (0..rows * cols).map(|u| ((u % cols) as f64, (u / cols) as f64)).collect();
    Ok(CouplingGraph::from_edges(GraphKind::Grid, rows * cols, &edges)?.with_meta(layout, (rows, cols)))
}

pub fn make_ring(n: usize) -> Result<CouplingGraph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("ring needs at least 3 nodes, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let layout = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            (a.cos(), a.sin())
        })
        .collect();
    Ok(CouplingGraph::from_edges(GraphKind::Ring, n, &edges)?.with_meta(layout, (n, 1)))
}

/// Heavy-hex lattice of `cell_rows x cell_cols` hexagonal cells.
///
/// The hexagons are laid out as a brick wall: cell `(r, c)` has corner qubits
/// at lattice rows `r` and `r + 1`, columns `2c + (r % 2) ..= 2c + (r % 2) + 2`,
/// with horizontal edges along each row and vertical edges at the two outer
/// columns. Every hexagon edge is then subdivided by one degree-2 qubit.
///
/// Numbering: all qubits get doubled coordinates (corner `(row, col)` sits at
/// `(x, y) = (2col, 2row)`, an edge qubit at the midpoint of its edge) and are
/// numbered in ascending `(y, x)` order, i.e. row-major reading order.
pub fn make_heavy_hex(cell_rows: usize, cell_cols: usize) -> Result<CouplingGraph> {
    if cell_rows == 0 || cell_cols == 0 {
        return Err(Error::InvalidArgument(format!("heavy-hex needs at least one cell, got {cell_rows}x{cell_cols}")));
    }
    let (points, links) = heavy_hex_points(cell_rows, cell_cols);
    let index: BTreeMap<(usize, usize), usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let edges: Vec<_> = links.iter().map(|(a, b)| (index[a], index[b])).collect();
    let layout = points.iter().map(|&(y, x)| (x as f64 / 2.0, y as f64 / 2.0)).collect();
    Ok(CouplingGraph::from_edges(GraphKind::HeavyHex, points.len(), &edges)?.with_meta(layout, (cell_rows, cell_cols)))
}

type Point = (usize, usize);

/// Doubled `(y, x)` coordinates of every heavy-hex qubit, sorted, plus the
/// qubit-level links.
fn heavy_hex_points(cell_rows: usize, cell_cols: usize) -> (BTreeSet<Point>, Vec<(Point, Point)>) {
    // corner edges in (row, col) lattice coordinates
    let mut corner_edges: BTreeSet<(Point, Point)> = BTreeSet::new();
    for r in 0..cell_rows {
        for c in 0..cell_cols {
            let x = 2 * c + (r % 2);
            for row in [r, r + 1] {
                corner_edges.insert(((row, x), (row, x + 1)));
                corner_edges.insert(((row, x + 1), (row, x + 2)));
            }
            corner_edges.insert(((r, x), (r + 1, x)));
            corner_edges.insert(((r, x + 2), (r + 1, x + 2)));
        }
    }
    let mut points = BTreeSet::new();
    let mut links = Vec::with_capacity(2 * corner_edges.len());
    for &((r1, c1), (r2, c2)) in &corner_edges {
        let a = (2 * r1, 2 * c1);
        let b = (2 * r2, 2 * c2);
        let mid = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
        points.extend([a, b, mid]);
        links.push((a, mid));
        links.push((mid, b));
    }
    (points, links)
}

/// Smallest near-square grid with at least `n` nodes (`rows <= cols`,
/// fewest nodes first, then smallest aspect difference).
pub fn grid_for_nodes(n: usize) -> Result<CouplingGraph> {
    let n = n.max(2);
    let best = (1..=n)
        .take_while(|r| r * r <= n || r * r <= 2 * n)
        .map(|r| (r, n.div_ceil(r)))
        .filter(|&(r, c)| r <= c)
        .min_by_key(|&(r, c)| (r * c, c - r))
        .expect("at least one factorization");
    make_grid(best.0, best.1)
}

/// Smallest heavy-hex lattice with at least `n` nodes; ties go to the
/// squarer lattice.
pub fn heavy_hex_for_nodes(n: usize) -> Result<CouplingGraph> {
    let mut best: Option<(usize, usize, usize, usize)> = None;
    let side = (1..).find(|&s| heavy_hex_node_count(s, s) >= n).expect("unbounded");
    for r in 1..=side {
        for c in 1..=side {
            let count = heavy_hex_node_count(r, c);
            if count >= n {
                let key = (count, r.abs_diff(c), r, c);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
    }
    let (_, _, r, c) = best.expect("side x side satisfies the bound");
    make_heavy_hex(r, c)
}

/// Node count of `make_heavy_hex(r, c)`.
pub fn heavy_hex_node_count(cell_rows: usize, cell_cols: usize) -> usize {
    heavy_hex_points(cell_rows, cell_cols).0.len()
}

/// Node of minimum eccentricity; smallest index on ties.
pub fn graph_center(g: &CouplingGraph) -> usize {
    let all: Vec<usize> = (0..g.node_count()).collect();
    g.center_within(&all).expect("graph has at least one node")
}

/// Ordered, connected set of selected physical qubits plus the BFS start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitSelection {
    pub nodes: Vec<usize>,
    pub start: usize,
}

impl QubitSelection {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// First `n` nodes in BFS order from `start`, visiting neighbors in
/// ascending index order.
pub fn bfs_select(g: &CouplingGraph, start: usize, n: usize) -> Result<QubitSelection> {
    if n == 0 || n > g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {n} qubits from a graph of {} nodes",
            g.node_count()
        )));
    }
    if start >= g.node_count() {
        return Err(Error::InvalidArgument(format!("start node {start} out of range")));
    }
    let mut seen = vec![false; g.node_count()];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        if order.len() == n {
            break;
        }
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(QubitSelection { nodes: order, start })
}

/// Simple path of `n` nodes in `g`, listed in path order.
///
/// Tries a greedy Warnsdorff-style DFS (fewest free neighbors first) from
/// `start`, then randomized DFS restarts from random start nodes, each with
/// a bounded backtracking budget.
pub fn find_simple_path(g: &CouplingGraph, allowed: &[usize], start: Option<usize>, n: usize, attempts: usize, seed: u64) -> Option<Vec<usize>> {
    if n == 0 || n > allowed.len() {
        return None;
    }
    let mask = g.mask_of(allowed);
    let mut rng = seed::rng(seed);
    let mut sorted = allowed.to_vec();
    sorted.sort_unstable();
    for attempt in 0..attempts.max(1) {
        let s = match (attempt, start) {
            (0, Some(s)) if mask[s] => s,
            _ => *sorted.choose(&mut rng).expect("nonempty"),
        };
        let randomize = attempt > 0;
        if let Some(p) = dfs_path(g, &mask, s, n, randomize, &mut rng, 20_000) {
            return Some(p);
        }
    }
    None
}

fn dfs_path(
    g: &CouplingGraph,
    mask: &[bool],
    start: usize,
    n: usize,
    randomize: bool,
    rng: &mut impl rand::Rng,
    budget: usize,
) -> Option<Vec<usize>> {
    let mut on_path = vec![false; g.node_count()];
    let mut path = vec![start];
    on_path[start] = true;
    let mut stack: Vec<Vec<usize>> = Vec::new();
    let mut steps = 0usize;
    let free_degree = |u: usize, on_path: &[bool]| g.neighbors(u).iter().filter(|&&w| mask[w] && !on_path[w]).count();
    let candidates = |u: usize, on_path: &[bool], rng: &mut dyn rand::RngCore| {
        let mut c: Vec<usize> = g.neighbors(u).iter().copied().filter(|&w| mask[w] && !on_path[w]).collect();
        if randomize {
            c.shuffle(rng);
        }
        // stable sort keeps the shuffled order among equal degrees; pop takes the last
        c.sort_by_key(|&w| std::cmp::Reverse(free_degree(w, on_path)));
        c
    };
    stack.push(candidates(start, &on_path, rng));
    while path.len() < n {
        steps += 1;
        if steps > budget {
            return None;
        }
        let top = stack.last_mut()?;
        match top.pop() {
            Some(v) => {
                on_path[v] = true;
                path.push(v);
                let next = candidates(v, &on_path, rng);
                stack.push(next);
            }
            None => {
                stack.pop();
                let v = path.pop()?;
                on_path[v] = false;
                if path.is_empty() {
                    return None;
                }
            }
        }
    }
    Some(path)
}
