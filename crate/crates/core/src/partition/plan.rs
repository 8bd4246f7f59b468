//! Group spanning tree and redundant boundary-link allocation.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;

use super::matching::max_bipartite_matching;
use crate::error::{Error, Result};
use crate::seed;
use crate::topology::{CouplingGraph, QubitSelection};

/// One edge of the spanning tree over groups, with the boundary links that
/// fuse the child group into its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
    /// `(parent_side_qubit, child_side_qubit)` pairs, sorted.
    pub links: Vec<(usize, usize)>,
    /// Size of the maximum matching available on this boundary.
    pub matching_size: usize,
}

impl TreeEdge {
    pub fn l_eff(&self) -> usize {
        self.links.len()
    }
}

/// Partition plus fusion plan: which groups fuse into which, and over which
/// physical couplers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPlan {
    /// Disjoint connected groups, each sorted.
    pub groups: Vec<Vec<usize>>,
    /// Group containing the global BFS start node.
    pub root_group: usize,
    /// Tree edges in BFS order from the root group.
    pub tree: Vec<TreeEdge>,
    pub l_requested: usize,
}

impl GroupPlan {
    /// Smallest `l_eff` over all boundaries, `None` when there is a single group.
    pub fn min_l_eff(&self) -> Option<usize> {
        self.tree.iter().map(TreeEdge::l_eff).min()
    }

    /// Whether some boundary got fewer links than requested.
    pub fn degraded(&self) -> bool {
        self.tree.iter().any(|e| e.l_eff() < self.l_requested)
    }

    /// Boundaries whose matching size is even and above the granted `l_eff`,
    /// i.e. where an even redundancy was available but skipped because
    /// majority votes need an odd count.
    pub fn even_capacity_skipped(&self) -> Vec<(usize, usize)> {
        self.tree
            .iter()
            .filter(|e| e.matching_size > e.l_eff() && e.l_eff() < self.l_requested)
            .map(|e| (e.parent, e.child))
            .collect()
    }

    pub fn group_of(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; node_count];
        for (i, grp) in self.groups.iter().enumerate() {
            for &u in grp {
                out[u] = Some(i);
            }
        }
        out
    }

    /// Child-side (measured) qubits of every boundary link.
    pub fn measured_qubits(&self) -> BTreeSet<usize> {
        self.tree.iter().flat_map(|e| e.links.iter().map(|l| l.1)).collect()
    }

    /// Path of tree edges (indices into `tree`) from the root down to `group`.
    pub fn path_from_root(&self, group: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = group;
        while cur != self.root_group {
            let idx = self
                .tree
                .iter()
                .position(|e| e.child == cur)
                .expect("every non-root group has a parent edge");
            path.push(idx);
            cur = self.tree[idx].parent;
        }
        path.reverse();
        path
    }

    /// Check every structural invariant against the graph and selection.
    /// Returns the list of violations (empty when valid).
    pub fn violations(&self, g: &CouplingGraph, sel: &QubitSelection) -> Vec<String> {
        let mut v = Vec::new();
        let owner = self.group_of(g.node_count());
        let total: usize = self.groups.iter().map(Vec::len).sum();
        let union: BTreeSet<usize> = self.groups.iter().flatten().copied().collect();
        let selected: BTreeSet<usize> = sel.nodes.iter().copied().collect();
        if total != union.len() {
            v.push("groups overlap".to_string());
        }
        if union != selected {
            v.push("groups do not cover the selection exactly".to_string());
        }
        for (i, grp) in self.groups.iter().enumerate() {
            if grp.is_empty() || !g.is_connected_subset(grp) {
                v.push(format!("group {i} is empty or disconnected"));
            }
        }
        if self.root_group >= self.groups.len() || owner.get(sel.start).copied().flatten() != Some(self.root_group) {
            v.push("root group does not contain the start node".to_string());
        }
        if self.tree.len() + 1 != self.groups.len() {
            v.push(format!("tree has {} edges for {} groups", self.tree.len(), self.groups.len()));
        }
        let mut reached = BTreeSet::from([self.root_group]);
        for e in &self.tree {
            if !reached.contains(&e.parent) || !reached.insert(e.child) {
                v.push(format!("tree edge {}->{} is not in BFS order or revisits a group", e.parent, e.child));
            }
            let l = e.l_eff();
            if l == 0 || l % 2 == 0 || l > self.l_requested {
                v.push(format!("edge {}->{}: l_eff={l} not odd in 1..={}", e.parent, e.child, self.l_requested));
            }
            let mut used = BTreeSet::new();
            for &(a, b) in &e.links {
                if !g.has_edge(a, b) {
                    v.push(format!("link ({a}, {b}) is not a coupler"));
                }
                if owner.get(a).copied().flatten() != Some(e.parent) || owner.get(b).copied().flatten() != Some(e.child) {
                    v.push(format!("link ({a}, {b}) does not join group {} to group {}", e.parent, e.child));
                }
                if !used.insert(a) || !used.insert(b) {
                    v.push(format!("links of edge {}->{} share a qubit", e.parent, e.child));
                }
            }
        }
        // a measured qubit may only control links of edges below its own
        let measured_count: usize = self.tree.iter().map(|e| e.links.len()).sum();
        let measured = self.measured_qubits();
        let measured_at: std::collections::BTreeMap<usize, usize> =
            self.tree.iter().enumerate().flat_map(|(i, e)| e.links.iter().map(move |&(_, b)| (b, i))).collect();
        for (i, e) in self.tree.iter().enumerate() {
            for &(a, _) in &e.links {
                if measured_at.get(&a).is_some_and(|&j| j >= i) {
                    v.push(format!("qubit {a} controls a link before it is measured"));
                }
            }
        }
        if measured.len() != measured_count {
            v.push("a qubit is measured on more than one boundary".to_string());
        }
        v
    }

    /// Structured text dump for experiment output.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "groups {}", self.groups.len());
        let _ = writeln!(s, "root_group {}", self.root_group);
        let _ = writeln!(s, "l_requested {}", self.l_requested);
        for (i, grp) in self.groups.iter().enumerate() {
            let nodes: Vec<String> = grp.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "group {i} size {} : {}", grp.len(), nodes.join(" "));
        }
        for e in &self.tree {
            let links: Vec<String> = e.links.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            let _ = writeln!(
                s,
                "edge {} -> {} l_eff {} matching {} : {}",
                e.parent,
                e.child,
                e.l_eff(),
                e.matching_size,
                links.join(" ")
            );
        }
        let _ = writeln!(s, "degraded {}", self.degraded());
        let skipped = self.even_capacity_skipped();
        if !skipped.is_empty() {
            let list: Vec<String> = skipped.iter().map(|(a, b)| format!("{a}->{b}")).collect();
            let _ = writeln!(s, "note even_capacity_skipped {}", list.join(" "));
        }
        s
    }
}

/// Largest odd number `<= x`, or 0 when `x == 0`.
fn largest_odd_at_most(x: usize) -> usize {
    if x == 0 {
        0
    } else if x % 2 == 1 {
        x
    } else {
        x - 1
    }
}

/// Build the group spanning tree (BFS from the group holding `start`,
/// neighbor groups in ascending index order) and allocate up to
/// `l_requested` vertex-disjoint boundary links per tree edge.
///
/// Each boundary gets a maximum bipartite matching over its crossing
/// couplers; `l_eff` is the largest odd value not above
/// `min(l_requested, matching size)`. A child-side (measured) qubit is never
/// used as a control while another parent-side qubit is free, so boundaries
/// are processed in BFS order and later boundaries prefer the qubits still
/// free. When a boundary has nothing free left, already measured qubits may
/// serve as controls (the synthesized circuit fires such a qubit's outgoing
/// CX before its incoming one). A group that still cannot be linked to its
/// BFS parent is attached to another attached neighbour instead.
pub fn plan_links(groups: &[Vec<usize>], g: &CouplingGraph, start: usize, l_requested: usize, seed: u64) -> Result<GroupPlan> {
    if l_requested == 0 || l_requested.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "requested redundancy L={l_requested} must be odd (L=2 and other even values are disallowed)"
        )));
    }
    let mut groups: Vec<Vec<usize>> = groups.to_vec();
    for grp in &mut groups {
        grp.sort_unstable();
    }
    let m = groups.len();
    let mut owner = vec![usize::MAX; g.node_count()];
    for (i, grp) in groups.iter().enumerate() {
        for &u in grp {
            if owner[u] != usize::MAX {
                return Err(Error::Partition(format!("node {u} belongs to two groups")));
            }
            owner[u] = i;
        }
    }
    let root_group = match owner.get(start) {
        Some(&r) if r != usize::MAX => r,
        _ => return Err(Error::Partition(format!("start node {start} is not in any group"))),
    };

    let mut group_adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for &(u, v) in g.edges() {
        let (a, b) = (owner[u], owner[v]);
        if a != usize::MAX && b != usize::MAX && a != b {
            group_adj[a].insert(b);
            group_adj[b].insert(a);
        }
    }

    let mut reachable = vec![false; m];
    reachable[root_group] = true;
    let mut queue = VecDeque::from([root_group]);
    while let Some(p) = queue.pop_front() {
        for &c in &group_adj[p] {
            if !reachable[c] {
                reachable[c] = true;
                queue.push_back(c);
            }
        }
    }
    if reachable.iter().any(|&s| !s) {
        return Err(Error::Partition("group adjacency graph is disconnected".into()));
    }

    let mut rng = seed::rng(seed);
    let mut measured = vec![false; g.node_count()];
    let mut controls = vec![false; g.node_count()];
    let mut tree = Vec::with_capacity(m.saturating_sub(1));
    let mut attached = vec![false; m];
    attached[root_group] = true;
    let mut queue = VecDeque::from([root_group]);
    let mut deferred: BTreeSet<usize> = BTreeSet::new();
    loop {
        while let Some(p) = queue.pop_front() {
            for &c in &group_adj[p] {
                if attached[c] {
                    continue;
                }
                match try_link(g, &owner, &groups, p, c, l_requested, &mut measured, &mut controls, &mut rng) {
                    Some(edge) => {
                        tree.push(edge);
                        attached[c] = true;
                        deferred.remove(&c);
                        queue.push_back(c);
                    }
                    // exclusivity used up every coupler on this boundary;
                    // another attached neighbour may still adopt it
                    None => {
                        deferred.insert(c);
                    }
                }
            }
        }
        let mut adopted = false;
        for c in deferred.clone() {
            let parents: Vec<usize> = group_adj[c].iter().copied().filter(|&p| attached[p]).collect();
            for p in parents {
                if let Some(edge) = try_link(g, &owner, &groups, p, c, l_requested, &mut measured, &mut controls, &mut rng) {
                    tree.push(edge);
                    attached[c] = true;
                    deferred.remove(&c);
                    queue.push_back(c);
                    adopted = true;
                    break;
                }
            }
        }
        if !adopted {
            break;
        }
    }
    if let Some(&c) = deferred.iter().next() {
        return Err(Error::Partition(format!(
            "group {c} has no usable coupler to any attached neighbour group"
        )));
    }

    Ok(GroupPlan {
        groups,
        root_group,
        tree,
        l_requested,
    })
}

#[allow(clippy::too_many_arguments)]
fn try_link(
    g: &CouplingGraph,
    owner: &[usize],
    groups: &[Vec<usize>],
    p: usize,
    c: usize,
    l_requested: usize,
    measured: &mut [bool],
    controls: &mut [bool],
    rng: &mut impl rand::Rng,
) -> Option<TreeEdge> {
    // how many foreign groups a child-side qubit borders: measuring such a
    // qubit would take it away from a later boundary
    let foreign = |u: usize| {
        g.neighbors(u)
            .iter()
            .filter(|&&v| owner[v] != usize::MAX && owner[v] != p && owner[v] != c)
            .count()
    };
    let mut candidates = |allow_measured: bool| {
        let mut lefts: Vec<usize> = groups[p].iter().copied().filter(|&u| allow_measured || !measured[u]).collect();
        lefts.shuffle(rng);
        let mut edges = Vec::new();
        for &a in &lefts {
            let mut rights: Vec<usize> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&b| owner[b] == c && !measured[b] && !controls[b])
                .collect();
            rights.shuffle(rng);
            rights.sort_by_key(|&b| foreign(b));
            edges.extend(rights.into_iter().map(|b| (a, b)));
        }
        max_bipartite_matching(&edges)
    };
    let mut matching = candidates(false);
    if matching.is_empty() {
        matching = candidates(true);
    }
    if matching.is_empty() {
        return None;
    }
    let matching_size = matching.len();
    let l_eff = largest_odd_at_most(l_requested.min(matching_size));
    matching.shuffle(rng);
    matching.sort_by_key(|&(_, b)| foreign(b));
    let mut links: Vec<(usize, usize)> = matching.into_iter().take(l_eff).collect();
    links.sort_unstable();
    for &(a, b) in &links {
        controls[a] = true;
        measured[b] = true;
    }
    Some(TreeEdge { parent: p, child: c, links, matching_size })
}
