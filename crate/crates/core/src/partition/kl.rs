//! Kernighan-Lin bisection with a connectivity repair step.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;
use crate::topology::CouplingGraph;

/// Upper bound on improvement passes per bisection.
pub const MAX_KL_PASSES: usize = 10;

/// Random restarts tried when a split cannot be balanced while keeping
/// both halves connected.
const BISECT_ATTEMPTS: u64 = 16;

/// Local view of the induced subgraph on a node set.
struct Local {
    nodes: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl Local {
    fn new(g: &CouplingGraph, nodes: &[usize]) -> Self {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        let mut pos = vec![usize::MAX; g.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            pos[u] = i;
        }
        let adj = nodes
            .iter()
            .map(|&u| g.neighbors(u).iter().filter(|&&v| pos[v] != usize::MAX).map(|&v| pos[v]).collect())
            .collect();
        Local { nodes, adj }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn cut(&self, side: &[bool]) -> usize {
        (0..self.len()).filter(|&u| !side[u]).map(|u| self.adj[u].iter().filter(|&&v| side[v]).count()).sum()
    }

    fn connected(&self, side: &[bool], which: bool) -> bool {
        self.components(side, which).len() <= 1
    }

    /// Components of the side-`which` induced subgraph, largest first, ties
    /// by smallest member.
    fn components(&self, side: &[bool], which: bool) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut comps = Vec::new();
        for s in 0..self.len() {
            if side[s] != which || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if side[v] == which && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comps.push(comp);
        }
        comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
        comps
    }

    /// Articulation points of the side-`which` induced subgraph.
    fn articulation_points(&self, side: &[bool], which: bool) -> Vec<bool> {
        let n = self.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut timer = 0;
        for root in 0..n {
            if side[root] != which || disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (node, parent, next neighbor position)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
                if *next < self.adj[u].len() {
                    let v = self.adj[u][*next];
                    *next += 1;
                    if side[v] != which || v == parent {
                        continue;
                    }
                    if disc[v] == usize::MAX {
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((v, u, 0));
                    } else {
                        low[u] = low[u].min(disc[v]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if p != root && low[u] >= disc[p] {
                            is_cut[p] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        is_cut
    }
}

/// Split `nodes` into two halves whose sizes differ by at most one.
///
/// Starts from a seeded random balanced split, runs Kernighan-Lin passes
/// until a pass yields no positive gain (or [`MAX_KL_PASSES`] is hit), then
/// repairs connectivity of both halves and rebalances by moving boundary
/// vertices (with any branches they would cut off). If the result is not
/// balanced and connected, further seeded initial splits are tried and the
/// best one is kept.
pub fn kl_bisect(nodes: &[usize], g: &CouplingGraph, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if nodes.len() < 2 {
        return Err(Error::InvalidArgument(format!("cannot bisect {} node(s)", nodes.len())));
    }
    let local = Local::new(g, nodes);
    let n = local.len();
    let mut best: Option<((usize, usize, usize), Vec<bool>)> = None;
    for attempt in 0..BISECT_ATTEMPTS {
        let side = bisect_once(&local, seed::derive(seed, attempt));
        let size_b = side.iter().filter(|&&s| s).count();
        let broken = usize::from(!local.connected(&side, false)) + usize::from(!local.connected(&side, true));
        let key = (broken, (n - size_b).abs_diff(size_b).max(1), local.cut(&side));
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, side));
        }
        if best.as_ref().is_some_and(|(k, _)| k.0 == 0 && k.1 <= 1) {
            break;
        }
    }
    let side = best.expect("at least one attempt").1;
    let a: Vec<usize> = (0..n).filter(|&i| !side[i]).map(|i| local.nodes[i]).collect();
    let b: Vec<usize> = (0..n).filter(|&i| side[i]).map(|i| local.nodes[i]).collect();
    Ok((a, b))
}

fn bisect_once(local: &Local, seed: u64) -> Vec<bool> {
    let n = local.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed));
    // side[i] == true means half B
    let mut side = vec![false; n];
    for &i in &order[n / 2..] {
        side[i] = true;
    }
    for _ in 0..MAX_KL_PASSES {
        if !kl_pass(local, &mut side) {
            break;
        }
    }
    repair_connectivity(local, &mut side);
    rebalance(local, &mut side);
    side
}

/// Number of edges crossing the two halves.
pub fn cut_size(g: &CouplingGraph, a: &[usize], b: &[usize]) -> usize {
    let mb = g.mask_of(b);
    a.iter().map(|&u| g.neighbors(u).iter().filter(|&&v| mb[v]).count()).sum()
}

/// One KL pass. Returns whether the partition improved.
fn kl_pass(local: &Local, side: &mut [bool]) -> bool {
    let n = local.len();
    let mut d: Vec<i64> = (0..n)
        .map(|u| {
            local.adj[u]
                .iter()
                .map(|&v| if side[v] != side[u] { 1 } else { -1 })
                .sum()
        })
        .collect();
    let mut locked = vec![false; n];
    let mut cur = side.to_vec();
    let size_a = cur.iter().filter(|&&s| !s).count();
    let steps = size_a.min(n - size_a);
    let mut swaps = Vec::with_capacity(steps);
    let mut gains = Vec::with_capacity(steps);

    for _ in 0..steps {
        let mut a_list: Vec<usize> = (0..n).filter(|&i| !locked[i] && !cur[i]).collect();
        let mut b_list: Vec<usize> = (0..n).filter(|&i| !locked[i] && cur[i]).collect();
        a_list.sort_by_key(|&i| (std::cmp::Reverse(d[i]), i));
        b_list.sort_by_key(|&i| (std::cmp::Reverse(d[i]), i));
        let Some(&b_top) = b_list.first() else { break };
        let mut best: Option<(i64, usize, usize)> = None;
        for &a in &a_list {
            if best.is_some_and(|(g, _, _)| d[a] + d[b_top] <= g) {
                break;
            }
            for &b in &b_list {
                if best.is_some_and(|(g, _, _)| d[a] + d[b] <= g) {
                    break;
                }
                let c = i64::from(local.adj[a].contains(&b));
                let gain = d[a] + d[b] - 2 * c;
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((gain, a, b)) = best else { break };
        locked[a] = true;
        locked[b] = true;
        for &x in &local.adj[a] {
            if !locked[x] {
                d[x] += if cur[x] == cur[a] { 2 } else { -2 };
            }
        }
        for &y in &local.adj[b] {
            if !locked[y] {
                d[y] += if cur[y] == cur[b] { 2 } else { -2 };
            }
        }
        cur[a] = true;
        cur[b] = false;
        swaps.push((a, b));
        gains.push(gain);
    }

    let mut best_k = 0;
    let mut best_sum = 0i64;
    let mut sum = 0i64;
    for (k, g) in gains.iter().enumerate() {
        sum += g;
        if sum > best_sum {
            best_sum = sum;
            best_k = k + 1;
        }
    }
    if best_k == 0 {
        return false;
    }
    for &(a, b) in &swaps[..best_k] {
        side[a] = true;
        side[b] = false;
    }
    true
}

/// Make both halves connected. Minority components of one half are moved
/// wholesale to the other half; any component of the induced graph that is
/// maximal within its half borders the other half, so two sweeps suffice.
fn repair_connectivity(local: &Local, side: &mut [bool]) {
    for _ in 0..4 {
        let mut changed = false;
        for which in [false, true] {
            let comps = local.components(side, which);
            if comps.len() <= 1 {
                continue;
            }
            // try to move each minority component while the other half stays connected
            let mut moved_any = false;
            for comp in comps.iter().skip(1) {
                let mut trial = side.to_vec();
                for &u in comp {
                    trial[u] = !which;
                }
                if local.connected(&trial, !which) {
                    side.copy_from_slice(&trial);
                    moved_any = true;
                }
            }
            // largest-component retention: everything but the largest goes over
            if !moved_any || local.components(side, which).len() > 1 {
                let comps = local.components(side, which);
                for comp in comps.iter().skip(1) {
                    for &u in comp {
                        side[u] = !which;
                    }
                }
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
}

/// Move vertices from the larger half to the smaller one until the sizes
/// differ by at most one, never disconnecting either half.
///
/// A donor vertex `u` bordering the other half moves together with every
/// component of `donor - u` except the largest one (nothing else when `u`
/// is not a cut vertex). Each step takes the move that most reduces the size
/// difference, so the loop terminates.
fn rebalance(local: &Local, side: &mut [bool]) {
    let n = local.len();
    loop {
        let size_b = side.iter().filter(|&&s| s).count();
        let size_a = n - size_b;
        let diff = size_a.abs_diff(size_b);
        if diff <= 1 {
            return;
        }
        let donor = size_b > size_a;
        let cut = local.articulation_points(side, donor);
        let mut best: Option<(usize, usize, i64, usize, Vec<usize>)> = None;
        for u in 0..n {
            if side[u] != donor {
                continue;
            }
            let to = local.adj[u].iter().filter(|&&v| side[v] != donor).count() as i64;
            if to == 0 {
                continue;
            }
            let mut moved = vec![u];
            if cut[u] {
                let mut trial = side.to_vec();
                trial[u] = !donor;
                for comp in local.components(&trial, donor).iter().skip(1) {
                    moved.extend_from_slice(comp);
                }
            }
            let new_diff = diff.abs_diff(2 * moved.len());
            if new_diff >= diff {
                continue;
            }
            let stay = local.adj[u].len() as i64 - to;
            let key = (new_diff, moved.len(), -(to - stay), u);
            if best.as_ref().is_none_or(|b| key < (b.0, b.1, b.2, b.3)) {
                best = Some((key.0, key.1, key.2, key.3, moved));
            }
        }
        match best {
            Some((.., moved)) => {
                for u in moved {
                    side[u] = !donor;
                }
            }
            None => return,
        }
    }
}
