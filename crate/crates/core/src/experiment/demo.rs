//! Partition and link planning without simulation, for large instances.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use super::config::TopologySpec;
use crate::error::Result;
use crate::partition::{partition_groups, plan_links, GroupPlan};
use crate::seed;
use crate::topology::{bfs_select, graph_center};

#[derive(Clone, Debug)]
pub struct PartitionDemo {
    pub topology: String,
    pub node_count: usize,
    pub n: usize,
    pub k: usize,
    pub plan: GroupPlan,
    /// Partition attempts made; the first plan without degradation wins.
    pub attempts: usize,
    pub elapsed: Duration,
}

impl PartitionDemo {
    pub fn group_sizes(&self) -> Vec<usize> {
        self.plan.groups.iter().map(Vec::len).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "topology {} ({} nodes)", self.topology, self.node_count);
        let _ = writeln!(s, "n {} k {} l {}", self.n, self.k, self.plan.l_requested);
        let sizes: Vec<String> = self.group_sizes().iter().map(usize::to_string).collect();
        let _ = writeln!(s, "group_sizes {}", sizes.join(" "));
        let _ = writeln!(s, "attempts {}", self.attempts);
        s.push_str(&self.plan.to_text());
        let _ = writeln!(s, "wall_time_ms {:.1}", self.elapsed.as_secs_f64() * 1e3);
        s
    }
}

/// Select N qubits around the graph center, split them into groups of
/// about `k` and plan up to `l` links per boundary. Up to `attempts`
/// partition seeds are tried; the first non-degraded plan is kept, else the
/// one with the largest minimum `l_eff`.
pub fn run_partition_demo(topology: &TopologySpec, n: usize, k: usize, l: usize, attempts: usize, seed: u64) -> Result<PartitionDemo> {
    let t0 = Instant::now();
    let g = topology.build(n)?;
    let sel = bfs_select(&g, graph_center(&g), n)?;
    let k = k.min(n);
    let mut best: Option<(GroupPlan, usize)> = None;
    let mut tried = 0;
    for a in 0..attempts.max(1) as u64 {
        tried += 1;
        let s = seed::derive(seed, a);
        let groups = partition_groups(&g, &sel, k, seed::derive(s, 0))?;
        let plan = plan_links(&groups, &g, sel.start, l, seed::derive(s, 1))?;
        let score = plan.min_l_eff().unwrap_or(usize::MAX);
        let done = !plan.degraded();
        if best.as_ref().is_none_or(|(_, b)| score > *b) {
            best = Some((plan, score));
        }
        if done {
            break;
        }
    }
    let (plan, _) = best.expect("at least one attempt");
    Ok(PartitionDemo {
        topology: topology.to_string(),
        node_count: g.node_count(),
        n,
        k,
        plan,
        attempts: tried,
        elapsed: t0.elapsed(),
    })
}
