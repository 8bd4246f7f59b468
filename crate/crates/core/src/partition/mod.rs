//! Coupling-graph partitioning into connected groups and boundary-link
//! planning between them.

mod kl;
mod matching;
mod plan;

pub use kl::{cut_size, kl_bisect, MAX_KL_PASSES};
pub use matching::max_bipartite_matching;
pub use plan::{plan_links, GroupPlan, TreeEdge};

use crate::error::{Error, Result};
use crate::seed;
use crate::topology::{CouplingGraph, QubitSelection};

/// Split the selection into `ceil(N / k)` connected, disjoint groups by
/// repeatedly bisecting the currently largest group (smallest index on
/// ties). Group sizes are only as balanced as recursive halving allows.
pub fn partition_groups(g: &CouplingGraph, sel: &QubitSelection, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = sel.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("group size k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("group size k={k} exceeds selection size {n}")));
    }
    let m = n.div_ceil(k);
    let mut first = sel.nodes.clone();
    first.sort_unstable();
    let mut groups = vec![first];
    let mut round = 0u64;
    while groups.len() < m {
        let (idx, _) = groups
            .iter()
            .enumerate()
            .max_by_key(|(i, grp)| (grp.len(), std::cmp::Reverse(*i)))
            .expect("nonempty");
        if groups[idx].len() < 2 {
            return Err(Error::Partition("cannot bisect a singleton group".into()));
        }
        let (a, b) = kl_bisect(&groups[idx], g, seed::derive(seed, round))?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::Partition("bisection produced an empty half".into()));
        }
        groups[idx] = a;
        groups.push(b);
        round += 1;
    }
    for grp in &groups {
        if !g.is_connected_subset(grp) {
            return Err(Error::Partition("bisection left a disconnected group".into()));
        }
    }
    Ok(groups)
}
