//! Split a selection into connected groups with KL bisection, then plan
//! the redundant boundary links between them.

use groupmv::partition::{cut_size, kl_bisect, partition_groups, plan_links};
use groupmv::topology::{bfs_select, graph_center, make_grid};

fn main() -> groupmv::Result<()> {
    let g = make_grid(6, 8)?;
    let sel = bfs_select(&g, graph_center(&g), 40)?;

    let (a, b) = kl_bisect(&sel.nodes, &g, 1)?;
    println!("bisection: {} + {} nodes, cut {}", a.len(), b.len(), cut_size(&g, &a, &b));

    let groups = partition_groups(&g, &sel, 20, 1)?;
    let plan = plan_links(&groups, &g, sel.start, 3, 1)?;
    print!("{}", plan.to_text());
    Ok(())
}
