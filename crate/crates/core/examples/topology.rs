//! Build the three coupling-graph families and pick a contiguous selection.

use groupmv::topology::{bfs_select, graph_center, heavy_hex_for_nodes, make_grid, make_ring};

fn main() -> groupmv::Result<()> {
    for (name, g) in [("grid 5x8", make_grid(5, 8)?), ("ring 40", make_ring(40)?), ("heavy-hex for 40", heavy_hex_for_nodes(40)?)] {
        let center = graph_center(&g);
        let sel = bfs_select(&g, center, 20)?;
        let max_deg = (0..g.node_count()).map(|u| g.degree(u)).max().unwrap_or(0);
        println!(
            "{name:<18} nodes {:>3}  edges {:>3}  max degree {max_deg}  center {center:>2}  first 20 by BFS: {:?}",
            g.node_count(),
            g.edges().len(),
            sel.nodes
        );
    }
    Ok(())
}
