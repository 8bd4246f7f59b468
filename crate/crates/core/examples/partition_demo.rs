//! Partition 1000 qubits of a heavy-hex lattice into 8 groups with three
//! links on every boundary.

use groupmv::experiment::{run_partition_demo, TopologySpec};
use groupmv::topology::GraphKind;

fn main() -> groupmv::Result<()> {
    let demo = run_partition_demo(&TopologySpec::Auto(GraphKind::HeavyHex), 1000, 125, 3, 32, 0)?;
    print!("{}", demo.to_text());
    Ok(())
}
