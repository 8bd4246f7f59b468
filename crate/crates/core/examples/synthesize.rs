//! Synthesize the same GHZ state with each method and compare depths.

use groupmv::synth::{randomized_search, Method, SynthRequest};
use groupmv::topology::make_grid;

fn main() -> groupmv::Result<()> {
    let g = make_grid(6, 8)?;
    for method in Method::ALL {
        let req = SynthRequest { graph: &g, n: 40, k: 20, l: 3, method, restarts: 8, seed: 7 };
        let (c, plan, stats) = randomized_search(&req)?;
        let d = c.depth();
        println!(
            "{:<13} 2q depth {:>2}  total {:>2}  cx {:>3}  measurements {:>2}  l_eff {:?}  degraded {}",
            method.to_string(),
            d.two_qubit_depth,
            d.total_depth,
            d.cx_count,
            d.measure_count,
            plan.min_l_eff(),
            stats.degraded
        );
    }
    // the text form round-trips through the parser
    let req = SynthRequest { graph: &g, n: 6, k: 3, l: 1, method: Method::GroupMV, restarts: 1, seed: 0 };
    let (c, _, _) = randomized_search(&req)?;
    println!("\n{}", c.to_text());
    Ok(())
}
