//! Noisy shots of a Group-MV circuit, and a dense-oracle check on a small one.

use groupmv::sim::dense::{branches, ghz_overlap};
use groupmv::sim::{run_shots, Basis, Faults, NoiseModel};
use groupmv::synth::{randomized_search, Method, SynthRequest};
use groupmv::topology::make_grid;

fn main() -> groupmv::Result<()> {
    let g = make_grid(2, 4)?;
    let req = SynthRequest { graph: &g, n: 8, k: 4, l: 1, method: Method::GroupMV, restarts: 4, seed: 3 };
    let (c, _, _) = randomized_search(&req)?;
    for b in branches(&c, &Faults::default())? {
        println!("branch {:?} p={:.3} overlap {:.6}", b.outcomes, b.probability, ghz_overlap(&b.state));
    }

    let g = make_grid(5, 6)?;
    let req = SynthRequest { graph: &g, n: 30, k: 10, l: 3, method: Method::GroupMV, restarts: 4, seed: 3 };
    let (c, _, _) = randomized_search(&req)?;
    let nm = NoiseModel::reference_default();
    let shots = run_shots(&c, &nm, Basis::Z, 5, 11);
    for s in &shots {
        println!("{}", s.to_line());
    }
    Ok(())
}
