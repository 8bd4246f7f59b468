//! Fidelity with GHZ by sampling its stabilizer group.

use groupmv::analysis::{estimate_fidelity, sample_ghz_stabilizer, FidelityMitigation};
use groupmv::sim::NoiseModel;
use groupmv::synth::{randomized_search, Method, SynthRequest};
use groupmv::topology::make_grid;

fn main() -> groupmv::Result<()> {
    let mut rng = groupmv::seed::rng(1);
    for _ in 0..3 {
        println!("sampled element {}", sample_ghz_stabilizer(10, &mut rng));
    }

    let g = make_grid(4, 5)?;
    let nm = NoiseModel::new(1e-3, 1e-3, 0.02)?;
    for method in Method::ALL {
        let req = SynthRequest { graph: &g, n: 20, k: 10, l: 3, method, restarts: 4, seed: 2 };
        let (c, _, _) = randomized_search(&req)?;
        for mode in [FidelityMitigation::None, FidelityMitigation::Full] {
            let f = estimate_fidelity(&c, &nm, 100, 256, 5, mode)?;
            println!("{:<13} {:<5} F = {:.3} ± {:.3}", method.to_string(), mode.name(), f.f, f.std_err);
        }
    }
    Ok(())
}
