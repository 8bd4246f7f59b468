//! Entanglement witness with and without readout mitigation.

use groupmv::analysis::{estimate_witness, histogram, mitigate_readout};
use groupmv::sim::{run_shots, Basis, NoiseModel};
use groupmv::synth::synth_unitary;
use groupmv::topology::{bfs_select, make_grid};

fn main() -> groupmv::Result<()> {
    let g = make_grid(3, 4)?;
    let sel = bfs_select(&g, 0, 12)?;
    let c = synth_unitary(&g, &sel, 0)?;
    let nm = NoiseModel::new(0.0, 0.0, 0.05)?;
    let z = run_shots(&c, &nm, Basis::Z, 20_000, 1);
    let x = run_shots(&c, &nm, Basis::X, 20_000, 2);
    for mitigate in [false, true] {
        let w = estimate_witness(&z, &x, &nm, mitigate)?;
        println!("mitigated {mitigate:<5}  p0 {:.3}  p1 {:.3}  <X> {:.3}  w {:.3} ± {:.3}", w.p0, w.p1, w.x_expect, w.w, w.std_err);
    }

    let counts = histogram(z.iter().map(|r| &r.final_bits));
    let q = mitigate_readout(&counts, nm.p_ro)?;
    println!("{} observed strings, quasi-probability total {:.6}", q.entries.len(), q.total());
    Ok(())
}
