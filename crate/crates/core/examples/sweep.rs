//! Run a small configured sweep in memory and print its CSV.

use groupmv::experiment::{csv_string, parse_config, run_sweep};

const CONFIG: &str = "\
topologies = grid, ring
n_values = 12, 16
k = 6
l_values = 1, 3
shots = 2000
repetitions = 3
master_seed = 1

[noise]
p_1q = 0.001
p_2q = 0.001
p_ro = 0.02
";

fn main() -> groupmv::Result<()> {
    let cfg = parse_config(CONFIG, std::path::Path::new("."))?;
    let result = run_sweep(&cfg)?;
    print!("{}", csv_string(&result.rows()));
    Ok(())
}
