use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use groupmv::experiment::{self, TopologySpec};
use groupmv::synth::{randomized_search, Method, SynthRequest};
use groupmv::Error;

#[derive(Parser)]
#[command(name = "groupmv", version, about = "GHZ state preparation with group majority voting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured sweep and write results.
    Sweep {
        config: PathBuf,
        /// Override `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition and plan links without simulating.
    PartitionDemo {
        #[arg(long, default_value = "heavy_hex")]
        topology: TopologySpec,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 125)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        l: usize,
        /// Partition seeds to try before accepting a degraded plan.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Synthesize one circuit and print it.
    Synth {
        #[arg(long, default_value = "grid")]
        topology: TopologySpec,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value = "group_mv")]
        method: Method,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the circuit here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the group plan.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Run oracle cross-checks.
    Selftest,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConfigParse { .. } | Error::ConfigValidation { .. } | Error::InvalidArgument(_) => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(Error::Io { path: path.display().to_string(), msg: e.to_string() }))
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Sweep { config, out } => {
            let mut cfg = experiment::load_config(&config).map_err(Failure::Config)?;
            if let Some(dir) = out {
                cfg.output.dir = dir;
            }
            for d in &cfg.defaults_applied {
                eprintln!("default: {d}");
            }
            let result = experiment::run_sweep(&cfg)?;
            let files = experiment::write_outputs(&cfg, &result)?;
            print!("{}", experiment::csv_string(&result.rows()));
            for f in files {
                eprintln!("wrote {}", f.display());
            }
        }
        Command::PartitionDemo { topology, n, k, l, restarts, seed } => {
            if l % 2 == 0 {
                return Err(Failure::Config(Error::InvalidArgument(format!("l={l} must be odd (L=2 disallowed)"))));
            }
            let demo = experiment::run_partition_demo(&topology, n, k, l, restarts, seed)?;
            print!("{}", demo.to_text());
        }
        Command::Synth { topology, n, k, l, method, restarts, seed, out, plan } => {
            let g = topology.build(n)?;
            let req = SynthRequest { graph: &g, n, k: k.min(n), l, method, restarts, seed };
            req.validate()?;
            let (c, p, stats) = randomized_search(&req)?;
            let d = c.depth();
            eprintln!(
                "method {method} n {n} two_qubit_depth {} total_depth {} cx {} measure {} min_l_eff {:?} degraded {}",
                d.two_qubit_depth,
                d.total_depth,
                d.cx_count,
                d.measure_count,
                p.min_l_eff(),
                stats.degraded
            );
            match out {
                Some(path) => write_file(&path, &c.to_text())?,
                None => print!("{}", c.to_text()),
            }
            if let Some(path) = plan {
                write_file(&path, &p.to_text())?;
            }
        }
        Command::Selftest => {
            let checks = experiment::run_selftest();
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Failure::Runtime(Error::Simulation(format!("{failed} self-check(s) failed"))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
