//! Experiment harness: configuration, sweeps, CSV/SVG output, the
//! partition demo and self checks.

pub mod config;
pub mod demo;
pub mod plot;
pub mod selftest;
pub mod sweep;

pub use config::{load_config, parse_config, ExperimentConfig, FidelityConfig, OutputConfig, TopologySpec};
pub use demo::{run_partition_demo, PartitionDemo};
pub use plot::{emit_plot, plot_svg};
pub use selftest::{run_selftest, SelfCheck};
pub use sweep::{
    csv_string, emit_csv, fmt_sig, run_point, run_sweep, search_stats_csv, sweep_points, write_outputs, PointOutcome, ResultRow,
    SweepPoint, SweepResult, CSV_HEADER,
};
