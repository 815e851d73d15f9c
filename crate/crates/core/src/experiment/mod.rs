//! Config-driven experiment runs: sweeps over one hyperparameter, the
//! perturbed-edge distribution report and runtime profiling.

mod config;
mod distribution;
mod profile;
mod sweep;

pub use config::{AttackMode, DatasetSource, ExperimentConfig, SweepAxis};
pub use distribution::{edge_histogram, report_distribution, EdgeHistogram};
pub use profile::{runtime_profile, scaling_within_bounds, ProfileRow, RuntimeProfile};
pub use sweep::{
    mean_std, output_dir, read_results, run_cell, run_sweep, summarize, CellOutcome, ResultRow, SummaryRow,
    SweepOptions, SweepOutcome, PARTIAL_FILE, RESULTS_FILE, SUMMARY_FILE, TIMINGS_FILE,
};
