//! Sweep configuration, the end-to-end protocol runner and CSV/JSON output.

mod config;
mod io;
mod sweep;

pub use config::{SweepConfig, SweepObservable};
pub use io::{parse_csv, render_csv, render_json, write_text, JsonReport, OutputFormat, CSV_COLUMNS};
pub use sweep::{
    branch_probability_curves, noise_from_rates, repeat_fixed_state, run_full_protocol, run_point,
    run_sweep, summaries, sweep_fits, BranchCurvePoint,
};
