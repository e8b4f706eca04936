//! Configuration, sweeps, scaling fits and result files behind the
//! `vacuum-bell` command-line tool.

pub mod check;
pub mod cli;
pub mod config;
pub mod output;
pub mod point;
pub mod sweep;

pub use check::{oracle_compare, selftest, OracleComparison};
pub use config::{Design, NPolicy, Preset, RunConfig, SweepKind, WindowChoice};
pub use output::{emit_results, parse_csv, render_csv, CSV_COLUMNS};
pub use point::{build_pair, evaluate_point, ResultRow, Status};
pub use sweep::{
    fit_points, fit_scaling, scaling_check, sweep_eta, sweep_gap, sweep_separation, sweep_superosc_index,
    ScalingReport, Verdict,
};
