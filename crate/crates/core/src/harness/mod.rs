//! Monte Carlo engine, sweeps, figure recipes and CSV/TOML I/O.

pub mod csv_io;
pub mod mc;
pub mod recipes;
pub mod selftest;
pub mod spec_file;
pub mod stats;
pub mod sweep;

pub use csv_io::{emit_csv, parse_csv, to_csv_string, write_csv, CSV_HEADER};
pub use mc::{ergodic_secrecy_rate_mc, ergodic_secrecy_rate_mc_with, user_codebooks, CsitSource, McEstimate};
pub use recipes::{run_recipe, Recipe, DEFAULT_TRIALS};
pub use selftest::{run_selftest, Check};
pub use spec_file::{load_spec, parse_spec};
pub use sweep::{
    run_sweep, Axis, FddSettings, Output, SweepMeta, SweepResult, SweepRow, SweepSpec, TddSettings,
};
