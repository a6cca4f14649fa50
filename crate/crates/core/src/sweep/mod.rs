//! Parameter sweeps: config parsing, grid evaluation and tabular output.

pub mod config;
pub mod emit;
pub mod engine;

pub use config::{parse_config, parse_value, Axis, AxisName, Output, SweepSpec};
pub use emit::{write_csv, write_json, write_records, Format, HEADER};
pub use engine::{evaluate, feature_table, run_sweep, run_sweep_with, FeatureRow, RowFailure, SpectrumRecord};
