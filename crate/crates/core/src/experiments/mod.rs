//! Experiment harness: configs, presets, the runners behind each command,
//! CSV/SVG output and the command-line front end.

pub mod cli;
pub mod config;
pub mod output;
pub mod runners;

pub use config::{preset_config, ExperimentConfig};
pub use output::{read_csv, render_svg, write_csv, NamedCurve, Plot, Series};
