//! Command-line harness for the ratio list decoding laboratory.
//!
//! The binary exposes six subcommands (`capacity`, `exact`, `simulate`,
//! `bounds`, `sweep`, `idbound`). Every run resolves an [`Experiment`]
//! from flags plus an optional key-value config file (flags win), executes,
//! and emits [`RunRecord`]s: human text on standard output, CSV or
//! line-delimited records to `--out`. Machine-readable output is
//! byte-identical across reruns of the same configuration and seed; wall
//! clock appears only in the human text.

pub mod commands;
pub mod config;
pub mod record;
pub mod spec;

pub use commands::{run, CommandKind};
pub use config::Experiment;
pub use record::{records_text, to_csv, OutputFormat, RunRecord};
