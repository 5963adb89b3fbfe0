//! Std companion to `aklt-core`: parallel campaigns, JSON and CSV formats,
//! small-graph oracles and the `aklt` command line.

pub mod campaign;
pub mod cli;
pub mod formats;
pub mod oracle;

pub use aklt_core as core;
