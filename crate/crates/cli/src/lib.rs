//! Batch driver for the core crate: config loading, stage orchestration, output files.

pub mod config;
pub mod pipeline;
