//! Experiment harness around `affine-lab-core`: config parsing, body files,
//! tables, plots and the subcommands behind the `affine-lab` binary.

pub mod bodyio;
pub mod commands;
pub mod config;
pub mod family;
pub mod output;
pub mod selftest;
pub mod stats;
pub mod svg;
