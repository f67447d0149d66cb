//! CLI support: configuration, experiment runners, invariant suites and
//! reproducible output.

pub mod cases;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod verify;
