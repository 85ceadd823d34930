//! Command drivers and benchmark suites behind the `twalk` binary.

pub mod bench;
pub mod commands;
pub mod options;
