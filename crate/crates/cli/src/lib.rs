//! Command-line driver for the `calabi` binary.

pub mod presets;
pub mod shell;

pub use shell::run_cli;
