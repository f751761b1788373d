//! Command-line front end: descriptor parsing, JSON/CSV/SVG report
//! emission, and the subcommand implementations.

pub mod commands;
pub mod parse;
pub mod svg;

pub use commands::{run, Cli};
