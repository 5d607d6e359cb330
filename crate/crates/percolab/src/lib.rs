//! Command-line laboratory on top of `percolab-core`: a rayon executor,
//! layered parameters, run directories with manifests, and replay.

pub mod cli;
pub mod commands;
pub mod exec;
pub mod graph;
pub mod output;
pub mod params;

pub use cli::{run, EXIT_CHECK_FAILED, EXIT_USAGE};
pub use exec::Pool;
