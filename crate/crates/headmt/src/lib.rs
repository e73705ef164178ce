//! File formats, pipeline configuration and the command line for headmt
//! models.

pub mod cli;
pub mod config;
pub mod format;
pub mod lines;
pub mod trace;

pub use cli::run;
