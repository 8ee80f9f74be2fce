//! Command-line front end: format detection, solution files, dataset
//! fetching and the `spp` subcommands.

pub mod commands;
pub mod detect;
pub mod fetch;
pub mod manifest;
pub mod solution_io;

pub use commands::run;
