//! Benchmark problem classes for discrete optimization: instance models,
//! file formats, ILP lowerings, objective evaluation and reference solvers.

pub mod eval;
pub mod formats;
pub mod graph;
pub mod lowering;
pub mod model;
pub mod solve;
