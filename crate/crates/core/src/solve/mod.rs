//! Exhaustive oracles for tiny instances and simple primal heuristics.

mod brute;
mod gm;
mod icm;
mod ilp;
mod multicut;

use serde::Serialize;
use thiserror::Error;

use crate::eval::EvalError;
use crate::model::Solution;

pub use brute::{brute_force, search_space};
pub use gm::greedy_gm;
pub use icm::icm;
pub use ilp::{brute_force_ilp, IlpOptimum};
pub use multicut::{gaec, greedy_edge_fixation};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub solution: Solution,
    pub objective: f64,
    /// True only for exhaustive search.
    pub optimal: bool,
    /// Candidates enumerated by brute force, search nodes for ILPs, or moves
    /// examined by a heuristic.
    pub work_counter: u64,
    /// Objective after every accepted move of a heuristic; empty for brute
    /// force.
    pub trajectory: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("search space of {space} {unit} exceeds the budget of {budget}")]
    BudgetExceeded { space: u128, unit: &'static str, budget: u64 },
    #[error("the instance has no feasible solution")]
    Infeasible,
    #[error("{method} does not apply to {class} instances")]
    Unsupported { method: &'static str, class: &'static str },
    #[error(transparent)]
    Eval(#[from] EvalError),
}
