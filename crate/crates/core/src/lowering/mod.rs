//! Translations of every problem class into a binary ILP, with a map between
//! ILP variables and the native quantities they stand for.
//!
//! Variables are created in a fixed semantic order (nodes, then edges, then
//! products) and constraint ids follow `<kind>_<indices>`, so lowering the
//! same instance twice yields identical LP text.

mod cell_tracking;
mod codec;
mod matching;
mod mrf;
mod multicut;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{IlpBuilder, IlpInstance, Relation};

pub use cell_tracking::lower_cell_tracking;
pub use codec::{decode_solution, encode_solution, Decoded};
pub use matching::{lower_gm, lower_mgm};
pub use mrf::{lower_mrf_local_polytope, lower_mrf_potts_compact, lower_tomography};
pub use multicut::{chordless_cycles, lower_amwc, lower_multicut, CycleSet, DEFAULT_CYCLE_LIMIT};

/// What an ILP variable means in the source instance. Pairs of graph indices
/// are present only for multi-graph matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VarRole {
    /// `mu_v(l)`: node `v` takes label `l`.
    NodeLabel { node: usize, label: usize },
    /// `mu_uv(a, b)`: edge `edge` between `u` and `v` takes labels `(a, b)`.
    EdgeLabels { edge: usize, u: usize, v: usize, label_u: usize, label_v: usize },
    /// Potts disagreement on `label` across an edge.
    PottsDisagreement { edge: usize, u: usize, v: usize, label: usize },
    /// `y_e`: the edge is cut.
    CutEdge { edge: usize, u: usize, v: usize },
    /// `x_ik` of an asymmetric multiway cut.
    NodeClass { node: usize, class: usize },
    Assignment { pair: Option<(usize, usize)>, id: usize },
    /// Product of two assignment indicators, by assignment id.
    Product { pair: Option<(usize, usize)>, first: usize, second: usize },
    Detection { id: usize },
    Appearance { detection: usize },
    Disappearance { detection: usize },
    Move { id: usize },
    Division { id: usize },
}

/// Native solution type expected by [`encode_solution`] and produced by
/// [`decode_solution`], with the sizes needed to build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Labeling { node_count: usize },
    Partition { node_count: usize, edges: Vec<(usize, usize)> },
    Amwc { node_count: usize, edges: Vec<(usize, usize)> },
    Matching,
    MultiMatching { pairs: Vec<(usize, usize)> },
    CellTracking,
}

#[derive(Debug, Clone)]
pub struct LoweredModel {
    pub ilp: IlpInstance,
    roles: Vec<VarRole>,
    index: HashMap<VarRole, usize>,
    /// Constant dropped from the LP objective. Every current lowering
    /// produces 0.
    pub objective_offset: f64,
    /// False when the model is a relaxation (multicut cycle rows truncated by
    /// the length limit); its optimum then only lower-bounds the native one.
    pub exact: bool,
    pub target: Target,
}

impl LoweredModel {
    pub fn role(&self, var: usize) -> VarRole {
        self.roles[var]
    }

    pub fn roles(&self) -> &[VarRole] {
        &self.roles
    }

    pub fn var(&self, role: &VarRole) -> Option<usize> {
        self.index.get(role).copied()
    }

    /// Variable name and role per ILP variable, in variable order.
    pub fn var_map(&self) -> Vec<VarMapEntry<'_>> {
        self.ilp
            .variables()
            .iter()
            .zip(&self.roles)
            .map(|(name, role)| VarMapEntry { name, role: *role })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarMapEntry<'a> {
    pub name: &'a str,
    #[serde(flatten)]
    pub role: VarRole,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoweringError {
    #[error("edge ({u}, {v}) is not a Potts potential: {reason}")]
    NotPotts { u: usize, v: usize, reason: String },
    #[error("projection {projection} is not a hard sum constraint (needs exactly one finite entry, equal to 0)")]
    GeneralProjection { projection: usize },
    #[error("cost of {context} is {value}; only finite costs and +inf (forbidden) can be lowered")]
    UnsupportedCost { context: String, value: f64 },
    #[error("expected a {expected} solution, found {found}")]
    WrongSolutionKind { expected: &'static str, found: &'static str },
    #[error("{what}: expected {expected}, found {found}")]
    SizeMismatch { what: String, expected: usize, found: usize },
    #[error("variable `{variable}` has non-binary value {value}")]
    NonIntegral { variable: String, value: f64 },
    #[error("assignment violates constraint `{constraint}`")]
    Infeasible { constraint: String },
    #[error("inconsistent indicators: {0}")]
    Inconsistent(String),
}

/// Accumulates variables with their roles next to the ILP rows.
pub(crate) struct ModelBuilder {
    ilp: IlpBuilder,
    roles: Vec<VarRole>,
    index: HashMap<VarRole, usize>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self { ilp: IlpBuilder::new(), roles: Vec::new(), index: HashMap::new() }
    }

    pub fn var(&mut self, name: String, role: VarRole) -> usize {
        let var = self.ilp.add_variable(name).expect("generated variable names are unique");
        self.roles.push(role);
        self.index.insert(role, var);
        var
    }

    /// Adds `coef · x_var` to the objective; exact zeros are left out.
    pub fn cost(&mut self, var: usize, coef: f64) {
        if coef != 0.0 {
            self.ilp.add_objective_term(var, coef).expect("finite coefficient on a known variable");
        }
    }

    pub fn row(&mut self, id: String, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.ilp.add_constraint(id, terms, relation, rhs).expect("generated constraint ids are unique");
    }

    pub fn finish(self, exact: bool, target: Target) -> LoweredModel {
        LoweredModel {
            ilp: self.ilp.build(),
            roles: self.roles,
            index: self.index,
            objective_offset: 0.0,
            exact,
            target,
        }
    }
}
