use thiserror::Error;

/// Invariant violations detected while constructing an instance or solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("{context}: unknown variable `{name}`")]
    UnknownVariable { context: String, name: String },
    #[error("value of `{name}` must be 0 or 1, got {value}")]
    NonBinary { name: String, value: f64 },
    #[error("duplicate constraint id `{0}`")]
    DuplicateConstraintId(String),
    #[error("{context}: coefficient must be finite, got {value}")]
    NonFinite { context: String, value: f64 },
    #[error("{context}: value must not be NaN")]
    NotANumber { context: String },
    #[error("node {node} has no labels")]
    NoLabels { node: usize },
    #[error("{what}: expected {expected} entries, found {found}")]
    SizeMismatch { what: String, expected: usize, found: usize },
    #[error("{context}: node {node} out of range (node count {node_count})")]
    NodeOutOfRange { context: String, node: usize, node_count: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("edge ({u}, {v}) must list the smaller endpoint first")]
    UnorderedEdge { u: usize, v: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("bottleneck potentials differ in structure from the base model: {0}")]
    ShapeMismatch(String),
    #[error("node {node} has {found} labels, expected uniform label count {expected}")]
    NonUniformLabels { node: usize, expected: usize, found: usize },
    #[error("projection {projection}: {reason}")]
    InvalidProjection { projection: usize, reason: String },
    #[error("class {class} out of range (class count {class_count})")]
    ClassOutOfRange { class: usize, class_count: usize },
    #[error("duplicate assignment id {0}")]
    DuplicateAssignmentId(usize),
    #[error("duplicate assignment pair ({left}, {right})")]
    DuplicateAssignmentPair { left: usize, right: usize },
    #[error("{context}: unknown assignment id {id}")]
    UnknownAssignmentId { context: String, id: usize },
    #[error("quadratic term pairs assignment {0} with itself")]
    SelfQuadratic(usize),
    #[error("graph pair ({p}, {k}): {reason}")]
    InvalidGraphPair { p: usize, k: usize, reason: String },
    #[error("duplicate detection id {0}")]
    DuplicateDetection(usize),
    #[error("duplicate {kind} record for id {id}")]
    DuplicateRecord { kind: &'static str, id: usize },
    #[error("{context}: unknown detection id {id}")]
    UnknownDetection { context: String, id: usize },
    #[error("{context}: {reason}")]
    FrameMismatch { context: String, reason: String },
    #[error("division {id} is degenerate: {reason}")]
    DegenerateDivision { id: usize, reason: String },
    #[error("partition cluster ids are not contiguous from 0 (missing cluster {missing})")]
    NonContiguousPartition { missing: usize },
    #[error("label {label} of node {node} out of range (label count {label_count})")]
    LabelOutOfRange { node: usize, label: usize, label_count: usize },
}
