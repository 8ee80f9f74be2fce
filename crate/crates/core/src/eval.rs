//! Feasibility checks and objective values of native solutions.
//!
//! Every evaluator reports the objective even when the solution is
//! infeasible; `feasible` is true exactly when no violation was found.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::graph::UnionFind;
use crate::model::{
    AmwcInstance, AmwcSolution, BottleneckMrfInstance, CellTrackingInstance, CellTrackingSolution, EdgeCutVector,
    GmInstance, GmSolution, IlpInstance, MgmInstance, MgmSolution, MrfInstance, MrfLabeling, MulticutInstance,
    Partition, ProblemInstance, Relation, Solution, TomographyInstance,
};

/// Absolute tolerance for rows with fractional coefficients.
pub const ILP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: &'static str,
    /// Indices locating the violation; their meaning depends on `kind`.
    pub location: Vec<usize>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub feasible: bool,
    pub objective: f64,
    pub violations: Vec<Violation>,
}

impl EvaluationReport {
    fn new(objective: f64, violations: Vec<Violation>) -> Self {
        // Empty float sums are -0.0; report them as 0.
        Self { feasible: violations.is_empty(), objective: objective + 0.0, violations }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{what}: expected {expected}, found {found}")]
    SizeMismatch { what: String, expected: usize, found: usize },
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },
    #[error("no matching given for graph pair ({p}, {k})")]
    MissingPair { p: usize, k: usize },
    #[error("graph pair ({p}, {k}) is not part of the instance")]
    UnknownPair { p: usize, k: usize },
    #[error("cannot evaluate a {found} solution against a {expected} instance")]
    WrongSolutionKind { expected: &'static str, found: &'static str },
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), EvalError> {
    if expected == found {
        Ok(())
    } else {
        Err(EvalError::SizeMismatch { what: what.to_string(), expected, found })
    }
}

fn violation(kind: &'static str, location: Vec<usize>, description: String) -> Violation {
    Violation { kind, location, description }
}

/// Energy of a labeling. Out-of-range labels are reported and their terms
/// skipped; hitting an infinite (forbidden) entry is reported as well.
fn mrf_energy(mrf: &MrfInstance, labels: &[usize], violations: &mut Vec<Violation>) -> f64 {
    let counts = mrf.label_counts();
    let mut energy = 0.0;
    for (v, &l) in labels.iter().enumerate() {
        if l >= counts[v] {
            violations.push(violation("label_range", vec![v], format!("node {v} has label {l}, only {} labels exist", counts[v])));
            continue;
        }
        let cost = mrf.unary(v)[l];
        if cost == f64::INFINITY {
            violations.push(violation("forbidden_label", vec![v], format!("label {l} of node {v} has infinite cost")));
        }
        energy += cost;
    }
    for (e, edge) in mrf.edges().iter().enumerate() {
        let (a, b) = (labels[edge.u], labels[edge.v]);
        if a >= counts[edge.u] || b >= counts[edge.v] {
            continue;
        }
        let cost = mrf.pairwise(e, a, b);
        if cost == f64::INFINITY {
            violations.push(violation(
                "forbidden_pair",
                vec![edge.u, edge.v],
                format!("labels ({a}, {b}) on edge ({}, {}) have infinite cost", edge.u, edge.v),
            ));
        }
        energy += cost;
    }
    energy
}

pub fn evaluate_mrf(mrf: &MrfInstance, labeling: &MrfLabeling) -> Result<EvaluationReport, EvalError> {
    check_len("labeling", mrf.node_count(), labeling.labels.len())?;
    let mut violations = Vec::new();
    let energy = mrf_energy(mrf, &labeling.labels, &mut violations);
    Ok(EvaluationReport::new(energy, violations))
}

/// Base energy plus `min(max_v ψ_v, max_uv ψ_uv)`. A max over an empty set
/// drops out of the min; with no nodes and no edges the term is 0.
pub fn evaluate_bottleneck_mrf(instance: &BottleneckMrfInstance, labeling: &MrfLabeling) -> Result<EvaluationReport, EvalError> {
    let mut report = evaluate_mrf(instance.base(), labeling)?;
    if !report.violations.iter().all(|v| v.kind.starts_with("forbidden")) {
        return Ok(report);
    }
    let psi = instance.bottleneck();
    let labels = &labeling.labels;
    let node_max = labels.iter().enumerate().map(|(v, &l)| psi.unary(v)[l]).reduce(f64::max);
    let edge_max = psi.edges().iter().enumerate().map(|(e, edge)| psi.pairwise(e, labels[edge.u], labels[edge.v])).reduce(f64::max);
    let term = match (node_max, edge_max) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    };
    report.objective += term;
    Ok(report)
}

/// Base energy plus the projection cost of each ray's label sum. An
/// infinite entry means the sum is not allowed.
pub fn evaluate_tomography(instance: &TomographyInstance, labeling: &MrfLabeling) -> Result<EvaluationReport, EvalError> {
    let base = instance.base();
    check_len("labeling", base.node_count(), labeling.labels.len())?;
    let mut violations = Vec::new();
    let mut objective = mrf_energy(base, &labeling.labels, &mut violations);
    if violations.iter().any(|v| v.kind == "label_range") {
        return Ok(EvaluationReport::new(objective, violations));
    }
    for (i, p) in instance.projections().iter().enumerate() {
        let sum: usize = p.nodes.iter().map(|&v| labeling.labels[v]).sum();
        let cost = p.costs[sum];
        if cost == f64::INFINITY {
            violations.push(violation("projection", vec![i], format!("projection {i} has label sum {sum}, which is not allowed")));
        } else {
            objective += cost;
        }
    }
    Ok(EvaluationReport::new(objective, violations))
}

/// Cut of a partition: an edge is cut when its endpoints lie in different
/// clusters.
pub fn cut_from_partition(instance: &MulticutInstance, partition: &Partition) -> Result<EdgeCutVector, EvalError> {
    check_len("partition", instance.node_count(), partition.len())?;
    Ok(EdgeCutVector::new(instance.edges().iter().map(|e| partition.cluster_of(e.u) != partition.cluster_of(e.v)).collect()))
}

/// Cut edges whose endpoints are joined by uncut edges, as edge positions.
fn internal_cut_edges(node_count: usize, edges: impl Iterator<Item = (usize, usize)> + Clone, cut: &[bool]) -> Vec<usize> {
    let mut uf = UnionFind::new(node_count);
    for ((u, v), &c) in edges.clone().zip(cut) {
        if !c {
            uf.union(u, v);
        }
    }
    edges.zip(cut).enumerate().filter(|(_, ((u, v), &c))| c && uf.find(*u) == uf.find(*v)).map(|(e, _)| e).collect()
}

/// Checks that `cut` is the cut of some partition: no cut edge may connect
/// two nodes joined by a path of uncut edges.
pub fn evaluate_multicut(instance: &MulticutInstance, cut: &EdgeCutVector) -> Result<EvaluationReport, EvalError> {
    let edges = instance.edges();
    check_len("cut vector", edges.len(), cut.len())?;
    let objective = edges.iter().zip(&cut.cut).filter(|(_, &c)| c).map(|(e, _)| e.cost).sum();
    let violations = internal_cut_edges(instance.node_count(), edges.iter().map(|e| (e.u, e.v)), &cut.cut)
        .into_iter()
        .map(|i| {
            let (u, v) = edges[i].key();
            violation("cycle", vec![u, v], format!("edge ({u}, {v}) is cut but its endpoints are connected by uncut edges"))
        })
        .collect();
    Ok(EvaluationReport::new(objective, violations))
}

pub fn evaluate_amwc(instance: &AmwcInstance, solution: &AmwcSolution) -> Result<EvaluationReport, EvalError> {
    let edges = instance.edges();
    check_len("labels", instance.node_count(), solution.labels.len())?;
    check_len("cut vector", edges.len(), solution.cut.len())?;
    let mut violations = Vec::new();
    let mut objective = 0.0;
    for (i, &class) in solution.labels.iter().enumerate() {
        match instance.node_costs()[i].get(class) {
            Some(&cost) => {
                if cost == f64::INFINITY {
                    violations.push(violation("forbidden_label", vec![i], format!("class {class} of node {i} has infinite cost")));
                }
                objective += cost;
            }
            None => violations.push(violation(
                "label_range",
                vec![i],
                format!("node {i} has class {class}, only {} classes exist", instance.class_count()),
            )),
        }
    }
    let labels = &solution.labels;
    for (e, &c) in edges.iter().zip(&solution.cut.cut) {
        let (u, v) = e.key();
        if c {
            objective += e.cost;
            if labels[u] == labels[v] && !instance.is_partitionable(labels[u]) {
                violations.push(violation(
                    "split_class",
                    vec![u, v],
                    format!("edge ({u}, {v}) is cut inside class {}, which is not partitionable", labels[u]),
                ));
            }
        } else if labels[u] != labels[v] {
            violations.push(violation(
                "label_link",
                vec![u, v],
                format!("edge ({u}, {v}) joins classes {} and {} but is not cut", labels[u], labels[v]),
            ));
        }
    }
    for i in internal_cut_edges(instance.node_count(), edges.iter().map(|e| (e.u, e.v)), &solution.cut.cut) {
        let (u, v) = edges[i].key();
        violations.push(violation("cycle", vec![u, v], format!("edge ({u}, {v}) is cut but its endpoints are connected by uncut edges")));
    }
    Ok(EvaluationReport::new(objective, violations))
}

/// Adds the row/column violations and returns the objective of one pairwise
/// matching. `pair` prefixes locations for multi-graph matching.
fn gm_part(gm: &GmInstance, solution: &GmSolution, pair: Option<(usize, usize)>, violations: &mut Vec<Violation>) -> Result<f64, EvalError> {
    let mut positions = Vec::with_capacity(solution.active.len());
    for &id in &solution.active {
        positions.push(gm.position(id).ok_or(EvalError::UnknownId { kind: "assignment", id })?);
    }
    let prefix: Vec<usize> = pair.map(|(p, k)| vec![p, k]).unwrap_or_default();
    let within = pair.map(|(p, k)| format!(" of pair ({p}, {k})")).unwrap_or_default();
    let mut left: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut right: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut objective = 0.0;
    for &pos in &positions {
        let a = gm.assignments()[pos];
        left.entry(a.left).or_default().push(a.id);
        right.entry(a.right).or_default().push(a.id);
        objective += a.cost;
    }
    for (kind, side, groups) in [("row", "left", left), ("column", "right", right)] {
        let mut groups: Vec<_> = groups.into_iter().filter(|(_, ids)| ids.len() > 1).collect();
        groups.sort_unstable();
        for (node, ids) in groups {
            let mut location = prefix.clone();
            location.push(node);
            violations.push(violation(kind, location, format!("{side} node {node}{within} is matched by assignments {ids:?}")));
        }
    }
    let on: BTreeSet<usize> = positions.into_iter().collect();
    objective += gm.quadratic().iter().filter(|t| on.contains(&t.first) && on.contains(&t.second)).map(|t| t.cost).sum::<f64>();
    Ok(objective)
}

pub fn evaluate_gm(gm: &GmInstance, solution: &GmSolution) -> Result<EvaluationReport, EvalError> {
    let mut violations = Vec::new();
    let objective = gm_part(gm, solution, None, &mut violations)?;
    Ok(EvaluationReport::new(objective, violations))
}

/// Pairwise evaluations plus cycle consistency: within every triple of
/// graphs, two matches that chain through a common point require the third
/// match closing the triangle.
pub fn evaluate_mgm(instance: &MgmInstance, solution: &MgmSolution) -> Result<EvaluationReport, EvalError> {
    if let Some(&(p, k)) = solution.matchings.keys().find(|key| !instance.problems().contains_key(key)) {
        return Err(EvalError::UnknownPair { p, k });
    }
    let mut violations = Vec::new();
    let mut objective = 0.0;
    let mut matched: HashMap<(usize, usize), BTreeSet<(usize, usize)>> = HashMap::new();
    for (&(p, k), gm) in instance.problems() {
        let s = solution.matchings.get(&(p, k)).ok_or(EvalError::MissingPair { p, k })?;
        objective += gm_part(gm, s, Some((p, k)), &mut violations)?;
        let pairs = s.active.iter().map(|&id| {
            let a = gm.assignments()[gm.position(id).expect("checked by gm_part")];
            (a.left, a.right)
        });
        matched.insert((p, k), pairs.collect());
    }
    let empty = BTreeSet::new();
    let n = instance.graph_count();
    for p in 0..n {
        for k in p + 1..n {
            for l in k + 1..n {
                let get = |a, b| matched.get(&(a, b)).unwrap_or(&empty);
                let (pk, kl, pl) = (get(p, k), get(k, l), get(p, l));
                let mut missing = BTreeSet::new();
                for &(i, j) in pk {
                    for &(_, q) in kl.range((j, 0)..=(j, usize::MAX)) {
                        if !pl.contains(&(i, q)) {
                            missing.insert((i, j, q, format!("({p}, {k}, {l}), chain {p}:{i} -> {k}:{j} -> {l}:{q} lacks {p}:{i} <-> {l}:{q}")));
                        }
                    }
                    for &(_, q) in pl.range((i, 0)..=(i, usize::MAX)) {
                        if !kl.contains(&(j, q)) {
                            missing.insert((i, j, q, format!("({p}, {k}, {l}), chain {k}:{j} -> {p}:{i} -> {l}:{q} lacks {k}:{j} <-> {l}:{q}")));
                        }
                    }
                }
                for &(i, q) in pl {
                    for &(j, _) in kl.iter().filter(|&&(_, q2)| q2 == q) {
                        if !pk.contains(&(i, j)) {
                            missing.insert((i, j, q, format!("({p}, {k}, {l}), chain {p}:{i} -> {l}:{q} -> {k}:{j} lacks {p}:{i} <-> {k}:{j}")));
                        }
                    }
                }
                for (i, j, q, what) in missing {
                    violations.push(violation("transitivity", vec![p, k, l, i, j, q], format!("graph triple {what}")));
                }
            }
        }
    }
    Ok(EvaluationReport::new(objective, violations))
}

pub fn evaluate_cell_tracking(instance: &CellTrackingInstance, solution: &CellTrackingSolution) -> Result<EvaluationReport, EvalError> {
    let unknown = |kind, id| EvalError::UnknownId { kind, id };
    let mut objective = 0.0;
    for &id in &solution.detections {
        objective += instance.detections()[instance.detection_position(id).ok_or(unknown("detection", id))?].cost;
    }
    for (kind, ids, list) in [
        ("appearance", &solution.appearances, instance.appearances()),
        ("disappearance", &solution.disappearances, instance.disappearances()),
    ] {
        for &id in ids {
            objective += list.iter().find(|b| b.detection == id).ok_or(unknown(kind, id))?.cost;
        }
    }
    for &id in &solution.moves {
        objective += instance.moves()[instance.move_position(id).ok_or(unknown("move", id))?].cost;
    }
    for &id in &solution.divisions {
        objective += instance.divisions()[instance.division_position(id).ok_or(unknown("division", id))?].cost;
    }

    let mut violations = Vec::new();
    let moves = instance.moves();
    let divisions = instance.divisions();
    for (d, flow) in instance.detections().iter().zip(instance.flow()) {
        let id = d.id;
        let on = u8::from(solution.detections.contains(&id));
        let app = u8::from(flow.appearance.is_some() && solution.appearances.contains(&id));
        let disapp = u8::from(flow.disappearance.is_some() && solution.disappearances.contains(&id));
        let count = |list: &[usize], active: &dyn Fn(usize) -> bool| list.iter().filter(|&&p| active(p)).count();
        let move_on = |p: usize| solution.moves.contains(&moves[p].id);
        let div_on = |p: usize| solution.divisions.contains(&divisions[p].id);
        if flow.constrained_in {
            let incoming = count(&flow.moves_in, &move_on) + count(&flow.divisions_in, &div_on) + app as usize;
            if incoming != on as usize {
                violations.push(violation(
                    "flow_in",
                    vec![id],
                    format!("detection {id} is {} but has {incoming} active incoming links", if on == 1 { "active" } else { "inactive" }),
                ));
            }
        } else if app > on {
            violations.push(violation("appearance", vec![id], format!("appearance of inactive detection {id}")));
        }
        if flow.constrained_out {
            let outgoing = count(&flow.moves_out, &move_on) + count(&flow.divisions_out, &div_on) + disapp as usize;
            if outgoing != on as usize {
                violations.push(violation(
                    "flow_out",
                    vec![id],
                    format!("detection {id} is {} but has {outgoing} active outgoing links", if on == 1 { "active" } else { "inactive" }),
                ));
            }
        } else if disapp > on {
            violations.push(violation("disappearance", vec![id], format!("disappearance of inactive detection {id}")));
        }
    }
    for (k, set) in instance.exclusions().iter().enumerate() {
        let active: Vec<usize> = set.iter().copied().filter(|id| solution.detections.contains(id)).collect();
        if active.len() > 1 {
            violations.push(violation("exclusion", vec![k], format!("exclusion set {k} has active detections {active:?}")));
        }
    }
    Ok(EvaluationReport::new(objective, violations))
}

/// Rows with integral data are compared exactly, others with
/// [`ILP_TOLERANCE`].
pub fn evaluate_ilp(ilp: &IlpInstance, x: &[bool]) -> Result<EvaluationReport, EvalError> {
    check_len("assignment", ilp.variable_count(), x.len())?;
    let violations = ilp
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_satisfied(x, if c.is_integral() { 0.0 } else { ILP_TOLERANCE }))
        .map(|(i, c)| {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            violation("constraint", vec![i], format!("`{}`: activity {} {rel} {} does not hold", c.id, c.activity(x), c.rhs))
        })
        .collect();
    Ok(EvaluationReport::new(ilp.objective_value(x), violations))
}

/// Evaluates any solution against an instance of the matching class.
pub fn evaluate(instance: &ProblemInstance, solution: &Solution) -> Result<EvaluationReport, EvalError> {
    match (instance, solution) {
        (ProblemInstance::Mrf(i), Solution::Labeling(s)) => evaluate_mrf(i, s),
        (ProblemInstance::BottleneckMrf(i), Solution::Labeling(s)) => evaluate_bottleneck_mrf(i, s),
        (ProblemInstance::Tomography(i), Solution::Labeling(s)) => evaluate_tomography(i, s),
        (ProblemInstance::Multicut(i), Solution::Partition(p)) => evaluate_multicut(i, &cut_from_partition(i, p)?),
        (ProblemInstance::Amwc(i), Solution::Amwc(s)) => evaluate_amwc(i, s),
        (ProblemInstance::GraphMatching(i), Solution::Matching(s)) => evaluate_gm(i, s),
        (ProblemInstance::MultiGraphMatching(i), Solution::MultiMatching(s)) => evaluate_mgm(i, s),
        (ProblemInstance::CellTracking(i), Solution::CellTracking(s)) => evaluate_cell_tracking(i, s),
        (ProblemInstance::Ilp(i), Solution::Ilp(x)) => evaluate_ilp(i, x),
        _ => Err(EvalError::WrongSolutionKind { expected: instance.class().name(), found: solution.kind() }),
    }
}
