//! Conversion between native solutions and binary ILP assignments.

use std::collections::BTreeSet;

use crate::graph::UnionFind;
use crate::model::{
    AmwcSolution, CellTrackingSolution, EdgeCutVector, GmSolution, MgmSolution, MrfLabeling, Partition, Solution,
};

use super::{LoweredModel, LoweringError, Target, VarRole};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub solution: Solution,
    /// For cut-based models: whether the cut vector equals the cut of the
    /// partition formed by its uncut edges. Always true otherwise.
    pub exact_match: bool,
}

fn expected(target: &Target) -> &'static str {
    match target {
        Target::Labeling { .. } => "labeling",
        Target::Partition { .. } => "partition",
        Target::Amwc { .. } => "amwc",
        Target::Matching => "matching",
        Target::MultiMatching { .. } => "multi-matching",
        Target::CellTracking => "cell-tracking",
    }
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), LoweringError> {
    if expected == found {
        Ok(())
    } else {
        Err(LoweringError::SizeMismatch { what: what.to_string(), expected, found })
    }
}

/// Every id in `ids` must have a variable under `role`.
fn check_known(model: &LoweredModel, what: &str, ids: &BTreeSet<usize>, role: impl Fn(usize) -> VarRole) -> Result<(), LoweringError> {
    match ids.iter().find(|&&id| model.var(&role(id)).is_none()) {
        Some(id) => Err(LoweringError::Inconsistent(format!("unknown {what} {id}"))),
        None => Ok(()),
    }
}

/// Indicator assignment of a native solution. Fails if the solution has the
/// wrong kind or size, or if the resulting point violates an ILP row.
pub fn encode_solution(model: &LoweredModel, solution: &Solution) -> Result<Vec<bool>, LoweringError> {
    let wrong = || LoweringError::WrongSolutionKind { expected: expected(&model.target), found: solution.kind() };
    let value: Box<dyn Fn(&VarRole) -> bool + '_> = match (&model.target, solution) {
        (Target::Labeling { node_count }, Solution::Labeling(l)) => {
            check_len("labels", *node_count, l.labels.len())?;
            let lab = &l.labels;
            Box::new(move |role| match *role {
                VarRole::NodeLabel { node, label } => lab[node] == label,
                VarRole::EdgeLabels { u, v, label_u, label_v, .. } => lab[u] == label_u && lab[v] == label_v,
                VarRole::PottsDisagreement { u, v, label, .. } => (lab[u] == label) != (lab[v] == label),
                _ => false,
            })
        }
        (Target::Partition { node_count, .. }, Solution::Partition(p)) => {
            check_len("partition", *node_count, p.len())?;
            Box::new(move |role| match *role {
                VarRole::CutEdge { u, v, .. } => p.cluster_of(u) != p.cluster_of(v),
                _ => false,
            })
        }
        (Target::Amwc { node_count, edges }, Solution::Amwc(s)) => {
            check_len("labels", *node_count, s.labels.len())?;
            check_len("cut vector", edges.len(), s.cut.len())?;
            Box::new(move |role| match *role {
                VarRole::NodeClass { node, class } => s.labels[node] == class,
                VarRole::CutEdge { edge, .. } => s.cut.cut[edge],
                _ => false,
            })
        }
        (Target::Matching, Solution::Matching(g)) => {
            check_known(model, "assignment", &g.active, |id| VarRole::Assignment { pair: None, id })?;
            Box::new(move |role| match *role {
                VarRole::Assignment { id, .. } => g.active.contains(&id),
                VarRole::Product { first, second, .. } => g.active.contains(&first) && g.active.contains(&second),
                _ => false,
            })
        }
        (Target::MultiMatching { .. }, Solution::MultiMatching(s)) => {
            for (&pair, g) in &s.matchings {
                check_known(model, &format!("assignment of pair {pair:?}"), &g.active, |id| VarRole::Assignment {
                    pair: Some(pair),
                    id,
                })?;
            }
            let on = move |pair: Option<(usize, usize)>, id: usize| {
                pair.and_then(|p| s.matchings.get(&p)).is_some_and(|g| g.active.contains(&id))
            };
            Box::new(move |role| match *role {
                VarRole::Assignment { pair, id } => on(pair, id),
                VarRole::Product { pair, first, second } => on(pair, first) && on(pair, second),
                _ => false,
            })
        }
        (Target::CellTracking, Solution::CellTracking(s)) => {
            check_known(model, "detection", &s.detections, |id| VarRole::Detection { id })?;
            check_known(model, "appearance", &s.appearances, |detection| VarRole::Appearance { detection })?;
            check_known(model, "disappearance", &s.disappearances, |detection| VarRole::Disappearance { detection })?;
            check_known(model, "move", &s.moves, |id| VarRole::Move { id })?;
            check_known(model, "division", &s.divisions, |id| VarRole::Division { id })?;
            Box::new(move |role| match *role {
                VarRole::Detection { id } => s.detections.contains(&id),
                VarRole::Appearance { detection } => s.appearances.contains(&detection),
                VarRole::Disappearance { detection } => s.disappearances.contains(&detection),
                VarRole::Move { id } => s.moves.contains(&id),
                VarRole::Division { id } => s.divisions.contains(&id),
                _ => false,
            })
        }
        _ => return Err(wrong()),
    };
    let x: Vec<bool> = model.roles().iter().map(value).collect();
    if let Some(i) = model.ilp.first_violation(&x, TOL) {
        return Err(LoweringError::Infeasible { constraint: model.ilp.constraints()[i].id.clone() });
    }
    Ok(x)
}

/// Partition formed by the uncut edges, and whether `cut` is exactly its cut.
fn partition_of(node_count: usize, edges: &[(usize, usize)], cut: &[bool]) -> (Partition, bool) {
    let mut uf = UnionFind::new(node_count);
    for (&(u, v), &c) in edges.iter().zip(cut) {
        if !c {
            uf.union(u, v);
        }
    }
    let partition = Partition::canonical(&uf.labels());
    let consistent = edges.iter().zip(cut).all(|(&(u, v), &c)| c == (partition.cluster_of(u) != partition.cluster_of(v)));
    (partition, consistent)
}

/// Native solution of an integral ILP point. Cut-based models accept any
/// integral point and report through `exact_match` whether the cut vector is
/// a valid multicut; every other model requires the point to satisfy all
/// rows.
pub fn decode_solution(model: &LoweredModel, values: &[f64]) -> Result<Decoded, LoweringError> {
    check_len("assignment", model.ilp.variable_count(), values.len())?;
    let mut x = Vec::with_capacity(values.len());
    for (name, &v) in model.ilp.variables().iter().zip(values) {
        let bit = if (v - 1.0).abs() <= TOL {
            true
        } else if v.abs() <= TOL {
            false
        } else {
            return Err(LoweringError::NonIntegral { variable: name.clone(), value: v });
        };
        x.push(bit);
    }
    let active = || model.roles().iter().zip(&x).filter(|(_, &b)| b).map(|(r, _)| *r);

    if let Target::Partition { node_count, edges } = &model.target {
        let (partition, exact_match) = partition_of(*node_count, edges, &x);
        return Ok(Decoded { solution: Solution::Partition(partition), exact_match });
    }
    if let Some(i) = model.ilp.first_violation(&x, TOL) {
        return Err(LoweringError::Inconsistent(format!("constraint `{}` is violated", model.ilp.constraints()[i].id)));
    }
    let decoded = |solution| Ok(Decoded { solution, exact_match: true });
    match &model.target {
        Target::Labeling { node_count } => {
            let mut labels = vec![usize::MAX; *node_count];
            for role in active() {
                if let VarRole::NodeLabel { node, label } = role {
                    labels[node] = label;
                }
            }
            if let Some(node) = labels.iter().position(|&l| l == usize::MAX) {
                return Err(LoweringError::Inconsistent(format!("node {node} has no label")));
            }
            decoded(Solution::Labeling(MrfLabeling::new(labels)))
        }
        Target::Amwc { node_count, edges } => {
            let mut labels = vec![usize::MAX; *node_count];
            let mut cut = vec![false; edges.len()];
            for role in active() {
                match role {
                    VarRole::NodeClass { node, class } => labels[node] = class,
                    VarRole::CutEdge { edge, .. } => cut[edge] = true,
                    _ => {}
                }
            }
            if let Some(node) = labels.iter().position(|&l| l == usize::MAX) {
                return Err(LoweringError::Inconsistent(format!("node {node} has no class")));
            }
            let (_, exact_match) = partition_of(*node_count, edges, &cut);
            Ok(Decoded { solution: Solution::Amwc(AmwcSolution { labels, cut: EdgeCutVector::new(cut) }), exact_match })
        }
        Target::Matching => decoded(Solution::Matching(GmSolution::new(active().filter_map(|r| match r {
            VarRole::Assignment { id, .. } => Some(id),
            _ => None,
        })))),
        Target::MultiMatching { pairs } => {
            let mut s = MgmSolution { matchings: pairs.iter().map(|&p| (p, GmSolution::default())).collect() };
            for role in active() {
                if let VarRole::Assignment { pair: Some(pair), id } = role {
                    s.matchings.entry(pair).or_default().active.insert(id);
                }
            }
            decoded(Solution::MultiMatching(s))
        }
        Target::CellTracking => {
            let mut s = CellTrackingSolution::default();
            for role in active() {
                match role {
                    VarRole::Detection { id } => s.detections.insert(id),
                    VarRole::Appearance { detection } => s.appearances.insert(detection),
                    VarRole::Disappearance { detection } => s.disappearances.insert(detection),
                    VarRole::Move { id } => s.moves.insert(id),
                    VarRole::Division { id } => s.divisions.insert(id),
                    _ => false,
                };
            }
            decoded(Solution::CellTracking(s))
        }
        Target::Partition { .. } => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowering::{lower_gm, lower_mrf_local_polytope, lower_multicut};
    use crate::model::{Assignment, GmInstance, MrfEdge, MrfInstance, MulticutInstance, WeightedEdge};

    fn to_f64(x: &[bool]) -> Vec<f64> {
        x.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn mrf_indicators() {
        let mrf = MrfInstance::new(vec![vec![0.0; 2]; 2], vec![MrfEdge { u: 0, v: 1, table: vec![0.0; 4] }]).unwrap();
        let m = lower_mrf_local_polytope(&mrf).unwrap();
        let sol = Solution::Labeling(MrfLabeling::new(vec![0, 1]));
        let x = encode_solution(&m, &sol).unwrap();
        let on: Vec<&str> = m.ilp.variables().iter().zip(&x).filter(|(_, &b)| b).map(|(n, _)| n.as_str()).collect();
        assert_eq!(on, ["mu_0_0", "mu_1_1", "mu_0_1_0_1"]);
        assert_eq!(decode_solution(&m, &to_f64(&x)).unwrap().solution, sol);
        assert!(matches!(decode_solution(&m, &[0.0; 8]), Err(LoweringError::Inconsistent(_))));
        assert!(matches!(decode_solution(&m, &[0.5; 8]), Err(LoweringError::NonIntegral { .. })));
        let bad = Solution::Labeling(MrfLabeling::new(vec![0, 2]));
        assert!(matches!(encode_solution(&m, &bad), Err(LoweringError::Infeasible { .. })));
        let wrong = Solution::Partition(Partition::singletons(2));
        assert!(matches!(encode_solution(&m, &wrong), Err(LoweringError::WrongSolutionKind { .. })));
    }

    fn triangle() -> MulticutInstance {
        let e = |u, v| WeightedEdge { u, v, cost: 1.0 };
        MulticutInstance::new(3, vec![e(0, 1), e(1, 2), e(0, 2)]).unwrap()
    }

    #[test]
    fn partition_cut() {
        let m = lower_multicut(&triangle(), 3).unwrap();
        let p = Partition::new(vec![0, 1, 0]).unwrap();
        let x = encode_solution(&m, &Solution::Partition(p.clone())).unwrap();
        assert_eq!(x, [true, true, false]);
        let d = decode_solution(&m, &to_f64(&x)).unwrap();
        assert_eq!((d.solution, d.exact_match), (Solution::Partition(p), true));
    }

    #[test]
    fn invalid_cut_reports_mismatch() {
        // A single cut edge on a triangle is not a multicut: the other two
        // edges join all three nodes.
        let m = lower_multicut(&triangle(), 3).unwrap();
        let d = decode_solution(&m, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(d.solution, Solution::Partition(Partition::new(vec![0, 0, 0]).unwrap()));
        assert!(!d.exact_match);
        // Cutting two triangle edges is a valid cut.
        assert!(decode_solution(&m, &[1.0, 0.0, 1.0]).unwrap().exact_match);
    }

    #[test]
    fn gm_products() {
        let a = |id, left, right| Assignment { id, left, right, cost: 0.0 };
        let gm = GmInstance::new(2, 2, vec![a(0, 0, 0), a(1, 1, 1), a(2, 0, 1)], vec![(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let m = lower_gm(&gm);
        let x = encode_solution(&m, &Solution::Matching(GmSolution::new([0, 1]))).unwrap();
        assert_eq!(x, [true, true, false, true, false]);
        let unknown = Solution::Matching(GmSolution::new([7]));
        assert!(matches!(encode_solution(&m, &unknown), Err(LoweringError::Inconsistent(_))));
    }
}
