//! Multicut and asymmetric multiway cut via edge-cut binaries constrained by
//! chordless cycle inequalities.

use crate::graph::adjacency;
use crate::model::{AmwcInstance, MulticutInstance, Relation, WeightedEdge};

use super::{LoweredModel, LoweringError, ModelBuilder, Target, VarRole};

pub const DEFAULT_CYCLE_LIMIT: usize = 5;

/// Chordless cycles of a simple graph, each listed as a node sequence
/// starting at its smallest node and oriented so the second node is smaller
/// than the last.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleSet {
    pub cycles: Vec<Vec<usize>>,
    /// Set when the search stopped at the length limit while a longer
    /// chordless cycle could still have closed. Cleared means `cycles` lists
    /// every chordless cycle of the graph.
    pub truncated: bool,
}

/// Enumerates the chordless cycles with at most `limit` nodes by extending
/// induced paths from every start node through larger nodes only.
pub fn chordless_cycles(node_count: usize, edges: &[(usize, usize)], limit: usize) -> CycleSet {
    let adj = adjacency(node_count, edges.iter().copied());
    let linked = |a: usize, b: usize| adj[a].binary_search(&b).is_ok();
    let mut out = CycleSet::default();
    let mut path = Vec::new();
    for s in 0..node_count {
        path.clear();
        path.push(s);
        extend(&adj, &linked, limit, &mut path, &mut out);
    }
    out
}

fn extend(adj: &[Vec<usize>], linked: &impl Fn(usize, usize) -> bool, limit: usize, path: &mut Vec<usize>, out: &mut CycleSet) {
    let s = path[0];
    let last = *path.last().expect("path starts at s");
    let m = path.len() - 1;
    for &w in &adj[last] {
        if w <= s || path.contains(&w) {
            continue;
        }
        if m >= 1 && path[1..m].iter().any(|&p| linked(p, w)) {
            continue;
        }
        if m >= 1 && linked(s, w) {
            if m + 2 > limit {
                out.truncated = true;
            } else if path[1] < w {
                let mut cycle = path.clone();
                cycle.push(w);
                out.cycles.push(cycle);
            }
            continue;
        }
        if m + 3 > limit {
            out.truncated = true;
            continue;
        }
        path.push(w);
        extend(adj, linked, limit, path, out);
        path.pop();
    }
}

/// `y_e` per edge, returned by edge position.
fn edge_layer(m: &mut ModelBuilder, edges: &[WeightedEdge]) -> Result<Vec<usize>, LoweringError> {
    let mut vars = Vec::with_capacity(edges.len());
    for (e, edge) in edges.iter().enumerate() {
        let (u, v) = edge.key();
        let name = format!("y_{u}_{v}");
        let var = m.var(name.clone(), VarRole::CutEdge { edge: e, u, v });
        if edge.cost == f64::INFINITY {
            m.row(format!("forbid_{name}"), vec![(var, 1.0)], Relation::Eq, 0.0);
        } else if edge.cost.is_finite() {
            m.cost(var, edge.cost);
        } else {
            return Err(LoweringError::UnsupportedCost { context: format!("edge ({u}, {v})"), value: edge.cost });
        }
        vars.push(var);
    }
    Ok(vars)
}

/// `y_e ≤ Σ_{e' ∈ C \ e} y_e'` for every edge of every enumerated cycle;
/// returns whether the rows describe the multicut set exactly.
fn cycle_rows(m: &mut ModelBuilder, node_count: usize, keys: &[(usize, usize)], y: &[usize], limit: usize) -> bool {
    let found = chordless_cycles(node_count, keys, limit);
    let slot: std::collections::HashMap<(usize, usize), usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    for cycle in &found.cycles {
        let names: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
        let id = names.join("_");
        let ring: Vec<usize> = (0..cycle.len())
            .map(|i| {
                let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                y[slot[&(a.min(b), a.max(b))]]
            })
            .collect();
        for (k, &ye) in ring.iter().enumerate() {
            let mut terms = vec![(ye, 1.0)];
            terms.extend(ring.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| (x, -1.0)));
            m.row(format!("cycle_{id}_e{k}"), terms, Relation::Le, 0.0);
        }
    }
    !found.truncated || limit >= node_count
}

/// One cut binary per edge with cycle inequalities on chordless cycles of at
/// most `cycle_limit` nodes. With a limit below the longest chordless cycle
/// the model is a relaxation and `exact` is false.
pub fn lower_multicut(instance: &MulticutInstance, cycle_limit: usize) -> Result<LoweredModel, LoweringError> {
    let mut m = ModelBuilder::new();
    let y = edge_layer(&mut m, instance.edges())?;
    let keys: Vec<(usize, usize)> = instance.edges().iter().map(WeightedEdge::key).collect();
    let exact = cycle_rows(&mut m, instance.node_count(), &keys, &y, cycle_limit);
    Ok(m.finish(exact, Target::Partition { node_count: instance.node_count(), edges: keys }))
}

/// Node class indicators with per-node simplex rows, edge cut binaries tied
/// to label differences, and `y_e ≤ 2 − x_ik − x_jk` for classes that may
/// not split.
pub fn lower_amwc(instance: &AmwcInstance, cycle_limit: usize) -> Result<LoweredModel, LoweringError> {
    let mut m = ModelBuilder::new();
    let k = instance.class_count();
    let mut x = Vec::with_capacity(instance.node_count());
    for (i, row) in instance.node_costs().iter().enumerate() {
        let mut vars = Vec::with_capacity(k);
        for (c, &cost) in row.iter().enumerate() {
            let name = format!("x_{i}_{c}");
            let var = m.var(name.clone(), VarRole::NodeClass { node: i, class: c });
            if cost == f64::INFINITY {
                m.row(format!("forbid_{name}"), vec![(var, 1.0)], Relation::Eq, 0.0);
            } else if cost.is_finite() {
                m.cost(var, cost);
            } else {
                return Err(LoweringError::UnsupportedCost { context: format!("class {c} of node {i}"), value: cost });
            }
            vars.push(var);
        }
        m.row(format!("simplex_{i}"), vars.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
        x.push(vars);
    }
    let y = edge_layer(&mut m, instance.edges())?;
    let keys: Vec<(usize, usize)> = instance.edges().iter().map(WeightedEdge::key).collect();
    for (&(u, v), &ye) in keys.iter().zip(&y) {
        for (c, (&xu, &xv)) in x[u].iter().zip(&x[v]).enumerate() {
            m.row(format!("link_{u}_{v}_{c}_a"), vec![(xu, 1.0), (xv, -1.0), (ye, -1.0)], Relation::Le, 0.0);
            m.row(format!("link_{u}_{v}_{c}_b"), vec![(xv, 1.0), (xu, -1.0), (ye, -1.0)], Relation::Le, 0.0);
        }
        for c in (0..k).filter(|&c| !instance.is_partitionable(c)) {
            m.row(format!("nonpart_{u}_{v}_{c}"), vec![(ye, 1.0), (x[u][c], 1.0), (x[v][c], 1.0)], Relation::Le, 2.0);
        }
    }
    let exact = cycle_rows(&mut m, instance.node_count(), &keys, &y, cycle_limit);
    Ok(m.finish(exact, Target::Amwc { node_count: instance.node_count(), edges: keys }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(list: &[(usize, usize, f64)]) -> Vec<WeightedEdge> {
        list.iter().map(|&(u, v, cost)| WeightedEdge { u, v, cost }).collect()
    }

    #[test]
    fn triangle_has_three_rows() {
        let mc = MulticutInstance::new(3, edges(&[(0, 1, -1.0), (1, 2, -1.0), (0, 2, 2.0)])).unwrap();
        let m = lower_multicut(&mc, 3).unwrap();
        assert_eq!(m.ilp.variable_count(), 3);
        assert_eq!(m.ilp.constraints().len(), 3);
        assert!(m.exact);
        let ids: Vec<&str> = m.ilp.constraints().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["cycle_0_1_2_e0", "cycle_0_1_2_e1", "cycle_0_1_2_e2"]);
    }

    #[test]
    fn trees_have_no_cycles() {
        let mc = MulticutInstance::new(4, edges(&[(0, 1, 1.0), (1, 2, -1.0), (1, 3, 1.0)])).unwrap();
        let m = lower_multicut(&mc, 5).unwrap();
        assert!(m.ilp.constraints().is_empty() && m.exact);
    }

    #[test]
    fn cycle_enumeration() {
        // 4-cycle with a chord: two triangles, the 4-cycle is not chordless.
        let g = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)];
        let found = chordless_cycles(4, &g, 4);
        assert_eq!(found.cycles, vec![vec![0, 1, 2], vec![0, 2, 3]]);
        assert!(!found.truncated);
        let square = [(0, 1), (1, 2), (2, 3), (0, 3)];
        let found = chordless_cycles(4, &square, 4);
        assert_eq!(found.cycles, vec![vec![0, 1, 2, 3]]);
        let short = chordless_cycles(4, &square, 3);
        assert!(short.cycles.is_empty() && short.truncated);
        // K4: four triangles, no chordless 4-cycle.
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let found = chordless_cycles(4, &k4, 3);
        assert_eq!(found.cycles.len(), 4);
        assert!(!found.truncated);
    }

    #[test]
    fn relaxed_square_is_flagged() {
        let mc = MulticutInstance::new(4, edges(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])).unwrap();
        assert!(!lower_multicut(&mc, 3).unwrap().exact);
        assert!(lower_multicut(&mc, 4).unwrap().exact);
    }

    #[test]
    fn amwc_rows() {
        let a = AmwcInstance::new(2, vec![], vec![vec![0.0, 1.0], vec![1.0, 0.0]], edges(&[(0, 1, 1.0)])).unwrap();
        let m = lower_amwc(&a, DEFAULT_CYCLE_LIMIT).unwrap();
        assert_eq!(m.ilp.variable_count(), 5);
        let ids: Vec<&str> = m.ilp.constraints().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(
            ids,
            ["simplex_0", "simplex_1", "link_0_1_0_a", "link_0_1_0_b", "link_0_1_1_a", "link_0_1_1_b", "nonpart_0_1_0", "nonpart_0_1_1"]
        );
    }
}
