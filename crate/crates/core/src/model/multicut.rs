//! Multicut (correlation clustering) and asymmetric multiway cut.

use std::collections::HashSet;

use serde::Serialize;

use super::ModelError;

/// Weighted undirected edge. The objective charges `cost` when the edge is cut,
/// so positive costs are attractive (prefer joining) and negative ones
/// repulsive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub cost: f64,
}

impl WeightedEdge {
    /// Endpoints ordered as `(min, max)`.
    pub fn key(&self) -> (usize, usize) {
        if self.u < self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

fn check_edges(node_count: usize, edges: &[WeightedEdge]) -> Result<(), ModelError> {
    let mut seen = HashSet::with_capacity(edges.len());
    for edge in edges {
        for node in [edge.u, edge.v] {
            if node >= node_count {
                return Err(ModelError::NodeOutOfRange { context: "edge".into(), node, node_count });
            }
        }
        if edge.u == edge.v {
            return Err(ModelError::SelfLoop { node: edge.u });
        }
        if edge.cost.is_nan() {
            return Err(ModelError::NotANumber { context: format!("cost of edge ({}, {})", edge.u, edge.v) });
        }
        let (u, v) = edge.key();
        if !seen.insert((u, v)) {
            return Err(ModelError::DuplicateEdge { u, v });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticutInstance {
    node_count: usize,
    edges: Vec<WeightedEdge>,
}

impl MulticutInstance {
    pub fn new(node_count: usize, edges: Vec<WeightedEdge>) -> Result<Self, ModelError> {
        check_edges(node_count, &edges)?;
        Ok(Self { node_count, edges })
    }

    /// Node count inferred as `1 + max endpoint`, as in the file format.
    pub fn from_edges(edges: Vec<WeightedEdge>) -> Result<Self, ModelError> {
        let node_count = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
        Self::new(node_count, edges)
    }

    /// Sums the costs of repeated edges (in either orientation) into the
    /// first occurrence.
    pub fn merge_duplicates(edges: Vec<WeightedEdge>) -> Vec<WeightedEdge> {
        let mut slot: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
        let mut merged: Vec<WeightedEdge> = Vec::with_capacity(edges.len());
        for edge in edges {
            match slot.get(&edge.key()) {
                Some(&i) => merged[i].cost += edge.cost,
                None => {
                    slot.insert(edge.key(), merged.len());
                    merged.push(edge);
                }
            }
        }
        merged
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }
}

/// Cluster id per node; ids form the contiguous range `0..cluster_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    clusters: Vec<usize>,
}

impl Partition {
    pub fn new(clusters: Vec<usize>) -> Result<Self, ModelError> {
        let count = clusters.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut used = vec![false; count];
        for &c in &clusters {
            used[c] = true;
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(ModelError::NonContiguousPartition { missing });
        }
        Ok(Self { clusters })
    }

    /// Relabels arbitrary cluster labels to first-occurrence order, so equal
    /// partitions get equal representations.
    pub fn canonical<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let clusters = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(*l).or_insert(next)
            })
            .collect();
        Self { clusters }
    }

    pub fn singletons(n: usize) -> Self {
        Self { clusters: (0..n).collect() }
    }

    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.clusters[node]
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.iter().map(|&c| c + 1).max().unwrap_or(0)
    }

    /// Member lists per cluster, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count()];
        for (node, &c) in self.clusters.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn into_canonical(self) -> Self {
        Self::canonical(&self.clusters)
    }
}

/// One flag per edge, `true` = cut.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeCutVector {
    pub cut: Vec<bool>,
}

impl EdgeCutVector {
    pub fn new(cut: Vec<bool>) -> Self {
        Self { cut }
    }

    pub fn len(&self) -> usize {
        self.cut.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cut.is_empty()
    }
}

/// Joint node classification and multicut; only classes in `partitionable`
/// may be split into several clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct AmwcInstance {
    class_count: usize,
    partitionable: Vec<usize>,
    node_costs: Vec<Vec<f64>>,
    edges: Vec<WeightedEdge>,
}

impl AmwcInstance {
    pub fn new(
        class_count: usize,
        partitionable: Vec<usize>,
        node_costs: Vec<Vec<f64>>,
        edges: Vec<WeightedEdge>,
    ) -> Result<Self, ModelError> {
        for (node, row) in node_costs.iter().enumerate() {
            if row.len() != class_count {
                return Err(ModelError::SizeMismatch {
                    what: format!("node cost row {node}"),
                    expected: class_count,
                    found: row.len(),
                });
            }
            if row.iter().any(|c| c.is_nan()) {
                return Err(ModelError::NotANumber { context: format!("node cost row {node}") });
            }
        }
        let mut seen = HashSet::new();
        for &class in &partitionable {
            if class >= class_count {
                return Err(ModelError::ClassOutOfRange { class, class_count });
            }
            if !seen.insert(class) {
                return Err(ModelError::DuplicateRecord { kind: "partitionable class", id: class });
            }
        }
        check_edges(node_costs.len(), &edges)?;
        Ok(Self { class_count, partitionable, node_costs, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_costs.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Partitionable classes in file order.
    pub fn partitionable(&self) -> &[usize] {
        &self.partitionable
    }

    pub fn is_partitionable(&self, class: usize) -> bool {
        self.partitionable.contains(&class)
    }

    pub fn node_costs(&self) -> &[Vec<f64>] {
        &self.node_costs
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AmwcSolution {
    pub labels: Vec<usize>,
    pub cut: EdgeCutVector,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: usize, v: usize, cost: f64) -> WeightedEdge {
        WeightedEdge { u, v, cost }
    }

    #[test]
    fn duplicate_edges_rejected_in_either_orientation() {
        let err = MulticutInstance::from_edges(vec![e(0, 1, 1.0), e(1, 0, 2.0)]).unwrap_err();
        assert_eq!(err, ModelError::DuplicateEdge { u: 0, v: 1 });
        let merged = MulticutInstance::merge_duplicates(vec![e(0, 1, 1.0), e(2, 1, 0.5), e(1, 0, 2.0)]);
        assert_eq!(merged, vec![e(0, 1, 3.0), e(2, 1, 0.5)]);
    }

    #[test]
    fn node_count_from_edges() {
        let mc = MulticutInstance::from_edges(vec![e(0, 4, 1.0)]).unwrap();
        assert_eq!(mc.node_count(), 5);
        assert_eq!(MulticutInstance::from_edges(vec![]).unwrap().node_count(), 0);
        assert_eq!(MulticutInstance::from_edges(vec![e(2, 2, 1.0)]), Err(ModelError::SelfLoop { node: 2 }));
    }

    #[test]
    fn partition_contiguity() {
        assert!(Partition::new(vec![0, 1, 0]).is_ok());
        assert_eq!(Partition::new(vec![0, 2]), Err(ModelError::NonContiguousPartition { missing: 1 }));
        assert_eq!(Partition::canonical(&[7, 3, 7, 9]).clusters(), &[0, 1, 0, 2]);
        assert_eq!(Partition::new(vec![1, 0, 1]).unwrap().members(), vec![vec![1], vec![0, 2]]);
    }

    #[test]
    fn amwc_validation() {
        assert!(AmwcInstance::new(2, vec![0], vec![vec![0.0, 1.0]; 2], vec![e(0, 1, -1.0)]).is_ok());
        assert_eq!(
            AmwcInstance::new(2, vec![2], vec![vec![0.0, 1.0]], vec![]),
            Err(ModelError::ClassOutOfRange { class: 2, class_count: 2 })
        );
        assert!(matches!(
            AmwcInstance::new(2, vec![], vec![vec![0.0, 1.0], vec![0.0]], vec![]),
            Err(ModelError::SizeMismatch { expected: 2, found: 1, .. })
        ));
    }
}
