//! Pairwise Markov random fields in energy form, plus the bottleneck and
//! discrete tomography extensions that share the same graph.

use std::collections::HashSet;

use serde::Serialize;

use super::ModelError;

/// An undirected MRF edge. `u < v`; the pairwise table is row-major with `u`
/// indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MrfEdge {
    pub u: usize,
    pub v: usize,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrfInstance {
    label_counts: Vec<usize>,
    unaries: Vec<Vec<f64>>,
    edges: Vec<MrfEdge>,
}

impl MrfInstance {
    /// Validates table shapes and the edge list. Edges given with `u > v` are
    /// rejected; callers that read reversed scopes transpose first.
    pub fn new(unaries: Vec<Vec<f64>>, edges: Vec<MrfEdge>) -> Result<Self, ModelError> {
        let label_counts: Vec<usize> = unaries.iter().map(Vec::len).collect();
        for (node, &count) in label_counts.iter().enumerate() {
            if count == 0 {
                return Err(ModelError::NoLabels { node });
            }
        }
        for (node, table) in unaries.iter().enumerate() {
            check_values(table, &format!("unary table of node {node}"))?;
        }
        let n = label_counts.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for edge in &edges {
            for node in [edge.u, edge.v] {
                if node >= n {
                    return Err(ModelError::NodeOutOfRange {
                        context: "pairwise scope".into(),
                        node,
                        node_count: n,
                    });
                }
            }
            if edge.u == edge.v {
                return Err(ModelError::SelfLoop { node: edge.u });
            }
            if edge.u > edge.v {
                return Err(ModelError::UnorderedEdge { u: edge.u, v: edge.v });
            }
            if !seen.insert((edge.u, edge.v)) {
                return Err(ModelError::DuplicateEdge { u: edge.u, v: edge.v });
            }
            let expected = label_counts[edge.u] * label_counts[edge.v];
            if edge.table.len() != expected {
                return Err(ModelError::SizeMismatch {
                    what: format!("pairwise table of edge ({}, {})", edge.u, edge.v),
                    expected,
                    found: edge.table.len(),
                });
            }
            check_values(&edge.table, &format!("pairwise table of edge ({}, {})", edge.u, edge.v))?;
        }
        Ok(Self { label_counts, unaries, edges })
    }

    pub fn node_count(&self) -> usize {
        self.label_counts.len()
    }

    pub fn label_counts(&self) -> &[usize] {
        &self.label_counts
    }

    pub fn unaries(&self) -> &[Vec<f64>] {
        &self.unaries
    }

    pub fn unary(&self, node: usize) -> &[f64] {
        &self.unaries[node]
    }

    pub fn edges(&self) -> &[MrfEdge] {
        &self.edges
    }

    /// `θ_uv(a, b)` for edge `e`, with `a` the label of the smaller endpoint.
    pub fn pairwise(&self, e: usize, a: usize, b: usize) -> f64 {
        let edge = &self.edges[e];
        edge.table[a * self.label_counts[edge.v] + b]
    }

    /// Energy of a labeling whose labels are known to be in range.
    pub fn energy(&self, labels: &[usize]) -> f64 {
        let unary: f64 = labels.iter().enumerate().map(|(v, &l)| self.unaries[v][l]).sum();
        let pairwise: f64 = (0..self.edges.len())
            .map(|e| {
                let edge = &self.edges[e];
                self.pairwise(e, labels[edge.u], labels[edge.v])
            })
            .sum();
        unary + pairwise
    }

    /// Edge indices incident to each node.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.node_count()];
        for (e, edge) in self.edges.iter().enumerate() {
            inc[edge.u].push(e);
            inc[edge.v].push(e);
        }
        inc
    }

    /// Checks that a labeling has the right length and in-range labels.
    pub fn check_labeling(&self, labeling: &MrfLabeling) -> Result<(), ModelError> {
        if labeling.labels.len() != self.node_count() {
            return Err(ModelError::SizeMismatch {
                what: "labeling".into(),
                expected: self.node_count(),
                found: labeling.labels.len(),
            });
        }
        for (node, (&label, &label_count)) in labeling.labels.iter().zip(&self.label_counts).enumerate() {
            if label >= label_count {
                return Err(ModelError::LabelOutOfRange { node, label, label_count });
            }
        }
        Ok(())
    }
}

fn check_values(values: &[f64], context: &str) -> Result<(), ModelError> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(ModelError::NotANumber { context: context.to_string() });
    }
    Ok(())
}

/// One 0-based label per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MrfLabeling {
    pub labels: Vec<usize>,
}

impl MrfLabeling {
    pub fn new(labels: Vec<usize>) -> Self {
        Self { labels }
    }
}

/// MRF with a second set of potentials aggregated by max instead of sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BottleneckMrfInstance {
    base: MrfInstance,
    bottleneck: MrfInstance,
}

impl BottleneckMrfInstance {
    /// `bottleneck` must have the same label counts and edge list as `base`.
    pub fn new(base: MrfInstance, bottleneck: MrfInstance) -> Result<Self, ModelError> {
        if base.label_counts != bottleneck.label_counts {
            return Err(ModelError::ShapeMismatch(format!(
                "label counts {:?} vs {:?}",
                base.label_counts, bottleneck.label_counts
            )));
        }
        if base.edges.len() != bottleneck.edges.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} edges vs {} edges",
                base.edges.len(),
                bottleneck.edges.len()
            )));
        }
        for (e, (a, b)) in base.edges.iter().zip(&bottleneck.edges).enumerate() {
            if (a.u, a.v) != (b.u, b.v) {
                return Err(ModelError::ShapeMismatch(format!(
                    "edge {e} is ({}, {}) in the base model but ({}, {}) in the bottleneck part",
                    a.u, a.v, b.u, b.v
                )));
            }
        }
        Ok(Self { base, bottleneck })
    }

    pub fn base(&self) -> &MrfInstance {
        &self.base
    }

    /// The ψ potentials, stored as an MRF over the same graph.
    pub fn bottleneck(&self) -> &MrfInstance {
        &self.bottleneck
    }
}

/// A tomographic projection: the set of nodes on one ray and a cost for
/// every possible label sum along it. Infinite entries forbid that sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub nodes: Vec<usize>,
    pub costs: Vec<f64>,
}

impl Projection {
    /// The unique sum with cost 0 when every other entry is infinite.
    pub fn hard_target(&self) -> Option<usize> {
        let mut finite = self.costs.iter().enumerate().filter(|(_, c)| c.is_finite());
        match (finite.next(), finite.next()) {
            (Some((s, 0.0)), None) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyInstance {
    base: MrfInstance,
    projections: Vec<Projection>,
}

impl TomographyInstance {
    pub fn new(base: MrfInstance, projections: Vec<Projection>) -> Result<Self, ModelError> {
        let k = base.label_counts.first().copied().unwrap_or(1);
        for (node, &count) in base.label_counts.iter().enumerate() {
            if count != k {
                return Err(ModelError::NonUniformLabels { node, expected: k, found: count });
            }
        }
        let n = base.node_count();
        for (i, projection) in projections.iter().enumerate() {
            if projection.nodes.is_empty() {
                return Err(ModelError::InvalidProjection { projection: i, reason: "no nodes".into() });
            }
            let mut seen = HashSet::new();
            for &node in &projection.nodes {
                if node >= n {
                    return Err(ModelError::NodeOutOfRange {
                        context: format!("projection {i}"),
                        node,
                        node_count: n,
                    });
                }
                if !seen.insert(node) {
                    return Err(ModelError::InvalidProjection {
                        projection: i,
                        reason: format!("node {node} listed twice"),
                    });
                }
            }
            let expected = (k - 1) * projection.nodes.len() + 1;
            if projection.costs.len() != expected {
                return Err(ModelError::SizeMismatch {
                    what: format!("cost vector of projection {i}"),
                    expected,
                    found: projection.costs.len(),
                });
            }
            for &c in &projection.costs {
                if c.is_nan() || c == f64::NEG_INFINITY {
                    return Err(ModelError::InvalidProjection {
                        projection: i,
                        reason: format!("cost {c} is not a real number or +Inf"),
                    });
                }
            }
        }
        Ok(Self { base, projections })
    }

    pub fn base(&self) -> &MrfInstance {
        &self.base
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    /// Uniform label count `K` (1 for an empty model).
    pub fn label_count(&self) -> usize {
        self.base.label_counts.first().copied().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> MrfInstance {
        MrfInstance::new(
            vec![vec![0.0, 5.0], vec![0.0, 5.0]],
            vec![MrfEdge { u: 0, v: 1, table: vec![0.0, 1.0, 1.0, 0.0] }],
        )
        .unwrap()
    }

    #[test]
    fn energy_of_chain() {
        let mrf = chain();
        assert_eq!(mrf.energy(&[1, 1]), 10.0);
        assert_eq!(mrf.energy(&[0, 0]), 0.0);
        assert_eq!(mrf.energy(&[0, 1]), 6.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(MrfInstance::new(vec![vec![]], vec![]), Err(ModelError::NoLabels { node: 0 }));
        let err = MrfInstance::new(
            vec![vec![0.0; 2], vec![0.0; 3]],
            vec![MrfEdge { u: 0, v: 1, table: vec![0.0; 5] }],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SizeMismatch { expected: 6, found: 5, .. }));
        let err = MrfInstance::new(
            vec![vec![0.0; 2]; 2],
            vec![
                MrfEdge { u: 0, v: 1, table: vec![0.0; 4] },
                MrfEdge { u: 0, v: 1, table: vec![0.0; 4] },
            ],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::DuplicateEdge { u: 0, v: 1 });
        let err =
            MrfInstance::new(vec![vec![0.0; 2]], vec![MrfEdge { u: 0, v: 0, table: vec![0.0; 4] }]).unwrap_err();
        assert_eq!(err, ModelError::SelfLoop { node: 0 });
    }

    #[test]
    fn bottleneck_shapes_must_agree() {
        let base = chain();
        let other = MrfInstance::new(vec![vec![0.0, 5.0], vec![0.0, 5.0]], vec![]).unwrap();
        assert!(matches!(BottleneckMrfInstance::new(base.clone(), other), Err(ModelError::ShapeMismatch(_))));
        assert!(BottleneckMrfInstance::new(base.clone(), base).is_ok());
    }

    #[test]
    fn projection_validation() {
        let base = MrfInstance::new(vec![vec![0.0; 2]; 2], vec![]).unwrap();
        let ok = Projection { nodes: vec![0, 1], costs: vec![f64::INFINITY, 0.0, f64::INFINITY] };
        assert_eq!(ok.hard_target(), Some(1));
        assert!(TomographyInstance::new(base.clone(), vec![ok]).is_ok());
        let short = Projection { nodes: vec![0, 1], costs: vec![0.0, 0.0] };
        assert!(TomographyInstance::new(base.clone(), vec![short]).is_err());
        let dup = Projection { nodes: vec![1, 1], costs: vec![0.0; 3] };
        assert!(TomographyInstance::new(base, vec![dup]).is_err());
        let soft = Projection { nodes: vec![0], costs: vec![0.0, 1.0, 0.0] };
        assert_eq!(soft.hard_target(), None);
    }
}
