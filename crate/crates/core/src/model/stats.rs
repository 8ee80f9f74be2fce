use serde::Serialize;

use super::{ProblemClass, ProblemInstance};

/// Size summary of an instance. Fields that do not apply to a class are
/// `None` and omitted from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceStats {
    pub class: ProblemClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partitionable_classes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projections: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_point_set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignments: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadratic_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detections: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moves: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclusions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraints: Option<usize>,
    /// Number of scalar cost entries; a rough proxy for problem size.
    pub size: usize,
}

impl InstanceStats {
    fn empty(class: ProblemClass) -> Self {
        Self {
            class,
            nodes: None,
            edges: None,
            labels_min: None,
            labels_max: None,
            classes: None,
            partitionable_classes: None,
            projections: None,
            left_size: None,
            right_size: None,
            graphs: None,
            max_point_set_size: None,
            assignments: None,
            quadratic_terms: None,
            frames: None,
            detections: None,
            moves: None,
            divisions: None,
            exclusions: None,
            variables: None,
            constraints: None,
            size: 0,
        }
    }
}

fn mrf_stats(class: ProblemClass, mrf: &super::MrfInstance) -> InstanceStats {
    let counts = mrf.label_counts();
    InstanceStats {
        nodes: Some(mrf.node_count()),
        edges: Some(mrf.edges().len()),
        labels_min: counts.iter().copied().min(),
        labels_max: counts.iter().copied().max(),
        size: counts.iter().sum::<usize>() + mrf.edges().iter().map(|e| e.table.len()).sum::<usize>(),
        ..InstanceStats::empty(class)
    }
}

pub fn instance_stats(instance: &ProblemInstance) -> InstanceStats {
    let class = instance.class();
    match instance {
        ProblemInstance::Mrf(mrf) => mrf_stats(class, mrf),
        ProblemInstance::BottleneckMrf(b) => {
            let mut s = mrf_stats(class, b.base());
            s.size *= 2;
            s
        }
        ProblemInstance::Tomography(t) => {
            let mut s = mrf_stats(class, t.base());
            s.projections = Some(t.projections().len());
            s.size += t.projections().iter().map(|p| p.costs.len()).sum::<usize>();
            s
        }
        ProblemInstance::Multicut(mc) => InstanceStats {
            nodes: Some(mc.node_count()),
            edges: Some(mc.edges().len()),
            size: mc.edges().len(),
            ..InstanceStats::empty(class)
        },
        ProblemInstance::Amwc(a) => InstanceStats {
            nodes: Some(a.node_count()),
            edges: Some(a.edges().len()),
            classes: Some(a.class_count()),
            partitionable_classes: Some(a.partitionable().len()),
            size: a.node_count() * a.class_count() + a.edges().len(),
            ..InstanceStats::empty(class)
        },
        ProblemInstance::GraphMatching(gm) => InstanceStats {
            left_size: Some(gm.left_size()),
            right_size: Some(gm.right_size()),
            assignments: Some(gm.assignments().len()),
            quadratic_terms: Some(gm.quadratic().len()),
            size: gm.assignments().len() + gm.quadratic().len(),
            ..InstanceStats::empty(class)
        },
        ProblemInstance::MultiGraphMatching(mgm) => {
            let assignments: usize = mgm.problems().values().map(|g| g.assignments().len()).sum();
            let quadratic: usize = mgm.problems().values().map(|g| g.quadratic().len()).sum();
            InstanceStats {
                graphs: Some(mgm.graph_count()),
                max_point_set_size: Some(mgm.point_set_sizes().iter().copied().max().unwrap_or(0)),
                assignments: Some(assignments),
                quadratic_terms: Some(quadratic),
                size: assignments + quadratic,
                ..InstanceStats::empty(class)
            }
        }
        ProblemInstance::CellTracking(ct) => InstanceStats {
            frames: Some(ct.frame_count()),
            detections: Some(ct.detections().len()),
            moves: Some(ct.moves().len()),
            divisions: Some(ct.divisions().len()),
            exclusions: Some(ct.exclusions().len()),
            size: ct.decision_count(),
            ..InstanceStats::empty(class)
        },
        ProblemInstance::Ilp(ilp) => InstanceStats {
            variables: Some(ilp.variable_count()),
            constraints: Some(ilp.constraints().len()),
            size: ilp.objective().len() + ilp.constraints().iter().map(|c| c.terms.len()).sum::<usize>(),
            ..InstanceStats::empty(class)
        },
    }
}
