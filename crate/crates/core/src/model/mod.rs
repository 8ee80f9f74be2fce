//! In-memory problem instances and solutions.
//!
//! All indices are 0-based. Instances are validated at construction and never
//! mutated afterwards.

mod cell_tracking;
mod error;
mod ilp;
mod matching;
mod mrf;
mod multicut;
mod shape;
mod solution;
mod stats;

pub use cell_tracking::{
    Boundary, CellTrackingInstance, CellTrackingSolution, Detection, DetectionFlow, Division, Move, RecordRef,
};
pub use error::ModelError;
pub use ilp::{IlpBuilder, IlpInstance, LinearConstraint, Relation};
pub use matching::{Assignment, GmInstance, GmSolution, MgmInstance, MgmSolution, QuadraticTerm};
pub use mrf::{BottleneckMrfInstance, MrfEdge, MrfInstance, MrfLabeling, Projection, TomographyInstance};
pub use multicut::{AmwcInstance, AmwcSolution, EdgeCutVector, MulticutInstance, Partition, WeightedEdge};
pub use shape::TriangleProduct;
pub use solution::Solution;
pub use stats::{instance_stats, InstanceStats};

use serde::Serialize;

/// Problem class of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemClass {
    Mrf,
    BottleneckMrf,
    Tomography,
    Multicut,
    Amwc,
    GraphMatching,
    MultiGraphMatching,
    CellTracking,
    Ilp,
}

impl ProblemClass {
    pub fn name(self) -> &'static str {
        match self {
            ProblemClass::Mrf => "mrf",
            ProblemClass::BottleneckMrf => "bottleneck-mrf",
            ProblemClass::Tomography => "tomography",
            ProblemClass::Multicut => "multicut",
            ProblemClass::Amwc => "amwc",
            ProblemClass::GraphMatching => "graph-matching",
            ProblemClass::MultiGraphMatching => "multi-graph-matching",
            ProblemClass::CellTracking => "cell-tracking",
            ProblemClass::Ilp => "ilp",
        }
    }
}

/// Any supported instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Mrf(MrfInstance),
    BottleneckMrf(BottleneckMrfInstance),
    Tomography(TomographyInstance),
    Multicut(MulticutInstance),
    Amwc(AmwcInstance),
    GraphMatching(GmInstance),
    MultiGraphMatching(MgmInstance),
    CellTracking(CellTrackingInstance),
    Ilp(IlpInstance),
}

impl ProblemInstance {
    pub fn class(&self) -> ProblemClass {
        match self {
            ProblemInstance::Mrf(_) => ProblemClass::Mrf,
            ProblemInstance::BottleneckMrf(_) => ProblemClass::BottleneckMrf,
            ProblemInstance::Tomography(_) => ProblemClass::Tomography,
            ProblemInstance::Multicut(_) => ProblemClass::Multicut,
            ProblemInstance::Amwc(_) => ProblemClass::Amwc,
            ProblemInstance::GraphMatching(_) => ProblemClass::GraphMatching,
            ProblemInstance::MultiGraphMatching(_) => ProblemClass::MultiGraphMatching,
            ProblemInstance::CellTracking(_) => ProblemClass::CellTracking,
            ProblemInstance::Ilp(_) => ProblemClass::Ilp,
        }
    }
}

macro_rules! impl_from_instance {
    ($($variant:ident($ty:ty)),* $(,)?) => {
        $(impl From<$ty> for ProblemInstance {
            fn from(value: $ty) -> Self {
                ProblemInstance::$variant(value)
            }
        })*
    };
}

impl_from_instance!(
    Mrf(MrfInstance),
    BottleneckMrf(BottleneckMrfInstance),
    Tomography(TomographyInstance),
    Multicut(MulticutInstance),
    Amwc(AmwcInstance),
    GraphMatching(GmInstance),
    MultiGraphMatching(MgmInstance),
    CellTracking(CellTrackingInstance),
    Ilp(IlpInstance),
);
