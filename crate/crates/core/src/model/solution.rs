use serde::Serialize;

use super::{AmwcSolution, CellTrackingSolution, GmSolution, MgmSolution, MrfLabeling, Partition};

/// A native solution of any problem class. ILP solutions are one flag per
/// variable in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Solution {
    Labeling(MrfLabeling),
    Partition(Partition),
    Amwc(AmwcSolution),
    Matching(GmSolution),
    MultiMatching(MgmSolution),
    CellTracking(CellTrackingSolution),
    Ilp(Vec<bool>),
}

impl Solution {
    pub fn kind(&self) -> &'static str {
        match self {
            Solution::Labeling(_) => "labeling",
            Solution::Partition(_) => "partition",
            Solution::Amwc(_) => "amwc",
            Solution::Matching(_) => "matching",
            Solution::MultiMatching(_) => "multi-matching",
            Solution::CellTracking(_) => "cell-tracking",
            Solution::Ilp(_) => "ilp",
        }
    }
}
