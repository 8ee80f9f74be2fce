//! Graph matching (Lawler QAP) and multi-graph matching.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::ModelError;

/// A finite linear assignment `left → right`. Pairs that are not listed are
/// forbidden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub id: usize,
    pub left: usize,
    pub right: usize,
    pub cost: f64,
}

/// Cost incurred when both referenced assignments are active. `first` and
/// `second` are positions into the assignment list, not file ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTerm {
    pub first: usize,
    pub second: usize,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct GmInstance {
    left_size: usize,
    right_size: usize,
    assignments: Vec<Assignment>,
    quadratic: Vec<QuadraticTerm>,
    by_id: HashMap<usize, usize>,
}

impl PartialEq for GmInstance {
    fn eq(&self, other: &Self) -> bool {
        self.left_size == other.left_size
            && self.right_size == other.right_size
            && self.assignments == other.assignments
            && self.quadratic == other.quadratic
    }
}

impl GmInstance {
    /// `quadratic` entries are `(id_a, id_b, cost)` in terms of assignment ids.
    pub fn new(
        left_size: usize,
        right_size: usize,
        assignments: Vec<Assignment>,
        quadratic: Vec<(usize, usize, f64)>,
    ) -> Result<Self, ModelError> {
        let mut by_id = HashMap::with_capacity(assignments.len());
        let mut pairs = HashSet::with_capacity(assignments.len());
        for (pos, a) in assignments.iter().enumerate() {
            if a.left >= left_size {
                return Err(ModelError::NodeOutOfRange {
                    context: format!("left node of assignment {}", a.id),
                    node: a.left,
                    node_count: left_size,
                });
            }
            if a.right >= right_size {
                return Err(ModelError::NodeOutOfRange {
                    context: format!("right node of assignment {}", a.id),
                    node: a.right,
                    node_count: right_size,
                });
            }
            if !a.cost.is_finite() {
                return Err(ModelError::NonFinite { context: format!("assignment {}", a.id), value: a.cost });
            }
            if by_id.insert(a.id, pos).is_some() {
                return Err(ModelError::DuplicateAssignmentId(a.id));
            }
            if !pairs.insert((a.left, a.right)) {
                return Err(ModelError::DuplicateAssignmentPair { left: a.left, right: a.right });
            }
        }
        let mut terms = Vec::with_capacity(quadratic.len());
        for (a, b, cost) in quadratic {
            let lookup = |id: usize| {
                by_id.get(&id).copied().ok_or_else(|| ModelError::UnknownAssignmentId {
                    context: "quadratic term".into(),
                    id,
                })
            };
            let first = lookup(a)?;
            let second = lookup(b)?;
            if first == second {
                return Err(ModelError::SelfQuadratic(a));
            }
            if !cost.is_finite() {
                return Err(ModelError::NonFinite { context: format!("quadratic term ({a}, {b})"), value: cost });
            }
            terms.push(QuadraticTerm { first, second, cost });
        }
        Ok(Self { left_size, right_size, assignments, quadratic: terms, by_id })
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn quadratic(&self) -> &[QuadraticTerm] {
        &self.quadratic
    }

    /// Position of the assignment with file id `id`.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.by_id.get(&id).copied()
    }

    /// Quadratic terms incident to each assignment position, as
    /// `(other position, cost)`.
    pub fn quadratic_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.assignments.len()];
        for t in &self.quadratic {
            adj[t.first].push((t.second, t.cost));
            adj[t.second].push((t.first, t.cost));
        }
        adj
    }

    /// Quadratic terms merged by unordered assignment pair, keyed by
    /// `(min position, max position)`.
    pub fn merged_quadratic(&self) -> BTreeMap<(usize, usize), f64> {
        let mut merged = BTreeMap::new();
        for t in &self.quadratic {
            let key = (t.first.min(t.second), t.first.max(t.second));
            *merged.entry(key).or_insert(0.0) += t.cost;
        }
        merged
    }
}

/// Active assignment ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GmSolution {
    pub active: BTreeSet<usize>,
}

impl GmSolution {
    pub fn new(active: impl IntoIterator<Item = usize>) -> Self {
        Self { active: active.into_iter().collect() }
    }
}

/// Pairwise matching problems between `K` point sets, stored for `p < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MgmInstance {
    point_set_sizes: Vec<usize>,
    problems: BTreeMap<(usize, usize), GmInstance>,
}

impl MgmInstance {
    pub fn new(
        point_set_sizes: Vec<usize>,
        problems: BTreeMap<(usize, usize), GmInstance>,
    ) -> Result<Self, ModelError> {
        let k = point_set_sizes.len();
        for (&(p, q), gm) in &problems {
            if p >= q {
                return Err(ModelError::InvalidGraphPair { p, k: q, reason: "pairs must satisfy p < k".into() });
            }
            if q >= k {
                return Err(ModelError::InvalidGraphPair {
                    p,
                    k: q,
                    reason: format!("only {k} point sets declared"),
                });
            }
            if gm.left_size() != point_set_sizes[p] || gm.right_size() != point_set_sizes[q] {
                return Err(ModelError::InvalidGraphPair {
                    p,
                    k: q,
                    reason: format!(
                        "sizes {}x{} disagree with point set sizes {}x{}",
                        gm.left_size(),
                        gm.right_size(),
                        point_set_sizes[p],
                        point_set_sizes[q]
                    ),
                });
            }
        }
        Ok(Self { point_set_sizes, problems })
    }

    /// Infers point set sizes from the pairwise problems; `K = 1 + max index`.
    pub fn from_problems(problems: BTreeMap<(usize, usize), GmInstance>) -> Result<Self, ModelError> {
        let k = problems.keys().map(|&(p, q)| p.max(q) + 1).max().unwrap_or(0);
        let mut sizes: Vec<Option<usize>> = vec![None; k];
        for (&(p, q), gm) in &problems {
            for (set, size) in [(p, gm.left_size()), (q, gm.right_size())] {
                match sizes[set] {
                    Some(known) if known != size => {
                        return Err(ModelError::InvalidGraphPair {
                            p,
                            k: q,
                            reason: format!("point set {set} has size {size} here but {known} elsewhere"),
                        })
                    }
                    _ => sizes[set] = Some(size),
                }
            }
        }
        Self::new(sizes.into_iter().map(|s| s.unwrap_or(0)).collect(), problems)
    }

    pub fn graph_count(&self) -> usize {
        self.point_set_sizes.len()
    }

    pub fn point_set_sizes(&self) -> &[usize] {
        &self.point_set_sizes
    }

    pub fn problems(&self) -> &BTreeMap<(usize, usize), GmInstance> {
        &self.problems
    }
}

/// One matching per graph pair `(p, k)` with `p < k`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MgmSolution {
    pub matchings: BTreeMap<(usize, usize), GmSolution>,
}

impl MgmSolution {
    /// Active ids of pair `(p, k)`, empty if the pair has no entry.
    pub fn active(&self, p: usize, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.matchings.get(&(p, k)).into_iter().flat_map(|s| s.active.iter().copied())
    }
}

impl Serialize for MgmSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            p: usize,
            k: usize,
            active: &'a BTreeSet<usize>,
        }
        serializer.collect_seq(self.matchings.iter().map(|(&(p, k), s)| Entry { p, k, active: &s.active }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(id: usize, left: usize, right: usize, cost: f64) -> Assignment {
        Assignment { id, left, right, cost }
    }

    #[test]
    fn gm_validation() {
        let gm = GmInstance::new(2, 2, vec![a(1, 0, 0, -1.0), a(2, 1, 1, -1.0)], vec![(1, 2, 0.5)]).unwrap();
        assert_eq!(gm.position(2), Some(1));
        assert_eq!(gm.quadratic()[0], QuadraticTerm { first: 0, second: 1, cost: 0.5 });
        assert_eq!(
            GmInstance::new(2, 2, vec![a(1, 0, 0, -1.0), a(2, 1, 1, -1.0)], vec![(1, 3, 0.5)]),
            Err(ModelError::UnknownAssignmentId { context: "quadratic term".into(), id: 3 })
        );
        assert_eq!(
            GmInstance::new(2, 2, vec![a(1, 0, 0, -1.0), a(1, 1, 1, -1.0)], vec![]),
            Err(ModelError::DuplicateAssignmentId(1))
        );
        assert!(GmInstance::new(2, 2, vec![a(1, 0, 0, 0.0), a(2, 0, 0, 0.0)], vec![]).is_err());
        assert!(GmInstance::new(2, 2, vec![a(1, 2, 0, 0.0)], vec![]).is_err());
        assert_eq!(GmInstance::new(2, 2, vec![a(1, 0, 0, 0.0)], vec![(1, 1, 1.0)]), Err(ModelError::SelfQuadratic(1)));
    }

    #[test]
    fn mgm_sizes_inferred_and_checked() {
        let gm01 = GmInstance::new(3, 2, vec![], vec![]).unwrap();
        let gm12 = GmInstance::new(2, 4, vec![], vec![]).unwrap();
        let mgm = MgmInstance::from_problems(BTreeMap::from([((0, 1), gm01.clone()), ((1, 2), gm12)])).unwrap();
        assert_eq!(mgm.point_set_sizes(), &[3, 2, 4]);
        let bad = GmInstance::new(4, 2, vec![], vec![]).unwrap();
        assert!(MgmInstance::from_problems(BTreeMap::from([((0, 1), gm01), ((0, 2), bad)])).is_err());
    }
}
