//! Greedy additive edge contraction and greedy edge fixation.
//!
//! Costs are charged for cut edges, so a positive edge is attractive:
//! contracting it removes its cost from the objective.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::graph::UnionFind;
use crate::model::{MulticutInstance, Partition, Solution};

use super::SolveResult;

/// Heap entry for the edge between meta-nodes `a < b`. Larger priority pops
/// first; equal priorities pop the smaller pair first.
#[derive(Debug, Clone, Copy)]
struct Entry {
    priority: f64,
    weight: f64,
    a: usize,
    b: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority).then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

/// Contracted multigraph: parallel edges are summed, the surviving
/// representative of a merge is the smaller node id.
struct Contraction {
    adj: Vec<BTreeMap<usize, f64>>,
    uf: UnionFind,
    heap: BinaryHeap<Entry>,
    priority: fn(f64) -> f64,
    objective: f64,
}

impl Contraction {
    fn new(mc: &MulticutInstance, priority: fn(f64) -> f64) -> Self {
        let mut adj = vec![BTreeMap::new(); mc.node_count()];
        for e in mc.edges() {
            adj[e.u].insert(e.v, e.cost);
            adj[e.v].insert(e.u, e.cost);
        }
        let mut c = Self {
            adj,
            uf: UnionFind::new(mc.node_count()),
            heap: BinaryHeap::new(),
            priority,
            objective: mc.edges().iter().map(|e| e.cost).sum(),
        };
        for e in mc.edges() {
            let (a, b) = e.key();
            c.push(a, b, e.cost);
        }
        c
    }

    fn push(&mut self, a: usize, b: usize, weight: f64) {
        let (a, b) = (a.min(b), a.max(b));
        self.heap.push(Entry { priority: (self.priority)(weight), weight, a, b });
    }

    /// Next entry that still describes a live edge with its current weight.
    fn pop(&mut self) -> Option<Entry> {
        while let Some(e) = self.heap.pop() {
            if self.adj[e.a].get(&e.b) == Some(&e.weight) {
                return Some(e);
            }
        }
        None
    }

    /// Merges `b` into `a` (a < b) and returns the neighbours whose edge to
    /// `a` changed.
    fn contract(&mut self, a: usize, b: usize) -> Vec<usize> {
        let w = self.adj[a].remove(&b).expect("contracted edge exists");
        self.adj[b].remove(&a);
        self.objective -= w;
        self.uf.union(a, b);
        let moved = std::mem::take(&mut self.adj[b]);
        let mut touched = Vec::with_capacity(moved.len());
        for (n, wn) in moved {
            self.adj[n].remove(&b);
            let merged = *self.adj[a].entry(n).and_modify(|x| *x += wn).or_insert(wn);
            self.adj[n].insert(a, merged);
            touched.push(n);
        }
        touched
    }

    fn result(mut self, work: u64, trajectory: Vec<f64>) -> SolveResult {
        let partition = Partition::canonical(&self.uf.labels());
        SolveResult { solution: Solution::Partition(partition), objective: self.objective, optimal: false, work_counter: work, trajectory }
    }
}

/// Greedy additive edge contraction: contract the heaviest edge while its
/// weight is positive. The trajectory holds the objective after each
/// contraction, starting from all singletons.
pub fn gaec(mc: &MulticutInstance) -> SolveResult {
    let mut g = Contraction::new(mc, |w| w);
    let mut trajectory = vec![g.objective];
    let mut work = 0;
    while let Some(e) = g.pop() {
        work += 1;
        if e.weight <= 0.0 {
            break;
        }
        for n in g.contract(e.a, e.b) {
            let w = g.adj[e.a][&n];
            g.push(e.a, n, w);
        }
        trajectory.push(g.objective);
    }
    g.result(work, trajectory)
}

/// Greedy edge fixation: visit edges by decreasing absolute weight. Positive
/// edges are contracted unless their endpoints were fixed apart; negative
/// edges are fixed as cut, which forbids merging their endpoints later.
pub fn greedy_edge_fixation(mc: &MulticutInstance) -> SolveResult {
    let mut g = Contraction::new(mc, f64::abs);
    let mut fixed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mc.node_count()];
    let mut trajectory = vec![g.objective];
    let mut work = 0;
    while let Some(e) = g.pop() {
        work += 1;
        if fixed[e.a].contains(&e.b) || e.weight == 0.0 {
            continue;
        }
        if e.weight < 0.0 {
            fixed[e.a].insert(e.b);
            fixed[e.b].insert(e.a);
            continue;
        }
        for n in std::mem::take(&mut fixed[e.b]) {
            fixed[n].remove(&e.b);
            if n != e.a {
                fixed[n].insert(e.a);
                fixed[e.a].insert(n);
            }
        }
        for n in g.contract(e.a, e.b) {
            if !fixed[e.a].contains(&n) {
                let w = g.adj[e.a][&n];
                g.push(e.a, n, w);
            }
        }
        trajectory.push(g.objective);
    }
    g.result(work, trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{cut_from_partition, evaluate_multicut};
    use crate::model::WeightedEdge;

    fn mc(n: usize, edges: &[(usize, usize, f64)]) -> MulticutInstance {
        MulticutInstance::new(n, edges.iter().map(|&(u, v, cost)| WeightedEdge { u, v, cost }).collect()).unwrap()
    }

    fn partition(r: &SolveResult) -> Vec<usize> {
        match &r.solution {
            Solution::Partition(p) => p.clusters().to_vec(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gaec_triangle() {
        let g = mc(3, &[(0, 1, -1.0), (1, 2, -1.0), (0, 2, 2.0)]);
        let r = gaec(&g);
        assert_eq!((partition(&r), r.objective), (vec![0, 1, 0], -2.0));
        assert_eq!(r.trajectory, [0.0, -2.0]);
        let p = Partition::new(partition(&r)).unwrap();
        assert_eq!(evaluate_multicut(&g, &cut_from_partition(&g, &p).unwrap()).unwrap().objective, r.objective);
    }

    #[test]
    fn gaec_signs() {
        let neg = mc(3, &[(0, 1, -1.0), (1, 2, -2.0)]);
        assert_eq!((partition(&gaec(&neg)), gaec(&neg).objective), (vec![0, 1, 2], -3.0));
        let pos = mc(3, &[(0, 1, 1.0), (1, 2, 2.0)]);
        assert_eq!((partition(&gaec(&pos)), gaec(&pos).objective), (vec![0, 0, 0], 0.0));
    }

    #[test]
    fn gef_examples() {
        let tri = mc(3, &[(0, 1, -1.0), (1, 2, -1.0), (0, 2, 2.0)]);
        assert_eq!(partition(&greedy_edge_fixation(&tri)), vec![0, 1, 0]);
        // Path 0-1-2 with weights +1 and -3: the -3 edge is fixed first, the
        // +1 edge is still contracted.
        let path = mc(3, &[(0, 1, 1.0), (1, 2, -3.0)]);
        let r = greedy_edge_fixation(&path);
        assert_eq!((partition(&r), r.objective), (vec![0, 0, 1], -3.0));
        // Fixing 0-2 apart blocks the contraction that would join them.
        let blocked = mc(3, &[(0, 2, -5.0), (0, 1, 2.0), (1, 2, 1.0)]);
        assert_eq!(partition(&greedy_edge_fixation(&blocked)), vec![0, 0, 1]);
        let empty = mc(2, &[]);
        assert_eq!((partition(&greedy_edge_fixation(&empty)), greedy_edge_fixation(&empty).objective), (vec![0, 1], 0.0));
    }
}
