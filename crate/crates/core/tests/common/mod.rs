//! Seeded generators of small random instances and native solutions.
//!
//! Shared by the integration tests of both crates; the cli crate pulls this
//! file in with a `#[path]` attribute.

#![allow(dead_code)]
// `filter` then `map` would need two closures borrowing the rng.
#![allow(clippy::filter_map_bool_then)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spp_core::eval::{
    cut_from_partition, evaluate, evaluate_amwc, evaluate_cell_tracking, evaluate_gm, evaluate_ilp, evaluate_mgm,
    evaluate_multicut, EvaluationReport,
};
use spp_core::model::{
    AmwcInstance, AmwcSolution, Assignment, BottleneckMrfInstance, Boundary, CellTrackingInstance,
    CellTrackingSolution, Detection, Division, EdgeCutVector, GmInstance, GmSolution, IlpBuilder, IlpInstance,
    MgmInstance, MgmSolution, Move, MrfEdge, MrfInstance, MrfLabeling, MulticutInstance, Partition, ProblemInstance,
    Projection, Relation, Solution, TomographyInstance, WeightedEdge,
};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How costs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Values {
    /// Half-integers in [-4, 4]: sums are exact, ties are common.
    Exact,
    /// Arbitrary finite doubles over many magnitudes, for format tests.
    Wide,
}

impl Values {
    pub fn draw(self, rng: &mut TestRng) -> f64 {
        match self {
            Values::Exact => rng.gen_range(-8i32..=8) as f64 / 2.0,
            Values::Wide => match rng.gen_range(0..6) {
                0 => rng.gen_range(-100i32..=100) as f64,
                1 => rng.gen_range(-1.0..1.0),
                2 => rng.gen_range(-1e6..1e6),
                3 => rng.gen_range(-1.0..1.0) * 1e-12,
                4 => rng.gen_range(-1.0..1.0) * 1e250,
                _ => f64::from_bits(rng.gen::<u64>() >> 2) * if rng.gen() { 1.0 } else { -1.0 },
            },
        }
    }

    /// A cost that is `+inf` with probability `p_inf`.
    fn draw_or_inf(self, rng: &mut TestRng, p_inf: f64) -> f64 {
        if rng.gen_bool(p_inf) {
            f64::INFINITY
        } else {
            self.draw(rng)
        }
    }
}

fn random_edges(rng: &mut TestRng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Distinct ids with gaps, in random order.
fn ids(rng: &mut TestRng, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..count * 3 + 1).collect();
    pool.shuffle(rng);
    pool.truncate(count);
    pool
}

/// MRF with 1..=`max_nodes` nodes and 1..=`max_labels` labels per node.
/// Each table entry is `+inf` with probability `p_inf`.
pub fn mrf(rng: &mut TestRng, max_nodes: usize, max_labels: usize, values: Values, p_inf: f64) -> MrfInstance {
    let n = rng.gen_range(1..=max_nodes);
    let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_labels)).collect();
    uniform_mrf(rng, &counts, values, p_inf)
}

fn uniform_mrf(rng: &mut TestRng, counts: &[usize], values: Values, p_inf: f64) -> MrfInstance {
    let unaries = counts.iter().map(|&k| (0..k).map(|_| values.draw_or_inf(rng, p_inf)).collect()).collect();
    let edges = random_edges(rng, counts.len(), 0.6)
        .into_iter()
        .map(|(u, v)| MrfEdge { u, v, table: (0..counts[u] * counts[v]).map(|_| values.draw_or_inf(rng, p_inf)).collect() })
        .collect();
    MrfInstance::new(unaries, edges).unwrap()
}

/// MRF whose pairwise tables are Potts: 0 on equal labels, a weight
/// `λ ≥ 0` otherwise.
pub fn potts_mrf(rng: &mut TestRng, max_nodes: usize, max_labels: usize) -> MrfInstance {
    let n = rng.gen_range(1..=max_nodes);
    let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_labels)).collect();
    let unaries = counts.iter().map(|&k| (0..k).map(|_| Values::Exact.draw(rng)).collect()).collect();
    let edges = random_edges(rng, n, 0.6)
        .into_iter()
        .map(|(u, v)| {
            let weight = rng.gen_range(0..=6) as f64 / 2.0;
            let table = (0..counts[u])
                .flat_map(|a| (0..counts[v]).map(move |b| if a == b { 0.0 } else { weight }))
                .collect();
            MrfEdge { u, v, table }
        })
        .collect();
    MrfInstance::new(unaries, edges).unwrap()
}

pub fn bottleneck(rng: &mut TestRng, max_nodes: usize, max_labels: usize, values: Values) -> BottleneckMrfInstance {
    let base = mrf(rng, max_nodes, max_labels, values, 0.0);
    let unaries = base.label_counts().iter().map(|&k| (0..k).map(|_| values.draw(rng)).collect()).collect();
    let edges = base
        .edges()
        .iter()
        .map(|e| MrfEdge { u: e.u, v: e.v, table: (0..e.table.len()).map(|_| values.draw(rng)).collect() })
        .collect();
    let psi = MrfInstance::new(unaries, edges).unwrap();
    BottleneckMrfInstance::new(base, psi).unwrap()
}

/// Tomography instance with `k` labels per node. Hard projections have a
/// single zero entry; about half of them are satisfiable by a hidden
/// labeling, the rest have a random target. Soft projections have random
/// costs with some `+inf` entries.
pub fn tomography(rng: &mut TestRng, max_nodes: usize, k: usize, hard: bool, values: Values) -> TomographyInstance {
    let n = rng.gen_range(1..=max_nodes);
    let base = uniform_mrf(rng, &vec![k; n], values, 0.0);
    let hidden: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let planted = rng.gen_bool(0.5);
    let projections = (0..rng.gen_range(1..=3))
        .map(|_| {
            let mut nodes: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            if nodes.is_empty() {
                nodes.push(rng.gen_range(0..n));
            }
            nodes.shuffle(rng);
            let len = (k - 1) * nodes.len() + 1;
            let costs = if hard {
                let target = if planted { nodes.iter().map(|&v| hidden[v]).sum() } else { rng.gen_range(0..len) };
                (0..len).map(|s| if s == target { 0.0 } else { f64::INFINITY }).collect()
            } else {
                (0..len).map(|_| values.draw_or_inf(rng, 0.2)).collect()
            };
            Projection { nodes, costs }
        })
        .collect();
    TomographyInstance::new(base, projections).unwrap()
}

pub fn multicut(rng: &mut TestRng, min_nodes: usize, max_nodes: usize, density: f64, values: Values) -> MulticutInstance {
    let n = rng.gen_range(min_nodes..=max_nodes);
    let mut edges: Vec<WeightedEdge> = random_edges(rng, n, density)
        .into_iter()
        .map(|(u, v)| {
            let (u, v) = if rng.gen_bool(0.2) { (v, u) } else { (u, v) };
            WeightedEdge { u, v, cost: values.draw(rng) }
        })
        .collect();
    edges.shuffle(rng);
    MulticutInstance::new(n, edges).unwrap()
}

pub fn amwc(rng: &mut TestRng, max_nodes: usize, max_classes: usize, values: Values) -> AmwcInstance {
    let n = rng.gen_range(1..=max_nodes);
    let k = rng.gen_range(1..=max_classes);
    let partitionable: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
    let node_costs = (0..n).map(|_| (0..k).map(|_| values.draw(rng)).collect()).collect();
    let edges = random_edges(rng, n, 0.6).into_iter().map(|(u, v)| WeightedEdge { u, v, cost: values.draw(rng) }).collect();
    AmwcInstance::new(k, partitionable, node_costs, edges).unwrap()
}

/// Graph matching between point sets of the given sizes with a random subset
/// of the possible assignments and sparse quadratic terms.
pub fn gm_sized(rng: &mut TestRng, left: usize, right: usize, values: Values) -> GmInstance {
    let mut pairs: Vec<(usize, usize)> =
        (0..left).flat_map(|i| (0..right).map(move |j| (i, j))).collect();
    pairs.retain(|_| rng.gen_bool(0.7));
    pairs.shuffle(rng);
    let id_list = ids(rng, pairs.len());
    let assignments: Vec<Assignment> = pairs
        .iter()
        .zip(&id_list)
        .map(|(&(l, r), &id)| Assignment { id, left: l, right: r, cost: values.draw(rng) })
        .collect();
    let mut quadratic = Vec::new();
    for a in 0..assignments.len() {
        for b in a + 1..assignments.len() {
            if rng.gen_bool(0.3) {
                let (x, y) = if rng.gen() { (a, b) } else { (b, a) };
                quadratic.push((assignments[x].id, assignments[y].id, values.draw(rng)));
            }
        }
    }
    GmInstance::new(left, right, assignments, quadratic).unwrap()
}

pub fn gm(rng: &mut TestRng, max_side: usize, values: Values) -> GmInstance {
    let (left, right) = (rng.gen_range(1..=max_side), rng.gen_range(1..=max_side));
    gm_sized(rng, left, right, values)
}

/// `graphs` point sets of size 1..=`max_size`; every pair is present.
pub fn mgm(rng: &mut TestRng, graphs: usize, max_size: usize, values: Values) -> MgmInstance {
    let sizes: Vec<usize> = (0..graphs).map(|_| rng.gen_range(1..=max_size)).collect();
    let mut problems = BTreeMap::new();
    for p in 0..graphs {
        for k in p + 1..graphs {
            problems.insert((p, k), gm_sized(rng, sizes[p], sizes[k], values));
        }
    }
    MgmInstance::new(sizes, problems).unwrap()
}

/// Tracking instance over 1..=`max_frames` frames with 1..=`per_frame`
/// detections each.
pub fn cell_tracking(rng: &mut TestRng, max_frames: usize, per_frame: usize, values: Values) -> CellTrackingInstance {
    let frames = rng.gen_range(1..=max_frames);
    let counts: Vec<usize> = (0..frames).map(|_| rng.gen_range(1..=per_frame)).collect();
    let total: usize = counts.iter().sum();
    let id_list = ids(rng, total);
    let mut by_frame: Vec<Vec<usize>> = Vec::new();
    let mut detections = Vec::new();
    let mut next = id_list.into_iter();
    for (frame, &count) in counts.iter().enumerate() {
        let frame_ids: Vec<usize> = next.by_ref().take(count).collect();
        for &id in &frame_ids {
            detections.push(Detection { frame, id, cost: values.draw(rng) });
        }
        by_frame.push(frame_ids);
    }
    detections.shuffle(rng);
    let boundary = |rng: &mut TestRng, p: f64| -> Vec<Boundary> {
        detections
            .iter()
            .filter_map(|d| rng.gen_bool(p).then(|| Boundary { frame: d.frame, detection: d.id, cost: values.draw(rng) }))
            .collect()
    };
    let appearances = boundary(rng, 0.7);
    let disappearances = boundary(rng, 0.7);
    let mut moves = Vec::new();
    let mut divisions = Vec::new();
    for f in 0..frames.saturating_sub(1) {
        for &from in &by_frame[f] {
            for &to in &by_frame[f + 1] {
                if rng.gen_bool(0.6) {
                    moves.push(Move { id: 0, from, to, cost: values.draw(rng) });
                }
            }
            if by_frame[f + 1].len() == 2 && rng.gen_bool(0.4) {
                let children = [by_frame[f + 1][0], by_frame[f + 1][1]];
                divisions.push(Division { id: 0, parent: from, children, cost: values.draw(rng) });
            }
        }
    }
    let move_ids = ids(rng, moves.len());
    moves.iter_mut().zip(move_ids).for_each(|(m, id)| m.id = id);
    let division_ids = ids(rng, divisions.len());
    divisions.iter_mut().zip(division_ids).for_each(|(d, id)| d.id = id);
    let exclusions = by_frame.iter().filter(|ids| ids.len() >= 2 && rng.gen_bool(0.3)).cloned().collect();
    CellTrackingInstance::new(detections, appearances, disappearances, moves, divisions, exclusions).unwrap()
}

/// Binary program with random sparse rows. Names avoid anything the LP
/// reader could take for a keyword or number.
pub fn ilp(rng: &mut TestRng, max_vars: usize, max_rows: usize, values: Values) -> IlpInstance {
    let mut b = IlpBuilder::new();
    let n = rng.gen_range(1..=max_vars);
    let vars: Vec<usize> = (0..n).map(|i| b.add_variable(format!("x{i}_{}", rng.gen_range(0..100))).unwrap()).collect();
    for &v in &vars {
        if rng.gen_bool(0.8) {
            b.add_objective_term(v, values.draw(rng)).unwrap();
        }
    }
    for r in 0..rng.gen_range(0..=max_rows) {
        let terms: Vec<(usize, f64)> = vars.iter().filter_map(|&v| rng.gen_bool(0.5).then(|| (v, values.draw(rng)))).collect();
        let relation = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..3)];
        let rhs = if relation == Relation::Eq && values == Values::Exact {
            // Equalities hit by some assignment, so that not every program is
            // infeasible.
            terms.iter().filter(|_| rng.gen()).map(|(_, a)| a).sum()
        } else {
            values.draw(rng)
        };
        b.add_constraint(format!("row{r}"), terms, relation, rhs).unwrap();
    }
    b.build()
}

/// One instance of every class, sized for exhaustive search.
pub fn tiny_instances(rng: &mut TestRng) -> Vec<ProblemInstance> {
    vec![
        mrf(rng, 4, 3, Values::Exact, 0.1).into(),
        bottleneck(rng, 3, 3, Values::Exact).into(),
        tomography(rng, 4, 3, true, Values::Exact).into(),
        multicut(rng, 1, 6, 0.5, Values::Exact).into(),
        amwc(rng, 4, 3, Values::Exact).into(),
        gm(rng, 3, Values::Exact).into(),
        mgm(rng, 3, 2, Values::Exact).into(),
        cell_tracking(rng, 3, 2, Values::Exact).into(),
        ilp(rng, 8, 4, Values::Exact).into(),
    ]
}

/// Random native solution of the right kind, feasible or not.
pub fn random_solution(rng: &mut TestRng, instance: &ProblemInstance) -> Solution {
    match instance {
        ProblemInstance::Mrf(m) => Solution::Labeling(random_labeling(rng, m)),
        ProblemInstance::BottleneckMrf(b) => Solution::Labeling(random_labeling(rng, b.base())),
        ProblemInstance::Tomography(t) => Solution::Labeling(random_labeling(rng, t.base())),
        ProblemInstance::Multicut(mc) => Solution::Partition(random_partition(rng, mc.node_count())),
        ProblemInstance::Amwc(a) => {
            let labels: Vec<usize> = (0..a.node_count()).map(|_| rng.gen_range(0..a.class_count())).collect();
            let cut = if rng.gen_bool(0.5) {
                // Consistent with the labels up to the split of partitionable
                // classes.
                let part = random_partition(rng, a.node_count());
                a.edges()
                    .iter()
                    .map(|e| labels[e.u] != labels[e.v] || (a.is_partitionable(labels[e.u]) && part.cluster_of(e.u) != part.cluster_of(e.v)))
                    .collect()
            } else {
                a.edges().iter().map(|_| rng.gen()).collect()
            };
            Solution::Amwc(AmwcSolution { labels, cut: EdgeCutVector::new(cut) })
        }
        ProblemInstance::GraphMatching(gm) => Solution::Matching(random_matching(rng, gm)),
        ProblemInstance::MultiGraphMatching(mgm) => Solution::MultiMatching(MgmSolution {
            matchings: mgm.problems().iter().map(|(&key, gm)| (key, random_matching(rng, gm))).collect(),
        }),
        ProblemInstance::CellTracking(ct) => {
            let mut pick = |ids: Vec<usize>| -> BTreeSet<usize> { ids.into_iter().filter(|_| rng.gen_bool(0.5)).collect() };
            Solution::CellTracking(CellTrackingSolution {
                detections: pick(ct.detections().iter().map(|d| d.id).collect()),
                appearances: pick(ct.appearances().iter().map(|b| b.detection).collect()),
                disappearances: pick(ct.disappearances().iter().map(|b| b.detection).collect()),
                moves: pick(ct.moves().iter().map(|m| m.id).collect()),
                divisions: pick(ct.divisions().iter().map(|d| d.id).collect()),
            })
        }
        ProblemInstance::Ilp(ilp) => Solution::Ilp((0..ilp.variable_count()).map(|_| rng.gen()).collect()),
    }
}

pub fn random_labeling(rng: &mut TestRng, mrf: &MrfInstance) -> MrfLabeling {
    MrfLabeling::new(mrf.label_counts().iter().map(|&k| rng.gen_range(0..k)).collect())
}

pub fn random_partition(rng: &mut TestRng, n: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n.max(1))).collect();
    Partition::canonical(&labels)
}

/// Random subset of assignments; often violates the one-to-one rows.
pub fn random_matching(rng: &mut TestRng, gm: &GmInstance) -> GmSolution {
    GmSolution::new(gm.assignments().iter().filter(|_| rng.gen_bool(0.3)).map(|a| a.id))
}

/// Nodes reachable from `start` over `edges` without using edge `skip`.
fn reachable(n: usize, edges: &[(usize, usize)], skip: usize, start: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for (i, &(u, v)) in edges.iter().enumerate() {
            let next = if u == x { v } else if v == x { u } else { continue };
            if i != skip && !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

/// Uncut edges as `(position, u, v)`.
fn uncut(edges: &[WeightedEdge], cut: &[bool]) -> Vec<(usize, usize, usize)> {
    edges.iter().zip(cut).enumerate().filter(|(_, (_, &c))| !c).map(|(i, (e, _))| (i, e.u, e.v)).collect()
}

/// A single-constraint mutation of a feasible solution: the evaluation of
/// the broken solution and the violation kind and location it must report.
pub struct Mutation {
    pub report: EvaluationReport,
    pub kind: &'static str,
    pub location: Vec<usize>,
}

/// Breaks exactly one constraint of the feasible `base`, or returns `None`
/// when the instance offers no such single break. Multi-graph matching
/// mutates the empty solution instead of `base`.
pub fn mutate(rng: &mut TestRng, instance: &ProblemInstance, base: &Solution) -> Option<Mutation> {
    let done = |report, kind, location| Some(Mutation { report, kind, location });
    match (instance, base) {
        (ProblemInstance::Mrf(_) | ProblemInstance::BottleneckMrf(_), Solution::Labeling(l)) => {
            let counts = match instance {
                ProblemInstance::Mrf(m) => m.label_counts(),
                ProblemInstance::BottleneckMrf(b) => b.base().label_counts(),
                _ => unreachable!(),
            };
            let v = rng.gen_range(0..l.labels.len());
            let mut labels = l.labels.clone();
            labels[v] = counts[v] + rng.gen_range(0..3);
            let report = evaluate(instance, &Solution::Labeling(MrfLabeling::new(labels))).unwrap();
            done(report, "label_range", vec![v])
        }
        (ProblemInstance::Tomography(t), Solution::Labeling(l)) => {
            let k = t.label_count();
            let projections = t.projections();
            for v in 0..l.labels.len() {
                let owners: Vec<usize> = (0..projections.len()).filter(|&i| projections[i].nodes.contains(&v)).collect();
                if k < 2 || owners.len() != 1 || projections[owners[0]].hard_target().is_none() {
                    continue;
                }
                let mut labels = l.labels.clone();
                labels[v] = (labels[v] + rng.gen_range(1..k)) % k;
                let report = evaluate(instance, &Solution::Labeling(MrfLabeling::new(labels))).unwrap();
                return done(report, "projection", vec![owners[0]]);
            }
            None
        }
        (ProblemInstance::Multicut(mc), Solution::Partition(p)) => {
            let mut cut = cut_from_partition(mc, p).unwrap().cut;
            let keep = uncut(mc.edges(), &cut);
            let pairs: Vec<(usize, usize)> = keep.iter().map(|&(_, u, v)| (u, v)).collect();
            let &(e, u, v) = keep.iter().enumerate().find(|&(slot, &(_, u, v))| reachable(mc.node_count(), &pairs, slot, u)[v])?.1;
            cut[e] = true;
            let report = evaluate_multicut(mc, &EdgeCutVector::new(cut)).unwrap();
            done(report, "cycle", vec![u.min(v), u.max(v)])
        }
        (ProblemInstance::Amwc(a), Solution::Amwc(s)) => {
            let keep = uncut(a.edges(), &s.cut.cut);
            let pairs: Vec<(usize, usize)> = keep.iter().map(|&(_, u, v)| (u, v)).collect();
            for (slot, &(e, u, v)) in keep.iter().enumerate() {
                let connected = reachable(a.node_count(), &pairs, slot, u)[v];
                let kind = match (a.is_partitionable(s.labels[u]), connected) {
                    (false, false) => "split_class",
                    (true, true) => "cycle",
                    _ => continue,
                };
                let mut broken = s.clone();
                broken.cut.cut[e] = true;
                return done(evaluate_amwc(a, &broken).unwrap(), kind, vec![u.min(v), u.max(v)]);
            }
            None
        }
        (ProblemInstance::GraphMatching(gm), Solution::Matching(m)) => {
            let on: Vec<&Assignment> = gm.assignments().iter().filter(|a| m.active.contains(&a.id)).collect();
            for b in gm.assignments().iter().filter(|b| !m.active.contains(&b.id)) {
                let same_left = on.iter().any(|a| a.left == b.left);
                let same_right = on.iter().any(|a| a.right == b.right);
                let (kind, node) = match (same_left, same_right) {
                    (true, false) => ("row", b.left),
                    (false, true) => ("column", b.right),
                    _ => continue,
                };
                let mut broken = m.clone();
                broken.active.insert(b.id);
                return done(evaluate_gm(gm, &broken).unwrap(), kind, vec![node]);
            }
            None
        }
        (ProblemInstance::MultiGraphMatching(mgm), Solution::MultiMatching(_)) => {
            let (first, second) = (mgm.problems().get(&(0, 1))?, mgm.problems().get(&(1, 2))?);
            for a in first.assignments() {
                if let Some(b) = second.assignments().iter().find(|b| b.left == a.right) {
                    let mut matchings: BTreeMap<(usize, usize), GmSolution> =
                        mgm.problems().keys().map(|&key| (key, GmSolution::default())).collect();
                    matchings.insert((0, 1), GmSolution::new([a.id]));
                    matchings.insert((1, 2), GmSolution::new([b.id]));
                    let report = evaluate_mgm(mgm, &MgmSolution { matchings }).unwrap();
                    return done(report, "transitivity", vec![0, 1, 2, a.left, a.right, b.right]);
                }
            }
            None
        }
        (ProblemInstance::CellTracking(ct), Solution::CellTracking(s)) => {
            for (d, flow) in ct.detections().iter().zip(ct.flow()) {
                let mut broken = s.clone();
                let kind = if flow.constrained_in && flow.appearance.is_some() {
                    toggle(&mut broken.appearances, d.id);
                    "flow_in"
                } else if flow.constrained_out && flow.disappearance.is_some() {
                    toggle(&mut broken.disappearances, d.id);
                    "flow_out"
                } else {
                    continue;
                };
                return done(evaluate_cell_tracking(ct, &broken).unwrap(), kind, vec![d.id]);
            }
            None
        }
        (ProblemInstance::Ilp(ilp), Solution::Ilp(x)) => {
            let rows = ilp.constraints();
            for v in 0..x.len() {
                let owners: Vec<usize> =
                    (0..rows.len()).filter(|&r| rows[r].terms.iter().any(|&(w, a)| w == v && a != 0.0)).collect();
                let mut flipped = x.clone();
                flipped[v] = !flipped[v];
                if owners.len() != 1 || rows[owners[0]].is_satisfied(&flipped, 1e-9) {
                    continue;
                }
                return done(evaluate_ilp(ilp, &flipped).unwrap(), "constraint", vec![owners[0]]);
            }
            None
        }
        _ => panic!("solution kind does not match the instance"),
    }
}

fn toggle(set: &mut BTreeSet<usize>, id: usize) {
    if !set.remove(&id) {
        set.insert(id);
    }
}
