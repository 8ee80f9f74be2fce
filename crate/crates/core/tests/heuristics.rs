//! Primal heuristics never beat the exhaustive optimum, return feasible
//! solutions and move monotonically.

mod common;

use common::Values;
use rand::Rng;
use spp_core::eval::{evaluate, evaluate_gm, evaluate_mrf};
use spp_core::model::{MrfEdge, MrfInstance, MrfLabeling, MulticutInstance, ProblemInstance, Solution, WeightedEdge};
use spp_core::solve::{brute_force, gaec, greedy_edge_fixation, greedy_gm, icm, SolveResult, DEFAULT_BUDGET};

const SEEDS: u64 = 300;
const TOL: f64 = 1e-9;

fn non_increasing(trajectory: &[f64]) -> bool {
    trajectory.windows(2).all(|w| w[1] <= w[0] + TOL)
}

fn strictly_decreasing(trajectory: &[f64]) -> bool {
    trajectory.windows(2).all(|w| w[1] < w[0])
}

fn check_against_optimum(instance: &ProblemInstance, result: &SolveResult, optimum: f64, what: &str, seed: u64) {
    let report = evaluate(instance, &result.solution).unwrap();
    assert!(report.feasible, "{what} seed {seed}: {:?}", report.violations);
    assert!((report.objective - result.objective).abs() <= TOL, "{what} seed {seed}: reported objective is off");
    assert!(result.objective >= optimum - TOL, "{what} seed {seed}: {} below optimum {optimum}", result.objective);
    assert!(!result.optimal);
    assert!((result.trajectory.last().unwrap() - result.objective).abs() <= 1e-6, "{what} seed {seed}");
}

#[test]
fn multicut_heuristics() {
    for seed in 0..SEEDS {
        let mc = common::multicut(&mut common::rng(seed), 1, 7, 0.5, Values::Exact);
        let instance: ProblemInstance = mc.clone().into();
        let optimum = brute_force(&instance, DEFAULT_BUDGET).unwrap().objective;
        let total: f64 = mc.edges().iter().map(|e| e.cost).sum();
        for (what, result) in [("gaec", gaec(&mc)), ("gef", greedy_edge_fixation(&mc))] {
            check_against_optimum(&instance, &result, optimum, what, seed);
            assert_eq!(result.trajectory[0], total, "{what} seed {seed}: starts from all singletons");
        }
        // Every contraction removes a positive weight from the objective.
        assert!(strictly_decreasing(&gaec(&mc).trajectory), "seed {seed}");
        assert!(non_increasing(&greedy_edge_fixation(&mc).trajectory), "seed {seed}");
    }
}

/// At a GAEC fixpoint no pair of clusters is joined by positive total weight.
#[test]
fn gaec_stops_at_nonpositive_cluster_weights() {
    for seed in 0..SEEDS {
        let mc = common::multicut(&mut common::rng(seed), 2, 9, 0.5, Values::Exact);
        let Solution::Partition(p) = gaec(&mc).solution else { panic!() };
        let mut between = std::collections::BTreeMap::new();
        for e in mc.edges() {
            let (a, b) = (p.cluster_of(e.u), p.cluster_of(e.v));
            if a != b {
                *between.entry((a.min(b), a.max(b))).or_insert(0.0) += e.cost;
            }
        }
        assert!(between.values().all(|&w| w <= 0.0), "seed {seed}: {between:?}");
    }
}

#[test]
fn icm_is_a_descent_to_a_local_minimum() {
    for seed in 0..SEEDS {
        let mut rng = common::rng(seed);
        let mrf = common::mrf(&mut rng, 4, 3, Values::Exact, 0.0);
        let instance: ProblemInstance = mrf.clone().into();
        let optimum = brute_force(&instance, DEFAULT_BUDGET).unwrap().objective;
        let start = common::random_labeling(&mut rng, &mrf);
        let result = icm(&mrf, &start).unwrap();
        check_against_optimum(&instance, &result, optimum, "icm", seed);
        assert_eq!(result.trajectory[0], mrf.energy(&start.labels));
        assert!(strictly_decreasing(&result.trajectory), "seed {seed}: {:?}", result.trajectory);
        let Solution::Labeling(labels) = &result.solution else { panic!() };
        // No single-node change improves the result.
        for v in 0..mrf.node_count() {
            for l in 0..mrf.label_counts()[v] {
                let mut other = labels.labels.clone();
                other[v] = l;
                assert!(mrf.energy(&other) >= result.objective - TOL, "seed {seed}: node {v} label {l}");
            }
        }
    }
}

#[test]
fn greedy_gm_is_feasible_and_descends() {
    for seed in 0..SEEDS {
        let gm = common::gm(&mut common::rng(seed), 3, Values::Exact);
        let instance: ProblemInstance = gm.clone().into();
        let optimum = brute_force(&instance, DEFAULT_BUDGET).unwrap().objective;
        let result = greedy_gm(&gm);
        check_against_optimum(&instance, &result, optimum, "greedy-gm", seed);
        assert_eq!(result.trajectory[0], 0.0);
        assert!(strictly_decreasing(&result.trajectory), "seed {seed}");
        let Solution::Matching(m) = &result.solution else { panic!() };
        assert_eq!(evaluate_gm(&gm, m).unwrap().objective, result.objective);
    }
}

#[test]
fn heuristics_are_deterministic() {
    for seed in 0..50 {
        let mut rng = common::rng(seed);
        let mc = common::multicut(&mut rng, 2, 12, 0.4, Values::Exact);
        assert_eq!(gaec(&mc), gaec(&mc));
        assert_eq!(greedy_edge_fixation(&mc), greedy_edge_fixation(&mc));
        let mrf = common::mrf(&mut rng, 6, 4, Values::Exact, 0.0);
        let start = common::random_labeling(&mut rng, &mrf);
        assert_eq!(icm(&mrf, &start).unwrap(), icm(&mrf, &start).unwrap());
        let gm = common::gm(&mut rng, 4, Values::Exact);
        assert_eq!(greedy_gm(&gm), greedy_gm(&gm));
    }
}

/// Reversing the edge list does not change what GAEC computes.
#[test]
fn gaec_ignores_edge_order() {
    for seed in 0..100 {
        let mut rng = common::rng(seed);
        let mc = common::multicut(&mut rng, 2, 8, 0.5, Values::Exact);
        let mut edges = mc.edges().to_vec();
        edges.reverse();
        let reversed = MulticutInstance::new(mc.node_count(), edges).unwrap();
        assert_eq!(gaec(&mc).solution, gaec(&reversed).solution, "seed {seed}");
    }
}

#[test]
fn triangle_oracle() {
    // The five partitions of three nodes, charging the cut edges:
    //   {0}{1}{2}: -1 - 1 + 2 = 0      {0,1}{2}: -1 + 2 = 1
    //   {1,2}{0}:  -1 + 2 = 1          {0,2}{1}: -1 - 1 = -2
    //   {0,1,2}:   0
    let e = |u, v, cost| WeightedEdge { u, v, cost };
    let mc = MulticutInstance::new(3, vec![e(0, 1, -1.0), e(1, 2, -1.0), e(0, 2, 2.0)]).unwrap();
    let best = brute_force(&mc.clone().into(), DEFAULT_BUDGET).unwrap();
    for r in [best, gaec(&mc), greedy_edge_fixation(&mc)] {
        assert_eq!(r.objective, -2.0);
        let Solution::Partition(p) = r.solution else { panic!() };
        assert_eq!(p.members(), vec![vec![0, 2], vec![1]]);
    }
}

#[test]
fn chain_icm_oracle() {
    // E(1,1) = 5 + 5 = 10. Node 0 -> 0 costs 0 + 1 + 5 = 6, then node 1 -> 0
    // costs 0: energy 0.
    let mrf = MrfInstance::new(vec![vec![0.0, 5.0], vec![0.0, 5.0]], vec![MrfEdge { u: 0, v: 1, table: vec![0.0, 1.0, 1.0, 0.0] }]).unwrap();
    let r = icm(&mrf, &MrfLabeling::new(vec![1, 1])).unwrap();
    assert_eq!(r.trajectory, [10.0, 6.0, 0.0]);
    assert_eq!(evaluate_mrf(&mrf, &MrfLabeling::new(vec![0, 0])).unwrap().objective, r.objective);
}

#[test]
fn icm_rejects_bad_start() {
    let mut rng = common::rng(3);
    let mrf = common::mrf(&mut rng, 3, 2, Values::Exact, 0.0);
    let mut labels: Vec<usize> = mrf.label_counts().to_vec();
    assert!(icm(&mrf, &MrfLabeling::new(labels.clone())).is_err());
    labels.push(rng.gen_range(0..2));
    assert!(icm(&mrf, &MrfLabeling::new(labels)).is_err());
}
