//! Acceptance criteria, one status line each. Run with
//! `cargo test -p spp-cli --test acceptance`; set `SPP_NETWORK_TESTS=1` to
//! include the dataset checks, which download from the dataset archive.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{TestRng, Values};
use rand::Rng;
use spp_cli::detect::detect_path;
use spp_cli::fetch::{cache_dir, fetch_dataset, DefaultDownloader};
use spp_cli::manifest::DatasetManifest;
use spp_core::eval::{evaluate, evaluate_mgm};
use spp_core::formats::{parse_instance, read_instance, serialize, FormatTag, ParseOptions};
use spp_core::lowering::{
    chordless_cycles, lower_amwc, lower_cell_tracking, lower_gm, lower_mgm, lower_mrf_local_polytope, lower_multicut,
    lower_tomography, LoweredModel,
};
use spp_core::model::{
    instance_stats, Assignment, GmInstance, GmSolution, IlpBuilder, MgmInstance, MgmSolution, MrfEdge, MrfInstance,
    MrfLabeling, MulticutInstance, ProblemInstance, Relation, Solution, TriangleProduct, WeightedEdge,
};
use spp_core::solve::{brute_force, brute_force_ilp, gaec, greedy_edge_fixation, greedy_gm, icm, SolveError, SolveResult, DEFAULT_BUDGET};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
/// `None` when the criterion was not run.
type Criterion = fn() -> Option<Outcome>;
type Generator = Box<dyn Fn(&mut TestRng) -> ProblemInstance>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn round_trip_suite() -> Outcome {
    const PER_FORMAT: u64 = 100;
    let start = Instant::now();
    let shape = |rng: &mut TestRng| -> ProblemInstance {
        let mut b = IlpBuilder::new();
        let mut vars = Vec::new();
        for _ in 0..rng.gen_range(1..6) {
            let t = TriangleProduct {
                x: [rng.gen_range(0..9), rng.gen_range(0..9), rng.gen_range(0..9)],
                y: [rng.gen_range(0..9), rng.gen_range(0..9), rng.gen_range(0..9)],
            };
            if let Ok(v) = b.add_variable(t.variable_name()) {
                vars.push(v);
                b.add_objective_term(v, Values::Wide.draw(rng)).unwrap();
            }
        }
        b.add_constraint("proj", vars.iter().map(|&v| (v, 1.0)), Relation::Eq, 1.0).unwrap();
        b.build().into()
    };
    let generators: Vec<(FormatTag, Generator)> = vec![
        (FormatTag::Mrf, Box::new(|r| common::mrf(r, 6, 4, Values::Wide, 0.05).into())),
        (FormatTag::BottleneckMrf, Box::new(|r| common::bottleneck(r, 5, 3, Values::Wide).into())),
        (FormatTag::Tomography, Box::new(|r| {
            let hard = r.gen();
            common::tomography(r, 6, 3, hard, Values::Wide).into()
        })),
        (FormatTag::Multicut, Box::new(|r| common::multicut(r, 2, 10, 0.4, Values::Wide).into())),
        (FormatTag::Amwc, Box::new(|r| common::amwc(r, 6, 4, Values::Wide).into())),
        (FormatTag::Gm, Box::new(|r| common::gm(r, 4, Values::Wide).into())),
        (FormatTag::Mgm, Box::new(|r| {
            let graphs = r.gen_range(2..=4);
            common::mgm(r, graphs, 3, Values::Wide).into()
        })),
        (FormatTag::CellTracking, Box::new(|r| common::cell_tracking(r, 4, 3, Values::Wide).into())),
        (FormatTag::Lp, Box::new(|r| common::ilp(r, 8, 5, Values::Wide).into())),
        (FormatTag::ShapeMatching, Box::new(shape)),
    ];
    for (format, make) in &generators {
        for seed in 0..PER_FORMAT {
            let instance = make(&mut common::rng(seed));
            let text = serialize(&instance);
            let first = parse_instance(*format, &text, ParseOptions::default()).map_err(|e| format!("{format} seed {seed}: {e}"))?;
            let second = parse_instance(*format, &serialize(&first), ParseOptions::default())
                .map_err(|e| format!("{format} seed {seed}: {e}"))?;
            ensure!(first == second, "{format} seed {seed}: second parse differs");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:.2?}, limit 10s");
    Ok(format!("{PER_FORMAT} instances x {} formats in {elapsed:.2?} (limit 10s)", generators.len()))
}

fn lower(instance: &ProblemInstance, cycle_limit: usize) -> LoweredModel {
    match instance {
        ProblemInstance::Mrf(m) => lower_mrf_local_polytope(m).unwrap(),
        ProblemInstance::Tomography(t) => lower_tomography(t).unwrap(),
        ProblemInstance::Multicut(mc) => lower_multicut(mc, cycle_limit).unwrap(),
        ProblemInstance::Amwc(a) => lower_amwc(a, cycle_limit).unwrap(),
        ProblemInstance::GraphMatching(gm) => lower_gm(gm),
        ProblemInstance::MultiGraphMatching(mgm) => lower_mgm(mgm),
        ProblemInstance::CellTracking(ct) => lower_cell_tracking(ct),
        other => panic!("{:?} has no lowering", other.class()),
    }
}

fn native_optimum(instance: &ProblemInstance) -> Result<Option<f64>, String> {
    match brute_force(instance, DEFAULT_BUDGET) {
        Ok(r) => Ok(Some(r.objective)),
        Err(SolveError::Infeasible) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn ilp_optimum(model: &LoweredModel) -> Result<Option<f64>, String> {
    let (best, _) = brute_force_ilp(&model.ilp, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    Ok(best.map(|(_, v)| v + model.objective_offset))
}

fn exactness_suite() -> Outcome {
    const PER_CLASS: u64 = 50;
    let start = Instant::now();
    let classes: Vec<(&str, Generator)> = vec![
        ("mrf", Box::new(|r| common::mrf(r, 4, 3, Values::Exact, 0.1).into())),
        ("tomography", Box::new(|r| common::tomography(r, 4, 3, true, Values::Exact).into())),
        ("multicut", Box::new(|r| common::multicut(r, 1, 7, 0.5, Values::Exact).into())),
        ("amwc", Box::new(|r| common::amwc(r, 4, 3, Values::Exact).into())),
        ("graph-matching", Box::new(|r| common::gm(r, 3, Values::Exact).into())),
        ("multi-graph-matching", Box::new(|r| common::mgm(r, 3, 2, Values::Exact).into())),
        ("cell-tracking", Box::new(|r| common::cell_tracking(r, 3, 2, Values::Exact).into())),
    ];
    let mut worst: f64 = 0.0;
    for (name, make) in &classes {
        for seed in 0..PER_CLASS {
            let instance = make(&mut common::rng(seed));
            // Cycle limit = |V| covers every chordless cycle.
            let model = lower(&instance, usize::MAX);
            ensure!(model.exact, "{name} seed {seed}: model not exact");
            match (native_optimum(&instance)?, ilp_optimum(&model)?) {
                (Some(a), Some(b)) => {
                    worst = worst.max((a - b).abs());
                    ensure!((a - b).abs() <= TOL, "{name} seed {seed}: native {a}, lowered {b}");
                }
                (None, None) => {}
                (a, b) => return Err(format!("{name} seed {seed}: native {a:?}, lowered {b:?}")),
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}, limit 60s");
    Ok(format!(
        "{PER_CLASS} instances x {} classes, max |native - lowered| = {worst:e} (tol 1e-9), {elapsed:.2?} (limit 60s)",
        classes.len()
    ))
}

fn relaxation_direction() -> Outcome {
    let (mut total, mut covered_count) = (0, 0);
    for seed in 0..200 {
        let mc = common::multicut(&mut common::rng(seed), 3, 8, 0.35, Values::Exact);
        let model = lower_multicut(&mc, 3).unwrap();
        let keys: Vec<(usize, usize)> = mc.edges().iter().map(|e| e.key()).collect();
        let covered = chordless_cycles(mc.node_count(), &keys, usize::MAX).cycles.iter().all(|c| c.len() <= 3);
        let native = native_optimum(&mc.into())?.ok_or("multicut without a solution")?;
        let relaxed = ilp_optimum(&model)?.ok_or("relaxation without a solution")?;
        ensure!(relaxed <= native + TOL, "seed {seed}: relaxed {relaxed} > native {native}");
        if covered {
            ensure!((relaxed - native).abs() <= TOL, "seed {seed}: covered yet relaxed {relaxed} != native {native}");
            covered_count += 1;
        }
        total += 1;
    }
    ensure!(covered_count < total, "no instance had a chordless cycle longer than 3");
    Ok(format!("{total} instances on <= 8 nodes, {covered_count} fully covered and equal, the rest bounded below"))
}

fn hand_traced_oracles() -> Outcome {
    let e = |u, v, cost| WeightedEdge { u, v, cost };
    let mc = MulticutInstance::new(3, vec![e(0, 1, -1.0), e(1, 2, -1.0), e(0, 2, 2.0)]).unwrap();
    let best = brute_force(&mc.clone().into(), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    for (what, r) in [("brute", best), ("gaec", gaec(&mc)), ("gef", greedy_edge_fixation(&mc))] {
        ensure!(r.objective == -2.0, "{what}: objective {}", r.objective);
        let Solution::Partition(p) = r.solution else { return Err(format!("{what}: not a partition")) };
        ensure!(p.members() == vec![vec![0, 2], vec![1]], "{what}: partition {:?}", p.members());
    }
    let chain = MrfInstance::new(
        vec![vec![0.0, 5.0], vec![0.0, 5.0]],
        vec![MrfEdge { u: 0, v: 1, table: vec![0.0, 1.0, 1.0, 0.0] }],
    )
    .unwrap();
    let r = icm(&chain, &MrfLabeling::new(vec![1, 1])).map_err(|e| e.to_string())?;
    ensure!(r.objective == 0.0, "icm chain energy {}", r.objective);
    Ok(format!("triangle -2 with {{0,2}},{{1}} from brute/gaec/gef; icm chain {:?}", r.trajectory))
}

fn heuristic_sanity() -> Outcome {
    fn check(instance: &ProblemInstance, r: &SolveResult, optimum: f64, what: &str, seed: u64) -> Result<(), String> {
        let report = evaluate(instance, &r.solution).map_err(|e| e.to_string())?;
        ensure!(report.feasible, "{what} seed {seed}: infeasible {:?}", report.violations);
        ensure!(r.objective >= optimum - TOL, "{what} seed {seed}: {} below optimum {optimum}", r.objective);
        ensure!((report.objective - r.objective).abs() <= TOL, "{what} seed {seed}: objective misreported");
        Ok(())
    }
    let strictly_decreasing = |t: &[f64]| t.windows(2).all(|w| w[1] < w[0]);
    let mut runs = 0;
    for seed in 0..200 {
        let mut rng = common::rng(seed);
        let mc = common::multicut(&mut rng, 1, 7, 0.5, Values::Exact);
        let instance: ProblemInstance = mc.clone().into();
        let opt = brute_force(&instance, DEFAULT_BUDGET).map_err(|e| e.to_string())?.objective;
        let g = gaec(&mc);
        check(&instance, &g, opt, "gaec", seed)?;
        ensure!(strictly_decreasing(&g.trajectory), "gaec seed {seed}: {:?}", g.trajectory);
        let f = greedy_edge_fixation(&mc);
        check(&instance, &f, opt, "gef", seed)?;
        ensure!(f.trajectory.windows(2).all(|w| w[1] <= w[0] + TOL), "gef seed {seed}: {:?}", f.trajectory);

        let mrf = common::mrf(&mut rng, 4, 3, Values::Exact, 0.0);
        let instance: ProblemInstance = mrf.clone().into();
        let opt = brute_force(&instance, DEFAULT_BUDGET).map_err(|e| e.to_string())?.objective;
        let start = common::random_labeling(&mut rng, &mrf);
        let r = icm(&mrf, &start).map_err(|e| e.to_string())?;
        check(&instance, &r, opt, "icm", seed)?;
        ensure!(strictly_decreasing(&r.trajectory), "icm seed {seed}: {:?}", r.trajectory);

        let gm = common::gm(&mut rng, 3, Values::Exact);
        let instance: ProblemInstance = gm.clone().into();
        let opt = brute_force(&instance, DEFAULT_BUDGET).map_err(|e| e.to_string())?.objective;
        check(&instance, &greedy_gm(&gm), opt, "greedy-gm", seed)?;
        runs += 4;
    }
    Ok(format!("{runs} heuristic runs feasible, >= optimum, monotone move by move"))
}

fn inconsistent_triple() -> Outcome {
    let full = |base: usize| {
        let list = (0..4).map(|i| Assignment { id: base + i, left: i / 2, right: i % 2, cost: 0.0 }).collect();
        GmInstance::new(2, 2, list, vec![]).unwrap()
    };
    let problems: BTreeMap<_, _> = [((0, 1), full(0)), ((1, 2), full(10)), ((0, 2), full(20))].into();
    let mgm = MgmInstance::new(vec![2, 2, 2], problems).unwrap();
    // A1-B2 is id 1, B2-C2 is id 13, A2-C2 is id 23.
    let matchings = [((0, 1), GmSolution::new([1])), ((1, 2), GmSolution::new([13])), ((0, 2), GmSolution::new([23]))].into();
    let report = evaluate_mgm(&mgm, &MgmSolution { matchings }).map_err(|e| e.to_string())?;
    ensure!(!report.feasible, "reported consistent");
    ensure!(
        report.violations.iter().all(|v| v.kind == "transitivity" && v.location[..3] == [0, 1, 2]),
        "unexpected violations {:?}",
        report.violations
    );
    ensure!(report.violations.iter().any(|v| v.location[3..] == [0, 1, 1]), "A1 -> B2 -> C2 chain not named");
    Ok(format!("inconsistent, {} transitivity violations on graphs (0,1,2)", report.violations.len()))
}

fn dataset_stats() -> Option<Outcome> {
    std::env::var_os("SPP_NETWORK_TESTS").filter(|v| !v.is_empty() && v != "0")?;
    let manifest = DatasetManifest::builtin();
    let cache = cache_dir(None);
    let load = |name: &str, format: FormatTag| -> Result<Vec<ProblemInstance>, String> {
        let fetched = fetch_dataset(&manifest, name, &cache, &DefaultDownloader).map_err(|e| format!("{name}: {e}"))?;
        let mut out = Vec::new();
        for path in &fetched.files {
            if detect_path(path).ok() != Some(format) {
                continue;
            }
            let reader = std::io::BufReader::new(std::fs::File::open(path).map_err(|e| e.to_string())?);
            let instance = read_instance(format, reader, ParseOptions::default())
                .map_err(|e| format!("{}: {e}", path.display()))?;
            out.push(instance);
        }
        Ok(out)
    };
    Some((|| {
        let worms = load("gm-worms", FormatTag::Gm)?;
        let max_side = worms
            .iter()
            .map(|i| {
                let s = instance_stats(i);
                s.left_size.unwrap_or(0).max(s.right_size.unwrap_or(0))
            })
            .max()
            .unwrap_or(0);
        ensure!(worms.len() == 30, "gm-worms: {} instances, expected 30", worms.len());
        ensure!(max_side <= 1500, "gm-worms: max(N1, N2) = {max_side} > 1500");
        let synthetic = load("mgm-synthetic", FormatTag::Mgm)?;
        ensure!(synthetic.len() == 160, "mgm-synthetic: {} instances, expected 160", synthetic.len());
        Ok(format!("gm-worms 30 instances, max(N1, N2) = {max_side}; mgm-synthetic 160 instances"))
    })())
}

fn violation_localization() -> Outcome {
    let classes: Vec<(&str, Generator)> = vec![
        ("mrf", Box::new(|r| common::mrf(r, 4, 3, Values::Exact, 0.1).into())),
        ("bottleneck-mrf", Box::new(|r| common::bottleneck(r, 4, 3, Values::Exact).into())),
        ("tomography", Box::new(|r| common::tomography(r, 4, 3, true, Values::Exact).into())),
        ("multicut", Box::new(|r| common::multicut(r, 3, 7, 0.6, Values::Exact).into())),
        ("amwc", Box::new(|r| common::amwc(r, 4, 3, Values::Exact).into())),
        ("graph-matching", Box::new(|r| common::gm(r, 3, Values::Exact).into())),
        ("multi-graph-matching", Box::new(|r| common::mgm(r, 3, 2, Values::Exact).into())),
        ("cell-tracking", Box::new(|r| common::cell_tracking(r, 3, 2, Values::Exact).into())),
        ("ilp", Box::new(|r| common::ilp(r, 8, 4, Values::Exact).into())),
    ];
    let mut counts = Vec::new();
    for (name, make) in &classes {
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = common::rng(seed);
            let instance = make(&mut rng);
            let Ok(base) = brute_force(&instance, DEFAULT_BUDGET) else { continue };
            let Some(m) = common::mutate(&mut rng, &instance, &base.solution) else { continue };
            ensure!(m.report.violations.len() == 1, "{name} seed {seed}: {:?}", m.report.violations);
            let v = &m.report.violations[0];
            ensure!(v.kind == m.kind && v.location == m.location, "{name} seed {seed}: got {} {:?}, mutated {} {:?}", v.kind, v.location, m.kind, m.location);
            hits += 1;
        }
        ensure!(hits >= 20, "{name}: only {hits} mutations");
        counts.push(format!("{name} {hits}"));
    }
    Ok(format!("one violation at the mutated location: {}", counts.join(", ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(u32, &str, Criterion)> = vec![
        (1, "format round-trip", || Some(round_trip_suite())),
        (2, "lowering exactness", || Some(exactness_suite())),
        (3, "relaxation direction", || Some(relaxation_direction())),
        (4, "hand-traced oracles", || Some(hand_traced_oracles())),
        (5, "heuristic sanity", || Some(heuristic_sanity())),
        (6, "cycle-consistency triple", || Some(inconsistent_triple())),
        (7, "dataset stats", dataset_stats),
        (8, "violation localization", || Some(violation_localization())),
    ];
    let mut failed = Vec::new();
    // Written to the real stdout so the lines show up without --nocapture.
    let mut out = std::io::stdout();
    for (n, name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Some(Err(format!("panicked: {}", msg.unwrap_or_default())))
        });
        let line = match outcome {
            Some(Ok(detail)) => format!("criterion {n} PASS {name}: {detail}"),
            Some(Err(detail)) => {
                failed.push(n);
                format!("criterion {n} FAIL {name}: {detail}")
            }
            None => format!("criterion {n} SKIP {name}: set SPP_NETWORK_TESTS=1 to download and check"),
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
