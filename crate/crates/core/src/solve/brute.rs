//! Exhaustive minimization over the native solution spaces.
//!
//! Candidates are generated in a fixed order and the incumbent is replaced
//! only by a strictly better objective or, on an exact tie, by a smaller
//! encoding key, so the result does not depend on the enumeration order.

use std::cmp::Ordering;

use crate::eval::{evaluate, evaluate_mgm};
use crate::model::{
    AmwcInstance, AmwcSolution, BottleneckMrfInstance, CellTrackingInstance, CellTrackingSolution, EdgeCutVector,
    GmInstance, GmSolution, MgmInstance, MgmSolution, MrfInstance, MrfLabeling, MulticutInstance, Partition,
    ProblemInstance, Solution, TomographyInstance,
};

use super::ilp::brute_force_ilp;
use super::{SolveError, SolveResult};

/// Bell numbers by the Bell triangle, saturating.
fn bell(n: usize) -> u128 {
    if n > 60 {
        return u128::MAX;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("rows are never empty")];
        for &x in &row {
            let last = *next.last().expect("starts non-empty");
            next.push(last.saturating_add(x));
        }
        row = next;
    }
    row[0]
}

fn product(factors: impl IntoIterator<Item = u128>) -> u128 {
    factors.into_iter().fold(1u128, |acc, f| acc.saturating_mul(f))
}

fn pow2(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        1u128 << n
    }
}

/// Upper bound on the partial matchings of one problem: each left point picks
/// nothing or one of its assignments.
fn gm_space(gm: &GmInstance) -> u128 {
    let mut degree = vec![0u128; gm.left_size()];
    for a in gm.assignments() {
        degree[a.left] += 1;
    }
    product(degree.into_iter().map(|d| d + 1))
}

fn cell_tracking_free(ct: &CellTrackingInstance) -> usize {
    let optional = ct.flow().iter().filter(|f| !f.constrained_in && f.appearance.is_some()).count()
        + ct.flow().iter().filter(|f| !f.constrained_out && f.disappearance.is_some()).count();
    ct.detections().len() + ct.moves().len() + ct.divisions().len() + optional
}

/// Size of the candidate space brute force enumerates, with its unit. For
/// ILPs this is `2^n`; the actual search is pruned and its budget counts
/// search nodes instead.
pub fn search_space(instance: &ProblemInstance) -> (u128, &'static str) {
    let labelings = |mrf: &MrfInstance| product(mrf.label_counts().iter().map(|&k| k as u128));
    match instance {
        ProblemInstance::Mrf(m) => (labelings(m), "labelings"),
        ProblemInstance::BottleneckMrf(b) => (labelings(b.base()), "labelings"),
        ProblemInstance::Tomography(t) => (labelings(t.base()), "labelings"),
        ProblemInstance::Multicut(mc) => (bell(mc.node_count()), "partitions"),
        ProblemInstance::Amwc(a) => {
            let labels = product((0..a.node_count()).map(|_| a.class_count() as u128));
            let splits = if a.partitionable().is_empty() { 1 } else { bell(a.node_count()) };
            (labels.saturating_mul(splits), "labelings x partitions")
        }
        ProblemInstance::GraphMatching(gm) => (gm_space(gm), "partial matchings"),
        ProblemInstance::MultiGraphMatching(mgm) => (product(mgm.problems().values().map(gm_space)), "partial matchings"),
        ProblemInstance::CellTracking(ct) => (pow2(cell_tracking_free(ct)), "binary patterns"),
        ProblemInstance::Ilp(ilp) => (pow2(ilp.variable_count()), "binary patterns"),
    }
}

/// Incumbent with the tie-breaking rule described in the module docs.
struct Best<S, K> {
    entry: Option<(f64, K, S)>,
    count: u64,
}

impl<S, K: Ord> Best<S, K> {
    fn new() -> Self {
        Self { entry: None, count: 0 }
    }

    fn offer(&mut self, objective: f64, key: impl FnOnce() -> K, solution: impl FnOnce() -> S) {
        self.count += 1;
        let better = match &self.entry {
            None => true,
            Some((b, bk, _)) => match objective.total_cmp(b) {
                Ordering::Less => true,
                Ordering::Equal => {
                    let k = key();
                    if k < *bk {
                        self.entry = Some((objective, k, solution()));
                    }
                    return;
                }
                Ordering::Greater => false,
            },
        };
        if better {
            self.entry = Some((objective, key(), solution()));
        }
    }
}

/// Exhaustive minimization. Refuses with `BudgetExceeded` when the candidate
/// space (search nodes for ILPs) is larger than `budget`.
pub fn brute_force(instance: &ProblemInstance, budget: u64) -> Result<SolveResult, SolveError> {
    let (space, unit) = search_space(instance);
    if !matches!(instance, ProblemInstance::Ilp(_)) && space > budget as u128 {
        return Err(SolveError::BudgetExceeded { space, unit, budget });
    }
    let (solution, count) = match instance {
        ProblemInstance::Mrf(m) => labeling_search(m, |labels| finite(m.energy(labels)))?,
        ProblemInstance::BottleneckMrf(b) => labeling_search(b.base(), |labels| bottleneck_value(b, labels))?,
        ProblemInstance::Tomography(t) => labeling_search(t.base(), |labels| tomography_value(t, labels))?,
        ProblemInstance::Multicut(mc) => multicut_search(mc),
        ProblemInstance::Amwc(a) => amwc_search(a)?,
        ProblemInstance::GraphMatching(gm) => gm_search(gm),
        ProblemInstance::MultiGraphMatching(mgm) => mgm_search(mgm)?,
        ProblemInstance::CellTracking(ct) => cell_tracking_search(ct)?,
        ProblemInstance::Ilp(ilp) => {
            let (best, nodes) = brute_force_ilp(ilp, budget)?;
            let (x, _) = best.ok_or(SolveError::Infeasible)?;
            (Solution::Ilp(x), nodes)
        }
    };
    let report = evaluate(instance, &solution)?;
    debug_assert!(report.feasible, "brute force returned an infeasible solution");
    Ok(SolveResult { solution, objective: report.objective, optimal: true, work_counter: count, trajectory: Vec::new() })
}

fn finite(x: f64) -> Option<f64> {
    Some(x).filter(|x| x.is_finite())
}

fn bottleneck_value(b: &BottleneckMrfInstance, labels: &[usize]) -> Option<f64> {
    let base = finite(b.base().energy(labels))?;
    let psi = b.bottleneck();
    let node_max = labels.iter().enumerate().map(|(v, &l)| psi.unary(v)[l]).reduce(f64::max);
    let edge_max = psi.edges().iter().enumerate().map(|(e, edge)| psi.pairwise(e, labels[edge.u], labels[edge.v])).reduce(f64::max);
    let term = match (node_max, edge_max) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    };
    Some(base + term)
}

fn tomography_value(t: &TomographyInstance, labels: &[usize]) -> Option<f64> {
    let mut value = finite(t.base().energy(labels))?;
    for p in t.projections() {
        let sum: usize = p.nodes.iter().map(|&v| labels[v]).sum();
        value += finite(p.costs[sum])?;
    }
    Some(value)
}

/// Odometer over all labelings; `value` returns `None` for infeasible ones.
fn labeling_search(mrf: &MrfInstance, value: impl Fn(&[usize]) -> Option<f64>) -> Result<(Solution, u64), SolveError> {
    let counts = mrf.label_counts();
    let mut labels = vec![0usize; counts.len()];
    let mut best = Best::new();
    loop {
        match value(&labels) {
            Some(v) => best.offer(v, || labels.clone(), || ()),
            None => best.count += 1,
        }
        // Advance the last position first so labelings come in lex order.
        let mut i = labels.len();
        loop {
            if i == 0 {
                let (_, labels, ()) = best.entry.ok_or(SolveError::Infeasible)?;
                return Ok((Solution::Labeling(MrfLabeling::new(labels)), best.count));
            }
            i -= 1;
            labels[i] += 1;
            if labels[i] < counts[i] {
                break;
            }
            labels[i] = 0;
        }
    }
}

/// Restricted growth strings: node `v` joins one of the clusters used by
/// nodes `< v` or opens the next one.
fn multicut_search(mc: &MulticutInstance) -> (Solution, u64) {
    let n = mc.node_count();
    let mut back: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in mc.edges() {
        let (u, v) = e.key();
        back[v].push((u, e.cost));
    }
    let mut best = Best::new();
    let mut labels = vec![0usize; n];
    fn rec(v: usize, open: usize, cost: f64, labels: &mut Vec<usize>, back: &[Vec<(usize, f64)>], best: &mut Best<(), Vec<usize>>) {
        if v == labels.len() {
            best.offer(cost, || labels.clone(), || ());
            return;
        }
        for c in 0..=open {
            labels[v] = c;
            let added: f64 = back[v].iter().filter(|(u, _)| labels[*u] != c).map(|(_, w)| w).sum();
            rec(v + 1, open.max(c + 1), cost + added, labels, back, best);
        }
    }
    if n == 0 {
        best.offer(0.0, Vec::new, || ());
    } else {
        labels[0] = 0;
        rec(1, 1, 0.0, &mut labels, &back, &mut best);
    }
    let (_, labels, ()) = best.entry.expect("at least one partition exists");
    (Solution::Partition(Partition::new(labels).expect("restricted growth strings are contiguous")), best.count)
}

/// Every label vector, and for each every split of the partitionable
/// classes into sub-clusters. An edge is cut when labels or sub-clusters
/// differ.
fn amwc_search(a: &AmwcInstance) -> Result<(Solution, u64), SolveError> {
    let n = a.node_count();
    let k = a.class_count();
    let edges: Vec<(usize, usize, f64)> = a.edges().iter().map(|e| (e.u, e.v, e.cost)).collect();
    let mut best: Best<(), (Vec<usize>, Vec<bool>)> = Best::new();
    if k == 0 && n > 0 {
        return Err(SolveError::Infeasible);
    }
    let mut labels = vec![0usize; n];
    let mut sub = vec![0usize; n];
    let finish = |labels: &[usize], sub: &[usize], best: &mut Best<(), (Vec<usize>, Vec<bool>)>| {
        let mut value: f64 = labels.iter().enumerate().map(|(i, &c)| a.node_costs()[i][c]).sum();
        if !value.is_finite() {
            best.count += 1;
            return;
        }
        let cut: Vec<bool> = edges.iter().map(|&(u, v, _)| labels[u] != labels[v] || sub[u] != sub[v]).collect();
        value += edges.iter().zip(&cut).filter(|(_, &c)| c).map(|(e, _)| e.2).sum::<f64>();
        best.offer(value, || (labels.to_vec(), cut.clone()), || ());
    };
    fn splits(
        v: usize,
        open: &mut Vec<usize>,
        labels: &[usize],
        sub: &mut Vec<usize>,
        a: &AmwcInstance,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if v == labels.len() {
            visit(sub);
            return;
        }
        let class = labels[v];
        if !a.is_partitionable(class) {
            sub[v] = 0;
            splits(v + 1, open, labels, sub, a, visit);
            return;
        }
        let limit = open[class];
        for s in 0..=limit {
            sub[v] = s;
            open[class] = limit.max(s + 1);
            splits(v + 1, open, labels, sub, a, visit);
        }
        open[class] = limit;
    }
    loop {
        let mut open = vec![0usize; k];
        splits(0, &mut open, &labels, &mut sub, a, &mut |sub| finish(&labels, sub, &mut best));
        let mut i = n;
        loop {
            if i == 0 {
                let count = best.count;
                let (_, (labels, cut), ()) = best.entry.ok_or(SolveError::Infeasible)?;
                return Ok((Solution::Amwc(AmwcSolution { labels, cut: EdgeCutVector::new(cut) }), count));
            }
            i -= 1;
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
        }
    }
}

/// All partial matchings as position lists, in order: left point by left
/// point, each either unmatched or using one of its assignments.
fn partial_matchings(gm: &GmInstance) -> Vec<Vec<usize>> {
    let mut by_left: Vec<Vec<usize>> = vec![Vec::new(); gm.left_size()];
    for (pos, a) in gm.assignments().iter().enumerate() {
        by_left[a.left].push(pos);
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut used = vec![false; gm.right_size()];
    fn rec(i: usize, by_left: &[Vec<usize>], gm: &GmInstance, chosen: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if i == by_left.len() {
            out.push(chosen.clone());
            return;
        }
        rec(i + 1, by_left, gm, chosen, used, out);
        for &pos in &by_left[i] {
            let r = gm.assignments()[pos].right;
            if !used[r] {
                used[r] = true;
                chosen.push(pos);
                rec(i + 1, by_left, gm, chosen, used, out);
                chosen.pop();
                used[r] = false;
            }
        }
    }
    rec(0, &by_left, gm, &mut chosen, &mut used, &mut out);
    out
}

fn gm_value(gm: &GmInstance, positions: &[usize]) -> f64 {
    let mut on = vec![false; gm.assignments().len()];
    for &p in positions {
        on[p] = true;
    }
    let linear: f64 = positions.iter().map(|&p| gm.assignments()[p].cost).sum();
    linear + gm.quadratic().iter().filter(|t| on[t.first] && on[t.second]).map(|t| t.cost).sum::<f64>()
}

/// Indicator vector over assignment positions, the encoding used for ties.
fn indicator(len: usize, positions: &[usize]) -> Vec<bool> {
    let mut on = vec![false; len];
    for &p in positions {
        on[p] = true;
    }
    on
}

fn gm_solution(gm: &GmInstance, positions: &[usize]) -> GmSolution {
    GmSolution::new(positions.iter().map(|&p| gm.assignments()[p].id))
}

fn gm_search(gm: &GmInstance) -> (Solution, u64) {
    let mut best = Best::new();
    for m in partial_matchings(gm) {
        best.offer(gm_value(gm, &m), || indicator(gm.assignments().len(), &m), || m.clone());
    }
    let (_, _, m) = best.entry.expect("the empty matching always exists");
    (Solution::Matching(gm_solution(gm, &m)), best.count)
}

/// Cartesian product of per-pair partial matchings, keeping only cycle
/// consistent combinations.
fn mgm_search(mgm: &MgmInstance) -> Result<(Solution, u64), SolveError> {
    let pairs: Vec<(&(usize, usize), &GmInstance)> = mgm.problems().iter().collect();
    let options: Vec<Vec<Vec<usize>>> = pairs.iter().map(|(_, gm)| partial_matchings(gm)).collect();
    let mut pick = vec![0usize; pairs.len()];
    let mut best = Best::new();
    loop {
        let solution = MgmSolution {
            matchings: pairs.iter().zip(&pick).enumerate().map(|(i, ((&key, gm), &c))| (key, gm_solution(gm, &options[i][c]))).collect(),
        };
        let report = evaluate_mgm(mgm, &solution)?;
        if report.feasible {
            let key = || {
                pairs.iter().zip(&pick).enumerate().flat_map(|(i, ((_, gm), &c))| indicator(gm.assignments().len(), &options[i][c])).collect::<Vec<bool>>()
            };
            best.offer(report.objective, key, || solution.clone());
        } else {
            best.count += 1;
        }
        let mut i = pick.len();
        loop {
            if i == 0 {
                let (_, _, s) = best.entry.expect("all-empty matchings are always consistent");
                return Ok((Solution::MultiMatching(s), best.count));
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Enumerates detections, moves, divisions and the optional boundary
/// appearances/disappearances; every other appearance/disappearance is
/// determined by flow conservation.
fn cell_tracking_search(ct: &CellTrackingInstance) -> Result<(Solution, u64), SolveError> {
    let dets = ct.detections();
    let flow = ct.flow();
    let optional_app: Vec<usize> = (0..dets.len()).filter(|&d| !flow[d].constrained_in && flow[d].appearance.is_some()).collect();
    let optional_dis: Vec<usize> = (0..dets.len()).filter(|&d| !flow[d].constrained_out && flow[d].disappearance.is_some()).collect();
    let free = cell_tracking_free(ct);
    let (nd, nm, nv, na) = (dets.len(), ct.moves().len(), ct.divisions().len(), optional_app.len());
    let mut best: Best<CellTrackingSolution, Vec<bool>> = Best::new();
    let mut bits = vec![false; free];
    loop {
        let det = &bits[..nd];
        let mv = &bits[nd..nd + nm];
        let dv = &bits[nd + nm..nd + nm + nv];
        let mut app = vec![false; ct.appearances().len()];
        let mut dis = vec![false; ct.disappearances().len()];
        for (&d, &b) in optional_app.iter().zip(&bits[nd + nm + nv..nd + nm + nv + na]) {
            app[flow[d].appearance.expect("optional appearances exist")] = b;
        }
        for (&d, &b) in optional_dis.iter().zip(&bits[nd + nm + nv + na..]) {
            dis[flow[d].disappearance.expect("optional disappearances exist")] = b;
        }
        let feasible = (|| {
            for (d, f) in flow.iter().enumerate() {
                let on = det[d] as usize;
                if f.constrained_in {
                    let links = f.moves_in.iter().filter(|&&p| mv[p]).count() + f.divisions_in.iter().filter(|&&p| dv[p]).count();
                    match (on.checked_sub(links), f.appearance) {
                        (Some(0), _) => {}
                        (Some(1), Some(p)) => app[p] = true,
                        _ => return false,
                    }
                } else if let Some(p) = f.appearance {
                    if app[p] && on == 0 {
                        return false;
                    }
                }
                if f.constrained_out {
                    let links = f.moves_out.iter().filter(|&&p| mv[p]).count() + f.divisions_out.iter().filter(|&&p| dv[p]).count();
                    match (on.checked_sub(links), f.disappearance) {
                        (Some(0), _) => {}
                        (Some(1), Some(p)) => dis[p] = true,
                        _ => return false,
                    }
                } else if let Some(p) = f.disappearance {
                    if dis[p] && on == 0 {
                        return false;
                    }
                }
            }
            ct.exclusions().iter().all(|set| set.iter().filter(|&&id| det[ct.detection_position(id).expect("validated")]).count() <= 1)
        })();
        if feasible {
            let value: f64 = dets.iter().zip(det).filter(|(_, &b)| b).map(|(d, _)| d.cost).sum::<f64>()
                + ct.appearances().iter().zip(&app).filter(|(_, &b)| b).map(|(x, _)| x.cost).sum::<f64>()
                + ct.disappearances().iter().zip(&dis).filter(|(_, &b)| b).map(|(x, _)| x.cost).sum::<f64>()
                + ct.moves().iter().zip(mv).filter(|(_, &b)| b).map(|(x, _)| x.cost).sum::<f64>()
                + ct.divisions().iter().zip(dv).filter(|(_, &b)| b).map(|(x, _)| x.cost).sum::<f64>();
            let key = || [det, &app[..], &dis[..], mv, dv].concat();
            let solution = || CellTrackingSolution {
                detections: dets.iter().zip(det).filter(|(_, &b)| b).map(|(d, _)| d.id).collect(),
                appearances: ct.appearances().iter().zip(&app).filter(|(_, &b)| b).map(|(x, _)| x.detection).collect(),
                disappearances: ct.disappearances().iter().zip(&dis).filter(|(_, &b)| b).map(|(x, _)| x.detection).collect(),
                moves: ct.moves().iter().zip(mv).filter(|(_, &b)| b).map(|(x, _)| x.id).collect(),
                divisions: ct.divisions().iter().zip(dv).filter(|(_, &b)| b).map(|(x, _)| x.id).collect(),
            };
            best.offer(value, key, solution);
        } else {
            best.count += 1;
        }
        // Binary counter, last bit fastest.
        let mut i = bits.len();
        loop {
            if i == 0 {
                let (_, _, s) = best.entry.ok_or(SolveError::Infeasible)?;
                return Ok((Solution::CellTracking(s), best.count));
            }
            i -= 1;
            bits[i] = !bits[i];
            if bits[i] {
                break;
            }
        }
    }
}
