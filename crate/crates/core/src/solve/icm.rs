//! Iterated conditional modes.

use crate::eval::EvalError;
use crate::model::{MrfInstance, MrfLabeling, Solution};

use super::{SolveError, SolveResult};

/// Sweeps the nodes in index order, moving each to the label with the lowest
/// local energy (unary plus incident pairwise terms) given its neighbours.
/// A node only moves on a strict improvement, and among equally good
/// improvements the smallest label wins. Stops after a sweep without moves.
///
/// The trajectory holds the energy after every move, starting with the
/// initial energy.
pub fn icm(mrf: &MrfInstance, initial: &MrfLabeling) -> Result<SolveResult, SolveError> {
    let n = mrf.node_count();
    if initial.labels.len() != n {
        return Err(EvalError::SizeMismatch { what: "labeling".into(), expected: n, found: initial.labels.len() }.into());
    }
    if let Some(v) = (0..n).find(|&v| initial.labels[v] >= mrf.label_counts()[v]) {
        return Err(EvalError::SizeMismatch {
            what: format!("label of node {v}"),
            expected: mrf.label_counts()[v],
            found: initial.labels[v],
        }
        .into());
    }
    let incidence = mrf.incidence();
    let mut labels = initial.labels.clone();
    let local = |labels: &[usize], v: usize, l: usize| -> f64 {
        let pairwise: f64 = incidence[v]
            .iter()
            .map(|&e| {
                let edge = &mrf.edges()[e];
                if edge.u == v {
                    mrf.pairwise(e, l, labels[edge.v])
                } else {
                    mrf.pairwise(e, labels[edge.u], l)
                }
            })
            .sum();
        mrf.unary(v)[l] + pairwise
    };
    let mut energy = mrf.energy(&labels);
    let mut trajectory = vec![energy];
    let mut work = 0u64;
    loop {
        let mut changed = false;
        for v in 0..n {
            work += 1;
            let current = local(&labels, v, labels[v]);
            let mut best = (current, labels[v]);
            for l in 0..mrf.label_counts()[v] {
                let e = local(&labels, v, l);
                if e < best.0 || (e == best.0 && best.1 != labels[v] && l < best.1) {
                    best = (e, l);
                }
            }
            if best.1 != labels[v] {
                labels[v] = best.1;
                energy = if current.is_finite() { energy - current + best.0 } else { mrf.energy(&labels) };
                trajectory.push(energy);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Report the exactly summed energy rather than the running total.
    let objective = mrf.energy(&labels);
    Ok(SolveResult { solution: Solution::Labeling(MrfLabeling::new(labels)), objective, optimal: false, work_counter: work, trajectory })
}
