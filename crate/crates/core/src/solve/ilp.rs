//! Depth-first enumeration of binary ILP assignments with row bound checks.

use crate::eval::ILP_TOLERANCE;
use crate::model::{IlpInstance, Relation};

use super::SolveError;

/// Per-row activity split into the fixed part and the range the unfixed
/// variables can still add.
#[derive(Clone, Copy)]
struct RowState {
    fixed: f64,
    low: f64,
    high: f64,
}

/// An optimal assignment and its objective.
pub type IlpOptimum = (Vec<bool>, f64);

/// Minimizes over all feasible binary assignments, trying 0 before 1 for
/// each variable in index order; the first optimum found is therefore the
/// lexicographically smallest. Rows are checked as soon as a variable is
/// fixed, and a branch is cut when even the cheapest completion cannot beat
/// the incumbent. `budget` bounds the number of search nodes.
///
/// Returns `None` if no assignment is feasible, else the assignment, its
/// objective and the number of search nodes.
pub fn brute_force_ilp(ilp: &IlpInstance, budget: u64) -> Result<(Option<IlpOptimum>, u64), SolveError> {
    let n = ilp.variable_count();
    let cost = ilp.objective_dense();
    let rows = ilp.constraints();
    let mut incidence: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut state: Vec<RowState> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for &(v, a) in &row.terms {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += a,
                None => merged.push((v, a)),
            }
        }
        let mut s = RowState { fixed: 0.0, low: 0.0, high: 0.0 };
        for (v, a) in merged {
            incidence[v].push((r, a));
            if a < 0.0 {
                s.low += a;
            } else {
                s.high += a;
            }
        }
        state.push(s);
    }
    let tol: Vec<f64> = rows.iter().map(|r| if r.is_integral() { 0.0 } else { ILP_TOLERANCE }).collect();
    let row_ok = |r: usize, s: &RowState| {
        let row = &rows[r];
        let (lo, hi) = (s.fixed + s.low, s.fixed + s.high);
        match row.relation {
            Relation::Le => lo <= row.rhs + tol[r],
            Relation::Ge => hi >= row.rhs - tol[r],
            Relation::Eq => lo <= row.rhs + tol[r] && hi >= row.rhs - tol[r],
        }
    };
    if (0..rows.len()).any(|r| !row_ok(r, &state[r])) {
        // Violated before anything is fixed, e.g. `0 >= 1`.
        return Ok((None, 0));
    }

    let mut x = vec![false; n];
    let mut current = 0.0;
    let mut optimistic: f64 = cost.iter().filter(|&&c| c < 0.0).sum();
    let mut best: Option<(Vec<bool>, f64)> = None;
    let mut nodes = 0u64;
    let mut tried = vec![0u8; n + 1];
    let mut depth = 0;

    // Fixing a variable moves its coefficient out of the free range of every
    // incident row; `sign = -1` undoes that.
    let shift = |v: usize, value: bool, sign: f64, state: &mut [RowState]| {
        for &(r, a) in &incidence[v] {
            let s = &mut state[r];
            if a < 0.0 {
                s.low -= sign * a;
            } else {
                s.high -= sign * a;
            }
            if value {
                s.fixed += sign * a;
            }
        }
    };

    loop {
        if depth == n {
            if best.as_ref().is_none_or(|(_, b)| current < *b) {
                best = Some((x.clone(), current));
            }
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        let v = depth;
        match tried[v] {
            0 => {
                optimistic -= cost[v].min(0.0);
                shift(v, false, 1.0, &mut state);
            }
            1 => {
                shift(v, false, -1.0, &mut state);
                shift(v, true, 1.0, &mut state);
                current += cost[v];
                x[v] = true;
            }
            _ => {
                shift(v, true, -1.0, &mut state);
                current -= cost[v];
                optimistic += cost[v].min(0.0);
                x[v] = false;
                tried[v] = 0;
                if v == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
        }
        tried[v] += 1;
        nodes += 1;
        if nodes > budget {
            return Err(SolveError::BudgetExceeded { space: nodes as u128, unit: "search nodes", budget });
        }
        let feasible = incidence[v].iter().all(|&(r, _)| row_ok(r, &state[r]));
        let promising = best.as_ref().is_none_or(|(_, b)| current + optimistic < *b);
        if feasible && promising {
            depth += 1;
            tried[depth] = 0;
        }
    }
    Ok((best.map(|(x, _)| {
        let value = ilp.objective_value(&x);
        (x, value)
    }), nodes))
}
