//! Greedy activation heuristic for graph matching.

use crate::model::{GmInstance, GmSolution, Solution};

use super::SolveResult;

/// Repeatedly activates the assignment with the most negative marginal cost
/// (its linear cost plus quadratic terms with already active assignments)
/// among those whose points are still free. Ties go to the earlier
/// assignment. Stops when no activation lowers the objective.
pub fn greedy_gm(gm: &GmInstance) -> SolveResult {
    let assignments = gm.assignments();
    let adjacency = gm.quadratic_adjacency();
    let mut marginal: Vec<f64> = assignments.iter().map(|a| a.cost).collect();
    let mut left_used = vec![false; gm.left_size()];
    let mut right_used = vec![false; gm.right_size()];
    let mut active = vec![false; assignments.len()];
    let mut objective = 0.0;
    let mut trajectory = vec![0.0];
    let mut work = 0u64;
    loop {
        let mut pick: Option<(f64, usize)> = None;
        for (pos, a) in assignments.iter().enumerate() {
            if active[pos] || left_used[a.left] || right_used[a.right] {
                continue;
            }
            work += 1;
            if marginal[pos] < 0.0 && pick.is_none_or(|(m, _)| marginal[pos] < m) {
                pick = Some((marginal[pos], pos));
            }
        }
        let Some((delta, pos)) = pick else { break };
        active[pos] = true;
        left_used[assignments[pos].left] = true;
        right_used[assignments[pos].right] = true;
        objective += delta;
        trajectory.push(objective);
        for &(other, cost) in &adjacency[pos] {
            marginal[other] += cost;
        }
    }
    let solution = GmSolution::new(assignments.iter().zip(&active).filter(|(_, &on)| on).map(|(a, _)| a.id));
    SolveResult { solution: Solution::Matching(solution), objective, optimal: false, work_counter: work, trajectory }
}
