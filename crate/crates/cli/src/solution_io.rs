//! Plain-text solution files.
//!
//! - labelings: whitespace-separated labels, one per node
//! - partitions: whitespace-separated cluster ids, one per node; any ids
//! - asymmetric multiway cut: labels on the first line, one 0/1 cut flag per
//!   edge (in file order) on the second
//! - graph matching: active assignment ids, whitespace separated
//! - multi-graph matching: `p k id` lines; pairs without lines are empty
//! - cell tracking: `DET id`, `APP id`, `DISAPP id`, `MOVE id`, `DIV id` lines
//! - ILP: `name value` lines with value 0 or 1, every variable listed
//!
//! `#` starts a comment everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use spp_core::model::{
    AmwcSolution, CellTrackingSolution, EdgeCutVector, GmSolution, IlpInstance, MgmSolution, MrfLabeling,
    Partition, ProblemInstance, Solution,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("solution line {line}: {message}")]
pub struct SolutionError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> SolutionError {
    SolutionError { line, message: message.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let content = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, SolutionError> {
    tok.parse().map_err(|_| err(line, format!("expected {what}, found `{tok}`")))
}

fn integers(text: &str, what: &str) -> Result<Vec<usize>, SolutionError> {
    let mut out = Vec::new();
    for (line, toks) in lines(text) {
        for tok in toks {
            out.push(number(line, tok, what)?);
        }
    }
    Ok(out)
}

/// Reads a solution of the kind that matches the instance class.
pub fn read_solution(instance: &ProblemInstance, text: &str) -> Result<Solution, SolutionError> {
    Ok(match instance {
        ProblemInstance::Mrf(_) | ProblemInstance::BottleneckMrf(_) | ProblemInstance::Tomography(_) => {
            Solution::Labeling(MrfLabeling::new(integers(text, "label")?))
        }
        ProblemInstance::Multicut(_) => Solution::Partition(Partition::canonical(&integers(text, "cluster id")?)),
        ProblemInstance::Amwc(_) => {
            let mut rows = lines(text);
            let labels = match rows.next() {
                Some((line, toks)) => toks.iter().map(|t| number(line, t, "class")).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let cut = match rows.next() {
                Some((line, toks)) => toks
                    .iter()
                    .map(|&t| match t {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(err(line, format!("expected cut flag 0 or 1, found `{t}`"))),
                    })
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            if let Some((line, _)) = rows.next() {
                return Err(err(line, "expected at most two lines (labels, cut flags)"));
            }
            Solution::Amwc(AmwcSolution { labels, cut: EdgeCutVector::new(cut) })
        }
        ProblemInstance::GraphMatching(_) => Solution::Matching(GmSolution::new(integers(text, "assignment id")?)),
        ProblemInstance::MultiGraphMatching(mgm) => {
            let mut matchings: BTreeMap<(usize, usize), GmSolution> =
                mgm.problems().keys().map(|&k| (k, GmSolution::default())).collect();
            for (line, toks) in lines(text) {
                if toks.len() != 3 {
                    return Err(err(line, "expected `p k id`"));
                }
                let p = number(line, toks[0], "graph index")?;
                let k = number(line, toks[1], "graph index")?;
                let id = number(line, toks[2], "assignment id")?;
                matchings.entry((p, k)).or_default().active.insert(id);
            }
            Solution::MultiMatching(MgmSolution { matchings })
        }
        ProblemInstance::CellTracking(_) => {
            let mut s = CellTrackingSolution::default();
            for (line, toks) in lines(text) {
                let [kind, id] = toks[..] else { return Err(err(line, "expected `KIND id`")) };
                let id = number(line, id, "record id")?;
                let set = match kind {
                    "DET" => &mut s.detections,
                    "APP" => &mut s.appearances,
                    "DISAPP" => &mut s.disappearances,
                    "MOVE" => &mut s.moves,
                    "DIV" => &mut s.divisions,
                    _ => return Err(err(line, format!("unknown record kind `{kind}`, expected DET, APP, DISAPP, MOVE or DIV"))),
                };
                set.insert(id);
            }
            Solution::CellTracking(s)
        }
        ProblemInstance::Ilp(ilp) => Solution::Ilp(read_ilp_assignment(ilp, text)?),
    })
}

pub fn read_ilp_assignment(ilp: &IlpInstance, text: &str) -> Result<Vec<bool>, SolutionError> {
    let mut pairs = Vec::new();
    for (line, toks) in lines(text) {
        let [name, value] = toks[..] else { return Err(err(line, "expected `name value`")) };
        pairs.push((name, number::<f64>(line, value, "value")?));
    }
    ilp.assignment_from_pairs(pairs).map_err(|e| err(0, e.to_string()))
}

fn join(values: impl IntoIterator<Item = impl ToString>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Writes a solution in the format [`read_solution`] reads. ILP solutions
/// need the instance for variable names.
pub fn write_solution(solution: &Solution, ilp: Option<&IlpInstance>) -> String {
    let mut out = String::new();
    match solution {
        Solution::Labeling(l) => out = join(&l.labels) + "\n",
        Solution::Partition(p) => out = join(p.clusters()) + "\n",
        Solution::Amwc(s) => {
            let _ = writeln!(out, "{}", join(&s.labels));
            let _ = writeln!(out, "{}", join(s.cut.cut.iter().map(|&c| u8::from(c))));
        }
        Solution::Matching(m) => m.active.iter().for_each(|id| {
            let _ = writeln!(out, "{id}");
        }),
        Solution::MultiMatching(m) => {
            for (&(p, k), s) in &m.matchings {
                for id in &s.active {
                    let _ = writeln!(out, "{p} {k} {id}");
                }
            }
        }
        Solution::CellTracking(s) => {
            for (kind, ids) in [
                ("DET", &s.detections),
                ("APP", &s.appearances),
                ("DISAPP", &s.disappearances),
                ("MOVE", &s.moves),
                ("DIV", &s.divisions),
            ] {
                for id in ids {
                    let _ = writeln!(out, "{kind} {id}");
                }
            }
        }
        Solution::Ilp(x) => {
            let names = ilp.expect("ILP solutions are written with their instance").variables();
            for (name, &bit) in names.iter().zip(x) {
                let _ = writeln!(out, "{name} {}", u8::from(bit));
            }
        }
    }
    out
}
